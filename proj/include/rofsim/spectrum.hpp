/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "rofsim/common.hpp"
#include "rofsim/fft.hpp"
#include "rofsim/waveform.hpp"

namespace rofsim {

enum class SpectralWindow { kHann, kRectangular };

// One-sided-density view of a complex envelope: bins ascend from -fs/2, values
// are W/Hz so that sum(psd) * bin_width recovers the waveform power.
struct Spectrum {
  std::vector<double> freq_offset_hz;
  std::vector<double> psd_w_per_hz;
  double bin_width_hz = 0.0;
  double envelope_ref_hz = 0.0;

  double integrated_power_w() const {
    double acc = 0.0;
    for (double v : psd_w_per_hz) acc += v;
    return acc * bin_width_hz;
  }

  // Power in [f_lo, f_hi) measured as offsets from envelope_ref_hz.
  double band_power_w(double f_lo, double f_hi) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < freq_offset_hz.size(); ++k) {
      if (freq_offset_hz[k] >= f_lo && freq_offset_hz[k] < f_hi) {
        acc += psd_w_per_hz[k];
      }
    }
    return acc * bin_width_hz;
  }
};

// Welch's method with 50% overlap by default. Normalization uses the window
// mean-square so the integral of the estimate equals the waveform power.
inline Spectrum psd_estimate(const SampledWaveform& wf, std::size_t segment_len = 4096,
                             double overlap_fraction = 0.5,
                             SpectralWindow window = SpectralWindow::kHann) {
  validate(wf, "psd_estimate");
  if (overlap_fraction < 0.0 || overlap_fraction >= 1.0) {
    throw ContractViolation("psd_estimate: overlap_fraction must be in [0,1)");
  }
  const std::size_t n = wf.samples.size();
  std::size_t seg = detail::next_pow2(segment_len);
  if (seg != segment_len) {
    throw ContractViolation("psd_estimate: segment_len must be a power of two");
  }
  while (seg > n) seg >>= 1;
  if (seg == 0) throw ContractViolation("psd_estimate: waveform shorter than one bin");

  std::vector<double> win(seg);
  double win_msq = 0.0;
  for (std::size_t k = 0; k < seg; ++k) {
    win[k] = (window == SpectralWindow::kHann)
                 ? 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) /
                                        static_cast<double>(seg))
                 : 1.0;
    win_msq += win[k] * win[k];
  }
  win_msq /= static_cast<double>(seg);

  std::size_t hop = static_cast<std::size_t>(
      static_cast<double>(seg) * (1.0 - overlap_fraction) + 0.5);
  if (hop == 0) hop = 1;

  std::vector<double> accum(seg, 0.0);
  std::vector<cplx> buf(seg);
  std::size_t n_segments = 0;
  for (std::size_t start = 0; start + seg <= n; start += hop) {
    for (std::size_t k = 0; k < seg; ++k) buf[k] = wf.samples[start + k] * win[k];
    detail::fft_inplace(buf, false);
    for (std::size_t k = 0; k < seg; ++k) accum[k] += std::norm(buf[k]);
    ++n_segments;
    if (start + seg == n) break;
  }
  if (n_segments == 0) throw ContractViolation("psd_estimate: no full segment fits");

  const double fs = wf.sample_rate_hz;
  const double scale =
      1.0 / (static_cast<double>(n_segments) * static_cast<double>(seg) * win_msq * fs);

  Spectrum out;
  out.bin_width_hz = fs / static_cast<double>(seg);
  out.envelope_ref_hz = wf.envelope_ref_hz;
  out.freq_offset_hz.resize(seg);
  out.psd_w_per_hz.resize(seg);
  // fftshift: bins ascend from -fs/2.
  for (std::size_t k = 0; k < seg; ++k) {
    const std::size_t src = (k + seg / 2) % seg;
    out.freq_offset_hz[k] = detail::fft_bin_offset_hz(src, seg, fs);
    out.psd_w_per_hz[k] = accum[src] * scale;
  }
  return out;
}

// Width between the outermost bins whose density reaches peak + threshold_db.
inline double occupied_bandwidth_hz(const Spectrum& spec, double threshold_db = -40.0) {
  if (spec.psd_w_per_hz.empty()) {
    throw ContractViolation("occupied_bandwidth_hz: empty spectrum");
  }
  const double peak = *std::max_element(spec.psd_w_per_hz.begin(), spec.psd_w_per_hz.end());
  if (!(peak > 0.0)) return 0.0;
  const double floor = peak * db_to_linear(threshold_db);
  std::size_t lo = spec.psd_w_per_hz.size();
  std::size_t hi = 0;
  for (std::size_t k = 0; k < spec.psd_w_per_hz.size(); ++k) {
    if (spec.psd_w_per_hz[k] >= floor) {
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  }
  return spec.freq_offset_hz[hi] - spec.freq_offset_hz[lo] + spec.bin_width_hz;
}

}  // namespace rofsim
