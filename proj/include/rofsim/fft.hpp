/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rofsim/common.hpp"
#include "rofsim/waveform.hpp"

namespace rofsim::detail {

// Fixed radix-2 transform. Deliberately not FFTW: identical code path every
// call means bit-identical artifacts regardless of threading or planner state.

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline void fft_inplace(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_pow2(n)) {
    throw ContractViolation("fft_inplace: size must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<cplx> tw;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    tw.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
      tw[k] = cplx(std::cos(ang * static_cast<double>(k)),
                   std::sin(ang * static_cast<double>(k)));
    }
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + half] * tw[k];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (cplx& x : a) x *= inv_n;
  }
}

// Signed frequency offset of FFT bin k for an nfft-point transform at rate fs.
inline double fft_bin_offset_hz(std::size_t k, std::size_t nfft, double fs) {
  const double df = fs / static_cast<double>(nfft);
  return (k < nfft / 2) ? static_cast<double>(k) * df
                        : (static_cast<double>(k) - static_cast<double>(nfft)) * df;
}

// Zero-padding headroom for overlap-free spectral filtering. All masks used in
// the chain have impulse responses far shorter than this, so circular wrap is
// negligible.
inline constexpr std::size_t kFilterPadSamples = 4096;

// y = ifft( fft(zero-padded x) .* response(bin offset) ), truncated back to the
// input length. `response` maps a signed frequency offset from envelope_ref_hz
// to a complex gain.
template <typename F>
SampledWaveform apply_frequency_response(const SampledWaveform& wf, F&& response) {
  validate(wf, "apply_frequency_response");
  const std::size_t n = wf.samples.size();
  const std::size_t nfft = next_pow2(n + kFilterPadSamples);
  std::vector<cplx> buf(nfft, cplx(0.0, 0.0));
  std::copy(wf.samples.begin(), wf.samples.end(), buf.begin());
  fft_inplace(buf, false);
  for (std::size_t k = 0; k < nfft; ++k) {
    buf[k] *= response(fft_bin_offset_hz(k, nfft, wf.sample_rate_hz));
  }
  fft_inplace(buf, true);
  SampledWaveform out;
  out.sample_rate_hz = wf.sample_rate_hz;
  out.envelope_ref_hz = wf.envelope_ref_hz;
  out.samples.assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

}  // namespace rofsim::detail
