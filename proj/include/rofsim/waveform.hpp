/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "rofsim/common.hpp"
#include "rofsim/rng.hpp"

namespace rofsim {

// Complex-baseband (envelope) representation of a real RF waveform centred on
// envelope_ref_hz. Sample k of `samples` is the envelope at time k/sample_rate;
// the physical waveform is Re{ samples[k] * exp(j*2*pi*envelope_ref_hz*t) }.
// Electrical power conventions treat mean |sample|^2 as watts (load resistance
// is folded in where photocurrents are converted, see photonics.hpp).
struct SampledWaveform {
  std::vector<cplx> samples;
  double sample_rate_hz = 0.0;
  double envelope_ref_hz = 0.0;
};

inline void validate(const SampledWaveform& wf, const char* where) {
  if (wf.samples.empty()) {
    throw ContractViolation(std::string(where) + ": waveform has no samples");
  }
  if (!(wf.sample_rate_hz > 0.0)) {
    throw ContractViolation(std::string(where) + ": sample_rate_hz must be > 0");
  }
  if (wf.envelope_ref_hz < 0.0) {
    throw ContractViolation(std::string(where) + ": envelope_ref_hz must be >= 0");
  }
}

inline bool all_finite(const SampledWaveform& wf) {
  for (const cplx& v : wf.samples) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

// Mean-square sample value (average envelope power).
inline double power(const SampledWaveform& wf) {
  validate(wf, "power");
  double acc = 0.0;
  for (const cplx& v : wf.samples) acc += std::norm(v);
  return acc / static_cast<double>(wf.samples.size());
}

inline SampledWaveform scaled(const SampledWaveform& wf, cplx gain) {
  SampledWaveform out = wf;
  for (cplx& v : out.samples) v *= gain;
  return out;
}

// Adds circularly symmetric white Gaussian noise of total power
// noise_power_w (mean |n|^2 per sample, i.e. spread across the whole
// simulation bandwidth). noise_power_w == 0 returns the input unchanged.
inline SampledWaveform add_awgn(const SampledWaveform& wf, double noise_power_w,
                                RngHandle rng_handle) {
  validate(wf, "add_awgn");
  if (noise_power_w < 0.0 || !std::isfinite(noise_power_w)) {
    throw ContractViolation("add_awgn: noise_power_w must be finite and >= 0");
  }
  SampledWaveform out = wf;
  if (noise_power_w == 0.0) return out;
  NoiseRng rng(rng_handle);
  for (cplx& v : out.samples) v += rng.cscg(noise_power_w);
  return out;
}

}  // namespace rofsim
