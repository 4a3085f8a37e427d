/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <string>

#include "rofsim/common.hpp"
#include "rofsim/photonics.hpp"
#include "rofsim/rng.hpp"
#include "rofsim/waveform.hpp"

namespace rofsim {

// Optically injection-locked VCSEL used as a reflective transponder: the
// incident downlink carrier locks the cavity, the device re-emits it toward
// the remote unit, and the same cavity photodetects the intensity envelope for
// local monitoring. Behavioral model: a locking-range law decides lock, the
// reflected signal is a power-shifted copy, and detection reuses the
// square-law photodiode arithmetic with a resonant-cavity responsivity plus an
// injection-strength noise penalty.
class VcselParams {
 public:
  struct Config {
    double bias_ma = 5.0;                     // forward DC bias, no switching
    double free_running_offset_ghz = 1.0;     // |slave - master| detuning
    double locking_coeff_ghz = 10.0;
    double detector_responsivity_a_w = 0.3;
    double reflection_gain_db = 0.0;
    double detector_bandwidth_hz = 10e9;
    double injection_ref_dbm = 7.2;           // knee of the injection penalty
    double injection_penalty_db_per_db = 0.5;
    double emission_power_dbm = 0.0;          // slave output, sets the lock ratio
  };

  VcselParams() : VcselParams(Config{}) {}

  explicit VcselParams(const Config& c) : c_(c) {
    if (!(c.bias_ma > 0.0)) {
      throw ConfigError("vcsel.bias_ma must be > 0: reverse bias is not a valid "
                        "operating point for this device");
    }
    if (!(c.locking_coeff_ghz > 0.0)) {
      throw ConfigError("vcsel.locking_coeff_ghz must be > 0");
    }
    if (!(c.detector_responsivity_a_w > 0.0)) {
      throw ConfigError("vcsel.detector_responsivity_a_w must be > 0");
    }
    if (!(c.detector_bandwidth_hz > 0.0)) {
      throw ConfigError("vcsel.detector_bandwidth_hz must be > 0");
    }
    if (c.free_running_offset_ghz < 0.0) {
      throw ConfigError("vcsel.free_running_offset_ghz must be >= 0");
    }
    if (c.injection_penalty_db_per_db < 0.0) {
      throw ConfigError("vcsel.injection_penalty_db_per_db must be >= 0");
    }
  }

  double bias_ma() const { return c_.bias_ma; }
  double free_running_offset_ghz() const { return c_.free_running_offset_ghz; }
  double locking_coeff_ghz() const { return c_.locking_coeff_ghz; }
  double detector_responsivity_a_w() const { return c_.detector_responsivity_a_w; }
  double reflection_gain_db() const { return c_.reflection_gain_db; }
  double detector_bandwidth_hz() const { return c_.detector_bandwidth_hz; }
  double injection_ref_dbm() const { return c_.injection_ref_dbm; }
  double injection_penalty_db_per_db() const { return c_.injection_penalty_db_per_db; }
  double emission_power_dbm() const { return c_.emission_power_dbm; }
  const Config& config() const { return c_; }

 private:
  Config c_;
};

struct LockState {
  bool locked = false;
  double margin_ghz = 0.0;          // half-range minus detuning
  double injection_ratio_db = 0.0;  // injected power over slave output power
};

class LockError : public std::runtime_error {
 public:
  LockError(const std::string& stage, const LockState& state)
      : std::runtime_error(stage + ": injection lock lost (margin " +
                           std::to_string(state.margin_ghz) + " GHz at ratio " +
                           std::to_string(state.injection_ratio_db) + " dB)"),
        stage_(stage),
        state_(state) {}

  const std::string& stage() const { return stage_; }
  const LockState& state() const { return state_; }

 private:
  std::string stage_;
  LockState state_;
};

// Locking-range law: half-range = locking_coeff * sqrt(P_inj / P_out), i.e.
// locking_coeff * 10^(ratio_db/20). Locked when the free-running detuning
// fits inside the half-range.
inline LockState lock_state(double injected_power_dbm, double vcsel_output_power_dbm,
                            const VcselParams& params) {
  LockState s;
  s.injection_ratio_db = injected_power_dbm - vcsel_output_power_dbm;
  const double half_range_ghz =
      params.locking_coeff_ghz() * db_to_amplitude(s.injection_ratio_db);
  s.margin_ghz = half_range_ghz - params.free_running_offset_ghz();
  s.locked = s.margin_ghz >= 0.0;
  return s;
}

// Noise penalty for weak injection: penalty_db_per_db decibels of detected-path
// SNR lost per decibel of incident power below the reference knee.
inline double injection_penalty_db(double incident_power_dbm, const VcselParams& params) {
  return params.injection_penalty_db_per_db() *
         std::max(0.0, params.injection_ref_dbm() - incident_power_dbm);
}

struct TransactResult {
  OpticalSignal reflected;
  SampledWaveform detected;
  LockState lock;
};

// Simultaneous re-emission and detection of the incident downlink signal.
// Throws LockError when the injection ratio leaves the locking range.
inline TransactResult transact(const OpticalSignal& incident, const VcselParams& params,
                               RngHandle rng_handle, const NoiseOptions& noise = {},
                               DiagnosticList* diag = nullptr) {
  validate(incident.envelope, "oil_vcsel::transact");
  const double quantum_limit = kElementaryChargeC * incident.wavelength_nm * 1e-9 /
                               (kPlanckJS * kSpeedOfLightMPerS);
  if (params.detector_responsivity_a_w() > quantum_limit) {
    throw ConfigError("vcsel.detector_responsivity_a_w exceeds the quantum limit at " +
                      std::to_string(incident.wavelength_nm) + " nm");
  }

  TransactResult out;
  out.lock = lock_state(incident.avg_power_dbm, params.emission_power_dbm(), params);
  if (!out.lock.locked) {
    throw LockError("oil_vcsel", out.lock);
  }

  // Re-emission: envelope preserved sample for sample, power moved by the
  // reflection gain; the locked slave inherits the master's coherence, so the
  // OSNR/RIN bookkeeping rides along.
  out.reflected = incident;
  out.reflected.avg_power_dbm += params.reflection_gain_db();

  // Resonant-cavity detection of the same intensity envelope.
  const double fs = incident.envelope.sample_rate_hz;
  if (incident.envelope.envelope_ref_hz + fs / 2.0 > params.detector_bandwidth_hz()) {
    add_diag(diag, "oil_vcsel", "detector_bandwidth",
             "signal band extends beyond the cavity detector bandwidth");
  }
  const double p_w = dbm_to_watt(incident.avg_power_dbm);
  const double i_dc = params.detector_responsivity_a_w() * p_w;
  const double amp = i_dc * incident.mod_index * std::sqrt(kRfSystemLoadOhm);
  out.detected = incident.envelope;
  for (cplx& v : out.detected.samples) v *= amp;

  if (noise.enabled) {
    const double penalty_db = injection_penalty_db(incident.avg_power_dbm, params);
    if (penalty_db > 0.0) {
      add_diag(diag, "oil_vcsel", "injection_penalty",
               "weak injection adds " + std::to_string(penalty_db) +
                   " dB of detected-path noise");
    }
    const double psd = detail::detection_noise_psd(
        i_dc, kRfSystemLoadOhm, 290.0, incident.rin_db_per_hz, incident.osnr_linear,
        noise.rx_floor_excess_db);
    out.detected =
        add_awgn(out.detected, psd * db_to_linear(penalty_db) * fs, rng_handle);
  }
  return out;
}

}  // namespace rofsim
