/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rofsim/common.hpp"
#include "rofsim/fft.hpp"
#include "rofsim/rng.hpp"
#include "rofsim/waveform.hpp"

namespace rofsim {

// Intensity-modulated optical carrier in envelope form. The physical intensity
// is I(t) = P_avg * (1 + mod_index * Re{envelope(t) * exp(j*2*pi*f_rf*t)});
// `envelope` leaves the modulator with unit mean-square value and may shrink
// through dispersive fading. Electrical waveforms derived from it use the
// convention that mean |sample|^2 is power in watts (load resistance folded in
// at photodetection), which keeps every budget formula in plain W/Hz terms.
struct OpticalSignal {
  double avg_power_dbm = 0.0;
  double wavelength_nm = 1559.79;
  double mod_index = 0.0;
  SampledWaveform envelope;
  double osnr_linear = infinity();  // in kOsnrRefBandwidthHz
  double rin_db_per_hz = -infinity();
};

struct LaserParams {
  double power_dbm = 6.0;
  double wavelength_nm = 1559.79;  // 192.2 THz
  double rin_db_per_hz = -150.0;
};

struct MzmParams {
  double half_wave_drive_ratio = 0.25;  // peak drive as a fraction of V_pi
  double insertion_loss_db = 5.0;
};

struct FiberParams {
  double length_km = 0.0;
  double atten_db_per_km = 0.2;
  double dispersion_ps_nm_km = 17.0;
};

struct PdParams {
  double responsivity_a_w = 0.6;
  double bandwidth_hz = 43e9;
  double load_ohm = 50.0;
  double temperature_k = 290.0;
};

struct RfAmpParams {
  double gain_db = 24.0;
  double nf_db = 1.9;
  double band_lo_hz = 4.4e9;
  double band_hi_hz = 5.4e9;
};

// Master switch plus the calibrated excess on the signal-independent receiver
// floor (PIN thermal + RF-amp input-referred noise). Shot, RIN and ASE-beat
// terms stay physical: scaling them too would cap the achievable SNR at the
// RIN limit no matter the responsivity.
struct NoiseOptions {
  bool enabled = true;
  double rx_floor_excess_db = 0.0;
};

inline void validate(const FiberParams& p) {
  if (p.length_km < 0.0) throw ConfigError("fiber.length_km must be >= 0");
  if (p.atten_db_per_km < 0.0) throw ConfigError("fiber.atten_db_per_km must be >= 0");
}

inline void validate(const PdParams& p, double wavelength_nm) {
  if (!(p.responsivity_a_w > 0.0)) throw ConfigError("pin.responsivity_a_w must be > 0");
  const double quantum_limit =
      kElementaryChargeC * wavelength_nm * 1e-9 / (kPlanckJS * kSpeedOfLightMPerS);
  if (p.responsivity_a_w > quantum_limit) {
    throw ConfigError("pin.responsivity_a_w exceeds the quantum limit (" +
                      std::to_string(quantum_limit) + " A/W at " +
                      std::to_string(wavelength_nm) + " nm)");
  }
  if (!(p.bandwidth_hz > 0.0)) throw ConfigError("pin.bandwidth_hz must be > 0");
  if (!(p.load_ohm > 0.0)) throw ConfigError("pin.load_ohm must be > 0");
  if (!(p.temperature_k > 0.0)) throw ConfigError("pin.temperature_k must be > 0");
}

inline void validate(const RfAmpParams& p) {
  if (!(p.band_lo_hz >= 0.0) || !(p.band_hi_hz > p.band_lo_hz)) {
    throw ConfigError("rf amp band must satisfy 0 <= band_lo < band_hi");
  }
  if (p.nf_db < 0.0) throw ConfigError("rf amp nf_db must be >= 0");
}

namespace detail {

inline double rms(const std::vector<cplx>& v) {
  double acc = 0.0;
  for (const cplx& x : v) acc += std::norm(x);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace detail

// Quadrature-biased Mach-Zehnder modulator. Small drives map linearly with
// modulation index (pi/2) * ratio * rms(drive); past ratio 0.3 the first-zone
// Bessel envelope 2*J1(xi*|u|)*exp(j*arg u) is used, which reproduces odd-order
// intermodulation of the sine transfer. Average output power is the laser
// power minus the 3 dB quadrature split minus insertion loss.
inline OpticalSignal mzm_modulate(const SampledWaveform& drive, const LaserParams& laser,
                                  const MzmParams& mzm, DiagnosticList* diag = nullptr) {
  validate(drive, "mzm_modulate");
  if (!(mzm.half_wave_drive_ratio > 0.0) || mzm.half_wave_drive_ratio > 1.0) {
    throw ContractViolation("mzm_modulate: half_wave_drive_ratio must be in (0, 1]");
  }
  if (mzm.insertion_loss_db < 0.0) {
    throw ContractViolation("mzm_modulate: insertion_loss_db must be >= 0");
  }
  const double xi = 0.5 * kPi * mzm.half_wave_drive_ratio;
  OpticalSignal out;
  out.wavelength_nm = laser.wavelength_nm;
  out.rin_db_per_hz = laser.rin_db_per_hz;
  out.avg_power_dbm =
      laser.power_dbm - 10.0 * std::log10(2.0) - mzm.insertion_loss_db;
  out.envelope.sample_rate_hz = drive.sample_rate_hz;
  out.envelope.envelope_ref_hz = drive.envelope_ref_hz;
  out.envelope.samples.resize(drive.samples.size());
  if (mzm.half_wave_drive_ratio <= 0.3) {
    for (std::size_t k = 0; k < drive.samples.size(); ++k) {
      out.envelope.samples[k] = xi * drive.samples[k];
    }
  } else {
    add_diag(diag, "mzm", "mzm_compression",
             "drive ratio above 0.3; Bessel envelope map engaged");
    for (std::size_t k = 0; k < drive.samples.size(); ++k) {
      const double mag = std::abs(drive.samples[k]);
      if (mag == 0.0) {
        out.envelope.samples[k] = cplx(0.0, 0.0);
        continue;
      }
      const double w = 2.0 * std::cyl_bessel_j(1, xi * mag);
      out.envelope.samples[k] = drive.samples[k] * (w / mag);
    }
  }
  double m = detail::rms(out.envelope.samples);
  if (!(m > 0.0)) throw ContractViolation("mzm_modulate: drive has zero power");
  if (m > 1.0) {
    add_diag(diag, "mzm", "mzm_overmodulation",
             "modulation index clamped to 1 from " + std::to_string(m));
    m = 1.0;
  }
  const double inv = 1.0 / m;
  for (cplx& v : out.envelope.samples) v *= inv;
  out.mod_index = m;
  return out;
}

// Direct modulation for the return path: same envelope bookkeeping as the MZM
// but with an explicitly configured modulation index.
inline OpticalSignal direct_modulate(const SampledWaveform& drive, const LaserParams& laser,
                                     double mod_index, DiagnosticList* diag = nullptr) {
  validate(drive, "direct_modulate");
  if (!(mod_index > 0.0)) throw ContractViolation("direct_modulate: mod_index must be > 0");
  if (mod_index > 1.0) {
    add_diag(diag, "uplink_tx", "overmodulation", "mod_index clamped to 1");
    mod_index = 1.0;
  }
  OpticalSignal out;
  out.wavelength_nm = laser.wavelength_nm;
  out.rin_db_per_hz = laser.rin_db_per_hz;
  out.avg_power_dbm = laser.power_dbm;
  out.mod_index = mod_index;
  out.envelope = drive;
  const double m = detail::rms(out.envelope.samples);
  if (!(m > 0.0)) throw ContractViolation("direct_modulate: drive has zero power");
  const double inv = 1.0 / m;
  for (cplx& v : out.envelope.samples) v *= inv;
  return out;
}

// Chromatic-dispersion power fading of an intensity-modulated subcarrier at
// absolute RF frequency f on standard single-mode fiber.
inline double fiber_fading_factor(const FiberParams& fiber, double wavelength_nm,
                                  double rf_freq_hz) {
  const double lambda_m = wavelength_nm * 1e-9;
  const double d_s_per_m2 = fiber.dispersion_ps_nm_km * 1e-6;
  const double length_m = fiber.length_km * 1e3;
  const double arg = kPi * lambda_m * lambda_m * d_s_per_m2 * length_m * rf_freq_hz *
                     rf_freq_hz / kSpeedOfLightMPerS;
  return std::cos(arg);
}

// Attenuation plus per-bin dispersive fading. Passive loss hits signal and
// accumulated ASE alike, so the OSNR ledger is unchanged.
inline OpticalSignal fiber_propagate(const OpticalSignal& sig, const FiberParams& fiber) {
  validate(fiber);
  validate(sig.envelope, "fiber_propagate");
  OpticalSignal out = sig;
  out.avg_power_dbm -= fiber.atten_db_per_km * fiber.length_km;
  if (fiber.length_km == 0.0 || fiber.dispersion_ps_nm_km == 0.0) return out;
  const double fs = sig.envelope.sample_rate_hz;
  const double ref = sig.envelope.envelope_ref_hz;
  // Fast path when the factor is flat across the band.
  const double edge_lo = fiber_fading_factor(fiber, sig.wavelength_nm,
                                             std::abs(ref - fs / 2.0));
  const double edge_hi = fiber_fading_factor(fiber, sig.wavelength_nm, ref + fs / 2.0);
  const double centre = fiber_fading_factor(fiber, sig.wavelength_nm, ref);
  if (std::abs(edge_lo - centre) < 1e-12 && std::abs(edge_hi - centre) < 1e-12) {
    for (cplx& v : out.envelope.samples) v *= centre;
    return out;
  }
  out.envelope = detail::apply_frequency_response(
      sig.envelope, [&](double offset_hz) -> cplx {
        const double f_abs = std::abs(ref + offset_hz);
        return cplx(fiber_fading_factor(fiber, sig.wavelength_nm, f_abs), 0.0);
      });
  return out;
}

// OSNR bookkeeping per amplifier: stage OSNR = P_in / (F * h * nu * B_ref),
// cascaded 1/out = 1/in + 1/stage. Finite for any gain, including 0 dB.
inline OpticalSignal edfa_amplify(const OpticalSignal& sig, double gain_db, double nf_db) {
  if (nf_db < 0.0) throw ContractViolation("edfa_amplify: nf_db must be >= 0");
  if (gain_db < 0.0) throw ContractViolation("edfa_amplify: gain_db must be >= 0");
  OpticalSignal out = sig;
  const double p_in_w = dbm_to_watt(sig.avg_power_dbm);
  const double f_lin = db_to_linear(nf_db);
  const double nu = optical_frequency_hz(sig.wavelength_nm);
  const double osnr_stage = p_in_w / (f_lin * kPlanckJS * nu * kOsnrRefBandwidthHz);
  const double inv_in = std::isinf(sig.osnr_linear) ? 0.0 : 1.0 / sig.osnr_linear;
  out.osnr_linear = 1.0 / (inv_in + 1.0 / osnr_stage);
  out.avg_power_dbm += gain_db;
  return out;
}

inline OpticalSignal circulator_pass(const OpticalSignal& sig, double insertion_loss_db) {
  if (insertion_loss_db < 0.0) {
    throw ContractViolation("circulator_pass: insertion_loss_db must be >= 0");
  }
  OpticalSignal out = sig;
  out.avg_power_dbm -= insertion_loss_db;
  return out;
}

// RF chain system impedance; the amplifier noise formula is referenced to it.
inline constexpr double kRfSystemLoadOhm = 50.0;

namespace detail {

// Signal-dependent and floor noise densities (W/Hz, envelope-domain) for a
// photodetection event.
inline double detection_noise_psd(double photocurrent_a, double load_ohm,
                                  double temperature_k, double rin_db_per_hz,
                                  double osnr_linear, double floor_excess_db) {
  const double shot = 2.0 * kElementaryChargeC * photocurrent_a * load_ohm;
  const double thermal = 4.0 * kBoltzmannJPerK * temperature_k;
  double rin = 0.0;
  if (std::isfinite(rin_db_per_hz)) {
    rin = db_to_linear(rin_db_per_hz) * photocurrent_a * photocurrent_a * load_ohm;
  }
  double beat = 0.0;
  if (std::isfinite(osnr_linear) && osnr_linear > 0.0) {
    const double i_sig = photocurrent_a;  // R * P_avg
    beat = 2.0 * i_sig * i_sig * load_ohm / (osnr_linear * kOsnrRefBandwidthHz);
  }
  return shot + rin + beat + thermal * db_to_linear(floor_excess_db);
}

}  // namespace detail

// Square-law photodetection of the intensity envelope. Output samples are the
// RF photocurrent envelope scaled so mean |sample|^2 is electrical watts into
// the load: R * P_avg * m * sqrt(R_load) * envelope, plus shot / thermal /
// RIN / ASE-beat noise injected white across the simulation bandwidth. The
// matched filter downstream has noise bandwidth Rs, so in-band noise equals
// the textbook formulas evaluated at B = Rs. DC photocurrent carries no RF
// information and is not represented in the envelope.
inline SampledWaveform pin_detect(const OpticalSignal& sig, const PdParams& pd,
                                  RngHandle rng_handle, const NoiseOptions& noise = {},
                                  DiagnosticList* diag = nullptr) {
  validate(pd, sig.wavelength_nm);
  validate(sig.envelope, "pin_detect");
  const double p_w = dbm_to_watt(sig.avg_power_dbm);
  const double i_dc = pd.responsivity_a_w * p_w;
  const double fs = sig.envelope.sample_rate_hz;
  if (sig.envelope.envelope_ref_hz + fs / 2.0 > pd.bandwidth_hz) {
    add_diag(diag, "pin", "pd_bandwidth",
             "signal band extends beyond the detector bandwidth");
  }
  const double amp = i_dc * sig.mod_index * std::sqrt(pd.load_ohm);
  SampledWaveform out = sig.envelope;
  for (cplx& v : out.samples) v *= amp;
  if (!noise.enabled) return out;
  const double psd =
      detail::detection_noise_psd(i_dc, pd.load_ohm, pd.temperature_k, sig.rin_db_per_hz,
                                  sig.osnr_linear, noise.rx_floor_excess_db);
  return add_awgn(out, psd * fs, rng_handle);
}

namespace detail {

// Flat in [lo, hi]; first-order rolloff with corner width half the passband
// beyond either edge. Zero phase.
inline double rf_band_response(double f_abs, const RfAmpParams& amp) {
  const double w = 0.5 * (amp.band_hi_hz - amp.band_lo_hz);
  if (f_abs < amp.band_lo_hz) {
    const double d = (amp.band_lo_hz - f_abs) / w;
    return 1.0 / std::sqrt(1.0 + d * d);
  }
  if (f_abs > amp.band_hi_hz) {
    const double d = (f_abs - amp.band_hi_hz) / w;
    return 1.0 / std::sqrt(1.0 + d * d);
  }
  return 1.0;
}

}  // namespace detail

// RF gain, band-edge rolloff, and input-referred added noise
// (F-1)*k*T0*R_load per hertz scaled to the output by the gain.
inline SampledWaveform rf_amplify(const SampledWaveform& wf, const RfAmpParams& amp,
                                  RngHandle rng_handle, const NoiseOptions& noise = {},
                                  DiagnosticList* diag = nullptr) {
  validate(amp);
  validate(wf, "rf_amplify");
  const double g_amp = db_to_amplitude(amp.gain_db);
  const double fs = wf.sample_rate_hz;
  const double ref = wf.envelope_ref_hz;
  const double band_lo = ref - fs / 2.0;
  const double band_hi = ref + fs / 2.0;
  SampledWaveform out;
  if (band_lo >= amp.band_lo_hz && band_hi <= amp.band_hi_hz) {
    out = scaled(wf, g_amp);  // entire represented band is flat
  } else {
    add_diag(diag, "rf_amp", "rf_band_partial",
             "represented band extends beyond the amplifier passband");
    out = detail::apply_frequency_response(wf, [&](double offset_hz) -> cplx {
      return cplx(g_amp * detail::rf_band_response(std::abs(ref + offset_hz), amp), 0.0);
    });
  }
  if (!noise.enabled) return out;
  const double f_lin = db_to_linear(amp.nf_db);
  const double psd_in = (f_lin - 1.0) * kBoltzmannJPerK * 290.0 * kRfSystemLoadOhm *
                        db_to_linear(noise.rx_floor_excess_db);
  const double psd_out = psd_in * db_to_linear(amp.gain_db);
  return add_awgn(out, psd_out * fs, rng_handle);
}

// Brick-wall band selection with raised-cosine edges (zero phase). Band edges
// are absolute frequencies; the transition band is transition_fraction of the
// band width, centred on each edge.
inline SampledWaveform bandpass(const SampledWaveform& wf, double f_lo_hz, double f_hi_hz,
                                double transition_fraction = 0.05) {
  validate(wf, "bandpass");
  if (!(f_hi_hz > f_lo_hz)) throw ContractViolation("bandpass: f_hi must exceed f_lo");
  if (!(transition_fraction > 0.0) || transition_fraction >= 0.5) {
    throw ContractViolation("bandpass: transition_fraction must be in (0, 0.5)");
  }
  const double ref = wf.envelope_ref_hz;
  const double fs = wf.sample_rate_hz;
  if (f_hi_hz < ref - fs / 2.0 || f_lo_hz > ref + fs / 2.0) {
    throw ContractViolation("bandpass: band does not overlap the represented band");
  }
  const double tw = transition_fraction * (f_hi_hz - f_lo_hz);
  auto edge = [tw](double distance_into_band) -> double {
    // 0 outside, 1 inside, raised-cosine across [-tw/2, tw/2] about the edge.
    if (distance_into_band <= -tw / 2.0) return 0.0;
    if (distance_into_band >= tw / 2.0) return 1.0;
    return 0.5 * (1.0 + std::sin(kPi * distance_into_band / tw));
  };
  return detail::apply_frequency_response(wf, [&](double offset_hz) -> cplx {
    const double f = ref + offset_hz;
    return cplx(edge(f - f_lo_hz) * edge(f_hi_hz - f), 0.0);
  });
}

}  // namespace rofsim
