/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rofsim/common.hpp"
#include "rofsim/modem.hpp"
#include "rofsim/oil_vcsel.hpp"
#include "rofsim/photonics.hpp"
#include "rofsim/qos.hpp"
#include "rofsim/rng.hpp"
#include "rofsim/waveform.hpp"

namespace rofsim {

// Noise stream ids, one per stochastic stage. Fixed assignments keep results
// independent of evaluation order (and therefore identical between serial and
// parallel sweeps).
inline constexpr std::uint64_t kStreamPayloadBits = 0;
inline constexpr std::uint64_t kStreamRuPin = 10;
inline constexpr std::uint64_t kStreamRuLna = 11;
inline constexpr std::uint64_t kStreamVcsel = 12;
inline constexpr std::uint64_t kStreamCuPin = 13;
inline constexpr std::uint64_t kStreamCuLna = 14;

struct UplinkTxParams {
  double power_dbm = 10.0;
  double mod_index = 0.3;
  double wavelength_nm = 1559.79;
  double rin_db_per_hz = -150.0;
};

struct EdfaParams {
  double gain_db = 10.0;
  double nf_db = 5.0;
};

struct CirculatorParams {
  double insertion_loss_db = 0.8;
};

struct BpfParams {
  bool enabled = false;
  double band_lo_hz = 4.4e9;
  double band_hi_hz = 5.4e9;
};

// Full duplex fronthaul scenario: CU feeds the downlink through an external
// modulator, EDFA, the CU-DU span (of1) and a circulator into the DU-side
// OIL-VCSEL; the reflected carrier continues over of2 to the RU receiver,
// while the VCSEL's detected envelope (plus the QoS subcarrier) returns to the
// CU over of1 on a separate uplink carrier.
struct Scenario {
  ModemConfig modem;
  LaserParams source;
  MzmParams mzm;
  EdfaParams edfa;
  FiberParams of1;
  CirculatorParams circulator;
  VcselParams vcsel;
  FiberParams of2 = FiberParams{0.0, 0.2, 17.0};
  PdParams pin;
  RfAmpParams lna_downlink;
  RfAmpParams lna_uplink;
  BpfParams bpf;
  UplinkTxParams uplink_tx;
  QosSubcarrierConfig qos;
  NoiseOptions noise;
  std::uint64_t seed = 1;
};

namespace detail {

// Half-width of the receive-side QAM selection filter. Wider than half the
// occupied bandwidth so the RRC skirts pass undistorted.
inline double qam_select_half_width_hz(const ModemConfig& m) {
  return 0.75 * m.occupied_bandwidth_hz();
}

}  // namespace detail

inline void validate(const Scenario& s) {
  s.modem.validate();
  validate(s.of1);
  validate(s.of2);
  validate(s.pin, s.source.wavelength_nm);
  validate(s.lna_downlink);
  validate(s.lna_uplink);
  if (!(s.uplink_tx.mod_index > 0.0) || s.uplink_tx.mod_index > 1.0) {
    throw ConfigError("uplink_tx.mod_index must be in (0, 1]");
  }
  if (s.bpf.enabled && !(s.bpf.band_hi_hz > s.bpf.band_lo_hz)) {
    throw ConfigError("bpf band must satisfy band_lo < band_hi");
  }
  if (s.qos.enabled) {
    // Disjointness from the occupied band alone is not enough: anything inside
    // the receive selection filter would fold into the recovered symbols.
    const double guard = std::abs(s.qos.subcarrier_offset_hz) -
                         1.5 * s.qos.bit_rate_bps -
                         detail::qam_select_half_width_hz(s.modem);
    if (guard < 0.0) {
      throw ConfigError("qos subcarrier overlaps the QAM receive band");
    }
    detail::qos_samples_per_bit(s.modem.sample_rate_hz(), s.qos);
    if (std::abs(s.qos.subcarrier_offset_hz) + 1.5 * s.qos.bit_rate_bps >
        0.98 * s.modem.sample_rate_hz() / 2.0) {
      throw ConfigError("qos.subcarrier_offset_hz is outside the representable band");
    }
  }
}

struct StageDelay {
  std::string stage;
  double samples = 0.0;
};

struct DelayLedger {
  std::vector<StageDelay> stages;

  void add(std::string stage, double samples) {
    stages.push_back(StageDelay{std::move(stage), samples});
  }
  double total() const {
    double acc = 0.0;
    for (const StageDelay& s : stages) acc += s.samples;
    return acc;
  }
};

struct LinkRun {
  SymbolStream tx_symbols;
  SymbolStream downlink_symbols;  // recovered at the RU
  SymbolStream uplink_symbols;    // recovered at the CU monitor
  std::map<std::string, SampledWaveform> tap_waveforms;
  LockState lock;
  QosExtract qos;
  DelayLedger downlink_delays;
  DelayLedger uplink_delays;
  DiagnosticList diagnostics;
};

namespace detail {

inline void require_finite(const SampledWaveform& wf, const char* stage) {
  if (!all_finite(wf)) {
    throw SimulationError(std::string(stage) + ": non-finite samples produced");
  }
}

}  // namespace detail

// Runs the full duplex chain once. payload_bits drive the QAM downlink;
// qos_payload rides the uplink service subcarrier. Throws LockError when the
// VCSEL falls out of lock, ConfigError for invalid scenarios.
inline LinkRun run_link(const Scenario& s, const BitSequence& payload_bits,
                        const std::vector<std::uint8_t>& qos_payload) {
  validate(s);
  LinkRun out;
  const NoiseOptions& noise = s.noise;

  out.tx_symbols = qam_map(payload_bits, s.modem.order_m);
  SampledWaveform tx = pulse_shape(out.tx_symbols, s.modem, &out.diagnostics);
  detail::require_finite(tx, "pulse_shape");
  out.downlink_delays.add("modem_tx_rrc", rrc_delay_samples(s.modem));
  out.tap_waveforms["tx"] = tx;

  // Downlink: CU -> DU.
  OpticalSignal dl = mzm_modulate(tx, s.source, s.mzm, &out.diagnostics);
  out.downlink_delays.add("mzm", 0.0);
  dl = edfa_amplify(dl, s.edfa.gain_db, s.edfa.nf_db);
  out.downlink_delays.add("edfa", 0.0);
  dl = fiber_propagate(dl, s.of1);
  out.downlink_delays.add("of1", 0.0);
  dl = circulator_pass(dl, s.circulator.insertion_loss_db);
  out.downlink_delays.add("circulator_in", 0.0);

  TransactResult vr = transact(dl, s.vcsel, RngHandle{s.seed, kStreamVcsel}, noise,
                               &out.diagnostics);
  out.lock = vr.lock;
  detail::require_finite(vr.detected, "oil_vcsel detected");
  out.downlink_delays.add("oil_vcsel", 0.0);
  const double dl_delay_at_vcsel =
      out.downlink_delays.total() - rrc_delay_samples(s.modem);

  // Downlink tail: DU -> RU.
  OpticalSignal drop = circulator_pass(vr.reflected, s.circulator.insertion_loss_db);
  out.downlink_delays.add("circulator_out", 0.0);
  drop = fiber_propagate(drop, s.of2);
  out.downlink_delays.add("of2", 0.0);
  SampledWaveform ru = pin_detect(drop, s.pin, RngHandle{s.seed, kStreamRuPin}, noise,
                                  &out.diagnostics);
  out.downlink_delays.add("ru_pin", 0.0);
  ru = rf_amplify(ru, s.lna_downlink, RngHandle{s.seed, kStreamRuLna}, noise,
                  &out.diagnostics);
  out.downlink_delays.add("ru_lna", 0.0);
  if (s.bpf.enabled) {
    ru = bandpass(ru, s.bpf.band_lo_hz, s.bpf.band_hi_hz);
    out.downlink_delays.add("ru_bpf", 0.0);
  }
  detail::require_finite(ru, "downlink receive chain");
  out.tap_waveforms["mso1"] = ru;

  const double dl_extra_delay =
      out.downlink_delays.total() - rrc_delay_samples(s.modem);
  out.downlink_symbols =
      recover_symbols(ru, s.modem, &out.tx_symbols.symbols, dl_extra_delay);

  // Uplink: DU monitor output -> CU.
  SampledWaveform du = vr.detected;
  out.tap_waveforms["du_detected"] = du;
  out.uplink_delays.add("du_monitor", 0.0);
  if (s.qos.enabled) {
    du = add_service_data(du, qos_payload, s.qos);
    out.uplink_delays.add("qos_insert", 0.0);
  }
  LaserParams ul_laser;
  ul_laser.power_dbm = s.uplink_tx.power_dbm;
  ul_laser.wavelength_nm = s.uplink_tx.wavelength_nm;
  ul_laser.rin_db_per_hz = s.uplink_tx.rin_db_per_hz;
  OpticalSignal ul = direct_modulate(du, ul_laser, s.uplink_tx.mod_index,
                                     &out.diagnostics);
  out.uplink_delays.add("uplink_tx", 0.0);
  ul = fiber_propagate(ul, s.of1);
  out.uplink_delays.add("of1_return", 0.0);
  SampledWaveform cu = pin_detect(ul, s.pin, RngHandle{s.seed, kStreamCuPin}, noise,
                                  &out.diagnostics);
  out.uplink_delays.add("cu_pin", 0.0);
  cu = rf_amplify(cu, s.lna_uplink, RngHandle{s.seed, kStreamCuLna}, noise,
                  &out.diagnostics);
  out.uplink_delays.add("cu_lna", 0.0);
  detail::require_finite(cu, "uplink receive chain");
  out.tap_waveforms["mso2"] = cu;

  // Extra group delay relative to the pulse_shape output: everything the
  // downlink accumulated up to the VCSEL detector plus the uplink stages.
  // Every channel stage here is zero-delay by construction (memoryless or
  // zero-phase filtering); the ledger keeps that auditable.
  const double ul_extra_delay = dl_delay_at_vcsel + out.uplink_delays.total();
  SampledWaveform cu_qam = cu;
  if (s.qos.enabled) {
    // Select the QAM band ahead of the matched filter so the service
    // subcarrier cannot leak through the truncated RRC stopband; a vector
    // analyzer's acquisition filter does the same and no equalization is
    // involved.
    const double half = detail::qam_select_half_width_hz(s.modem);
    cu_qam = bandpass(cu, s.modem.rf_subcarrier_hz - half,
                      s.modem.rf_subcarrier_hz + half);
  }
  out.uplink_symbols =
      recover_symbols(cu_qam, s.modem, &out.tx_symbols.symbols, ul_extra_delay);

  if (s.qos.enabled) {
    out.qos = extract_service_data(cu, s.qos);
  }
  return out;
}

inline BitSequence random_bits(std::size_t count, RngHandle handle) {
  BitSequence bits(count);
  NoiseRng rng(handle);
  for (std::size_t k = 0; k < count; ++k) bits[k] = rng.bit() ? 1u : 0u;
  return bits;
}

}  // namespace rofsim
