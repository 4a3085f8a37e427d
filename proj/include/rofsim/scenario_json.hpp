/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rofsim/link.hpp"

namespace rofsim {

using json = nlohmann::json;

enum class ParamKind { kDouble, kInt, kBool, kUint64 };

// One scenario parameter addressable by dotted path. The registry is the
// single source of truth for JSON serialization, config overrides, sweep
// parameters and calibration free parameters.
struct ParamEntry {
  std::string path;
  ParamKind kind;
  std::string description;
  std::function<double(const Scenario&)> get;
  std::function<void(Scenario&, double)> set;
};

namespace detail {

inline void set_vcsel_field(Scenario& s, double VcselParams::Config::* field,
                            double value) {
  VcselParams::Config c = s.vcsel.config();
  c.*field = value;
  s.vcsel = VcselParams(c);
}

}  // namespace detail

inline const std::vector<ParamEntry>& parameter_registry() {
  static const std::vector<ParamEntry> table = [] {
    std::vector<ParamEntry> t;
    auto add = [&t](std::string path, ParamKind kind, std::string desc,
                    std::function<double(const Scenario&)> get,
                    std::function<void(Scenario&, double)> set) {
      t.push_back(ParamEntry{std::move(path), kind, std::move(desc), std::move(get),
                             std::move(set)});
    };

#define ROFSIM_PARAM(PATH, KIND, DESC, FIELD)                                   \
  add(PATH, KIND, DESC, [](const Scenario& s) { return static_cast<double>(s.FIELD); }, \
      [](Scenario& s, double v) {                                               \
        s.FIELD = static_cast<std::remove_reference_t<decltype(s.FIELD)>>(v);   \
      })
#define ROFSIM_VCSEL_PARAM(PATH, DESC, FIELD)                                   \
  add(PATH, ParamKind::kDouble, DESC,                                           \
      [](const Scenario& s) { return s.vcsel.config().FIELD; },                 \
      [](Scenario& s, double v) {                                               \
        detail::set_vcsel_field(s, &VcselParams::Config::FIELD, v);             \
      })

    ROFSIM_PARAM("modem.order_m", ParamKind::kInt, "QAM order (4, 16 or 64)",
                 modem.order_m);
    ROFSIM_PARAM("modem.symbol_rate_hz", ParamKind::kDouble, "symbol rate",
                 modem.symbol_rate_hz);
    ROFSIM_PARAM("modem.rolloff", ParamKind::kDouble, "RRC rolloff in (0,1]",
                 modem.rolloff);
    ROFSIM_PARAM("modem.samples_per_symbol", ParamKind::kInt,
                 "simulation oversampling (>= 2)", modem.samples_per_symbol);
    ROFSIM_PARAM("modem.rrc_span_symbols", ParamKind::kInt,
                 "RRC filter span in symbols (>= 4)", modem.rrc_span_symbols);
    ROFSIM_PARAM("modem.rf_subcarrier_hz", ParamKind::kDouble,
                 "RF subcarrier the envelope is referenced to", modem.rf_subcarrier_hz);

    ROFSIM_PARAM("source.power_dbm", ParamKind::kDouble, "CU laser power",
                 source.power_dbm);
    ROFSIM_PARAM("source.wavelength_nm", ParamKind::kDouble, "optical carrier wavelength",
                 source.wavelength_nm);
    ROFSIM_PARAM("source.rin_db_per_hz", ParamKind::kDouble,
                 "CU laser relative intensity noise", source.rin_db_per_hz);

    ROFSIM_PARAM("mzm.half_wave_drive_ratio", ParamKind::kDouble,
                 "drive amplitude as a fraction of V_pi (linear up to 0.3)",
                 mzm.half_wave_drive_ratio);
    ROFSIM_PARAM("mzm.insertion_loss_db", ParamKind::kDouble, "modulator insertion loss",
                 mzm.insertion_loss_db);

    ROFSIM_PARAM("edfa.gain_db", ParamKind::kDouble, "booster gain", edfa.gain_db);
    ROFSIM_PARAM("edfa.nf_db", ParamKind::kDouble, "booster noise figure", edfa.nf_db);

    ROFSIM_PARAM("of1.length_km", ParamKind::kDouble, "CU-DU span length",
                 of1.length_km);
    ROFSIM_PARAM("of1.atten_db_per_km", ParamKind::kDouble, "CU-DU span attenuation",
                 of1.atten_db_per_km);
    ROFSIM_PARAM("of1.dispersion_ps_nm_km", ParamKind::kDouble, "CU-DU span dispersion",
                 of1.dispersion_ps_nm_km);

    ROFSIM_PARAM("circulator.insertion_loss_db", ParamKind::kDouble,
                 "loss per circulator pass", circulator.insertion_loss_db);

    ROFSIM_VCSEL_PARAM("vcsel.bias_ma", "forward DC bias (> 0, no switching)", bias_ma);
    ROFSIM_VCSEL_PARAM("vcsel.free_running_offset_ghz",
                       "free-running detuning from the master carrier",
                       free_running_offset_ghz);
    ROFSIM_VCSEL_PARAM("vcsel.locking_coeff_ghz",
                       "locking half-range at 0 dB injection ratio", locking_coeff_ghz);
    ROFSIM_VCSEL_PARAM("vcsel.detector_responsivity_a_w",
                       "resonant-cavity detector responsivity",
                       detector_responsivity_a_w);
    ROFSIM_VCSEL_PARAM("vcsel.reflection_gain_db",
                       "re-emitted power relative to incident", reflection_gain_db);
    ROFSIM_VCSEL_PARAM("vcsel.detector_bandwidth_hz", "cavity detector bandwidth",
                       detector_bandwidth_hz);
    ROFSIM_VCSEL_PARAM("vcsel.injection_ref_dbm",
                       "incident power knee below which the noise penalty grows",
                       injection_ref_dbm);
    ROFSIM_VCSEL_PARAM("vcsel.injection_penalty_db_per_db",
                       "detected-path SNR loss per dB below the knee",
                       injection_penalty_db_per_db);
    ROFSIM_VCSEL_PARAM("vcsel.emission_power_dbm",
                       "slave output power entering the lock ratio", emission_power_dbm);

    ROFSIM_PARAM("of2.length_km", ParamKind::kDouble, "DU-RU span length",
                 of2.length_km);
    ROFSIM_PARAM("of2.atten_db_per_km", ParamKind::kDouble, "DU-RU span attenuation",
                 of2.atten_db_per_km);
    ROFSIM_PARAM("of2.dispersion_ps_nm_km", ParamKind::kDouble, "DU-RU span dispersion",
                 of2.dispersion_ps_nm_km);

    ROFSIM_PARAM("pin.responsivity_a_w", ParamKind::kDouble, "PIN responsivity",
                 pin.responsivity_a_w);
    ROFSIM_PARAM("pin.bandwidth_hz", ParamKind::kDouble, "PIN bandwidth",
                 pin.bandwidth_hz);
    ROFSIM_PARAM("pin.load_ohm", ParamKind::kDouble, "PIN load resistance", pin.load_ohm);
    ROFSIM_PARAM("pin.temperature_k", ParamKind::kDouble, "receiver temperature",
                 pin.temperature_k);

    ROFSIM_PARAM("lna_downlink.gain_db", ParamKind::kDouble, "RU amplifier gain",
                 lna_downlink.gain_db);
    ROFSIM_PARAM("lna_downlink.nf_db", ParamKind::kDouble, "RU amplifier noise figure",
                 lna_downlink.nf_db);
    ROFSIM_PARAM("lna_downlink.band_lo_hz", ParamKind::kDouble,
                 "RU amplifier band lower edge", lna_downlink.band_lo_hz);
    ROFSIM_PARAM("lna_downlink.band_hi_hz", ParamKind::kDouble,
                 "RU amplifier band upper edge", lna_downlink.band_hi_hz);

    ROFSIM_PARAM("lna_uplink.gain_db", ParamKind::kDouble, "CU monitor amplifier gain",
                 lna_uplink.gain_db);
    ROFSIM_PARAM("lna_uplink.nf_db", ParamKind::kDouble,
                 "CU monitor amplifier noise figure", lna_uplink.nf_db);
    ROFSIM_PARAM("lna_uplink.band_lo_hz", ParamKind::kDouble,
                 "CU monitor amplifier band lower edge", lna_uplink.band_lo_hz);
    ROFSIM_PARAM("lna_uplink.band_hi_hz", ParamKind::kDouble,
                 "CU monitor amplifier band upper edge", lna_uplink.band_hi_hz);

    ROFSIM_PARAM("bpf.enabled", ParamKind::kBool, "enable the RU band-pass filter",
                 bpf.enabled);
    ROFSIM_PARAM("bpf.band_lo_hz", ParamKind::kDouble, "RU band-pass lower edge",
                 bpf.band_lo_hz);
    ROFSIM_PARAM("bpf.band_hi_hz", ParamKind::kDouble, "RU band-pass upper edge",
                 bpf.band_hi_hz);

    ROFSIM_PARAM("uplink_tx.power_dbm", ParamKind::kDouble,
                 "uplink optical transmitter power", uplink_tx.power_dbm);
    ROFSIM_PARAM("uplink_tx.mod_index", ParamKind::kDouble,
                 "uplink optical modulation index", uplink_tx.mod_index);
    ROFSIM_PARAM("uplink_tx.wavelength_nm", ParamKind::kDouble,
                 "uplink carrier wavelength", uplink_tx.wavelength_nm);
    ROFSIM_PARAM("uplink_tx.rin_db_per_hz", ParamKind::kDouble,
                 "uplink transmitter intensity noise", uplink_tx.rin_db_per_hz);

    ROFSIM_PARAM("qos.enabled", ParamKind::kBool, "enable the QoS service subcarrier",
                 qos.enabled);
    ROFSIM_PARAM("qos.subcarrier_offset_hz", ParamKind::kDouble,
                 "QoS subcarrier offset from the RF carrier", qos.subcarrier_offset_hz);
    ROFSIM_PARAM("qos.bit_rate_bps", ParamKind::kDouble,
                 "QoS bit rate (rounded to whole samples per bit)", qos.bit_rate_bps);
    ROFSIM_PARAM("qos.relative_power_db", ParamKind::kDouble,
                 "QoS power relative to the host waveform", qos.relative_power_db);

    ROFSIM_PARAM("noise.enabled", ParamKind::kBool, "master noise switch", noise.enabled);
    ROFSIM_PARAM("noise.rx_floor_excess_db", ParamKind::kDouble,
                 "calibrated excess on the signal-independent receiver floor",
                 noise.rx_floor_excess_db);

    ROFSIM_PARAM("seed", ParamKind::kUint64, "run seed", seed);

#undef ROFSIM_PARAM
#undef ROFSIM_VCSEL_PARAM
    return t;
  }();
  return table;
}

inline const ParamEntry* find_parameter(const std::string& path) {
  for (const ParamEntry& e : parameter_registry()) {
    if (e.path == path) return &e;
  }
  return nullptr;
}

inline std::string valid_parameter_paths() {
  std::string s;
  for (const ParamEntry& e : parameter_registry()) {
    if (!s.empty()) s += ", ";
    s += e.path;
  }
  return s;
}

inline double get_parameter(const Scenario& s, const std::string& path) {
  const ParamEntry* e = find_parameter(path);
  if (e == nullptr) {
    throw ConfigError("unknown parameter '" + path + "' (valid: " +
                      valid_parameter_paths() + ")");
  }
  return e->get(s);
}

inline void set_parameter(Scenario& s, const std::string& path, double value) {
  const ParamEntry* e = find_parameter(path);
  if (e == nullptr) {
    throw ConfigError("unknown parameter '" + path + "' (valid: " +
                      valid_parameter_paths() + ")");
  }
  try {
    e->set(s, value);
  } catch (const ConfigError& err) {
    throw ConfigError("at '" + path + "': " + err.what());
  }
}

// Default scenario mirroring the proof-of-concept testbed, with optional
// dotted-path overrides applied on top.
inline Scenario build_testbed_scenario(
    const std::vector<std::pair<std::string, double>>& overrides = {}) {
  Scenario s;
  for (const auto& [path, value] : overrides) {
    set_parameter(s, path, value);
  }
  validate(s);
  return s;
}

inline json scenario_to_json(const Scenario& s) {
  json j = json::object();
  for (const ParamEntry& e : parameter_registry()) {
    json* node = &j;
    std::string rest = e.path;
    for (std::size_t dot = rest.find('.'); dot != std::string::npos;
         dot = rest.find('.')) {
      node = &(*node)[rest.substr(0, dot)];
      rest = rest.substr(dot + 1);
    }
    const double v = e.get(s);
    switch (e.kind) {
      case ParamKind::kDouble: (*node)[rest] = v; break;
      case ParamKind::kInt: (*node)[rest] = static_cast<int>(v); break;
      case ParamKind::kBool: (*node)[rest] = (v != 0.0); break;
      case ParamKind::kUint64: (*node)[rest] = static_cast<std::uint64_t>(v); break;
    }
  }
  return j;
}

namespace detail {

inline void flatten_json(const json& j, const std::string& prefix,
                         std::vector<std::pair<std::string, json>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object()) {
      flatten_json(it.value(), path, out);
    } else {
      out.emplace_back(path, it.value());
    }
  }
}

}  // namespace detail

// Strict parse: every leaf must name a registered parameter with the right
// JSON type; missing fields keep their defaults.
inline Scenario scenario_from_json(const json& j, const std::string& where = "scenario") {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  Scenario s;
  std::vector<std::pair<std::string, json>> leaves;
  detail::flatten_json(j, "", leaves);
  for (const auto& [path, value] : leaves) {
    const ParamEntry* e = find_parameter(path);
    if (e == nullptr) {
      throw ConfigError(where + "." + path + ": unknown parameter (valid: " +
                        valid_parameter_paths() + ")");
    }
    double v = 0.0;
    switch (e->kind) {
      case ParamKind::kBool:
        if (!value.is_boolean()) {
          throw ConfigError(where + "." + path + ": expected a boolean");
        }
        v = value.get<bool>() ? 1.0 : 0.0;
        break;
      case ParamKind::kInt:
      case ParamKind::kUint64:
        if (!value.is_number_integer() && !value.is_number_unsigned()) {
          throw ConfigError(where + "." + path + ": expected an integer");
        }
        v = value.get<double>();
        break;
      case ParamKind::kDouble:
        if (!value.is_number()) {
          throw ConfigError(where + "." + path + ": expected a number");
        }
        v = value.get<double>();
        break;
    }
    try {
      e->set(s, v);
    } catch (const ConfigError& err) {
      throw ConfigError(where + "." + path + ": " + err.what());
    }
  }
  try {
    validate(s);
  } catch (const ConfigError& err) {
    throw ConfigError(where + ": " + err.what());
  }
  return s;
}

}  // namespace rofsim
