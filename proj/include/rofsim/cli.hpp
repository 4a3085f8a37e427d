/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "rofsim/calibrate.hpp"
#include "rofsim/iq_io.hpp"
#include "rofsim/link.hpp"
#include "rofsim/metrics.hpp"
#include "rofsim/scenario_json.hpp"
#include "rofsim/spectrum.hpp"
#include "rofsim/sweep.hpp"

namespace rofsim {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;        // bad config / IO / usage
inline constexpr int kExitFailVerdict = 2;  // simulated link missed its QoS targets
inline constexpr int kExitNoConvergence = 3;

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> symbols;
  bool no_noise = false;
  bool iq_dump = false;
};

struct ConfigFile {
  Scenario scenario;
  SweepSpec sweep;
  CalibrationSpec calibration;
  json raw = json::object();
};

inline SweepSpec sweep_from_json(const json& j) {
  SweepSpec spec;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "parameter_path") {
      spec.parameter_path = it.value().get<std::string>();
    } else if (key == "values") {
      spec.values = it.value().get<std::vector<double>>();
    } else if (key == "seeds") {
      spec.seeds = it.value().get<std::vector<std::uint64_t>>();
    } else if (key == "symbols_per_point") {
      spec.symbols_per_point = it.value().get<std::size_t>();
    } else {
      throw ConfigError("sweep." + key + ": unknown key (valid: parameter_path, values, "
                        "seeds, symbols_per_point)");
    }
  }
  return spec;
}

inline json sweep_to_json(const SweepSpec& spec) {
  return json{{"parameter_path", spec.parameter_path},
              {"values", spec.values},
              {"seeds", spec.seeds},
              {"symbols_per_point", spec.symbols_per_point}};
}

inline CalibrationSpec calibration_from_json(const json& j) {
  CalibrationSpec spec = default_calibration_spec();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "free_params") {
      spec.free_params.clear();
      for (const json& p : it.value()) {
        FreeParam fp;
        fp.path = p.at("path").get<std::string>();
        fp.lo = p.at("lo").get<double>();
        fp.hi = p.at("hi").get<double>();
        spec.free_params.push_back(fp);
      }
    } else if (key == "targets") {
      spec.targets.clear();
      for (const json& t : it.value()) {
        CalibrationTarget ct;
        const std::string kind = t.at("kind").get<std::string>();
        if (kind == "downlink_evm") {
          ct.kind = TargetKind::kDownlinkEvm;
        } else if (kind == "uplink_evm") {
          ct.kind = TargetKind::kUplinkEvm;
        } else {
          throw ConfigError("calibration.targets.kind must be downlink_evm or uplink_evm");
        }
        ct.of1_km = t.at("of1_km").get<double>();
        ct.evm_percent = t.at("evm_percent").get<double>();
        if (t.contains("weight")) ct.weight = t.at("weight").get<double>();
        spec.targets.push_back(ct);
      }
    } else if (key == "seeds") {
      spec.seeds = it.value().get<std::vector<std::uint64_t>>();
    } else if (key == "symbols_per_eval") {
      spec.symbols_per_eval = it.value().get<std::size_t>();
    } else if (key == "max_evaluations") {
      spec.max_evaluations = it.value().get<int>();
    } else if (key == "fail_rms") {
      spec.fail_rms = it.value().get<double>();
    } else if (key == "stop_rms") {
      spec.stop_rms = it.value().get<double>();
    } else {
      throw ConfigError("calibration." + key + ": unknown key");
    }
  }
  return spec;
}

inline json calibration_to_json(const CalibrationSpec& spec) {
  json fp = json::array();
  for (const FreeParam& p : spec.free_params) {
    fp.push_back(json{{"path", p.path}, {"lo", p.lo}, {"hi", p.hi}});
  }
  json tg = json::array();
  for (const CalibrationTarget& t : spec.targets) {
    tg.push_back(json{
        {"kind", t.kind == TargetKind::kDownlinkEvm ? "downlink_evm" : "uplink_evm"},
        {"of1_km", t.of1_km},
        {"evm_percent", t.evm_percent},
        {"weight", t.weight}});
  }
  return json{{"free_params", fp},
              {"targets", tg},
              {"seeds", spec.seeds},
              {"symbols_per_eval", spec.symbols_per_eval},
              {"max_evaluations", spec.max_evaluations},
              {"fail_rms", spec.fail_rms},
              {"stop_rms", spec.stop_rms}};
}

// Config file layout: { "scenario": {...}, "sweep": {...}, "calibration": {...} },
// every section optional; an empty path yields all defaults.
inline ConfigFile load_config(const std::string& path) {
  ConfigFile cfg;
  cfg.sweep = SweepSpec{};
  cfg.calibration = default_calibration_spec();
  if (path.empty()) return cfg;
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config " + path + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "scenario") {
      cfg.scenario = scenario_from_json(it.value());
    } else if (key == "sweep") {
      cfg.sweep = sweep_from_json(it.value());
    } else if (key == "calibration") {
      cfg.calibration = calibration_from_json(it.value());
    } else {
      throw ConfigError("config " + path + "." + key +
                        ": unknown section (valid: scenario, sweep, calibration)");
    }
  }
  cfg.raw = j;
  return cfg;
}

namespace detail {

inline json evm_report_to_json(const EvmReport& r) {
  return json{{"order_m", r.order_m},
              {"symbol_count", r.symbol_count},
              {"evm_rms_percent", r.evm_rms_percent},
              {"evm_db", r.evm_db},
              {"snr_equivalent_db", r.snr_equivalent_db},
              {"ber_estimate", r.ber_estimate},
              {"threshold_percent", r.threshold_percent},
              {"verdict", to_string(r.verdict)}};
}

inline json lock_to_json(const LockState& s) {
  return json{{"locked", s.locked},
              {"margin_ghz", s.margin_ghz},
              {"injection_ratio_db", s.injection_ratio_db}};
}

inline json delays_to_json(const DelayLedger& d) {
  json stages = json::array();
  for (const StageDelay& s : d.stages) {
    stages.push_back(json{{"stage", s.stage}, {"delay_samples", s.samples}});
  }
  return json{{"stages", stages}, {"total_samples", d.total()}};
}

inline json diagnostics_to_json(const DiagnosticList& diags) {
  json out = json::array();
  for (const Diagnostic& d : diags) {
    out.push_back(json{{"stage", d.stage}, {"code", d.code}, {"message", d.message}});
  }
  return out;
}

inline std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  if (!f) throw SimulationError("cannot open " + path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw SimulationError("short write to " + path);
}

inline void write_psd_csv(const SampledWaveform& wf, const std::string& path) {
  const Spectrum spec = psd_estimate(wf);
  std::string text = "freq_offset_hz,psd_w_per_hz\n";
  char buf[96];
  for (std::size_t k = 0; k < spec.freq_offset_hz.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", spec.freq_offset_hz[k],
                  spec.psd_w_per_hz[k]);
    text += buf;
  }
  write_text(path, text);
}

inline constexpr std::size_t kConstellationExportCap = 8192;

inline SymbolStream capped(const SymbolStream& s) {
  SymbolStream out;
  out.order_m = s.order_m;
  const std::size_t n = std::min(s.symbols.size(), kConstellationExportCap);
  out.symbols.assign(s.symbols.begin(), s.symbols.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

}  // namespace detail

inline const std::vector<std::uint8_t>& default_qos_payload() {
  static const std::vector<std::uint8_t> payload = [] {
    const std::string text = "du-monitor-frame";
    return std::vector<std::uint8_t>(text.begin(), text.end());
  }();
  return payload;
}

inline std::size_t kDefaultRunSymbols = 100000;

inline int cmd_run(const std::string& config_path, const std::string& out_dir,
                   const RunFlags& flags) {
  namespace fs = std::filesystem;
  try {
    ConfigFile cfg = load_config(config_path);
    Scenario sc = cfg.scenario;
    if (flags.seed) sc.seed = *flags.seed;
    if (flags.no_noise) sc.noise.enabled = false;
    const std::size_t symbols = flags.symbols.value_or(kDefaultRunSymbols);
    if (symbols == 0) throw ConfigError("--symbols must be > 0");
    validate(sc);

    fs::create_directories(out_dir);
    const BitSequence bits =
        random_bits(symbols * static_cast<std::size_t>(bits_per_symbol(sc.modem.order_m)),
                    RngHandle{sc.seed, kStreamPayloadBits});

    json out;
    out["scenario"] = scenario_to_json(sc);
    out["symbols"] = symbols;
    out["noise_enabled"] = sc.noise.enabled;

    LinkRun run;
    try {
      run = run_link(sc, bits, default_qos_payload());
    } catch (const LockError& e) {
      out["status"] = "lock_error";
      out["error"] = e.what();
      out["stage"] = e.stage();
      out["lock"] = detail::lock_to_json(e.state());
      detail::write_text((fs::path(out_dir) / "run.json").string(), out.dump(2) + "\n");
      std::fprintf(stderr, "run: %s\n", e.what());
      return kExitFailVerdict;
    }

    const EvmReport dl = make_evm_report(run.downlink_symbols, run.tx_symbols.symbols);
    const EvmReport ul = make_evm_report(run.uplink_symbols, run.tx_symbols.symbols);

    out["status"] = "ok";
    out["lock"] = detail::lock_to_json(run.lock);
    out["downlink"] = detail::evm_report_to_json(dl);
    out["uplink"] = detail::evm_report_to_json(ul);
    out["qos"] = json{{"enabled", sc.qos.enabled},
                      {"frame_found", run.qos.found},
                      {"crc_ok", run.qos.crc_ok},
                      {"payload_hex", detail::to_hex(run.qos.payload)},
                      {"sent_payload_hex", detail::to_hex(default_qos_payload())}};
    out["delays"] = json{{"downlink", detail::delays_to_json(run.downlink_delays)},
                         {"uplink", detail::delays_to_json(run.uplink_delays)}};
    out["diagnostics"] = detail::diagnostics_to_json(run.diagnostics);

    constellation_export(detail::capped(run.downlink_symbols),
                         (fs::path(out_dir) / "constellation_downlink.csv").string(), &dl);
    constellation_export(detail::capped(run.uplink_symbols),
                         (fs::path(out_dir) / "constellation_uplink.csv").string(), &ul);
    detail::write_psd_csv(run.tap_waveforms.at("mso1"),
                          (fs::path(out_dir) / "psd_mso1.csv").string());
    detail::write_psd_csv(run.tap_waveforms.at("mso2"),
                          (fs::path(out_dir) / "psd_mso2.csv").string());
    if (flags.iq_dump) {
      for (const auto& [name, wf] : run.tap_waveforms) {
        write_iq((fs::path(out_dir) / ("iq_" + name + ".rfiq")).string(), wf);
      }
    }
    detail::write_text((fs::path(out_dir) / "run.json").string(), out.dump(2) + "\n");

    const bool pass = dl.verdict == Verdict::kPass && ul.verdict == Verdict::kPass;
    return pass ? kExitOk : kExitFailVerdict;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "run: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run: %s\n", e.what());
    return kExitError;
  }
}

inline int cmd_sweep(const std::string& config_path, const std::string& out_dir,
                     const RunFlags& flags, unsigned n_threads) {
  namespace fs = std::filesystem;
  try {
    ConfigFile cfg = load_config(config_path);
    Scenario sc = cfg.scenario;
    if (flags.no_noise) sc.noise.enabled = false;
    SweepSpec spec = cfg.sweep;
    if (flags.symbols) spec.symbols_per_point = *flags.symbols;
    const SweepResult result = run_sweep(sc, spec, n_threads);
    fs::create_directories(out_dir);
    write_sweep_csv(result, (fs::path(out_dir) / "sweep.csv").string());
    return result.any_failure ? kExitFailVerdict : kExitOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "sweep: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sweep: %s\n", e.what());
    return kExitError;
  }
}

inline int cmd_calibrate(const std::string& config_path, const std::string& out_dir) {
  namespace fs = std::filesystem;
  try {
    ConfigFile cfg = load_config(config_path);
    const CalibrationResult result = calibrate(cfg.scenario, cfg.calibration);
    fs::create_directories(out_dir);

    json fitted = json::object();
    for (const auto& [path, value] : result.fitted) fitted[path] = value;
    json report{{"converged", result.converged},
                {"evaluations", result.evaluations},
                {"residual_rms", result.residual_rms},
                {"fitted", fitted},
                {"observed_evm_percent", result.observed},
                {"relative_residuals", result.residuals}};
    detail::write_text((fs::path(out_dir) / "calibration.json").string(),
                       report.dump(2) + "\n");

    const Scenario fitted_scenario = apply_calibration(cfg.scenario, result);
    json fitted_config{{"scenario", scenario_to_json(fitted_scenario)},
                       {"sweep", sweep_to_json(cfg.sweep)},
                       {"calibration", calibration_to_json(cfg.calibration)}};
    detail::write_text((fs::path(out_dir) / "fitted_config.json").string(),
                       fitted_config.dump(2) + "\n");

    if (!result.converged) {
      std::fprintf(stderr, "calibrate: residual RMS %.3f exceeds %.3f\n",
                   result.residual_rms, cfg.calibration.fail_rms);
      return kExitNoConvergence;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "calibrate: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "calibrate: %s\n", e.what());
    return kExitError;
  }
}

inline std::string schema_text() {
  json params = json::array();
  for (const ParamEntry& e : parameter_registry()) {
    const char* kind = "number";
    switch (e.kind) {
      case ParamKind::kDouble: kind = "number"; break;
      case ParamKind::kInt: kind = "integer"; break;
      case ParamKind::kBool: kind = "boolean"; break;
      case ParamKind::kUint64: kind = "integer"; break;
    }
    params.push_back(
        json{{"path", e.path}, {"type", kind}, {"description", e.description}});
  }
  json j{{"config_sections",
          json{{"scenario", "link scenario; any subset of the parameters below"},
               {"sweep", "parameter_path, values, seeds, symbols_per_point"},
               {"calibration",
                "free_params, targets, seeds, symbols_per_eval, max_evaluations, "
                "fail_rms, stop_rms"}}},
         {"defaults", scenario_to_json(Scenario{})},
         {"parameters", params},
         {"artifacts",
          json{{"run.json", "scenario echo, lock state, EVM reports, QoS result, delays"},
               {"sweep.csv", "per-point rows then per-value mean/std rows"},
               {"calibration.json", "fitted values, residuals, convergence"},
               {"fitted_config.json", "drop-in config with the calibrated scenario"},
               {"iq_<tap>.rfiq",
                "RFIQ magic, u32 version, f64 rate, f64 envelope ref, u64 count, "
                "float32 I/Q pairs, little-endian"}}}};
  return j.dump(2) + "\n";
}

inline int cmd_schema() {
  std::fputs(schema_text().c_str(), stdout);
  return kExitOk;
}

}  // namespace rofsim
