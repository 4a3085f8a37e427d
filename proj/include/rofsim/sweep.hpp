/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "rofsim/link.hpp"
#include "rofsim/metrics.hpp"
#include "rofsim/scenario_json.hpp"

namespace rofsim {

struct SweepSpec {
  std::string parameter_path = "of1.length_km";
  std::vector<double> values = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::size_t symbols_per_point = 20000;
};

inline void validate(const SweepSpec& spec) {
  if (find_parameter(spec.parameter_path) == nullptr) {
    throw ConfigError("sweep.parameter_path '" + spec.parameter_path +
                      "' is not a known parameter (valid: " + valid_parameter_paths() +
                      ")");
  }
  if (spec.values.empty()) throw ConfigError("sweep.values must be non-empty");
  if (spec.seeds.empty()) throw ConfigError("sweep.seeds must be non-empty");
  if (spec.symbols_per_point < 10000) {
    throw ConfigError("sweep.symbols_per_point must be >= 10000");
  }
  if (spec.parameter_path.find("length_km") != std::string::npos) {
    for (std::size_t k = 1; k < spec.values.size(); ++k) {
      if (!(spec.values[k] > spec.values[k - 1])) {
        throw ConfigError("sweep.values must be strictly increasing for length sweeps");
      }
    }
  }
}

struct SweepPoint {
  double value = 0.0;
  std::uint64_t seed = 0;
  double downlink_evm_percent = 0.0;
  double uplink_evm_percent = 0.0;
  Verdict downlink_verdict = Verdict::kFail;
  Verdict uplink_verdict = Verdict::kFail;
  double lock_margin_ghz = 0.0;
  bool qos_crc_ok = false;
  std::string status = "ok";  // ok | lock_error | error
  std::string message;
};

struct SweepSummary {
  double value = 0.0;
  std::size_t ok_count = 0;
  double mean_downlink_evm = 0.0;
  double std_downlink_evm = 0.0;
  double mean_uplink_evm = 0.0;
  double std_uplink_evm = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;      // value-major, seed-minor order
  std::vector<SweepSummary> summaries;  // one per value
  bool any_failure = false;
};

inline SweepPoint evaluate_sweep_point(const Scenario& base, const SweepSpec& spec,
                                       double value, std::uint64_t seed) {
  SweepPoint p;
  p.value = value;
  p.seed = seed;
  try {
    Scenario sc = base;
    set_parameter(sc, spec.parameter_path, value);
    sc.seed = seed;
    validate(sc);
    const std::size_t n_bits =
        spec.symbols_per_point * static_cast<std::size_t>(bits_per_symbol(sc.modem.order_m));
    const BitSequence bits = random_bits(n_bits, RngHandle{seed, kStreamPayloadBits});
    const std::vector<std::uint8_t> qos_payload = {'q', 'o', 's'};
    const LinkRun run = run_link(sc, bits, qos_payload);
    const EvmReport dl = make_evm_report(run.downlink_symbols, run.tx_symbols.symbols);
    const EvmReport ul = make_evm_report(run.uplink_symbols, run.tx_symbols.symbols);
    p.downlink_evm_percent = dl.evm_rms_percent;
    p.uplink_evm_percent = ul.evm_rms_percent;
    p.downlink_verdict = dl.verdict;
    p.uplink_verdict = ul.verdict;
    p.lock_margin_ghz = run.lock.margin_ghz;
    p.qos_crc_ok = run.qos.crc_ok;
  } catch (const LockError& e) {
    p.status = "lock_error";
    p.message = e.what();
    p.lock_margin_ghz = e.state().margin_ghz;
  } catch (const std::exception& e) {
    p.status = "error";
    p.message = e.what();
  }
  return p;
}

// Every point owns its seed-derived noise streams, so execution order cannot
// change the numbers; results land in a pre-sized vector by index and the CSV
// is byte-identical for any thread count.
inline SweepResult run_sweep(const Scenario& base, const SweepSpec& spec,
                             unsigned n_threads = 1) {
  validate(spec);
  validate(base);
  SweepResult result;
  result.spec = spec;
  const std::size_t n_points = spec.values.size() * spec.seeds.size();
  result.points.resize(n_points);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= n_points) return;
      const double value = spec.values[idx / spec.seeds.size()];
      const std::uint64_t seed = spec.seeds[idx % spec.seeds.size()];
      result.points[idx] = evaluate_sweep_point(base, spec, value, seed);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(n_threads, static_cast<unsigned>(n_points));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
    SweepSummary s;
    s.value = spec.values[vi];
    double dsum = 0.0, usum = 0.0;
    std::vector<double> dl, ul;
    for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
      const SweepPoint& p = result.points[vi * spec.seeds.size() + si];
      if (p.status == "ok") {
        dl.push_back(p.downlink_evm_percent);
        ul.push_back(p.uplink_evm_percent);
        dsum += p.downlink_evm_percent;
        usum += p.uplink_evm_percent;
      } else {
        result.any_failure = true;
      }
    }
    s.ok_count = dl.size();
    if (!dl.empty()) {
      s.mean_downlink_evm = dsum / static_cast<double>(dl.size());
      s.mean_uplink_evm = usum / static_cast<double>(ul.size());
      double dvar = 0.0, uvar = 0.0;
      for (std::size_t k = 0; k < dl.size(); ++k) {
        dvar += (dl[k] - s.mean_downlink_evm) * (dl[k] - s.mean_downlink_evm);
        uvar += (ul[k] - s.mean_uplink_evm) * (ul[k] - s.mean_uplink_evm);
      }
      if (dl.size() > 1) {
        s.std_downlink_evm = std::sqrt(dvar / static_cast<double>(dl.size() - 1));
        s.std_uplink_evm = std::sqrt(uvar / static_cast<double>(ul.size() - 1));
      }
    }
    result.summaries.push_back(s);
  }
  return result;
}

// Point rows first (kind=point), then per-value mean/std rows. The value
// column is headed by the swept parameter path so the file stands on its own;
// %.10g keeps it byte-stable across runs.
inline std::string sweep_csv_text(const SweepResult& result) {
  std::string out = "kind," + result.spec.parameter_path +
                    ",seed,downlink_evm_percent,uplink_evm_percent,downlink_verdict,"
                    "uplink_verdict,lock_margin_ghz,qos_crc_ok,status,message\n";
  char buf[512];
  for (const SweepPoint& p : result.points) {
    if (p.status == "ok") {
      std::snprintf(buf, sizeof(buf), "point,%.10g,%llu,%.10g,%.10g,%s,%s,%.10g,%d,%s,\n",
                    p.value, static_cast<unsigned long long>(p.seed),
                    p.downlink_evm_percent, p.uplink_evm_percent,
                    to_string(p.downlink_verdict), to_string(p.uplink_verdict),
                    p.lock_margin_ghz, p.qos_crc_ok ? 1 : 0, p.status.c_str());
    } else {
      std::string msg = p.message;
      for (char& c : msg) {
        if (c == ',' || c == '\n') c = ';';
      }
      std::snprintf(buf, sizeof(buf), "point,%.10g,%llu,,,,,%.10g,,%s,%s\n", p.value,
                    static_cast<unsigned long long>(p.seed), p.lock_margin_ghz,
                    p.status.c_str(), msg.c_str());
    }
    out += buf;
  }
  for (const SweepSummary& s : result.summaries) {
    std::snprintf(buf, sizeof(buf), "mean,%.10g,,%.10g,%.10g,,,,,,%zu ok\n", s.value,
                  s.mean_downlink_evm, s.mean_uplink_evm, s.ok_count);
    out += buf;
    std::snprintf(buf, sizeof(buf), "std,%.10g,,%.10g,%.10g,,,,,,\n", s.value,
                  s.std_downlink_evm, s.std_uplink_evm);
    out += buf;
  }
  return out;
}

inline void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  if (!f) throw SimulationError("write_sweep_csv: cannot open " + path);
  const std::string text = sweep_csv_text(result);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw SimulationError("write_sweep_csv: short write to " + path);
}

}  // namespace rofsim
