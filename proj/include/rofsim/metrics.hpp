/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rofsim/common.hpp"
#include "rofsim/modem.hpp"

namespace rofsim {

enum class Verdict { kPass, kFail };

inline const char* to_string(Verdict v) { return v == Verdict::kPass ? "pass" : "fail"; }

// Modulation-error thresholds for a demodulated carrier, percent EVM.
inline double evm_threshold_percent(int order_m) {
  switch (order_m) {
    case 4: return 17.5;
    case 16: return 12.5;
    case 64: return 8.0;
    default: throw ContractViolation("evm_threshold_percent: order must be 4, 16 or 64");
  }
}

// RMS EVM in percent of RMS reference power. The received stream is expected
// to be gain-normalized already (recover_symbols does this).
inline double evm_rms_percent(const SymbolStream& received,
                              const std::vector<cplx>& reference) {
  if (received.symbols.empty() || received.symbols.size() > reference.size()) {
    throw ContractViolation("evm_rms_percent: reference/received size mismatch");
  }
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t k = 0; k < received.symbols.size(); ++k) {
    err += std::norm(received.symbols[k] - reference[k]);
    ref += std::norm(reference[k]);
  }
  if (!(ref > 0.0)) throw ContractViolation("evm_rms_percent: zero reference power");
  return 100.0 * std::sqrt(err / ref);
}

inline double snr_db_from_evm_percent(double evm_percent) {
  if (!(evm_percent > 0.0)) {
    throw ContractViolation("snr_db_from_evm_percent: EVM must be > 0");
  }
  return -20.0 * std::log10(evm_percent / 100.0);
}

inline double evm_percent_from_snr_db(double snr_db) {
  return 100.0 * std::pow(10.0, -snr_db / 20.0);
}

// Analytic square-QAM bit error rate under Gray coding at the SNR implied by
// the measured EVM (treating the error vector as additive Gaussian noise).
inline double ber_estimate(double evm_percent, int order_m) {
  const double m = static_cast<double>(order_m);
  const double bps = static_cast<double>(bits_per_symbol(order_m));
  const double snr = std::pow(100.0 / evm_percent, 2.0);
  const double arg = std::sqrt(3.0 * snr / (m - 1.0));
  return (4.0 / bps) * (1.0 - 1.0 / std::sqrt(m)) * q_function(arg);
}

struct EvmReport {
  int order_m = 0;
  std::size_t symbol_count = 0;
  double evm_rms_percent = 0.0;
  double evm_db = 0.0;
  double snr_equivalent_db = 0.0;
  double ber_estimate = 0.0;
  double threshold_percent = 0.0;
  Verdict verdict = Verdict::kFail;
};

inline EvmReport make_evm_report(const SymbolStream& received,
                                 const std::vector<cplx>& reference) {
  EvmReport r;
  r.order_m = received.order_m;
  r.symbol_count = received.symbols.size();
  r.evm_rms_percent = evm_rms_percent(received, reference);
  r.evm_db = 20.0 * std::log10(r.evm_rms_percent / 100.0);
  r.snr_equivalent_db = -r.evm_db;
  r.ber_estimate = ber_estimate(r.evm_rms_percent, received.order_m);
  r.threshold_percent = evm_threshold_percent(received.order_m);
  r.verdict = (r.evm_rms_percent <= r.threshold_percent) ? Verdict::kPass : Verdict::kFail;
  return r;
}

inline double bit_error_rate(const BitSequence& a, const BitSequence& b) {
  if (a.empty() || a.size() != b.size()) {
    throw ContractViolation("bit_error_rate: sequences must be non-empty and equal length");
  }
  std::size_t errs = 0;
  for (std::size_t k = 0; k < a.size(); ++k) errs += (a[k] != b[k]) ? 1u : 0u;
  return static_cast<double>(errs) / static_cast<double>(a.size());
}

// CSV of index,i,q plus a flat JSON sidecar (<path>.meta.json) carrying the
// EVM annotations when a report is supplied.
inline void constellation_export(const SymbolStream& stream, const std::string& path,
                                 const EvmReport* annotation = nullptr) {
  if (stream.symbols.empty()) throw ContractViolation("constellation_export: no symbols");
  std::ofstream csv(path, std::ios::trunc);
  if (!csv) throw SimulationError("constellation_export: cannot open " + path);
  csv << "index,i,q\n";
  char line[96];
  for (std::size_t k = 0; k < stream.symbols.size(); ++k) {
    std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g\n", k, stream.symbols[k].real(),
                  stream.symbols[k].imag());
    csv << line;
  }
  if (!csv) throw SimulationError("constellation_export: short write to " + path);

  std::ofstream meta(path + ".meta.json", std::ios::trunc);
  if (!meta) throw SimulationError("constellation_export: cannot open sidecar for " + path);
  char buf[512];
  if (annotation != nullptr) {
    std::snprintf(buf, sizeof(buf),
                  "{\n"
                  "  \"order_m\": %d,\n"
                  "  \"symbol_count\": %zu,\n"
                  "  \"evm_rms_percent\": %.9g,\n"
                  "  \"evm_db\": %.9g,\n"
                  "  \"snr_equivalent_db\": %.9g,\n"
                  "  \"ber_estimate\": %.9g,\n"
                  "  \"threshold_percent\": %.9g,\n"
                  "  \"verdict\": \"%s\"\n"
                  "}\n",
                  annotation->order_m, annotation->symbol_count,
                  annotation->evm_rms_percent, annotation->evm_db,
                  annotation->snr_equivalent_db, annotation->ber_estimate,
                  annotation->threshold_percent, to_string(annotation->verdict));
  } else {
    std::snprintf(buf, sizeof(buf), "{\n  \"order_m\": %d,\n  \"symbol_count\": %zu\n}\n",
                  stream.order_m, stream.symbols.size());
  }
  meta << buf;
}

}  // namespace rofsim
