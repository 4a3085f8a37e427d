/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rofsim {

using cplx = std::complex<double>;

// Physical constants (SI).
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kElementaryChargeC = 1.602176634e-19;
inline constexpr double kBoltzmannJPerK = 1.380649e-23;
inline constexpr double kPlanckJS = 6.62607015e-34;
inline constexpr double kSpeedOfLightMPerS = 299792458.0;

// Reference bandwidth for optical SNR bookkeeping: 0.1 nm at 1550 nm.
inline constexpr double kOsnrRefBandwidthHz = 12.5e9;

// A caller handed us a value that violates an operation's contract.
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// A scenario / config file / override is malformed or out of range.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown inside the simulation itself (non-finite samples etc.).
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

// Non-fatal observation emitted by a stage (clipping, band overflow, ...).
struct Diagnostic {
  std::string stage;
  std::string code;
  std::string message;
};

using DiagnosticList = std::vector<Diagnostic>;

inline void add_diag(DiagnosticList* sink, std::string stage, std::string code,
                     std::string message) {
  if (sink != nullptr) {
    sink->push_back(Diagnostic{std::move(stage), std::move(code), std::move(message)});
  }
}

// dB / linear conversions. "db" refers to power ratios, "db_amplitude" to field
// or voltage ratios (20 log10).
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }
inline double amplitude_to_db(double amp) { return 20.0 * std::log10(amp); }
inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

inline double optical_frequency_hz(double wavelength_nm) {
  return kSpeedOfLightMPerS / (wavelength_nm * 1e-9);
}

// Gaussian tail probability Q(x) = P(N(0,1) > x).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline constexpr double infinity() { return std::numeric_limits<double>::infinity(); }

}  // namespace rofsim
