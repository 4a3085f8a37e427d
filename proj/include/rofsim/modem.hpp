/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rofsim/common.hpp"
#include "rofsim/waveform.hpp"

namespace rofsim {

using BitSequence = std::vector<std::uint8_t>;  // one 0/1 per element

struct ModemConfig {
  int order_m = 64;
  double symbol_rate_hz = 560e6 / 6.0;  // 560 Mb/s over 6 bits per symbol
  double rolloff = 0.35;
  int samples_per_symbol = 10;
  int rrc_span_symbols = 28;
  double rf_subcarrier_hz = 5e9;

  double sample_rate_hz() const {
    return symbol_rate_hz * static_cast<double>(samples_per_symbol);
  }
  double occupied_bandwidth_hz() const { return symbol_rate_hz * (1.0 + rolloff); }
  int rrc_taps_count() const { return rrc_span_symbols * samples_per_symbol + 1; }

  void validate() const {
    if (order_m != 4 && order_m != 16 && order_m != 64) {
      throw ConfigError("modem.order_m must be 4, 16 or 64");
    }
    if (!(symbol_rate_hz > 0.0)) throw ConfigError("modem.symbol_rate_hz must be > 0");
    if (!(rolloff > 0.0) || rolloff > 1.0) {
      throw ConfigError("modem.rolloff must be in (0, 1]");
    }
    if (samples_per_symbol < 2) throw ConfigError("modem.samples_per_symbol must be >= 2");
    if (rrc_span_symbols < 4) throw ConfigError("modem.rrc_span_symbols must be >= 4");
    if (rf_subcarrier_hz < 0.0) throw ConfigError("modem.rf_subcarrier_hz must be >= 0");
    if (rf_subcarrier_hz > 0.0 && rf_subcarrier_hz < sample_rate_hz() / 2.0) {
      throw ConfigError("modem.rf_subcarrier_hz must exceed half the sample rate");
    }
    if (occupied_bandwidth_hz() > sample_rate_hz()) {
      throw ConfigError("modem: occupied bandwidth exceeds the sample rate");
    }
  }
};

struct SymbolStream {
  std::vector<cplx> symbols;
  int order_m = 0;
};

inline int bits_per_symbol(int order_m) {
  switch (order_m) {
    case 4: return 2;
    case 16: return 4;
    case 64: return 6;
    default: throw ContractViolation("bits_per_symbol: order must be 4, 16 or 64");
  }
}

namespace detail {

// Levels per axis and the scale that gives the constellation unit average power.
inline int qam_levels(int order_m) {
  switch (order_m) {
    case 4: return 2;
    case 16: return 4;
    case 64: return 8;
    default: throw ContractViolation("qam_levels: order must be 4, 16 or 64");
  }
}

inline double qam_norm(int order_m) {
  return std::sqrt(2.0 * (static_cast<double>(order_m) - 1.0) / 3.0);
}

inline unsigned gray_encode(unsigned i) { return i ^ (i >> 1); }

inline unsigned gray_decode(unsigned g) {
  unsigned v = g;
  for (unsigned shift = 1; shift < 8 * sizeof(unsigned); shift <<= 1) {
    v ^= v >> shift;
  }
  return v;
}

// Per-axis Gray slicer: y is the unnormalized amplitude (odd integers are the
// ideal levels). Exact boundary ties resolve to the smaller Gray codeword.
inline unsigned slice_axis(double y, int levels) {
  const double u = (y + static_cast<double>(levels - 1)) * 0.5;
  long idx;
  const double lo = std::floor(u);
  if (u - lo == 0.5) {
    const long a = static_cast<long>(lo);
    const long b = a + 1;
    const long ca = std::clamp(a, 0L, static_cast<long>(levels - 1));
    const long cb = std::clamp(b, 0L, static_cast<long>(levels - 1));
    idx = (gray_encode(static_cast<unsigned>(ca)) <= gray_encode(static_cast<unsigned>(cb)))
              ? ca
              : cb;
  } else {
    idx = std::lround(u);
  }
  idx = std::clamp(idx, 0L, static_cast<long>(levels - 1));
  return static_cast<unsigned>(idx);
}

inline unsigned bits_to_value(const BitSequence& bits, std::size_t start, int count) {
  unsigned v = 0;
  for (int k = 0; k < count; ++k) {
    const std::uint8_t b = bits[start + static_cast<std::size_t>(k)];
    if (b > 1) throw ContractViolation("qam_map: bit values must be 0 or 1");
    v = (v << 1) | b;
  }
  return v;
}

}  // namespace detail

// Gray-coded square QAM. The first half of each symbol's bits selects the I
// level, the second half the Q level, MSB first; average symbol power is 1.
inline SymbolStream qam_map(const BitSequence& bits, int order_m) {
  const int bps = bits_per_symbol(order_m);
  if (bits.empty() || bits.size() % static_cast<std::size_t>(bps) != 0) {
    throw ContractViolation("qam_map: bit count must be a non-zero multiple of log2(M)");
  }
  const int levels = detail::qam_levels(order_m);
  const int axis_bits = bps / 2;
  const double scale = 1.0 / detail::qam_norm(order_m);
  SymbolStream out;
  out.order_m = order_m;
  out.symbols.resize(bits.size() / static_cast<std::size_t>(bps));
  for (std::size_t s = 0; s < out.symbols.size(); ++s) {
    const std::size_t base = s * static_cast<std::size_t>(bps);
    const unsigned gi = detail::bits_to_value(bits, base, axis_bits);
    const unsigned gq = detail::bits_to_value(bits, base + axis_bits, axis_bits);
    const unsigned i = detail::gray_decode(gi);
    const unsigned q = detail::gray_decode(gq);
    const double ai = 2.0 * static_cast<double>(i) - static_cast<double>(levels - 1);
    const double aq = 2.0 * static_cast<double>(q) - static_cast<double>(levels - 1);
    out.symbols[s] = cplx(ai * scale, aq * scale);
  }
  return out;
}

// Hard-decision demapper (nearest constellation point per axis).
inline BitSequence qam_demap(const SymbolStream& stream, int order_m) {
  if (stream.symbols.empty()) throw ContractViolation("qam_demap: empty symbol stream");
  const int bps = bits_per_symbol(order_m);
  const int levels = detail::qam_levels(order_m);
  const int axis_bits = bps / 2;
  const double norm = detail::qam_norm(order_m);
  BitSequence bits(stream.symbols.size() * static_cast<std::size_t>(bps));
  for (std::size_t s = 0; s < stream.symbols.size(); ++s) {
    const cplx v = stream.symbols[s] * norm;
    const unsigned gi = detail::gray_encode(detail::slice_axis(v.real(), levels));
    const unsigned gq = detail::gray_encode(detail::slice_axis(v.imag(), levels));
    const std::size_t base = s * static_cast<std::size_t>(bps);
    for (int k = 0; k < axis_bits; ++k) {
      bits[base + static_cast<std::size_t>(k)] =
          static_cast<std::uint8_t>((gi >> (axis_bits - 1 - k)) & 1u);
      bits[base + static_cast<std::size_t>(axis_bits + k)] =
          static_cast<std::uint8_t>((gq >> (axis_bits - 1 - k)) & 1u);
    }
  }
  return bits;
}

// Ideal constellation point nearest to v (used for non-data-aided EVM).
inline cplx qam_slice(cplx v, int order_m) {
  const int levels = detail::qam_levels(order_m);
  const double norm = detail::qam_norm(order_m);
  const unsigned i = detail::slice_axis(v.real() * norm, levels);
  const unsigned q = detail::slice_axis(v.imag() * norm, levels);
  const double ai = 2.0 * static_cast<double>(i) - static_cast<double>(levels - 1);
  const double aq = 2.0 * static_cast<double>(q) - static_cast<double>(levels - 1);
  return cplx(ai / norm, aq / norm);
}

namespace detail {

// Root-raised-cosine impulse response at t (in symbols), peak-normalized form.
inline double rrc_value(double t, double rolloff) {
  const double b = rolloff;
  if (std::abs(t) < 1e-12) {
    return 1.0 - b + 4.0 * b / kPi;
  }
  if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
    const double c = kPi / (4.0 * b);
    return (b / std::sqrt(2.0)) *
           ((1.0 + 2.0 / kPi) * std::sin(c) + (1.0 - 2.0 / kPi) * std::cos(c));
  }
  const double den = kPi * t * (1.0 - 16.0 * b * b * t * t);
  return (std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b))) /
         den;
}

inline double rrc_raw_energy(double rolloff, int samples_per_symbol, int span_symbols) {
  const int n = span_symbols * samples_per_symbol + 1;
  const int mid = (n - 1) / 2;
  double e = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t =
        static_cast<double>(k - mid) / static_cast<double>(samples_per_symbol);
    const double v = rrc_value(t, rolloff);
    e += v * v;
  }
  return e;
}

// Fraction of the filter's total energy captured by the truncated span. A span
// of 200 symbols stands in for the untruncated pulse (tail energy decays fast
// enough that the remainder is below 1e-7).
inline double rrc_span_energy_fraction(double rolloff, int samples_per_symbol,
                                       int span_symbols) {
  const int ref_span = std::max(span_symbols, 200);
  return rrc_raw_energy(rolloff, samples_per_symbol, span_symbols) /
         rrc_raw_energy(rolloff, samples_per_symbol, ref_span);
}

}  // namespace detail

// Unit-energy root-raised-cosine taps, span*sps+1 of them, symmetric about the
// centre tap.
inline std::vector<double> rrc_taps(double rolloff, int samples_per_symbol,
                                    int span_symbols) {
  if (!(rolloff > 0.0) || rolloff > 1.0) {
    throw ContractViolation("rrc_taps: rolloff must be in (0, 1]");
  }
  if (samples_per_symbol < 2 || span_symbols < 1) {
    throw ContractViolation("rrc_taps: bad samples_per_symbol or span");
  }
  const int n = span_symbols * samples_per_symbol + 1;
  const int mid = (n - 1) / 2;
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t =
        static_cast<double>(k - mid) / static_cast<double>(samples_per_symbol);
    g[static_cast<std::size_t>(k)] = detail::rrc_value(t, rolloff);
  }
  double energy = 0.0;
  for (double v : g) energy += v * v;
  const double inv = 1.0 / std::sqrt(energy);
  for (double& v : g) v *= inv;
  return g;
}

// Group delay in samples contributed by one RRC filter of this config.
inline double rrc_delay_samples(const ModemConfig& cfg) {
  return static_cast<double>(cfg.rrc_taps_count() - 1) / 2.0;
}

// Upsample + RRC shape. Output power is ~1 (unit-power constellation through a
// unit-energy filter with sqrt(sps) gain); length Nsym*sps + taps - 1. When a
// diagnostic sink is given, a span that truncates away more than 0.1% of the
// filter energy is reported as a configuration warning.
inline SampledWaveform pulse_shape(const SymbolStream& stream, const ModemConfig& cfg,
                                   DiagnosticList* diag = nullptr) {
  cfg.validate();
  if (stream.symbols.empty()) throw ContractViolation("pulse_shape: no symbols");
  if (diag != nullptr) {
    const double frac = detail::rrc_span_energy_fraction(
        cfg.rolloff, cfg.samples_per_symbol, cfg.rrc_span_symbols);
    if (frac < 0.999) {
      add_diag(diag, "modem", "rrc_span_low_energy",
               "rrc_span_symbols=" + std::to_string(cfg.rrc_span_symbols) +
                   " captures only " + std::to_string(frac * 100.0) +
                   "% of the filter energy (< 99.9%)");
    }
  }
  const std::vector<double> g =
      rrc_taps(cfg.rolloff, cfg.samples_per_symbol, cfg.rrc_span_symbols);
  const int sps = cfg.samples_per_symbol;
  const std::size_t n_sym = stream.symbols.size();
  const std::size_t n_out = (n_sym - 1) * static_cast<std::size_t>(sps) + g.size();
  SampledWaveform out;
  out.sample_rate_hz = cfg.sample_rate_hz();
  out.envelope_ref_hz = cfg.rf_subcarrier_hz;
  out.samples.assign(n_out, cplx(0.0, 0.0));
  const double amp = std::sqrt(static_cast<double>(sps));
  for (std::size_t k = 0; k < n_sym; ++k) {
    const cplx s = stream.symbols[k] * amp;
    const std::size_t base = k * static_cast<std::size_t>(sps);
    for (std::size_t j = 0; j < g.size(); ++j) {
      out.samples[base + j] += s * g[j];
    }
  }
  return out;
}

// Matched filter + symbol-spaced sampling + complex-gain normalization.
// `chain_delay_samples` is the extra group delay accumulated between the
// pulse_shape output and this waveform (the two RRC filters' own delay is
// accounted for internally); it must be tracked by the caller and must be an
// integer number of samples. With `reference` present the normalizer
// alpha = <ref,z>/<ref,ref> is data-aided, otherwise decisions are used.
inline SymbolStream recover_symbols(const SampledWaveform& wf, const ModemConfig& cfg,
                                    const std::vector<cplx>* reference,
                                    std::optional<double> chain_delay_samples) {
  cfg.validate();
  validate(wf, "recover_symbols");
  if (!chain_delay_samples.has_value()) {
    throw ContractViolation(
        "recover_symbols: chain delay not tracked; pass the accumulated group delay");
  }
  const double d = *chain_delay_samples;
  if (std::abs(d - std::round(d)) > 1e-9) {
    throw ContractViolation("recover_symbols: fractional chain delay unsupported");
  }
  const long delay = static_cast<long>(std::llround(d));
  const std::vector<double> g =
      rrc_taps(cfg.rolloff, cfg.samples_per_symbol, cfg.rrc_span_symbols);
  const long taps = static_cast<long>(g.size());
  const long sps = cfg.samples_per_symbol;
  const long len = static_cast<long>(wf.samples.size());
  long n_sym = (len - delay - taps) / sps + 1;
  if (reference != nullptr) {
    n_sym = std::min(n_sym, static_cast<long>(reference->size()));
  }
  if (n_sym <= 0) throw ContractViolation("recover_symbols: waveform too short");

  SymbolStream out;
  out.order_m = cfg.order_m;
  out.symbols.resize(static_cast<std::size_t>(n_sym));
  const double inv_amp = 1.0 / std::sqrt(static_cast<double>(sps));
  for (long k = 0; k < n_sym; ++k) {
    const long base = k * sps + delay;
    cplx acc(0.0, 0.0);
    for (long j = 0; j < taps; ++j) {
      const long idx = base + j;
      if (idx >= 0 && idx < len) {
        acc += wf.samples[static_cast<std::size_t>(idx)] * g[static_cast<std::size_t>(j)];
      }
    }
    out.symbols[static_cast<std::size_t>(k)] = acc * inv_amp;
  }

  // Single complex-gain fit; no equalization beyond this.
  cplx num(0.0, 0.0);
  double den = 0.0;
  if (reference != nullptr) {
    for (std::size_t k = 0; k < out.symbols.size(); ++k) {
      num += std::conj((*reference)[k]) * out.symbols[k];
      den += std::norm((*reference)[k]);
    }
  } else {
    double msq = 0.0;
    for (const cplx& z : out.symbols) msq += std::norm(z);
    msq /= static_cast<double>(out.symbols.size());
    const double pre = (msq > 0.0) ? 1.0 / std::sqrt(msq) : 1.0;
    for (const cplx& z : out.symbols) {
      const cplx dec = qam_slice(z * pre, cfg.order_m);
      num += std::conj(dec) * z;
      den += std::norm(dec);
    }
  }
  if (!(den > 0.0) || std::abs(num) == 0.0) {
    throw SimulationError("recover_symbols: degenerate normalization fit");
  }
  const cplx alpha = num / den;
  for (cplx& z : out.symbols) z /= alpha;
  return out;
}

}  // namespace rofsim
