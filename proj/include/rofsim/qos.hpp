/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rofsim/common.hpp"
#include "rofsim/fft.hpp"
#include "rofsim/waveform.hpp"

namespace rofsim {

// Low-rate service/monitoring channel carried on a BPSK subcarrier next to the
// main QAM band (frequency-division multiplexed, so neither signal needs
// switching or scheduling).
struct QosSubcarrierConfig {
  bool enabled = true;
  double subcarrier_offset_hz = -400e6;  // relative to the RF carrier
  double bit_rate_bps = 1e6;
  double relative_power_db = -10.0;      // vs the host waveform power
};

inline std::uint16_t crc16_ccitt_false(const std::uint8_t* data, std::size_t size) {
  std::uint16_t crc = 0xFFFF;
  for (std::size_t i = 0; i < size; ++i) {
    crc = static_cast<std::uint16_t>(crc ^ (static_cast<std::uint16_t>(data[i]) << 8));
    for (int b = 0; b < 8; ++b) {
      crc = static_cast<std::uint16_t>((crc & 0x8000u) ? (crc << 1) ^ 0x1021u : crc << 1);
    }
  }
  return crc;
}

inline std::uint16_t crc16_ccitt_false(const std::vector<std::uint8_t>& data) {
  return crc16_ccitt_false(data.data(), data.size());
}

inline constexpr std::uint8_t kQosPreamble0 = 0xA5;
inline constexpr std::uint8_t kQosPreamble1 = 0xC3;

// Frame layout: preamble A5 C3, big-endian u16 payload length, payload,
// big-endian CRC-16/CCITT-FALSE over length + payload.
inline std::vector<std::uint8_t> build_qos_frame(const std::vector<std::uint8_t>& payload) {
  if (payload.empty() || payload.size() > 1024) {
    throw ContractViolation("build_qos_frame: payload must be 1..1024 bytes");
  }
  std::vector<std::uint8_t> frame;
  frame.reserve(payload.size() + 6);
  frame.push_back(kQosPreamble0);
  frame.push_back(kQosPreamble1);
  frame.push_back(static_cast<std::uint8_t>(payload.size() >> 8));
  frame.push_back(static_cast<std::uint8_t>(payload.size() & 0xFF));
  frame.insert(frame.end(), payload.begin(), payload.end());
  const std::uint16_t crc = crc16_ccitt_false(frame.data() + 2, payload.size() + 2);
  frame.push_back(static_cast<std::uint8_t>(crc >> 8));
  frame.push_back(static_cast<std::uint8_t>(crc & 0xFF));
  return frame;
}

namespace detail {

inline std::vector<std::uint8_t> bytes_to_bits_msb(const std::vector<std::uint8_t>& bytes) {
  std::vector<std::uint8_t> bits;
  bits.reserve(bytes.size() * 8);
  for (std::uint8_t b : bytes) {
    for (int k = 7; k >= 0; --k) bits.push_back(static_cast<std::uint8_t>((b >> k) & 1u));
  }
  return bits;
}

// Whole samples per bit; the realized bit rate is fs / n.
inline std::size_t qos_samples_per_bit(double fs, const QosSubcarrierConfig& cfg) {
  if (!(cfg.bit_rate_bps > 0.0)) throw ConfigError("qos.bit_rate_bps must be > 0");
  const std::size_t n = static_cast<std::size_t>(std::llround(fs / cfg.bit_rate_bps));
  if (n < 2) throw ConfigError("qos.bit_rate_bps too high for this sample rate");
  return n;
}

}  // namespace detail

// Superimposes the framed payload as a BPSK subcarrier at the configured
// offset and relative power. Frames repeat back to back for the whole
// waveform, so the power ratio holds as a long-run average regardless of the
// payload length. The rectangular bit stream is band-limited to the subcarrier
// budget (flat to the bit rate, raised-cosine roll to 1.5x) before insertion:
// bare NRZ sidelobes decay only as 1/f^2 and would land about -50 dB of BPSK
// power inside the QAM band, visible against a sub-0.1% EVM floor. The tone is
// rescaled after filtering, so the configured power ratio is exact.
inline SampledWaveform add_service_data(const SampledWaveform& wf,
                                        const std::vector<std::uint8_t>& payload,
                                        const QosSubcarrierConfig& cfg) {
  validate(wf, "add_service_data");
  if (!cfg.enabled) return wf;
  const double fs = wf.sample_rate_hz;
  if (std::abs(cfg.subcarrier_offset_hz) + 1.5 * cfg.bit_rate_bps > 0.98 * fs / 2.0) {
    throw ConfigError("qos.subcarrier_offset_hz is outside the representable band");
  }
  const std::size_t n_spb = detail::qos_samples_per_bit(fs, cfg);
  const std::vector<std::uint8_t> bits = detail::bytes_to_bits_msb(build_qos_frame(payload));
  if (bits.size() * n_spb > wf.samples.size()) {
    throw ConfigError("qos: waveform shorter than one service frame");
  }
  SampledWaveform tone;
  tone.sample_rate_hz = fs;
  tone.envelope_ref_hz = wf.envelope_ref_hz;
  tone.samples.resize(wf.samples.size());
  const double w = 2.0 * kPi * cfg.subcarrier_offset_hz / fs;
  for (std::size_t n = 0; n < tone.samples.size(); ++n) {
    const std::size_t bit_idx = (n / n_spb) % bits.size();
    const double sym = bits[bit_idx] ? 1.0 : -1.0;
    const double ph = w * static_cast<double>(n);
    tone.samples[n] = sym * cplx(std::cos(ph), std::sin(ph));
  }
  const double rb = fs / static_cast<double>(n_spb);  // realized bit rate
  tone = detail::apply_frequency_response(tone, [&](double offset_hz) -> cplx {
    const double d = std::abs(offset_hz - cfg.subcarrier_offset_hz);
    if (d <= rb) return cplx(1.0, 0.0);
    if (d >= 1.5 * rb) return cplx(0.0, 0.0);
    return cplx(0.5 * (1.0 + std::cos(kPi * (d - rb) / (0.5 * rb))), 0.0);
  });
  const double target = power(wf) * db_to_linear(cfg.relative_power_db);
  const double scale = std::sqrt(target / power(tone));
  SampledWaveform out = wf;
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    out.samples[n] += scale * tone.samples[n];
  }
  return out;
}

struct QosExtract {
  bool found = false;
  bool crc_ok = false;
  std::vector<std::uint8_t> payload;
  double mean_bit_magnitude = 0.0;  // post-integration decision amplitude
};

// Coherent integrate-and-dump BPSK demodulation plus frame sync. Carrier
// phase is recovered by squaring (BPSK removes modulation); the residual
// polarity ambiguity is resolved during the preamble search.
inline QosExtract extract_service_data(const SampledWaveform& wf,
                                       const QosSubcarrierConfig& cfg) {
  validate(wf, "extract_service_data");
  QosExtract out;
  if (!cfg.enabled) return out;
  const double fs = wf.sample_rate_hz;
  const std::size_t n_spb = detail::qos_samples_per_bit(fs, cfg);
  const std::size_t n_bits = wf.samples.size() / n_spb;
  if (n_bits < 64) return out;

  const double w = 2.0 * kPi * cfg.subcarrier_offset_hz / fs;
  std::vector<cplx> soft(n_bits);
  for (std::size_t k = 0; k < n_bits; ++k) {
    cplx acc(0.0, 0.0);
    const std::size_t base = k * n_spb;
    for (std::size_t j = 0; j < n_spb; ++j) {
      const double ph = -w * static_cast<double>(base + j);
      acc += wf.samples[base + j] * cplx(std::cos(ph), std::sin(ph));
    }
    soft[k] = acc / static_cast<double>(n_spb);
  }

  cplx sq(0.0, 0.0);
  double mag = 0.0;
  for (const cplx& v : soft) {
    sq += v * v;
    mag += std::abs(v);
  }
  out.mean_bit_magnitude = mag / static_cast<double>(n_bits);
  const double phase = 0.5 * std::arg(sq);
  const cplx derot = cplx(std::cos(-phase), std::sin(-phase));

  std::vector<std::uint8_t> hard(n_bits);
  for (std::size_t k = 0; k < n_bits; ++k) {
    hard[k] = ((soft[k] * derot).real() >= 0.0) ? 1u : 0u;
  }

  const std::vector<std::uint8_t> pre =
      detail::bytes_to_bits_msb({kQosPreamble0, kQosPreamble1});
  for (int polarity = 0; polarity < 2 && !out.found; ++polarity) {
    for (std::size_t start = 0; start + 48 <= n_bits && !out.found; ++start) {
      bool match = true;
      for (std::size_t j = 0; j < pre.size(); ++j) {
        const std::uint8_t bit = polarity ? (1u - hard[start + j]) : hard[start + j];
        if (bit != pre[j]) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      auto read_byte = [&](std::size_t bit_base) -> std::optional<std::uint8_t> {
        if (bit_base + 8 > n_bits) return std::nullopt;
        std::uint8_t v = 0;
        for (std::size_t j = 0; j < 8; ++j) {
          const std::uint8_t bit =
              polarity ? (1u - hard[bit_base + j]) : hard[bit_base + j];
          v = static_cast<std::uint8_t>((v << 1) | bit);
        }
        return v;
      };
      const auto len_hi = read_byte(start + 16);
      const auto len_lo = read_byte(start + 24);
      if (!len_hi || !len_lo) break;
      const std::size_t len = (static_cast<std::size_t>(*len_hi) << 8) | *len_lo;
      if (len == 0 || len > 1024) continue;
      const std::size_t total_bits = (6 + len) * 8;
      if (start + total_bits > n_bits) continue;
      std::vector<std::uint8_t> body;  // length + payload, for the CRC
      body.push_back(*len_hi);
      body.push_back(*len_lo);
      bool ok = true;
      for (std::size_t i = 0; i < len && ok; ++i) {
        const auto byte = read_byte(start + 32 + i * 8);
        if (!byte) {
          ok = false;
        } else {
          body.push_back(*byte);
        }
      }
      if (!ok) continue;
      const auto crc_hi = read_byte(start + 32 + len * 8);
      const auto crc_lo = read_byte(start + 40 + len * 8);
      if (!crc_hi || !crc_lo) continue;
      const std::uint16_t rx_crc =
          static_cast<std::uint16_t>((static_cast<std::uint16_t>(*crc_hi) << 8) | *crc_lo);
      out.found = true;
      out.crc_ok = (crc16_ccitt_false(body) == rx_crc);
      out.payload.assign(body.begin() + 2, body.end());
    }
  }
  return out;
}

}  // namespace rofsim
