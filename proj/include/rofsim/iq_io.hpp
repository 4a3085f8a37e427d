/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "rofsim/common.hpp"
#include "rofsim/waveform.hpp"

namespace rofsim {

// Binary IQ dump, little-endian throughout:
//   bytes 0..3   magic "RFIQ"
//   u32          format version (1)
//   f64          sample_rate_hz
//   f64          envelope_ref_hz
//   u64          sample count
//   f32 pairs    I, Q per sample
inline constexpr std::uint32_t kIqFormatVersion = 1;

namespace detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  // Serialize explicitly least-significant-byte first.
  if constexpr (sizeof(T) > 1) {
    std::uint64_t bits = 0;
    if constexpr (std::is_floating_point_v<T>) {
      if constexpr (sizeof(T) == 4) {
        std::uint32_t b;
        std::memcpy(&b, &value, 4);
        bits = b;
      } else {
        std::memcpy(&bits, &value, 8);
      }
    } else {
      bits = static_cast<std::uint64_t>(value);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
    }
  } else {
    out.push_back(raw[0]);
  }
}

template <typename T>
T get_le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  }
  if constexpr (std::is_floating_point_v<T>) {
    T value;
    if constexpr (sizeof(T) == 4) {
      std::uint32_t b = static_cast<std::uint32_t>(bits);
      std::memcpy(&value, &b, 4);
    } else {
      std::memcpy(&value, &bits, 8);
    }
    return value;
  } else {
    return static_cast<T>(bits);
  }
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_iq(const SampledWaveform& wf) {
  validate(wf, "serialize_iq");
  std::vector<std::uint8_t> out;
  out.reserve(32 + wf.samples.size() * 8);
  out.push_back('R');
  out.push_back('F');
  out.push_back('I');
  out.push_back('Q');
  detail::put_le<std::uint32_t>(out, kIqFormatVersion);
  detail::put_le<double>(out, wf.sample_rate_hz);
  detail::put_le<double>(out, wf.envelope_ref_hz);
  detail::put_le<std::uint64_t>(out, wf.samples.size());
  for (const cplx& v : wf.samples) {
    detail::put_le<float>(out, static_cast<float>(v.real()));
    detail::put_le<float>(out, static_cast<float>(v.imag()));
  }
  return out;
}

inline void write_iq(const std::string& path, const SampledWaveform& wf) {
  const std::vector<std::uint8_t> bytes = serialize_iq(wf);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw SimulationError("write_iq: cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw SimulationError("write_iq: short write to " + path);
}

inline SampledWaveform read_iq(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SimulationError("read_iq: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 32 || bytes[0] != 'R' || bytes[1] != 'F' || bytes[2] != 'I' ||
      bytes[3] != 'Q') {
    throw SimulationError("read_iq: " + path + " is not an RFIQ file");
  }
  const std::uint32_t version = detail::get_le<std::uint32_t>(&bytes[4]);
  if (version != kIqFormatVersion) {
    throw SimulationError("read_iq: unsupported RFIQ version");
  }
  SampledWaveform wf;
  wf.sample_rate_hz = detail::get_le<double>(&bytes[8]);
  wf.envelope_ref_hz = detail::get_le<double>(&bytes[16]);
  const std::uint64_t count = detail::get_le<std::uint64_t>(&bytes[24]);
  if (bytes.size() != 32 + count * 8) {
    throw SimulationError("read_iq: truncated RFIQ payload");
  }
  wf.samples.resize(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const float re = detail::get_le<float>(&bytes[32 + k * 8]);
    const float im = detail::get_le<float>(&bytes[32 + k * 8 + 4]);
    wf.samples[k] = cplx(re, im);
  }
  return wf;
}

}  // namespace rofsim
