/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "rofsim/link.hpp"
#include "rofsim/metrics.hpp"
#include "rofsim/spectrum.hpp"

using namespace rofsim;
using Catch::Approx;

namespace {

BitSequence payload_for(const Scenario& s, std::size_t nsym) {
  return random_bits(bits_per_symbol(s.modem.order_m) * nsym,
                     RngHandle{s.seed, kStreamPayloadBits});
}

const std::vector<std::uint8_t> kQosPayload = {'d', 'u', '-', 'q', 'o', 's'};

}  // namespace

TEST_CASE("crc16 matches the standard check value") {
  const std::vector<std::uint8_t> check = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
  REQUIRE(crc16_ccitt_false(check) == 0x29B1);
}

TEST_CASE("service frame layout is preamble, length, payload, crc") {
  const std::vector<std::uint8_t> payload = {0xDE, 0xAD};
  const std::vector<std::uint8_t> frame = build_qos_frame(payload);
  REQUIRE(frame.size() == 8);
  REQUIRE(frame[0] == 0xA5);
  REQUIRE(frame[1] == 0xC3);
  REQUIRE(frame[2] == 0x00);
  REQUIRE(frame[3] == 0x02);
  REQUIRE(frame[4] == 0xDE);
  REQUIRE(frame[5] == 0xAD);
  const std::vector<std::uint8_t> body = {0x00, 0x02, 0xDE, 0xAD};
  const std::uint16_t crc = crc16_ccitt_false(body);
  REQUIRE(frame[6] == static_cast<std::uint8_t>(crc >> 8));
  REQUIRE(frame[7] == static_cast<std::uint8_t>(crc & 0xFF));
  REQUIRE_THROWS_AS(build_qos_frame({}), ContractViolation);
  REQUIRE_THROWS_AS(build_qos_frame(std::vector<std::uint8_t>(1025, 0)),
                    ContractViolation);
}

TEST_CASE("service subcarrier inserts at the configured relative power") {
  Scenario s;
  const BitSequence bits = payload_for(s, 12000);
  SampledWaveform host = pulse_shape(qam_map(bits, s.modem.order_m), s.modem);
  host.envelope_ref_hz = s.modem.rf_subcarrier_hz;
  const SampledWaveform with = add_service_data(host, kQosPayload, s.qos);
  const double added = power(with) - power(host);
  REQUIRE(added / power(host) == Approx(db_to_linear(-10.0)).epsilon(0.05));
  // Spectral placement: the added energy sits at the subcarrier offset.
  const Spectrum spec = psd_estimate(with, 8192);
  const double sub_band = spec.band_power_w(-403e6, -397e6);
  REQUIRE(sub_band == Approx(power(host) * db_to_linear(-10.0)).epsilon(0.10));
}

TEST_CASE("service data survives a clean insert and extract cycle") {
  Scenario s;
  const BitSequence bits = payload_for(s, 9000);
  SampledWaveform host = pulse_shape(qam_map(bits, s.modem.order_m), s.modem);
  host.envelope_ref_hz = s.modem.rf_subcarrier_hz;
  const SampledWaveform with = add_service_data(host, kQosPayload, s.qos);
  const QosExtract got = extract_service_data(with, s.qos);
  REQUIRE(got.found);
  REQUIRE(got.crc_ok);
  REQUIRE(got.payload == kQosPayload);
  REQUIRE(got.mean_bit_magnitude > 0.0);

  QosSubcarrierConfig off = s.qos;
  off.enabled = false;
  REQUIRE_FALSE(extract_service_data(with, off).found);
}

TEST_CASE("waveform shorter than one frame is rejected at insert") {
  Scenario s;
  const BitSequence bits = payload_for(s, 400);
  SampledWaveform host = pulse_shape(qam_map(bits, s.modem.order_m), s.modem);
  host.envelope_ref_hz = s.modem.rf_subcarrier_hz;
  REQUIRE_THROWS_AS(add_service_data(host, kQosPayload, s.qos), ConfigError);
}

TEST_CASE("noise-free duplex chain is transparent end to end") {
  for (double km : {0.0, 5.0}) {
    Scenario s;
    s.noise.enabled = false;
    s.of1.length_km = km;
    const BitSequence bits = payload_for(s, 9000);
    const LinkRun run = run_link(s, bits, kQosPayload);
    REQUIRE(run.lock.locked);
    const double dl = evm_rms_percent(run.downlink_symbols, run.tx_symbols.symbols);
    const double ul = evm_rms_percent(run.uplink_symbols, run.tx_symbols.symbols);
    CAPTURE(km, dl, ul);
    REQUIRE(dl < 0.1);
    REQUIRE(ul < 0.1);
    REQUIRE(qam_demap(run.downlink_symbols, s.modem.order_m) == bits);
    REQUIRE(qam_demap(run.uplink_symbols, s.modem.order_m) == bits);
    REQUIRE(run.qos.found);
    REQUIRE(run.qos.crc_ok);
    REQUIRE(run.qos.payload == kQosPayload);
  }
}

TEST_CASE("link taps, delays and diagnostics are accounted for") {
  Scenario s;
  s.noise.enabled = false;
  const BitSequence bits = payload_for(s, 9000);
  const LinkRun run = run_link(s, bits, kQosPayload);
  for (const char* tap : {"tx", "mso1", "du_detected", "mso2"}) {
    REQUIRE(run.tap_waveforms.count(tap) == 1);
    REQUIRE(all_finite(run.tap_waveforms.at(tap)));
  }
  // Every stage in this model is memoryless or zero-phase: the only group
  // delay in the ledger is the transmit pulse filter itself.
  REQUIRE(run.downlink_delays.total() == Approx(rrc_delay_samples(s.modem)));
  for (const StageDelay& st : run.downlink_delays.stages) {
    if (st.stage != "modem_tx_rrc") REQUIRE(st.samples == 0.0);
  }
  REQUIRE(run.uplink_delays.total() == 0.0);
  // The represented band is wider than the amplifier passband, which the run
  // reports as a non-fatal diagnostic.
  bool partial = false;
  for (const Diagnostic& d : run.diagnostics) partial |= (d.code == "rf_band_partial");
  REQUIRE(partial);
}

TEST_CASE("noise degrades the uplink more as the shared span grows") {
  double prev_ul = 0.0;
  double prev_dl = 0.0;
  for (double km : {0.0, 20.0}) {
    Scenario s;
    s.of1.length_km = km;
    const BitSequence bits = payload_for(s, 12000);
    const LinkRun run = run_link(s, bits, kQosPayload);
    const double dl = evm_rms_percent(run.downlink_symbols, run.tx_symbols.symbols);
    const double ul = evm_rms_percent(run.uplink_symbols, run.tx_symbols.symbols);
    CAPTURE(km, dl, ul);
    if (km > 0.0) {
      REQUIRE(ul > prev_ul);
      REQUIRE(dl > prev_dl);
    }
    prev_ul = ul;
    prev_dl = dl;
  }
}

TEST_CASE("losing the injection lock raises a typed error") {
  Scenario s;
  s.source.power_dbm = -25.0;  // drives the injection ratio below -20 dB
  const BitSequence bits = payload_for(s, 9000);
  REQUIRE_THROWS_AS(run_link(s, bits, kQosPayload), LockError);
}

TEST_CASE("scenario validation rejects ill-posed setups") {
  Scenario s;
  s.qos.subcarrier_offset_hz = -80e6;  // inside the QAM receive selection band
  REQUIRE_THROWS_AS(validate(s), ConfigError);
  s = Scenario{};
  s.qos.subcarrier_offset_hz = -460e6;  // beyond the representable band
  REQUIRE_THROWS_AS(validate(s), ConfigError);
  s = Scenario{};
  s.uplink_tx.mod_index = 1.5;
  REQUIRE_THROWS_AS(validate(s), ConfigError);
  s = Scenario{};
  s.of1.length_km = -1.0;
  REQUIRE_THROWS_AS(validate(s), ConfigError);
  s = Scenario{};
  REQUIRE_NOTHROW(validate(s));
}

TEST_CASE("disabling the service channel skips insertion and extraction") {
  Scenario s;
  s.noise.enabled = false;
  s.qos.enabled = false;
  const BitSequence bits = payload_for(s, 9000);
  const LinkRun run = run_link(s, bits, kQosPayload);
  REQUIRE_FALSE(run.qos.found);
  const double ul = evm_rms_percent(run.uplink_symbols, run.tx_symbols.symbols);
  REQUIRE(ul < 0.1);
}

TEST_CASE("payload bit generation is reproducible") {
  const BitSequence a = random_bits(1000, RngHandle{5, kStreamPayloadBits});
  const BitSequence b = random_bits(1000, RngHandle{5, kStreamPayloadBits});
  const BitSequence c = random_bits(1000, RngHandle{6, kStreamPayloadBits});
  REQUIRE(a == b);
  REQUIRE(a != c);
}
