/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rofsim/metrics.hpp"

#include <json.hpp>

using namespace rofsim;
using Catch::Approx;

TEST_CASE("service thresholds per modulation order") {
  REQUIRE(evm_threshold_percent(4) == 17.5);
  REQUIRE(evm_threshold_percent(16) == 12.5);
  REQUIRE(evm_threshold_percent(64) == 8.0);
  REQUIRE_THROWS_AS(evm_threshold_percent(32), ContractViolation);
}

TEST_CASE("evm computation on a constructed error vector") {
  SymbolStream rx;
  rx.order_m = 4;
  const std::vector<cplx> ref = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  rx.symbols = ref;
  for (auto& s : rx.symbols) s += cplx(0.03, -0.04);  // |e| = 0.05 on |r| = 1
  REQUIRE(evm_rms_percent(rx, ref) == Approx(5.0).epsilon(1e-12));
  rx.symbols.clear();
  REQUIRE_THROWS_AS(evm_rms_percent(rx, ref), ContractViolation);
}

TEST_CASE("evm and snr conversions at the documented operating points") {
  REQUIRE(snr_db_from_evm_percent(3.2) == Approx(29.897).margin(5e-3));
  REQUIRE(snr_db_from_evm_percent(4.3) == Approx(27.331).margin(5e-3));
  REQUIRE(snr_db_from_evm_percent(8.0) == Approx(21.938).margin(5e-3));
  REQUIRE(evm_percent_from_snr_db(snr_db_from_evm_percent(5.5)) == Approx(5.5));
  REQUIRE_THROWS_AS(snr_db_from_evm_percent(0.0), ContractViolation);
}

TEST_CASE("analytic bit error rate at the 64-QAM threshold") {
  // At 8% EVM (SNR 21.94 dB): (4/6)(1-1/8) Q(sqrt(3*10^2.1938/63)).
  REQUIRE(ber_estimate(8.0, 64) == Approx(1.85e-3).epsilon(0.02));
  // Deep-SNR behaviour is monotone and sane (3.2% EVM sits near 2.7e-12).
  REQUIRE(ber_estimate(3.2, 64) < 1e-10);
  REQUIRE(ber_estimate(12.0, 64) > ber_estimate(8.0, 64));
}

TEST_CASE("report assembles verdicts and derived numbers") {
  SymbolStream rx;
  rx.order_m = 64;
  std::vector<cplx> ref;
  for (int k = 0; k < 1000; ++k) {
    ref.push_back(cplx(1.0, -1.0) / std::sqrt(2.0));
  }
  rx.symbols = ref;
  for (auto& s : rx.symbols) s *= 1.05;  // 5% radial error
  const EvmReport rep = make_evm_report(rx, ref);
  REQUIRE(rep.order_m == 64);
  REQUIRE(rep.symbol_count == 1000);
  REQUIRE(rep.evm_rms_percent == Approx(5.0).epsilon(1e-9));
  REQUIRE(rep.evm_db == Approx(-26.02).margin(5e-3));
  REQUIRE(rep.snr_equivalent_db == Approx(26.02).margin(5e-3));
  REQUIRE(rep.threshold_percent == 8.0);
  REQUIRE(rep.verdict == Verdict::kPass);
  REQUIRE(std::string(to_string(rep.verdict)) == "pass");

  for (auto& s : rx.symbols) s *= 1.05;  // push past the threshold
  const EvmReport fail = make_evm_report(rx, ref);
  REQUIRE(fail.verdict == Verdict::kFail);
  REQUIRE(std::string(to_string(fail.verdict)) == "fail");
}

TEST_CASE("bit error rate counts mismatches") {
  const BitSequence a = {0, 1, 1, 0, 1, 0, 0, 1};
  BitSequence b = a;
  REQUIRE(bit_error_rate(a, b) == 0.0);
  b[2] ^= 1;
  b[7] ^= 1;
  REQUIRE(bit_error_rate(a, b) == Approx(0.25));
  b.pop_back();
  REQUIRE_THROWS_AS(bit_error_rate(a, b), ContractViolation);
}

TEST_CASE("constellation export writes csv plus a parseable sidecar") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rofsim_metrics_test";
  fs::create_directories(dir);
  const std::string path = (dir / "points.csv").string();

  SymbolStream rx;
  rx.order_m = 16;
  std::vector<cplx> ref;
  for (int k = 0; k < 64; ++k) ref.push_back(cplx(0.6, -0.2));
  rx.symbols = ref;
  rx.symbols[0] += cplx(0.01, 0.0);
  const EvmReport rep = make_evm_report(rx, ref);
  constellation_export(rx, path, &rep);

  std::ifstream csv(path);
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  REQUIRE(header == "index,i,q");
  std::string first;
  std::getline(csv, first);
  REQUIRE(first.rfind("0,", 0) == 0);
  std::size_t rows = 1;
  std::string line;
  while (std::getline(csv, line)) {
    if (!line.empty()) ++rows;
  }
  REQUIRE(rows == 64);

  std::ifstream meta(path + ".meta.json");
  REQUIRE(meta.good());
  std::stringstream ss;
  ss << meta.rdbuf();
  const nlohmann::json j = nlohmann::json::parse(ss.str());
  REQUIRE(j.at("order_m").get<int>() == 16);
  REQUIRE(j.at("symbol_count").get<std::size_t>() == 64);
  REQUIRE(j.at("verdict").get<std::string>() == "pass");
  REQUIRE(j.at("evm_rms_percent").get<double>() == Approx(rep.evm_rms_percent));
  fs::remove_all(dir);
}
