/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 *
 * End-to-end acceptance gate. Each check prints one PASS/FAIL line; the
 * process exits non-zero if any check fails. Heavier checks reuse the fitted
 * scenario produced by the first one.
 */
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rofsim/calibrate.hpp"
#include "rofsim/cli.hpp"
#include "rofsim/link.hpp"
#include "rofsim/metrics.hpp"
#include "rofsim/spectrum.hpp"
#include "rofsim/sweep.hpp"

using namespace rofsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %02d %-34s %s\n", pass ? "PASS" : "FAIL", idx, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void guarded(int idx, const char* name, const std::function<std::pair<bool, std::string>()>& fn) {
  try {
    const auto [pass, detail] = fn();
    report(idx, name, pass, detail);
  } catch (const std::exception& e) {
    report(idx, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

struct EvmPair {
  double downlink = 0.0;
  double uplink = 0.0;
  double seconds = 0.0;
};

EvmPair run_once(Scenario s, std::uint64_t seed, std::size_t symbols) {
  s.seed = seed;
  const BitSequence bits =
      random_bits(symbols * bits_per_symbol(s.modem.order_m),
                  RngHandle{seed, kStreamPayloadBits});
  const auto t0 = std::chrono::steady_clock::now();
  const LinkRun run = run_link(s, bits, {'a', 'c', 'c', 'e', 'p', 't'});
  const auto t1 = std::chrono::steady_clock::now();
  EvmPair out;
  out.downlink = evm_rms_percent(run.downlink_symbols, run.tx_symbols.symbols);
  out.uplink = evm_rms_percent(run.uplink_symbols, run.tx_symbols.symbols);
  out.seconds = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SimulationError("acceptance: cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// AWGN-limited modem chain at a given in-band SNR; the whole-link checks use
// run_link instead.
double awgn_chain_evm(double snr_db, std::size_t symbols, std::uint64_t seed,
                      BitSequence* bits_out = nullptr, BitSequence* rx_bits_out = nullptr) {
  ModemConfig cfg;
  cfg.rf_subcarrier_hz = 0.0;
  const BitSequence bits =
      random_bits(symbols * bits_per_symbol(cfg.order_m), RngHandle{seed, 0});
  const SymbolStream tx = qam_map(bits, cfg.order_m);
  SampledWaveform wf = pulse_shape(tx, cfg);
  const double noise_power =
      db_to_linear(-snr_db) / cfg.symbol_rate_hz * cfg.sample_rate_hz();
  wf = add_awgn(wf, noise_power, RngHandle{seed, 1});
  const SymbolStream rx = recover_symbols(wf, cfg, &tx.symbols, 0.0);
  if (bits_out != nullptr) *bits_out = bits;
  if (rx_bits_out != nullptr) *rx_bits_out = qam_demap(rx, cfg.order_m);
  return evm_rms_percent(rx, tx.symbols);
}

}  // namespace

int main() {
  std::printf("acceptance: duplex radio-over-fiber link simulator\n");

  // Shared state produced by the calibration check.
  CalibrationResult calibration;
  Scenario fitted;
  bool have_fit = false;

  guarded(1, "calibrated_back_to_back_evm", [&]() -> std::pair<bool, std::string> {
    const Scenario base;
    const CalibrationSpec spec = default_calibration_spec();
    calibration = calibrate(base, spec);
    fitted = apply_calibration(base, calibration);
    have_fit = calibration.converged;
    if (!calibration.converged) {
      return {false, fmt("calibration did not converge: residual rms %.4f after %d evals",
                         calibration.residual_rms, calibration.evaluations)};
    }
    double dl_sum = 0.0;
    double ul_sum = 0.0;
    double worst_s = 0.0;
    const int n_seeds = 10;
    for (int seed = 1; seed <= n_seeds; ++seed) {
      const EvmPair p = run_once(fitted, static_cast<std::uint64_t>(seed), 100000);
      dl_sum += p.downlink;
      ul_sum += p.uplink;
      worst_s = std::max(worst_s, p.seconds);
    }
    const double dl = dl_sum / n_seeds;
    const double ul = ul_sum / n_seeds;
    const bool pass = std::abs(dl - 3.2) <= 0.3 && std::abs(ul - 4.3) <= 0.4 &&
                      worst_s < 10.0;
    std::string knobs;
    for (const auto& [path, value] : calibration.fitted) {
      knobs += fmt(" %s=%.4g", path.c_str(), value);
    }
    return {pass, fmt("downlink %.3f%% (target 3.2+-0.3), uplink %.3f%% "
                      "(target 4.3+-0.4), slowest run %.2f s, %d evals,%s",
                      dl, ul, worst_s, calibration.evaluations, knobs.c_str())};
  });

  guarded(2, "uplink_threshold_crossing", [&]() -> std::pair<bool, std::string> {
    if (!have_fit) return {false, "skipped: no converged calibration"};
    SweepSpec spec;  // of1.length_km over 0..6 km, three seeds
    const SweepResult result = run_sweep(fitted, spec, 1);
    for (const SweepPoint& p : result.points) {
      if (p.status != "ok") {
        return {false, fmt("sweep point %.1f km seed %llu: %s", p.value,
                           static_cast<unsigned long long>(p.seed), p.status.c_str())};
      }
    }
    double crossing = -1.0;
    for (std::size_t k = 1; k < result.summaries.size(); ++k) {
      const SweepSummary& a = result.summaries[k - 1];
      const SweepSummary& b = result.summaries[k];
      if (a.mean_uplink_evm < 8.0 && b.mean_uplink_evm >= 8.0) {
        crossing = a.value + (8.0 - a.mean_uplink_evm) * (b.value - a.value) /
                                 (b.mean_uplink_evm - a.mean_uplink_evm);
        break;
      }
    }
    if (crossing < 0.0) {
      return {false, fmt("uplink EVM never crosses 8%% on 0..6 km (endpoints %.2f%% / %.2f%%)",
                         result.summaries.front().mean_uplink_evm,
                         result.summaries.back().mean_uplink_evm)};
    }
    const bool pass = crossing >= 4.5 && crossing <= 5.5;
    return {pass, fmt("8%% threshold crossed at %.2f km (required 4.5..5.5)", crossing)};
  });

  guarded(3, "evm_snr_consistency", []() -> std::pair<bool, std::string> {
    bool pass = true;
    std::string detail;
    int idx = 0;
    for (double snr_db : {29.897, 27.331, 21.938}) {
      const double expected = evm_percent_from_snr_db(snr_db);
      const double measured = awgn_chain_evm(snr_db, 200000, 101 + idx++);
      const double rel = std::abs(measured / expected - 1.0);
      pass = pass && rel <= 0.02;
      detail += fmt("%s%.1f dB -> %.3f%% (expect %.3f%%, rel %.4f)",
                    detail.empty() ? "" : "; ", snr_db, measured, expected, rel);
    }
    return {pass, detail};
  });

  guarded(4, "noiseless_transparency", []() -> std::pair<bool, std::string> {
    const std::vector<std::uint8_t> payload = {'m', 'o', 'n', 'i', 't', 'o', 'r'};
    std::string detail;
    bool pass = true;
    for (double km : {0.0, 5.0, 10.0}) {
      Scenario s;
      s.noise.enabled = false;
      s.of1.length_km = km;
      const BitSequence bits =
          random_bits(6 * 20000, RngHandle{s.seed, kStreamPayloadBits});
      const LinkRun run = run_link(s, bits, payload);
      const double dl = evm_rms_percent(run.downlink_symbols, run.tx_symbols.symbols);
      const double ul = evm_rms_percent(run.uplink_symbols, run.tx_symbols.symbols);
      const bool bits_ok = qam_demap(run.downlink_symbols, 64) == bits &&
                           qam_demap(run.uplink_symbols, 64) == bits;
      const bool qos_ok = run.qos.found && run.qos.crc_ok && run.qos.payload == payload;
      pass = pass && dl < 0.1 && ul < 0.1 && bits_ok && qos_ok;
      detail += fmt("%s%g km: dl %.4f%% ul %.4f%% qos %s", detail.empty() ? "" : "; ",
                    km, dl, ul, qos_ok ? "ok" : "BAD");
    }
    return {pass, detail};
  });

  guarded(5, "ber_against_analytic", []() -> std::pair<bool, std::string> {
    BitSequence tx_bits;
    BitSequence rx_bits;
    const double evm = awgn_chain_evm(21.938, 120000, 202, &tx_bits, &rx_bits);
    const double measured = bit_error_rate(tx_bits, rx_bits);
    const double predicted = ber_estimate(evm, 64);
    const double rel = std::abs(measured / predicted - 1.0);
    return {rel <= 0.30, fmt("measured %.3e vs analytic %.3e at %.2f%% EVM (rel %.3f)",
                             measured, predicted, evm, rel)};
  });

  guarded(6, "dispersion_closed_form", []() -> std::pair<bool, std::string> {
    const double lambda_nm = 1559.79;
    double worst = 0.0;
    for (double km : {0.5, 5.0, 80.0, 1000.0}) {
      for (double f_ghz : {1.0, 5.0, 20.0}) {
        FiberParams fib;
        fib.length_km = km;
        const double lambda_m = lambda_nm * 1e-9;
        const double expected =
            std::cos(kPi * lambda_m * lambda_m * 17.0e-6 * km * 1e3 * f_ghz * f_ghz *
                     1e18 / kSpeedOfLightMPerS);
        worst = std::max(worst, std::abs(fiber_fading_factor(fib, lambda_nm, f_ghz * 1e9) -
                                         expected));
      }
    }
    FiberParams fib;
    fib.length_km = 5.0;
    const double fade = fiber_fading_factor(fib, lambda_nm, 5e9);
    const double penalty_db = -20.0 * std::log10(fade);
    const bool pass = worst < 1e-9 && penalty_db < 0.02;
    return {pass, fmt("max deviation %.2e; 5 km / 5 GHz power penalty %.4f dB (< 0.02)",
                      worst, penalty_db)};
  });

  guarded(7, "noise_free_power_ledger", []() -> std::pair<bool, std::string> {
    struct Case {
      const char* name;
      double edfa_gain_db;
      double circ_loss_db;
    };
    const Case cases[] = {{"default", 10.0, 0.8},
                          {"edfa_25db", 25.0, 0.8},
                          {"circ_3db", 10.0, 3.0}};
    bool pass = true;
    std::string detail;
    for (const Case& c : cases) {
      Scenario s;
      s.noise.enabled = false;
      s.qos.enabled = false;
      s.edfa.gain_db = c.edfa_gain_db;
      s.circulator.insertion_loss_db = c.circ_loss_db;
      const BitSequence bits =
          random_bits(6 * 20000, RngHandle{s.seed, kStreamPayloadBits});
      const LinkRun run = run_link(s, bits, {});

      const double p_tx = power(run.tap_waveforms.at("tx"));
      const double m_mzm = 0.5 * kPi * s.mzm.half_wave_drive_ratio * std::sqrt(p_tx);
      const double p_mod_dbm =
          s.source.power_dbm - 10.0 * std::log10(2.0) - s.mzm.insertion_loss_db;
      const double p_inc_dbm = p_mod_dbm + s.edfa.gain_db -
                               s.of1.length_km * s.of1.atten_db_per_km -
                               s.circulator.insertion_loss_db;
      const double p_drop_dbm = p_inc_dbm + s.vcsel.reflection_gain_db() -
                                s.circulator.insertion_loss_db -
                                s.of2.length_km * s.of2.atten_db_per_km;
      const double amp_dl = s.pin.responsivity_a_w * dbm_to_watt(p_drop_dbm) * m_mzm *
                            std::sqrt(kRfSystemLoadOhm);
      const double pred_mso1_dbw =
          10.0 * std::log10(amp_dl * amp_dl) + s.lna_downlink.gain_db;
      const double meas_mso1_dbw = 10.0 * std::log10(power(run.tap_waveforms.at("mso1")));
      const double err_dl = std::abs(pred_mso1_dbw - meas_mso1_dbw);

      const double p_ul_dbm =
          s.uplink_tx.power_dbm - s.of1.length_km * s.of1.atten_db_per_km;
      const double amp_ul = s.pin.responsivity_a_w * dbm_to_watt(p_ul_dbm) *
                            s.uplink_tx.mod_index * std::sqrt(kRfSystemLoadOhm);
      const double pred_mso2_dbw =
          10.0 * std::log10(amp_ul * amp_ul) + s.lna_uplink.gain_db;
      const double meas_mso2_dbw = 10.0 * std::log10(power(run.tap_waveforms.at("mso2")));
      const double err_ul = std::abs(pred_mso2_dbw - meas_mso2_dbw);

      pass = pass && err_dl <= 0.05 && err_ul <= 0.05;
      detail += fmt("%s%s: dl %.4f dB, ul %.4f dB", detail.empty() ? "" : "; ", c.name,
                    err_dl, err_ul);
    }
    return {pass, detail + " (tolerance 0.05 dB)"};
  });

  guarded(8, "injection_locking_behavior", []() -> std::pair<bool, std::string> {
    const VcselParams params;  // 1 GHz detuning, 10 GHz coefficient
    const LockState edge = lock_state(-20.0, 0.0, params);
    const LockState lost = lock_state(-30.0, 0.0, params);
    bool monotone = true;
    double prev = -infinity();
    for (int k = 0; k < 20; ++k) {
      const LockState s = lock_state(-38.0 + 2.0 * k, 0.0, params);
      monotone = monotone && s.margin_ghz > prev;
      prev = s.margin_ghz;
    }
    bool thrown = false;
    try {
      Scenario s;
      s.source.power_dbm = -25.0;
      run_link(s, random_bits(6 * 12000, RngHandle{1, 0}), {'x'});
    } catch (const LockError&) {
      thrown = true;
    }
    const bool pass = edge.locked && !lost.locked && monotone && thrown;
    return {pass, fmt("locked at -20 dB (margin %.3f GHz), lost at -30 dB (margin %.3f "
                      "GHz), margin monotone over 20 steps, LockError %s",
                      edge.margin_ghz, lost.margin_ghz, thrown ? "raised" : "MISSING")};
  });

  guarded(9, "artifact_determinism", []() -> std::pair<bool, std::string> {
    const fs::path base = fs::temp_directory_path() / "rofsim_acceptance_det";
    fs::remove_all(base);
    RunFlags flags;
    flags.symbols = 20000;
    flags.iq_dump = true;
    const fs::path a = base / "a";
    const fs::path b = base / "b";
    if (cmd_run("", a.string(), flags) != kExitOk ||
        cmd_run("", b.string(), flags) != kExitOk) {
      return {false, "run command did not exit cleanly"};
    }
    bool same = true;
    std::string first_diff;
    for (const char* name :
         {"run.json", "constellation_downlink.csv", "constellation_uplink.csv",
          "psd_mso1.csv", "psd_mso2.csv", "iq_tx.rfiq", "iq_mso1.rfiq",
          "iq_du_detected.rfiq", "iq_mso2.rfiq"}) {
      if (slurp(a / name) != slurp(b / name)) {
        same = false;
        if (first_diff.empty()) first_diff = name;
      }
    }
    Scenario sweep_base;
    sweep_base.qos.enabled = false;
    SweepSpec spec;
    spec.values = {0.0, 2.0};
    spec.seeds = {1, 2};
    spec.symbols_per_point = 10000;
    const std::string serial = sweep_csv_text(run_sweep(sweep_base, spec, 1));
    const std::string parallel = sweep_csv_text(run_sweep(sweep_base, spec, 2));
    fs::remove_all(base);
    const bool pass = same && serial == parallel;
    return {pass, pass ? "run artifacts and serial/parallel sweep byte-identical"
                       : fmt("mismatch: %s%s", first_diff.c_str(),
                             serial == parallel ? "" : " and sweep csv")};
  });

  guarded(10, "spectral_footprint", []() -> std::pair<bool, std::string> {
    Scenario s;
    s.noise.enabled = false;
    const BitSequence bits =
        random_bits(6 * 40000, RngHandle{s.seed, kStreamPayloadBits});
    const LinkRun run = run_link(s, bits, {'p', 's', 'd'});
    const Spectrum dl = psd_estimate(run.tap_waveforms.at("mso1"), 4096);
    const double occupied = occupied_bandwidth_hz(dl, -40.0);
    const double expected = s.modem.occupied_bandwidth_hz();  // 126 MHz
    const double rel = std::abs(occupied / expected - 1.0);

    const Spectrum ul = psd_estimate(run.tap_waveforms.at("mso2"), 4096);
    const double qam_band = ul.band_power_w(-expected / 2.0, expected / 2.0);
    const double qos_band = ul.band_power_w(s.qos.subcarrier_offset_hz - 5e6,
                                            s.qos.subcarrier_offset_hz + 5e6);
    const double ratio_db = 10.0 * std::log10(qos_band / qam_band);
    const bool pass = rel <= 0.10 && std::abs(ratio_db - (-10.0)) <= 0.5;
    return {pass, fmt("occupied bandwidth %.1f MHz vs %.1f MHz (rel %.3f); service "
                      "subcarrier %.2f dB vs -10 dB",
                      occupied / 1e6, expected / 1e6, rel, ratio_db)};
  });

  std::printf("acceptance: %d failure%s\n", g_failures, g_failures == 1 ? "" : "s");
  return g_failures == 0 ? 0 : 1;
}
