// SPDX-License-Identifier: Apache-2.0
//
// lrsim - uplink simulator for reflecting-surface channels with non-ideal hardware
// Copyright (C) 2026 the lrsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "lrsim/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "lrsim/covariance.hpp"
#include "lrsim/estimation.hpp"
#include "lrsim/experiments.hpp"
#include "lrsim/rate.hpp"
#include "lrsim/version.hpp"

namespace lrsim {

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  unsigned threads = 0;

  CLI::Option* config_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  opts.config_opt = cmd->add_option("--config", opts.config_path,
                                    "Flat key/value config file; flags override its values");
  opts.seed_opt = cmd->add_option("--seed", opts.seed, "Master seed");
  opts.trials_opt = cmd->add_option("--trials", opts.trials, "Monte Carlo trials per point");
  opts.out_opt = cmd->add_option("--out", opts.out_path, "Output file path");
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = hardware)");
}

/// Defaults <- config file <- explicit flags.
SimConfig resolve_config(const CommonOpts& opts) {
  SimConfig cfg;
  if (opts.config_opt && opts.config_opt->count() > 0) {
    cfg = load_config_file(opts.config_path);
  }
  if (opts.seed_opt && opts.seed_opt->count() > 0) cfg.rng.master_seed = opts.seed;
  if (opts.trials_opt && opts.trials_opt->count() > 0) cfg.trials = opts.trials;
  return cfg;
}

void write_dataset(const FigureDataset& ds, const CommonOpts& opts,
                   const std::string& default_path) {
  const std::string path = opts.out_path.empty() ? default_path : opts.out_path;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  if (opts.format == "json") {
    ds.write_json(out);
  } else {
    ds.write_csv(out);
  }
  std::cout << "wrote " << path << " (" << ds.rows().size() << " rows)\n";
}

void apply_spec_overrides(ExperimentSpec& spec, const CommonOpts& opts,
                          const SimConfig& cfg) {
  spec.rng = cfg.rng;
  if (opts.trials_opt && opts.trials_opt->count() > 0) {
    spec.trials = opts.trials;
  } else if (opts.config_opt && opts.config_opt->count() > 0) {
    spec.trials = cfg.trials;
  }
  spec.threads = opts.threads;
}

int run_figure(FigureKind kind, const CommonOpts& opts,
               const std::vector<double>& snr_grid, const std::vector<std::size_t>& n_grid,
               const std::vector<std::size_t>& m_grid, const std::vector<double>& kappa_grid) {
  const SimConfig cfg = resolve_config(opts);
  ExperimentSpec spec = default_spec(kind);
  apply_spec_overrides(spec, opts, cfg);
  if (!snr_grid.empty()) spec.snr_grid_db = snr_grid;
  if (!n_grid.empty()) spec.n_grid = n_grid;
  if (!m_grid.empty()) spec.m_grid = m_grid;
  if (!kappa_grid.empty()) spec.kappa_grid = kappa_grid;

  FigureDataset ds;
  std::string name;
  switch (kind) {
    case FigureKind::fig3: ds = run_fig3(spec); name = "fig3"; break;
    case FigureKind::fig4: ds = run_fig4(spec); name = "fig4"; break;
    case FigureKind::fig5: ds = run_fig5(spec); name = "fig5"; break;
    case FigureKind::fig6: ds = run_fig6(spec); name = "fig6"; break;
    case FigureKind::custom_sweep: break;
  }
  write_dataset(ds, opts, name + "." + opts.format);
  return 0;
}

CovarianceMatrix build_model_cov(const std::string& model, std::size_t m, double corr,
                                 double spread_deg) {
  if (model == "exp-corr") return exp_corr_cov(m, corr, 1.0);
  if (model == "one-ring") return one_ring_cov(m, spread_deg, 30.0, 0.5, 1.0);
  if (model == "identity") return scaled_identity_cov(m, 1.0);
  throw CLI::ValidationError("--model", "unknown covariance model '" + model + "'");
}

} // namespace

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{std::string(kVersionString) +
               " - reflecting-surface uplink simulation with hardware impairments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersionString);

  // fig3 .. fig6
  struct FigCmd {
    CLI::App* cmd;
    CommonOpts opts;
    std::vector<double> snr_grid;
    std::vector<std::size_t> n_grid;
    std::vector<std::size_t> m_grid;
    std::vector<double> kappa_grid;
    FigureKind kind;
  };
  std::vector<std::unique_ptr<FigCmd>> figures;
  const std::pair<const char*, FigureKind> figure_defs[] = {
      {"fig3", FigureKind::fig3},
      {"fig4", FigureKind::fig4},
      {"fig5", FigureKind::fig5},
      {"fig6", FigureKind::fig6},
  };
  for (const auto& [name, kind] : figure_defs) {
    auto fig = std::make_unique<FigCmd>();
    fig->kind = kind;
    fig->cmd = app.add_subcommand(
        name, std::string("Reproduce the ") + name + " dataset");
    add_common(fig->cmd, fig->opts);
    fig->cmd->add_option("--snr-grid", fig->snr_grid, "SNR grid in dB")->delimiter(',');
    fig->cmd->add_option("--n-grid", fig->n_grid, "Reflecting-element grid")->delimiter(',');
    fig->cmd->add_option("--m-grid", fig->m_grid, "BS antenna grid")->delimiter(',');
    fig->cmd->add_option("--kappa-grid", fig->kappa_grid, "Impairment levels")
        ->delimiter(',');
    figures.push_back(std::move(fig));
  }

  // estimate
  auto* estimate_cmd = app.add_subcommand("estimate", "One estimation point");
  CommonOpts estimate_opts;
  add_common(estimate_cmd, estimate_opts);
  double est_snr_db = 10.0;
  std::string est_model = "exp-corr";
  double est_corr = 0.7;
  double est_spread_deg = 20.0;
  std::size_t est_m = 20;
  double est_kappa_ue = 0.05 * 0.05;
  double est_kappa_bs = 0.05 * 0.05;
  double est_pn_spread = 0.0;
  std::string dump_cov_path;
  estimate_cmd->add_option("--snr-db", est_snr_db, "SNR in dB");
  estimate_cmd->add_option("--model", est_model, "Covariance model")
      ->check(CLI::IsMember({"exp-corr", "one-ring", "identity"}));
  estimate_cmd->add_option("--corr", est_corr, "Exponential correlation coefficient");
  estimate_cmd->add_option("--spread-deg", est_spread_deg, "One-ring angular spread");
  estimate_cmd->add_option("--m", est_m, "BS antennas");
  estimate_cmd->add_option("--kappa-ue", est_kappa_ue, "UE impairment level");
  estimate_cmd->add_option("--kappa-bs", est_kappa_bs, "BS impairment level");
  estimate_cmd->add_option("--phase-noise-spread", est_pn_spread,
                           "Uniform phase-noise half-width (radians)");
  estimate_cmd->add_option("--dump-cov", dump_cov_path, "Write the covariance matrix CSV");

  // rate
  auto* rate_cmd = app.add_subcommand("rate", "One achievable-rate point");
  CommonOpts rate_opts;
  add_common(rate_cmd, rate_opts);
  std::size_t rate_m = 20;
  std::size_t rate_n = 100;
  double rate_snr_db = 10.0;
  std::string rate_csi = "perfect";
  std::string rate_source = "aggregate";
  double rate_kappa = 0.05 * 0.05;
  double rate_sigma_d2 = 1.0;
  double rate_sigma_lrs2 = 1.0;
  rate_cmd->add_option("--m", rate_m, "BS antennas");
  rate_cmd->add_option("--n", rate_n, "Reflecting elements");
  rate_cmd->add_option("--snr-db", rate_snr_db, "p/sigma^2 in dB");
  rate_cmd->add_option("--csi", rate_csi, "CSI model")
      ->check(CLI::IsMember({"perfect", "estimated"}));
  rate_cmd->add_option("--source", rate_source, "Channel source (perfect CSI only)")
      ->check(CLI::IsMember({"aggregate", "product"}));
  rate_cmd->add_option("--kappa", rate_kappa, "Impairment level for both ends");
  rate_cmd->add_option("--sigma-d2", rate_sigma_d2, "Direct-link per-entry variance");
  rate_cmd->add_option("--sigma-lrs2", rate_sigma_lrs2, "Cascade per-entry variance");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Custom sweep");
  CommonOpts sweep_opts;
  add_common(sweep_cmd, sweep_opts);
  std::string sweep_kind = "estimation";
  std::vector<double> sweep_snr_grid;
  std::vector<std::size_t> sweep_n_grid;
  std::vector<std::size_t> sweep_m_grid;
  std::vector<double> sweep_kappa_grid;
  sweep_cmd->add_option("--kind", sweep_kind, "Sweep family")
      ->check(CLI::IsMember({"estimation", "rate"}));
  sweep_cmd->add_option("--snr-grid", sweep_snr_grid, "SNR grid in dB")->delimiter(',');
  sweep_cmd->add_option("--n-grid", sweep_n_grid, "Reflecting-element grid")->delimiter(',');
  sweep_cmd->add_option("--m-grid", sweep_m_grid, "BS antenna grid")->delimiter(',');
  sweep_cmd->add_option("--kappa-grid", sweep_kappa_grid, "Impairment levels")
      ->delimiter(',');

  // selftest
  auto* selftest_cmd = app.add_subcommand("selftest", "Run the invariant suites");
  CommonOpts selftest_opts;
  add_common(selftest_cmd, selftest_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& fig : figures) {
      if (fig->cmd->parsed()) {
        return run_figure(fig->kind, fig->opts, fig->snr_grid, fig->n_grid, fig->m_grid,
                          fig->kappa_grid);
      }
    }

    if (estimate_cmd->parsed()) {
      const SimConfig cfg = resolve_config(estimate_opts);
      const std::uint64_t trials =
          estimate_opts.trials_opt->count() > 0 ? estimate_opts.trials : cfg.trials;
      const CovarianceMatrix cov =
          build_model_cov(est_model, est_m, est_corr, est_spread_deg);
      if (!dump_cov_path.empty()) {
        std::ofstream cov_out(dump_cov_path, std::ios::binary);
        if (!cov_out) throw std::runtime_error("cannot open '" + dump_cov_path + "'");
        dump_covariance_csv(cov, est_model, "m=" + std::to_string(est_m), cov_out);
      }
      ImpairmentParams imp;
      imp.kappa_ue = est_kappa_ue;
      imp.kappa_bs = est_kappa_bs;
      imp.noise_power = cfg.impairments.noise_power;
      if (est_pn_spread > 0.0) {
        imp.phase_noise = {PhaseNoiseFamily::uniform, est_pn_spread};
      }
      const double p = std::pow(10.0, est_snr_db / 10.0) * static_cast<double>(est_m) *
                       imp.noise_power / cov.trace();
      const SignalParams sig = SignalParams::from_power(p);
      const ValidationReport report = validate_config({est_m, 1}, imp, sig);
      if (!report.ok()) {
        std::cerr << "invalid configuration: " << report.joined() << "\n";
        return 2;
      }
      const EstimationPointResult pt =
          run_estimation_point(cov, cov, imp, sig, trials, cfg.rng, "estimate",
                               estimate_opts.threads);
      std::cout << "snr_db=" << est_snr_db << " pilot_power=" << p << " trials=" << trials
                << "\n";
      std::cout << "direct: closed " << to_db(pt.closed_direct) << " dB, empirical "
                << to_db(pt.emp_direct_mean) << " dB\n";
      std::cout << "lrs:    closed " << to_db(pt.closed_lrs) << " dB, empirical "
                << to_db(pt.emp_lrs_mean) << " dB\n";
      if (!estimate_opts.out_path.empty()) {
        FigureDataset ds;
        ds.add_metadata("version", kVersionString);
        ds.add_metadata("figure", "estimate");
        ds.add_metadata("seed", cfg.rng.master_seed);
        ds.add_metadata("trials", trials);
        ds.set_columns({"snr_db", "kappa_ue", "kappa_bs", "n_elements", "err_direct_db",
                        "err_lrs_db", "err_empirical_db", "trials"});
        ds.add_row({FigureDataset::Cell::number(est_snr_db),
                    FigureDataset::Cell::number(imp.kappa_ue),
                    FigureDataset::Cell::number(imp.kappa_bs),
                    FigureDataset::Cell::number(1),
                    FigureDataset::Cell::number(to_db(pt.closed_direct)),
                    FigureDataset::Cell::number(to_db(pt.closed_lrs)),
                    FigureDataset::Cell::number(to_db(pt.emp_lrs_mean)),
                    FigureDataset::Cell::number(static_cast<double>(trials))});
        write_dataset(ds, estimate_opts, "estimate." + estimate_opts.format);
      }
      return 0;
    }

    if (rate_cmd->parsed()) {
      const SimConfig cfg = resolve_config(rate_opts);
      const std::uint64_t trials =
          rate_opts.trials_opt->count() > 0 ? rate_opts.trials : 2000;
      ImpairmentParams imp;
      imp.kappa_ue = rate_kappa;
      imp.kappa_bs = rate_kappa;
      imp.noise_power = cfg.impairments.noise_power;
      const SignalParams probe = SignalParams::from_power(1.0);
      const ValidationReport report = validate_config({rate_m, rate_n}, imp, probe);
      if (!report.ok()) {
        std::cerr << "invalid configuration: " << report.joined() << "\n";
        return 2;
      }
      const ScalingParams scaling =
          ScalingParams::from_variances(1.0, 1.0, rate_sigma_d2, rate_sigma_lrs2);
      const double p = std::pow(10.0, rate_snr_db / 10.0) * imp.noise_power;
      const SystemDims dims{rate_m, rate_n};
      const RateEstimate rate =
          rate_csi == "perfect"
              ? rate_perfect_csi(dims, imp, p, scaling,
                                 rate_source == "product" ? ChannelSource::product_iid
                                                          : ChannelSource::aggregate_iid,
                                 trials, cfg.rng, "rate", rate_opts.threads)
              : rate_imperfect_csi(dims, imp, p, scaling, trials, cfg.rng, "rate",
                                   rate_opts.threads);
      std::cout << "m=" << rate_m << " n=" << rate_n << " csi=" << rate_csi
                << " snr_db=" << rate_snr_db << " trials=" << trials << "\n";
      std::cout << "rate=" << rate.mean_rate << " bits/s/Hz (std err " << rate.std_error
                << "), ceiling=" << rate_ceiling(imp) << "\n";
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const SimConfig cfg = resolve_config(sweep_opts);
      ExperimentSpec spec = default_spec(FigureKind::custom_sweep);
      apply_spec_overrides(spec, sweep_opts, cfg);
      if (sweep_kind == "rate") {
        spec.snr_grid_db = {0, 10, 20};
        spec.m_grid = {20};
        spec.n_grid = {0, 100};
        spec.kappa_grid = {0.05 * 0.05};
        spec.trials = sweep_opts.trials_opt->count() > 0 ? sweep_opts.trials : 2000;
      }
      if (!sweep_snr_grid.empty()) spec.snr_grid_db = sweep_snr_grid;
      if (!sweep_n_grid.empty()) spec.n_grid = sweep_n_grid;
      if (!sweep_m_grid.empty()) spec.m_grid = sweep_m_grid;
      if (!sweep_kappa_grid.empty()) spec.kappa_grid = sweep_kappa_grid;
      const FigureDataset ds = run_custom_sweep(
          spec, sweep_kind == "rate" ? SweepKind::rate : SweepKind::estimation);
      write_dataset(ds, sweep_opts, "sweep." + sweep_opts.format);
      return 0;
    }

    if (selftest_cmd->parsed()) {
      const int failures = run_selftest(std::cout, selftest_opts.threads);
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cli_dispatch(const std::vector<std::string>& args) {
  std::vector<std::string> with_program = args;
  with_program.insert(with_program.begin(), "lrsim");
  std::vector<const char*> argv;
  argv.reserve(with_program.size());
  for (const auto& a : with_program) argv.push_back(a.c_str());
  return cli_dispatch(static_cast<int>(argv.size()), argv.data());
}

} // namespace lrsim
