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

#include "lrsim/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "lrsim/channel.hpp"
#include "lrsim/covariance.hpp"
#include "lrsim/estimation.hpp"
#include "lrsim/rate.hpp"
#include "lrsim/version.hpp"

namespace lrsim {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double snr_db_to_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

/// Pilot power matching the estimation experiments' SNR convention
/// SNR = p * tr(C) / (M * sigma^2).
double pilot_power_for_snr(double snr_db, std::size_t m, double trace_c,
                           double noise_power) {
  return snr_db_to_linear(snr_db) * static_cast<double>(m) * noise_power / trace_c;
}

template <typename T>
void require_grid(const std::vector<T>& grid, const char* name) {
  if (grid.empty()) {
    throw std::invalid_argument(std::string("experiment spec: empty grid '") + name + "'");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument(std::string("experiment spec: grid '") + name +
                                  "' must be strictly increasing");
    }
  }
}

template <typename T>
std::string join_grid(const std::vector<T>& grid) {
  std::ostringstream out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) out << " ";
    if constexpr (std::is_floating_point_v<T>) {
      out << fmt_g(grid[i]);
    } else {
      out << grid[i];
    }
  }
  return out.str();
}

void add_common_metadata(FigureDataset& ds, const ExperimentSpec& spec, const char* figure) {
  ds.add_metadata("version", kVersionString);
  ds.add_metadata("figure", figure);
  ds.add_metadata("seed", spec.rng.master_seed);
  ds.add_metadata("trials", spec.trials);
}

ImpairmentParams impairments_for(double kappa, double noise_power) {
  ImpairmentParams imp;
  imp.kappa_ue = kappa;
  imp.kappa_bs = kappa;
  imp.noise_power = noise_power;
  return imp;
}

struct NamedCovariance {
  std::string name;
  CovarianceMatrix cov;
};

std::vector<NamedCovariance> fig4_models(std::size_t m, double corr) {
  std::vector<NamedCovariance> models;
  models.push_back({"exp-corr-" + fmt_g(corr), exp_corr_cov(m, corr, 1.0)});
  models.push_back({"one-ring-20deg", one_ring_cov(m, 20.0, 30.0, 0.5, 1.0)});
  models.push_back({"one-ring-10deg", one_ring_cov(m, 10.0, 30.0, 0.5, 1.0)});
  return models;
}

} // namespace

FigureDataset::Cell FigureDataset::Cell::number(double v) {
  Cell c;
  c.value = v;
  c.text = fmt_g(v);
  c.numeric = true;
  return c;
}

FigureDataset::Cell FigureDataset::Cell::label(std::string s) {
  Cell c;
  c.text = std::move(s);
  c.numeric = false;
  return c;
}

void FigureDataset::add_metadata(const std::string& key, const std::string& value) {
  metadata_.emplace_back(key, value);
}

void FigureDataset::add_metadata(const std::string& key, double value) {
  metadata_.emplace_back(key, fmt_g(value));
}

void FigureDataset::add_metadata(const std::string& key, std::uint64_t value) {
  metadata_.emplace_back(key, std::to_string(value));
}

void FigureDataset::set_columns(std::vector<std::string> columns) {
  columns_ = std::move(columns);
}

void FigureDataset::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::logic_error("dataset row width does not match the column count");
  }
  rows_.push_back(std::move(row));
}

std::size_t FigureDataset::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) {
    throw std::out_of_range("dataset has no column '" + name + "'");
  }
  return static_cast<std::size_t>(it - columns_.begin());
}

void FigureDataset::write_csv(std::ostream& out) const {
  for (const auto& [key, value] : metadata_) {
    out << "# " << key << "=" << value << "\n";
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i > 0) out << ",";
    out << columns_[i];
  }
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ",";
      out << row[i].text;
    }
    out << "\n";
  }
}

void FigureDataset::write_json(std::ostream& out) const {
  nlohmann::json doc;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [key, value] : metadata_) {
    meta[key] = value;
  }
  doc["metadata"] = std::move(meta);
  doc["columns"] = columns_;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rows_) {
    nlohmann::json jrow = nlohmann::json::array();
    for (const auto& cell : row) {
      if (cell.numeric && std::isfinite(cell.value)) {
        jrow.push_back(cell.value);
      } else {
        jrow.push_back(cell.text);
      }
    }
    rows.push_back(std::move(jrow));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << "\n";
}

std::string FigureDataset::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

ExperimentSpec default_spec(FigureKind kind) {
  ExperimentSpec spec;
  spec.figure = kind;
  switch (kind) {
    case FigureKind::fig3:
    case FigureKind::custom_sweep:
      spec.snr_grid_db = {0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60};
      spec.m_grid = {20};
      spec.n_grid = {1};
      spec.kappa_grid = {0.0, 0.05 * 0.05, 0.10 * 0.10, 0.15 * 0.15};
      spec.trials = 10000;
      break;
    case FigureKind::fig4:
      spec.snr_grid_db = {5, 50};
      spec.m_grid = {20};
      spec.n_grid = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100,
                     110, 120, 130, 140, 150, 160, 170, 180, 190, 200};
      spec.kappa_grid = {0.05 * 0.05};
      spec.trials = 0; // closed form only
      break;
    case FigureKind::fig5:
      spec.snr_grid_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30, 35, 40};
      spec.m_grid = {20};
      spec.n_grid = {100};
      spec.kappa_grid = {0.05 * 0.05};
      spec.trials = 2000;
      break;
    case FigureKind::fig6:
      spec.snr_grid_db = {10};
      spec.m_grid = {8, 16, 32, 64, 128, 256, 512};
      spec.n_grid = {0, 20, 50, 100};
      spec.kappa_grid = {0.05 * 0.05};
      spec.trials = 2000;
      break;
  }
  return spec;
}

void validate_spec(const ExperimentSpec& spec) {
  require_grid(spec.snr_grid_db, "snr_grid_db");
  require_grid(spec.m_grid, "m_grid");
  require_grid(spec.kappa_grid, "kappa_grid");
  if (spec.figure == FigureKind::fig4 || spec.figure == FigureKind::fig6) {
    require_grid(spec.n_grid, "n_grid");
  } else if (spec.n_grid.empty()) {
    throw std::invalid_argument("experiment spec: empty grid 'n_grid'");
  }
  for (double kappa : spec.kappa_grid) {
    if (!(kappa >= 0.0 && kappa < 1.0)) {
      throw std::invalid_argument("experiment spec: kappa values must lie in [0,1)");
    }
  }
  if (spec.figure != FigureKind::fig4 && spec.trials < 1) {
    throw std::invalid_argument("experiment spec: trials >= 1 required");
  }
}

FigureDataset run_fig3(const ExperimentSpec& spec) {
  validate_spec(spec);
  const std::size_t m = spec.m_grid.front();
  const CovarianceMatrix cov = exp_corr_cov(m, spec.corr_coefficient, 1.0);

  FigureDataset ds;
  add_common_metadata(ds, spec, "fig3");
  ds.add_metadata("m", static_cast<std::uint64_t>(m));
  ds.add_metadata("corr_coefficient", spec.corr_coefficient);
  ds.add_metadata("noise_power", spec.noise_power);
  ds.add_metadata("snr_grid_db", join_grid(spec.snr_grid_db));
  ds.add_metadata("kappa_grid", join_grid(spec.kappa_grid));
  ds.set_columns({"snr_db", "kappa_ue", "kappa_bs", "n_elements", "channel",
                  "err_direct_db", "err_lrs_db", "err_empirical_db", "trials"});

  for (double kappa : spec.kappa_grid) {
    const ImpairmentParams imp = impairments_for(kappa, spec.noise_power);
    for (double snr_db : spec.snr_grid_db) {
      const double p = pilot_power_for_snr(snr_db, m, cov.trace(), spec.noise_power);
      const SignalParams sig = SignalParams::from_power(p);
      const std::string tag =
          "fig3:kappa=" + fmt_g(kappa) + ":snr=" + fmt_g(snr_db);
      const EstimationPointResult point = run_estimation_point(
          cov, cov, imp, sig, spec.trials, spec.rng, tag, spec.threads);
      const double direct_db = to_db(point.closed_direct);
      const double lrs_db = to_db(point.closed_lrs);
      ds.add_row({FigureDataset::Cell::number(snr_db), FigureDataset::Cell::number(kappa),
                  FigureDataset::Cell::number(kappa), FigureDataset::Cell::number(1),
                  FigureDataset::Cell::label("direct"),
                  FigureDataset::Cell::number(direct_db),
                  FigureDataset::Cell::number(lrs_db),
                  FigureDataset::Cell::number(to_db(point.emp_direct_mean)),
                  FigureDataset::Cell::number(static_cast<double>(point.trials))});
      ds.add_row({FigureDataset::Cell::number(snr_db), FigureDataset::Cell::number(kappa),
                  FigureDataset::Cell::number(kappa), FigureDataset::Cell::number(1),
                  FigureDataset::Cell::label("lrs"), FigureDataset::Cell::number(direct_db),
                  FigureDataset::Cell::number(lrs_db),
                  FigureDataset::Cell::number(to_db(point.emp_lrs_mean)),
                  FigureDataset::Cell::number(static_cast<double>(point.trials))});
    }
  }
  return ds;
}

FigureDataset run_fig4(const ExperimentSpec& spec) {
  validate_spec(spec);
  const std::size_t m = spec.m_grid.front();
  const std::vector<NamedCovariance> models = fig4_models(m, spec.corr_coefficient);

  FigureDataset ds;
  add_common_metadata(ds, spec, "fig4");
  ds.add_metadata("m", static_cast<std::uint64_t>(m));
  ds.add_metadata("snr_grid_db", join_grid(spec.snr_grid_db));
  ds.add_metadata("n_grid", join_grid(spec.n_grid));
  ds.add_metadata("kappa_grid", join_grid(spec.kappa_grid));
  ds.add_metadata("evaluation", "closed-form");
  ds.set_columns({"model", "snr_db", "n_elements", "kappa_ue", "kappa_bs", "err_aggregate",
                  "err_per_element_db", "err_total_db", "trials"});

  for (const auto& model : models) {
    const double trace_c = model.cov.trace();
    for (double kappa : spec.kappa_grid) {
      const ImpairmentParams imp = impairments_for(kappa, spec.noise_power);
      for (double snr_db : spec.snr_grid_db) {
        const double p = pilot_power_for_snr(snr_db, m, trace_c, spec.noise_power);
        const SignalParams sig = SignalParams::from_power(p);
        const CovarianceMatrix cov_direct = pilot_covariance_direct(model.cov, imp, sig);
        const CovarianceMatrix cov_lrs =
            pilot_covariance_lrs(model.cov, model.cov, imp, sig);
        const double err_direct =
            arma::trace(lmmse_error_cov(model.cov, cov_direct, sig)).real();
        const double err_element =
            arma::trace(lmmse_error_cov(model.cov, cov_lrs, sig)).real();
        for (std::size_t n : spec.n_grid) {
          const double total = err_direct + static_cast<double>(n) * err_element;
          const double total_trace = trace_c * (1.0 + static_cast<double>(n));
          ds.add_row({FigureDataset::Cell::label(model.name),
                      FigureDataset::Cell::number(snr_db),
                      FigureDataset::Cell::number(static_cast<double>(n)),
                      FigureDataset::Cell::number(kappa),
                      FigureDataset::Cell::number(kappa),
                      FigureDataset::Cell::number(total),
                      FigureDataset::Cell::number(to_db(total / trace_c)),
                      FigureDataset::Cell::number(to_db(total / total_trace)),
                      FigureDataset::Cell::number(0)});
        }
      }
    }
  }
  return ds;
}

FigureDataset run_fig5(const ExperimentSpec& spec) {
  validate_spec(spec);
  const std::size_t m = spec.m_grid.front();
  const std::size_t n = spec.n_grid.front();
  const double kappa = spec.kappa_grid.front();
  const ImpairmentParams imp = impairments_for(kappa, spec.noise_power);
  const ScalingParams scaling =
      ScalingParams::from_variances(spec.energy_budget, 1.0, spec.sigma_d2, spec.sigma_lrs2);

  struct System {
    const char* name;
    SystemDims dims;
  };
  const System systems[] = {{"lrs", {m, n}}, {"miso", {m, 0}}, {"siso", {1, 0}}};

  FigureDataset ds;
  add_common_metadata(ds, spec, "fig5");
  ds.add_metadata("m", static_cast<std::uint64_t>(m));
  ds.add_metadata("n", static_cast<std::uint64_t>(n));
  ds.add_metadata("kappa", kappa);
  ds.add_metadata("snr_grid_db", join_grid(spec.snr_grid_db));
  ds.set_columns({"m", "n", "alpha", "csi", "p_ue", "snr_db", "rate", "std_err", "limit",
                  "trials"});

  for (const System& sys : systems) {
    for (CsiMode csi : {CsiMode::perfect, CsiMode::estimated}) {
      const char* csi_name = csi == CsiMode::perfect ? "perfect" : "estimated";
      for (double snr_db : spec.snr_grid_db) {
        const double p = snr_db_to_linear(snr_db) * spec.noise_power;
        const std::string tag = std::string("fig5:") + sys.name + ":" + csi_name +
                                ":snr=" + fmt_g(snr_db);
        const RateEstimate rate =
            csi == CsiMode::perfect
                ? rate_perfect_csi(sys.dims, imp, p, scaling, ChannelSource::aggregate_iid,
                                   spec.trials, spec.rng, tag, spec.threads)
                : rate_imperfect_csi(sys.dims, imp, p, scaling, spec.trials, spec.rng, tag,
                                     spec.threads);
        ds.add_row({FigureDataset::Cell::number(static_cast<double>(sys.dims.bs_antennas)),
                    FigureDataset::Cell::number(static_cast<double>(sys.dims.lrs_elements)),
                    FigureDataset::Cell::number(0), FigureDataset::Cell::label(csi_name),
                    FigureDataset::Cell::number(p), FigureDataset::Cell::number(snr_db),
                    FigureDataset::Cell::number(rate.mean_rate),
                    FigureDataset::Cell::number(rate.std_error),
                    FigureDataset::Cell::number(rate_ceiling(imp)),
                    FigureDataset::Cell::number(static_cast<double>(rate.trials))});
      }
    }
  }
  return ds;
}

FigureDataset run_fig6(const ExperimentSpec& spec) {
  validate_spec(spec);
  const double kappa = spec.kappa_grid.front();
  const double snr_db = spec.snr_grid_db.front();
  const ImpairmentParams imp = impairments_for(kappa, spec.noise_power);
  const ScalingParams scaling =
      ScalingParams::from_variances(spec.energy_budget, 1.0, spec.sigma_d2, spec.sigma_lrs2);

  FigureDataset ds;
  add_common_metadata(ds, spec, "fig6");
  ds.add_metadata("kappa", kappa);
  ds.add_metadata("snr_db", snr_db);
  ds.add_metadata("m_grid", join_grid(spec.m_grid));
  ds.add_metadata("n_grid", join_grid(spec.n_grid));
  ds.set_columns({"m", "n", "alpha", "csi", "p_ue", "snr_db", "rate", "std_err", "limit",
                  "trials", "mode"});

  auto add_rate_row = [&](const SystemDims& dims, CsiMode csi, double p, double alpha,
                          double limit, const char* mode) {
    const char* csi_name = csi == CsiMode::perfect ? "perfect" : "estimated";
    const std::string tag = std::string("fig6:") + mode + ":" + csi_name +
                            ":m=" + std::to_string(dims.bs_antennas) +
                            ":n=" + std::to_string(dims.lrs_elements);
    const RateEstimate rate =
        csi == CsiMode::perfect
            ? rate_perfect_csi(dims, imp, p, scaling, ChannelSource::aggregate_iid,
                               spec.trials, spec.rng, tag, spec.threads)
            : rate_imperfect_csi(dims, imp, p, scaling, spec.trials, spec.rng, tag,
                                 spec.threads);
    ds.add_row({FigureDataset::Cell::number(static_cast<double>(dims.bs_antennas)),
                FigureDataset::Cell::number(static_cast<double>(dims.lrs_elements)),
                FigureDataset::Cell::number(alpha), FigureDataset::Cell::label(csi_name),
                FigureDataset::Cell::number(p),
                FigureDataset::Cell::number(to_db(p / spec.noise_power)),
                FigureDataset::Cell::number(rate.mean_rate),
                FigureDataset::Cell::number(rate.std_error),
                FigureDataset::Cell::number(limit),
                FigureDataset::Cell::number(static_cast<double>(rate.trials)),
                FigureDataset::Cell::label(mode)});
  };

  for (std::size_t n : spec.n_grid) {
    for (std::size_t m : spec.m_grid) {
      const SystemDims dims{m, n};
      const double p_fixed = snr_db_to_linear(snr_db) * spec.noise_power;
      add_rate_row(dims, CsiMode::perfect, p_fixed, 0.0, rate_ceiling(imp), "fixed");
      add_rate_row(dims, CsiMode::estimated, p_fixed, 0.0, rate_ceiling(imp), "fixed");
      add_rate_row(dims, CsiMode::perfect,
                   power_schedule(PowerScheduleKind::perfect_csi, scaling, dims), 1.0,
                   rate_limit_perfect(scaling, imp), "scheduled");
      add_rate_row(dims, CsiMode::estimated,
                   power_schedule(PowerScheduleKind::estimated_csi, scaling, dims), 0.5,
                   rate_limit_imperfect(scaling, imp), "scheduled");
    }
  }
  return ds;
}

FigureDataset run_custom_sweep(const ExperimentSpec& spec, SweepKind kind) {
  validate_spec(spec);
  if (kind == SweepKind::estimation) {
    ExperimentSpec fig3_like = spec;
    fig3_like.figure = FigureKind::fig3;
    FigureDataset ds = run_fig3(fig3_like);
    return ds;
  }

  const double kappa = spec.kappa_grid.front();
  const ImpairmentParams imp = impairments_for(kappa, spec.noise_power);
  const ScalingParams scaling =
      ScalingParams::from_variances(spec.energy_budget, 1.0, spec.sigma_d2, spec.sigma_lrs2);

  FigureDataset ds;
  add_common_metadata(ds, spec, "sweep-rate");
  ds.add_metadata("kappa", kappa);
  ds.add_metadata("m_grid", join_grid(spec.m_grid));
  ds.add_metadata("n_grid", join_grid(spec.n_grid));
  ds.add_metadata("snr_grid_db", join_grid(spec.snr_grid_db));
  ds.set_columns({"m", "n", "alpha", "csi", "p_ue", "snr_db", "rate", "std_err", "limit",
                  "trials"});

  for (std::size_t m : spec.m_grid) {
    for (std::size_t n : spec.n_grid) {
      const SystemDims dims{m, n};
      for (double snr_db : spec.snr_grid_db) {
        const double p = snr_db_to_linear(snr_db) * spec.noise_power;
        for (CsiMode csi : {CsiMode::perfect, CsiMode::estimated}) {
          const char* csi_name = csi == CsiMode::perfect ? "perfect" : "estimated";
          const std::string tag = "sweep:m=" + std::to_string(m) +
                                  ":n=" + std::to_string(n) + ":" + csi_name +
                                  ":snr=" + fmt_g(snr_db);
          const RateEstimate rate =
              csi == CsiMode::perfect
                  ? rate_perfect_csi(dims, imp, p, scaling, ChannelSource::aggregate_iid,
                                     spec.trials, spec.rng, tag, spec.threads)
                  : rate_imperfect_csi(dims, imp, p, scaling, spec.trials, spec.rng, tag,
                                       spec.threads);
          ds.add_row(
              {FigureDataset::Cell::number(static_cast<double>(m)),
               FigureDataset::Cell::number(static_cast<double>(n)),
               FigureDataset::Cell::number(0), FigureDataset::Cell::label(csi_name),
               FigureDataset::Cell::number(p), FigureDataset::Cell::number(snr_db),
               FigureDataset::Cell::number(rate.mean_rate),
               FigureDataset::Cell::number(rate.std_error),
               FigureDataset::Cell::number(rate_ceiling(imp)),
               FigureDataset::Cell::number(static_cast<double>(rate.trials))});
        }
      }
    }
  }
  return ds;
}

int run_selftest(std::ostream& out, unsigned threads) {
  int failures = 0;
  const RngPolicy policy{424242};
  auto report = [&](bool ok, const std::string& name, const std::string& detail) {
    out << (ok ? "[ ok ] " : "[FAIL] ") << name;
    if (!ok && !detail.empty()) out << ": " << detail;
    out << "\n";
    if (!ok) ++failures;
  };

  // Covariance constructors stay Hermitian PSD and factor back.
  try {
    for (const auto& model : fig4_models(20, 0.7)) {
      const double err = arma::norm(
          model.cov.factor() * model.cov.factor().t() - model.cov.entries(), "fro");
      if (err > 1e-10 * std::max(1.0, arma::norm(model.cov.entries(), "fro"))) {
        throw std::runtime_error(model.name + " factor reconstruction error");
      }
    }
    report(true, "covariance-psd-and-factor", "");
  } catch (const std::exception& e) {
    report(false, "covariance-psd-and-factor", e.what());
  }

  // Orthogonality principle of the per-element estimator.
  {
    const std::size_t m = 8;
    const CovarianceMatrix cov = exp_corr_cov(m, 0.7, 1.0);
    const ImpairmentParams imp = impairments_for(0.05 * 0.05, 1.0);
    const SignalParams sig = SignalParams::from_power(10.0);
    const CovarianceMatrix cov_lrs = pilot_covariance_lrs(cov, cov, imp, sig);
    const arma::cx_mat detector = lmmse_detector(cov, cov_lrs, sig);
    const PilotBlockModel model = make_pilot_block_model(cov, cov, imp, sig);
    const std::uint64_t trials = 4000;
    arma::cx_mat mean_outer(m, m, arma::fill::zeros);
    arma::mat mean_abs2(m, m, arma::fill::zeros);
    for (std::uint64_t t = 0; t < trials; ++t) {
      RandomStream stream = derive_stream(policy, "selftest:orthogonality", t);
      const PilotBlockDraw draw = draw_pilot_block(model, stream);
      const arma::cx_vec sep = draw.y_lrs - draw.y_direct;
      const arma::cx_mat outer = (detector * sep - draw.h_lrs_rotated) * sep.t();
      mean_outer += outer;
      mean_abs2 += arma::square(arma::abs(outer));
    }
    mean_outer /= static_cast<double>(trials);
    mean_abs2 /= static_cast<double>(trials);
    const arma::mat var = mean_abs2 - arma::square(arma::abs(mean_outer));
    const double se_f = std::sqrt(arma::accu(var) / static_cast<double>(trials));
    const double resid = arma::norm(mean_outer, "fro");
    report(resid <= 5.0 * se_f, "orthogonality-principle",
           "residual " + fmt_g(resid) + " vs 5*se " + fmt_g(5.0 * se_f));
  }

  // Closed form vs Monte Carlo mean squared error.
  {
    const CovarianceMatrix cov = exp_corr_cov(20, 0.7, 1.0);
    const ImpairmentParams imp = impairments_for(0.15 * 0.15, 1.0);
    const SignalParams sig = SignalParams::from_power(10.0);
    const EstimationPointResult pt = run_estimation_point(
        cov, cov, imp, sig, 4000, policy, "selftest:closed-vs-empirical", threads);
    const bool ok_d =
        std::abs(pt.emp_direct_mean - pt.closed_direct) <= 4.0 * pt.emp_direct_se;
    const bool ok_i = std::abs(pt.emp_lrs_mean - pt.closed_lrs) <= 4.0 * pt.emp_lrs_se;
    report(ok_d && ok_i, "closed-form-vs-empirical",
           "direct " + fmt_g(pt.emp_direct_mean) + " vs " + fmt_g(pt.closed_direct) +
               ", lrs " + fmt_g(pt.emp_lrs_mean) + " vs " + fmt_g(pt.closed_lrs));
  }

  // Hardware error floors at high pilot power.
  {
    const std::size_t m = 8;
    const double kappa = 0.05 * 0.05;
    const ImpairmentParams imp = impairments_for(kappa, 1.0);
    const SignalParams sig = SignalParams::from_power(1e6);
    const CovarianceMatrix cov = scaled_identity_cov(m, 1.0);
    const double err_d = avg_error_per_antenna(
        lmmse_error_cov(cov, pilot_covariance_direct(cov, imp, sig), sig), cov.entries());
    const double err_i = avg_error_per_antenna(
        lmmse_error_cov(cov, pilot_covariance_lrs(cov, cov, imp, sig), sig), cov.entries());
    const double floor_d = error_floor(ChannelKind::direct, 1.0, imp);
    const double floor_i = error_floor(ChannelKind::lrs, 1.0, imp);
    const ImpairmentParams ideal = impairments_for(0.0, 1.0);
    const double err_ideal = avg_error_per_antenna(
        lmmse_error_cov(cov, pilot_covariance_direct(cov, ideal, sig), sig), cov.entries());
    const bool ok = std::abs(err_d - floor_d) <= 0.05 * floor_d &&
                    std::abs(err_i - floor_i) <= 0.05 * floor_i && err_ideal < 1e-5;
    report(ok, "error-floors",
           fmt_g(err_d) + "/" + fmt_g(floor_d) + ", " + fmt_g(err_i) + "/" + fmt_g(floor_i) +
               ", ideal " + fmt_g(err_ideal));
  }

  // Concentration of the combined-channel statistics.
  {
    const ScalingParams scaling = ScalingParams::from_variances(1.0, 1.0, 1.0, 1.0);
    const LlnDiagnostics diag =
        lln_diagnostics({256, 16}, scaling, 300, policy, "selftest:lln", threads);
    const bool ok = diag.direct_frac_within_20pct >= 0.95 &&
                    diag.cascade_frac_within_30pct >= 0.90;
    report(ok, "lln-concentration",
           "direct frac " + fmt_g(diag.direct_frac_within_20pct) + ", cascade frac " +
               fmt_g(diag.cascade_frac_within_30pct));
  }

  // Scaling-law convergence at reduced sizes.
  {
    const ImpairmentParams imp = impairments_for(0.05 * 0.05, 1.0);
    const ScalingParams scaling = ScalingParams::from_variances(1.0, 1.0, 1.0, 1.0);
    const double limit_p = rate_limit_perfect(scaling, imp);
    const double limit_i = rate_limit_imperfect(scaling, imp);
    double prev_gap_p = std::numeric_limits<double>::infinity();
    double prev_gap_i = std::numeric_limits<double>::infinity();
    bool ok = true;
    std::string detail;
    for (const auto& [m, n] : std::vector<std::pair<std::size_t, std::size_t>>{
             {64, 8}, {256, 16}}) {
      const SystemDims dims{m, n};
      const double p_perfect =
          power_schedule(PowerScheduleKind::perfect_csi, scaling, dims);
      const double p_estimated =
          power_schedule(PowerScheduleKind::estimated_csi, scaling, dims);
      const RateEstimate rp =
          rate_perfect_csi(dims, imp, p_perfect, scaling, ChannelSource::aggregate_iid,
                           20000, policy, "selftest:prop1:m=" + std::to_string(m), threads);
      const RateEstimate ri = rate_imperfect_csi(
          dims, imp, p_estimated, scaling, 20000, policy,
          "selftest:prop2:m=" + std::to_string(m), threads);
      const double gap_p = std::abs(rp.mean_rate - limit_p);
      const double gap_i = std::abs(ri.mean_rate - limit_i);
      detail += "(" + std::to_string(m) + "," + std::to_string(n) + ") gaps " +
                fmt_g(gap_p) + "/" + fmt_g(gap_i) + " ";
      if (gap_p > prev_gap_p + 3.0 * rp.std_error ||
          gap_i > prev_gap_i + 3.0 * ri.std_error) {
        ok = false;
      }
      prev_gap_p = gap_p;
      prev_gap_i = gap_i;
    }
    report(ok, "scaling-law-convergence", detail);
  }

  // Supercritical exponent drives the rate toward zero.
  {
    const ImpairmentParams imp = impairments_for(0.05 * 0.05, 1.0);
    ScalingParams scaling = ScalingParams::from_variances(1.0, 0.75, 1.0, 1.0);
    const SystemDims small{64, 8};
    const SystemDims large{1024, 16};
    const RateEstimate r_small = rate_imperfect_csi(
        small, imp, power_schedule(PowerScheduleKind::generalized, scaling, small), scaling,
        5000, policy, "selftest:alpha:small", threads);
    const RateEstimate r_large = rate_imperfect_csi(
        large, imp, power_schedule(PowerScheduleKind::generalized, scaling, large), scaling,
        5000, policy, "selftest:alpha:large", threads);
    const bool ok = r_large.mean_rate < 0.5 * r_small.mean_rate;
    report(ok, "supercritical-exponent-decay",
           fmt_g(r_large.mean_rate) + " vs half of " + fmt_g(r_small.mean_rate));
  }

  out << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
  return failures;
}

} // namespace lrsim
