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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lrsim/config.hpp"
#include "lrsim/rng.hpp"

namespace lrsim {

enum class FigureKind { fig3, fig4, fig5, fig6, custom_sweep };

/// Grid description of one experiment. Grids must be nonempty and strictly
/// increasing. Each figure reads the axes it needs and ignores the rest.
struct ExperimentSpec {
  FigureKind figure = FigureKind::fig3;
  std::vector<double> snr_grid_db;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> m_grid;
  std::vector<double> kappa_grid;
  std::uint64_t trials = 10000;
  RngPolicy rng{0};
  unsigned threads = 0;

  // Model knobs shared by the experiments.
  double corr_coefficient = 0.7; // exponential-correlation coefficient
  double noise_power = 1.0;
  double sigma_d2 = 1.0;
  double sigma_lrs2 = 1.0;
  double energy_budget = 1.0;
};

ExperimentSpec default_spec(FigureKind kind);

/// Throws std::invalid_argument when a grid is empty or not strictly
/// increasing, or the trial count is invalid for the figure.
void validate_spec(const ExperimentSpec& spec);

/// Tabular experiment output: named columns, one row per sweep point, and a
/// metadata block (seed, trials, version, grids) emitted as `#` comment
/// lines. Serialization is bit-identical for identical (spec, seed).
class FigureDataset {
 public:
  struct Cell {
    double value = 0.0;
    std::string text;
    bool numeric = false;

    static Cell number(double v);
    static Cell label(std::string s);
  };

  void add_metadata(const std::string& key, const std::string& value);
  void add_metadata(const std::string& key, double value);
  void add_metadata(const std::string& key, std::uint64_t value);
  void set_columns(std::vector<std::string> columns);
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const {
    return metadata_;
  }

  /// Column lookup by name; throws when absent.
  std::size_t column_index(const std::string& name) const;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
  std::string to_csv() const;

 private:
  std::vector<std::pair<std::string, std::string>> metadata_;
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Estimation error versus SNR for each impairment level, direct and
/// per-element channels, closed form plus Monte Carlo.
FigureDataset run_fig3(const ExperimentSpec& spec);

/// Closed-form aggregate estimation error versus the number of reflecting
/// elements for the three covariance models, at each SNR in the grid. Both
/// normalizations (per element trace, total trace) are emitted.
FigureDataset run_fig4(const ExperimentSpec& spec);

/// Uplink spectral efficiency versus SNR for the surface-assisted system,
/// the plain multi-antenna system and the single-antenna system, under
/// perfect and estimated CSI.
FigureDataset run_fig5(const ExperimentSpec& spec);

/// Spectral efficiency versus the number of BS antennas per element-count
/// column, in fixed-power and scheduled-power modes.
FigureDataset run_fig6(const ExperimentSpec& spec);

enum class SweepKind { estimation, rate };

FigureDataset run_custom_sweep(const ExperimentSpec& spec, SweepKind kind);

/// Reduced-size invariant suite: PSD checks, orthogonality, closed-form vs
/// empirical error, error floors, concentration diagnostics, scaling-law
/// convergence and the supercritical-exponent decay. Prints one line per
/// check; returns the number of failures.
int run_selftest(std::ostream& out, unsigned threads);

} // namespace lrsim
