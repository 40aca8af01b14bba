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

#include <armadillo>

#include "lrsim/config.hpp"
#include "lrsim/covariance.hpp"
#include "lrsim/rng.hpp"

namespace lrsim {

/// One draw of the physical links. `cascade` stacks the per-element channels
/// g_i * r_i as columns, i.e. the channel seen when only element i reflects.
struct ChannelRealization {
  arma::cx_vec direct;   // user -> BS, length M
  arma::cx_mat bs_lrs;   // surface -> BS, M x N
  arma::cx_vec lrs_user; // user -> surface, length N
  arma::cx_mat cascade;  // bs_lrs * diag(lrs_user), M x N
};

/// Configured reflection phases plus the realized phase-noise offsets.
struct PhaseConfig {
  arma::vec thetas;       // radians in [0, 2*pi]
  arma::vec delta_thetas; // radians; zero when phase noise is disabled

  arma::cx_vec nominal_phases() const; // e^{j*theta}
  arma::cx_vec actual_phases() const;  // e^{j*(theta+delta)}

  static PhaseConfig zeros(std::size_t n);
};

/// h = F * z with z i.i.d. CN(0,1), so E{h h^H} equals the covariance.
arma::cx_vec sample_gaussian_channel(const CovarianceMatrix& cov, RandomStream& stream);

/// Independent product-form cascade: bs_lrs entries i.i.d. CN(0, sigma_g2)
/// drawn column-major, then lrs_user i.i.d. CN(0, sigma_r2). The per-product
/// power is E{|G_ij * r_j|^2} = sigma_g2 * sigma_r2. `direct` is left zero;
/// callers that need the direct link draw it separately. Requires N >= 1.
ChannelRealization sample_iid_cascade(const SystemDims& dims, double sigma_g2,
                                      double sigma_r2, RandomStream& stream);

/// i.i.d. draws from the configured circular family; `none` (or zero spread)
/// returns zeros.
arma::vec sample_phase_noise(const PhaseNoiseSpec& spec, std::size_t n,
                             RandomStream& stream);

/// direct + cascade * phases, with or without the phase-noise offsets.
arma::cx_vec effective_channel(const ChannelRealization& real, const PhaseConfig& phases,
                               bool with_phase_noise);

/// Combined channel in the form the large-system rate analysis assumes: the
/// direct part has i.i.d. CN(0, sigma_d2) entries and the reflected part has
/// i.i.d. CN(0, N^2 * sigma_lrs2) entries, so the per-entry variance of the
/// sum is beta = (1 + k*N^2) * sigma_d2 with k = sigma_lrs2 / sigma_d2.
struct AggregateChannel {
  arma::cx_vec direct;    // length M
  arma::cx_vec reflected; // length M; empty when N = 0

  arma::cx_vec combined() const {
    return reflected.empty() ? direct : arma::cx_vec(direct + reflected);
  }
};

AggregateChannel sample_aggregate_channel(const SystemDims& dims, double sigma_d2,
                                          double sigma_lrs2, RandomStream& stream);

} // namespace lrsim
