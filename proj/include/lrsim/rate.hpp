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
#include <string_view>

#include "lrsim/channel.hpp"
#include "lrsim/config.hpp"
#include "lrsim/rng.hpp"

namespace lrsim {

/// Inputs of the power-scaling schedules: the fixed energy budget E_UE, the
/// per-entry variances of the direct and per-element cascaded links, their
/// ratio k, and the generalized schedule exponent alpha.
struct ScalingParams {
  double energy_budget = 1.0; // E_UE
  double k_ratio = 1.0;       // sigma_lrs2 / sigma_d2
  double alpha = 1.0;
  double sigma_d2 = 1.0;
  double sigma_lrs2 = 1.0;

  static ScalingParams from_variances(double energy_budget, double alpha, double sigma_d2,
                                      double sigma_lrs2);
};

enum class CsiMode { perfect, estimated };

/// How the combined channel is drawn per trial: `aggregate_iid` uses the
/// concentration model of the large-system analysis (per-entry variance
/// beta); `product_iid` multiplies explicit i.i.d. surface links, which
/// carries an N-fold smaller reflected power and is kept for comparison.
enum class ChannelSource { aggregate_iid, product_iid };

struct RateEstimate {
  double mean_rate = 0.0; // bits/s/Hz
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

/// Per-entry variance of the combined channel: beta = (1 + k*N^2) * sigma_d2.
double beta_effective_variance(const ScalingParams& scaling, std::size_t lrs_elements);

/// SINR of the MRC detector with perfect CSI, using |h^H h|^2 = ||h||^4:
///   p*||h||^4 / (kappa_ue*p*||h||^4 + ||h||^2*(sigma^2 + p*kappa_bs*(1+kappa_ue))).
double sinr_perfect(double p, double channel_norm_sq, const ImpairmentParams& imp);

/// SINR of the MRC detector operating on the estimated channel, whose
/// entries have variance p*beta^2/(p*beta+1) while the estimation error
/// entries have variance beta/(p*beta+1).
double sinr_imperfect(double p, double est_norm_sq, double beta,
                      const ImpairmentParams& imp);

RateEstimate rate_perfect_csi(const SystemDims& dims, const ImpairmentParams& imp, double p,
                              const ScalingParams& scaling, ChannelSource source,
                              std::uint64_t trials, const RngPolicy& policy,
                              std::string_view tag, unsigned threads);

RateEstimate rate_imperfect_csi(const SystemDims& dims, const ImpairmentParams& imp,
                                double p, const ScalingParams& scaling, std::uint64_t trials,
                                const RngPolicy& policy, std::string_view tag,
                                unsigned threads);

enum class PowerScheduleKind { perfect_csi, estimated_csi, generalized };

/// Transmit power as a function of the array sizes:
///   perfect_csi   E / (M * (1 + k*N^2))
///   estimated_csi E / (sqrt(M) * (1 + k*N^2))
///   generalized   E / (M^alpha * (1 + k*N^2)^(2*alpha))
double power_schedule(PowerScheduleKind kind, const ScalingParams& scaling,
                      const SystemDims& dims);

/// Large-system rate limit under the perfect-CSI schedule:
///   log2(1 + E*sigma_d2 / (kappa_ue*E*sigma_d2 + sigma^2)).
double rate_limit_perfect(const ScalingParams& scaling, const ImpairmentParams& imp);

/// Large-system rate limit under the estimated-CSI schedule:
///   log2(1 + E^2*sigma_d2^2 / (kappa_ue*E^2*sigma_d2^2 + sigma^2)).
double rate_limit_imperfect(const ScalingParams& scaling, const ImpairmentParams& imp);

/// Hardware-impairment ceiling log2(1 + 1/kappa_ue); +inf for ideal hardware.
double rate_ceiling(const ImpairmentParams& imp);

/// Concentration diagnostics for the combined-channel statistics:
/// (1/M)*||h_d||^2 against sigma_d2 and (1/(M*N^2))*||reflected||^2 against
/// sigma_lrs2, plus the same cascade statistic for the honest product form
/// under its own MN normalization.
struct LlnDiagnostics {
  std::uint64_t trials = 0;
  bool has_lrs = false;
  double direct_mean = 0.0;
  double direct_frac_within_20pct = 0.0;
  double cascade_entry_moment = 0.0; // mean |reflected_i / N|^2
  double cascade_mean = 0.0;         // mean (1/(M*N^2)) * ||reflected||^2
  double cascade_frac_within_20pct = 0.0;
  double cascade_frac_within_30pct = 0.0;
  double product_cascade_mean = 0.0; // mean (1/(M*N)) * ||G*h_r||^2
};

LlnDiagnostics lln_diagnostics(const SystemDims& dims, const ScalingParams& scaling,
                               std::uint64_t trials, const RngPolicy& policy,
                               std::string_view tag, unsigned threads);

} // namespace lrsim
