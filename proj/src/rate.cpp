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

#include "lrsim/rate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lrsim/montecarlo.hpp"

namespace lrsim {

ScalingParams ScalingParams::from_variances(double energy_budget, double alpha,
                                            double sigma_d2, double sigma_lrs2) {
  ScalingParams scaling;
  scaling.energy_budget = energy_budget;
  scaling.alpha = alpha;
  scaling.sigma_d2 = sigma_d2;
  scaling.sigma_lrs2 = sigma_lrs2;
  scaling.k_ratio = sigma_d2 > 0.0 ? sigma_lrs2 / sigma_d2 : 0.0;
  return scaling;
}

double beta_effective_variance(const ScalingParams& scaling, std::size_t lrs_elements) {
  const double n = static_cast<double>(lrs_elements);
  return (1.0 + scaling.k_ratio * n * n) * scaling.sigma_d2;
}

double sinr_perfect(double p, double channel_norm_sq, const ImpairmentParams& imp) {
  if (channel_norm_sq <= 0.0 || p <= 0.0) return 0.0;
  const double u = channel_norm_sq;
  const double numerator = p * u * u;
  const double denominator = imp.kappa_ue * p * u * u +
                             u * (imp.noise_power + p * imp.kappa_bs * (1.0 + imp.kappa_ue));
  return numerator / denominator;
}

double sinr_imperfect(double p, double est_norm_sq, double beta,
                      const ImpairmentParams& imp) {
  if (est_norm_sq <= 0.0 || p <= 0.0) return 0.0;
  const double u = est_norm_sq;
  const double err_var = beta / (p * beta + 1.0);
  const double numerator = p * u * u;
  const double denominator =
      (1.0 + imp.kappa_ue) * p * u * err_var + imp.kappa_ue * p * u * u +
      u * (imp.noise_power + p * imp.kappa_bs * (1.0 + imp.kappa_ue));
  return numerator / denominator;
}

RateEstimate rate_perfect_csi(const SystemDims& dims, const ImpairmentParams& imp, double p,
                              const ScalingParams& scaling, ChannelSource source,
                              std::uint64_t trials, const RngPolicy& policy,
                              std::string_view tag, unsigned threads) {
  if (trials < 1) throw std::invalid_argument("rate_perfect_csi: trials >= 1 required");
  const std::string tag_str(tag);

  auto trial_fn = [&](std::uint64_t trial) -> std::array<double, 1> {
    RandomStream stream = derive_stream(policy, tag_str, trial);
    double norm_sq = 0.0;
    if (source == ChannelSource::aggregate_iid || dims.lrs_elements == 0) {
      const AggregateChannel ch =
          sample_aggregate_channel(dims, scaling.sigma_d2, scaling.sigma_lrs2, stream);
      norm_sq = arma::accu(arma::square(arma::abs(ch.combined())));
    } else {
      // Explicit product draw; the direct link is added on top of the
      // zero-filled cascade realization.
      ChannelRealization real = sample_iid_cascade(dims, 1.0, scaling.sigma_lrs2, stream);
      real.direct = std::sqrt(scaling.sigma_d2) *
                    stream.complex_gaussian_vec(dims.bs_antennas);
      const arma::cx_vec h =
          effective_channel(real, PhaseConfig::zeros(dims.lrs_elements), false);
      norm_sq = arma::accu(arma::square(arma::abs(h)));
    }
    return {std::log2(1.0 + sinr_perfect(p, norm_sq, imp))};
  };

  const auto stats = run_trials<1>(trials, threads, trial_fn);
  return RateEstimate{stats[0].mean(), stats[0].std_error(), trials};
}

RateEstimate rate_imperfect_csi(const SystemDims& dims, const ImpairmentParams& imp,
                                double p, const ScalingParams& scaling, std::uint64_t trials,
                                const RngPolicy& policy, std::string_view tag,
                                unsigned threads) {
  if (trials < 1) throw std::invalid_argument("rate_imperfect_csi: trials >= 1 required");
  const double beta = beta_effective_variance(scaling, dims.lrs_elements);
  const double est_std =
      p > 0.0 ? std::sqrt(p * beta * beta / (p * beta + 1.0)) : 0.0;
  const std::string tag_str(tag);

  const auto stats = run_trials<1>(trials, threads, [&](std::uint64_t trial) {
    RandomStream stream = derive_stream(policy, tag_str, trial);
    const arma::cx_vec h_est = est_std * stream.complex_gaussian_vec(dims.bs_antennas);
    const double norm_sq = arma::accu(arma::square(arma::abs(h_est)));
    return std::array<double, 1>{std::log2(1.0 + sinr_imperfect(p, norm_sq, beta, imp))};
  });
  return RateEstimate{stats[0].mean(), stats[0].std_error(), trials};
}

double power_schedule(PowerScheduleKind kind, const ScalingParams& scaling,
                      const SystemDims& dims) {
  if (dims.bs_antennas < 1) throw std::invalid_argument("power_schedule: M >= 1 required");
  const double m = static_cast<double>(dims.bs_antennas);
  const double n = static_cast<double>(dims.lrs_elements);
  const double surface_gain = 1.0 + scaling.k_ratio * n * n;
  switch (kind) {
    case PowerScheduleKind::perfect_csi:
      return scaling.energy_budget / (m * surface_gain);
    case PowerScheduleKind::estimated_csi:
      return scaling.energy_budget / (std::sqrt(m) * surface_gain);
    case PowerScheduleKind::generalized:
      return scaling.energy_budget /
             (std::pow(m, scaling.alpha) * std::pow(surface_gain, 2.0 * scaling.alpha));
  }
  return 0.0;
}

double rate_limit_perfect(const ScalingParams& scaling, const ImpairmentParams& imp) {
  const double signal = scaling.energy_budget * scaling.sigma_d2;
  return std::log2(1.0 + signal / (imp.kappa_ue * signal + imp.noise_power));
}

double rate_limit_imperfect(const ScalingParams& scaling, const ImpairmentParams& imp) {
  const double signal = scaling.energy_budget * scaling.energy_budget * scaling.sigma_d2 *
                        scaling.sigma_d2;
  return std::log2(1.0 + signal / (imp.kappa_ue * signal + imp.noise_power));
}

double rate_ceiling(const ImpairmentParams& imp) {
  if (imp.kappa_ue <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(1.0 + 1.0 / imp.kappa_ue);
}

LlnDiagnostics lln_diagnostics(const SystemDims& dims, const ScalingParams& scaling,
                               std::uint64_t trials, const RngPolicy& policy,
                               std::string_view tag, unsigned threads) {
  LlnDiagnostics report;
  report.trials = trials;
  report.has_lrs = dims.lrs_elements > 0;
  if (trials == 0) return report;

  const double m = static_cast<double>(dims.bs_antennas);
  const double n = static_cast<double>(dims.lrs_elements);
  const std::string tag_str(tag);

  // Statistics per trial: direct stat, |direct dev| <= 20%, cascade stat,
  // cascade devs at 20%/30%, per-entry moment, product-form stat.
  const auto stats = run_trials<7>(trials, threads, [&](std::uint64_t trial) {
    RandomStream stream = derive_stream(policy, tag_str, trial);
    std::array<double, 7> out{};
    const AggregateChannel ch =
        sample_aggregate_channel(dims, scaling.sigma_d2, scaling.sigma_lrs2, stream);
    const double direct_stat =
        arma::accu(arma::square(arma::abs(ch.direct))) / m;
    out[0] = direct_stat;
    out[1] = std::abs(direct_stat - scaling.sigma_d2) <= 0.2 * scaling.sigma_d2 ? 1.0 : 0.0;
    if (report.has_lrs) {
      const double cascade_stat =
          arma::accu(arma::square(arma::abs(ch.reflected))) / (m * n * n);
      out[2] = cascade_stat;
      out[3] = std::abs(cascade_stat - scaling.sigma_lrs2) <= 0.2 * scaling.sigma_lrs2 ? 1.0
                                                                                       : 0.0;
      out[4] = std::abs(cascade_stat - scaling.sigma_lrs2) <= 0.3 * scaling.sigma_lrs2 ? 1.0
                                                                                       : 0.0;
      out[5] = std::norm(ch.reflected(0) / n);
      const ChannelRealization real = sample_iid_cascade(dims, 1.0, scaling.sigma_lrs2, stream);
      const arma::cx_vec prod = real.cascade * arma::cx_vec(dims.lrs_elements,
                                                            arma::fill::ones);
      out[6] = arma::accu(arma::square(arma::abs(prod))) / (m * n);
    }
    return out;
  });

  report.direct_mean = stats[0].mean();
  report.direct_frac_within_20pct = stats[1].mean();
  report.cascade_mean = stats[2].mean();
  report.cascade_frac_within_20pct = stats[3].mean();
  report.cascade_frac_within_30pct = stats[4].mean();
  report.cascade_entry_moment = stats[5].mean();
  report.product_cascade_mean = stats[6].mean();
  return report;
}

} // namespace lrsim
