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
#include <cstdint>
#include <limits>
#include <string_view>

#include "lrsim/config.hpp"
#include "lrsim/covariance.hpp"
#include "lrsim/impairments.hpp"
#include "lrsim/rng.hpp"

namespace lrsim {

/// A synthesized received pilot vector together with the channel that was
/// realized when generating it. For per-element pilots the truth carries the
/// phase-noise rotation e^{j*dtheta} * h_i: that rotated vector is the
/// quantity the separated signal actually observes and the one whose LMMSE
/// error matches the closed forms for every phase-noise spread (at zero
/// spread it coincides with h_i).
struct PilotObservation {
  arma::cx_vec received;
  PilotPhase phase = PilotPhase::pilot_direct();
  arma::cx_vec truth;
};

struct EstimationOutput {
  arma::cx_vec estimate;
  arma::cx_mat error_cov;
  double empirical_sq_error = std::numeric_limits<double>::quiet_NaN();
};

/// Direct-channel pilot: y = h_d * (x + eta_ue) + eta_bs + n.
PilotObservation synthesize_pilot_direct(const CovarianceMatrix& c_d,
                                         const ImpairmentParams& imp,
                                         const SignalParams& sig, RandomStream& stream);

/// Paired pilots of one coherence block. The direct channel and the UE
/// distortion draw are shared between the two observations (the subtraction
/// below is exact only under that reading); thermal noise and BS distortion
/// are drawn independently per observation, and one phase-noise offset is
/// drawn for the active element.
struct LrsPilotPair {
  PilotObservation lrs;    // y_i, element i reflecting
  PilotObservation direct; // y_d of the same block
};

LrsPilotPair synthesize_pilot_lrs(std::size_t element_index, const CovarianceMatrix& c_d,
                                  const CovarianceMatrix& c_i, const ImpairmentParams& imp,
                                  const SignalParams& sig, const PhaseNoiseSpec& phase_spec,
                                  RandomStream& stream);

/// y_i - y_d: removes the direct-channel signal and superposes the noise and
/// distortion of both subphases. Throws on mismatched pairing.
PilotObservation separate_lrs_signal(const PilotObservation& lrs,
                                     const PilotObservation& direct);

/// Covariance of the direct pilot:
///   Y_d = p*(1+kappa_ue)*C_d + kappa_bs*p*(1+kappa_ue)*diag(C_d) + sigma^2*I.
CovarianceMatrix pilot_covariance_direct(const CovarianceMatrix& c_d,
                                         const ImpairmentParams& imp,
                                         const SignalParams& sig);

/// Covariance of the separated per-element signal:
///   Y_i = p*(1+kappa_ue)*C_i + kappa_bs*p*(1+kappa_ue)*diag(2*C_d+C_i) + 2*sigma^2*I.
/// Phase noise has unit modulus and contributes nothing here.
CovarianceMatrix pilot_covariance_lrs(const CovarianceMatrix& c_d,
                                      const CovarianceMatrix& c_i,
                                      const ImpairmentParams& imp, const SignalParams& sig);

/// Detector A = x* * prior * signal^-1, computed through a linear solve with
/// a relative ridge of 1e-12 * trace/dim so near-singular signal covariances
/// stay solvable at extreme SNR.
arma::cx_mat lmmse_detector(const CovarianceMatrix& prior_cov,
                            const CovarianceMatrix& signal_cov, const SignalParams& sig);

/// Error covariance M = prior - p * prior * signal^-1 * prior.
arma::cx_mat lmmse_error_cov(const CovarianceMatrix& prior_cov,
                             const CovarianceMatrix& signal_cov, const SignalParams& sig);

/// estimate = x* * prior * signal^-1 * y, plus the closed-form error
/// covariance; empirical_sq_error = ||estimate - truth||^2 when the
/// observation carries its truth.
EstimationOutput lmmse_estimate(const PilotObservation& obs,
                                const CovarianceMatrix& prior_cov,
                                const CovarianceMatrix& signal_cov,
                                const SignalParams& sig);

enum class ChannelKind { direct, lrs };

/// High-power error floor per antenna for scaled-identity covariances:
/// lambda * (1 - 1/kappa_eff) with kappa_eff = 1 + kappa_ue + c*kappa_bs*(1+kappa_ue),
/// c = 1 for the direct channel and 3 for the per-element channel.
double error_floor(ChannelKind kind, double lambda, const ImpairmentParams& imp);

/// Independent check route: solves the normal equations A * R_yy = R_hy from
/// the joint second-moment description (R_hy = E{h y^H} passed by the
/// caller) and evaluates the error covariance through the full bilinear MSE
/// expansion, never through the closed form. Intended for small dimensions.
EstimationOutput brute_force_lmmse_oracle(const PilotObservation& obs,
                                          const CovarianceMatrix& prior_cov,
                                          const CovarianceMatrix& signal_cov,
                                          const arma::cx_mat& cross_cov);

/// trace(error_cov) / trace(normalizer_cov). Throws on zero normalizer.
double avg_error_per_antenna(const arma::cx_mat& error_cov,
                             const arma::cx_mat& normalizer_cov);

double to_db(double ratio);

/// Precomputed synthesis model for one (C_d, C_i, impairments, pilot) point,
/// shared by every trial of a sweep.
struct PilotBlockModel {
  arma::cx_mat chan_factor_d;
  arma::cx_mat chan_factor_i;
  arma::vec dist_std_direct; // per-antenna std dev of BS distortion, direct subphase
  arma::vec dist_std_lrs;    // per-antenna std dev, per-element subphase
  double ue_std = 0.0;       // sqrt(kappa_ue * p)
  double noise_std = 1.0;    // sqrt(sigma^2)
  std::complex<double> pilot{1.0, 0.0};
  PhaseNoiseSpec phase_noise;
};

PilotBlockModel make_pilot_block_model(const CovarianceMatrix& c_d,
                                       const CovarianceMatrix& c_i,
                                       const ImpairmentParams& imp,
                                       const SignalParams& sig);

/// One coherence-block draw: the two received pilots plus the realized
/// channels. Draw order: h_d, h_i, dtheta, eta_ue, (eta_bs, n) for the
/// direct pilot, then (eta_bs, n) for the element pilot.
struct PilotBlockDraw {
  arma::cx_vec y_direct;
  arma::cx_vec y_lrs;
  arma::cx_vec h_direct;
  arma::cx_vec h_lrs_rotated; // e^{j*dtheta} * h_i
};

PilotBlockDraw draw_pilot_block(const PilotBlockModel& model, RandomStream& stream);

/// Closed-form and Monte Carlo estimation errors at one sweep point, both
/// normalized by the corresponding channel trace.
struct EstimationPointResult {
  double closed_direct = 0.0;
  double closed_lrs = 0.0;
  double emp_direct_mean = 0.0;
  double emp_direct_se = 0.0;
  double emp_lrs_mean = 0.0;
  double emp_lrs_se = 0.0;
  std::uint64_t trials = 0;
};

EstimationPointResult run_estimation_point(const CovarianceMatrix& c_d,
                                           const CovarianceMatrix& c_i,
                                           const ImpairmentParams& imp,
                                           const SignalParams& sig, std::uint64_t trials,
                                           const RngPolicy& policy, std::string_view tag,
                                           unsigned threads);

} // namespace lrsim
