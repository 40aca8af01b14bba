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

#include "lrsim/estimation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lrsim/channel.hpp"
#include "lrsim/montecarlo.hpp"

namespace lrsim {

namespace {

constexpr double kRidgeRel = 1e-12;
constexpr double kRidgeRcondGate = 1e-13;

// Plain solve for well-conditioned signal covariances; a relative ridge of
// 1e-12 * trace/dim only when the matrix is numerically singular (e.g. zero
// thermal noise with a rank-deficient prior), so the extreme-SNR regime stays
// solvable without perturbing the ordinary path.
arma::cx_mat ridge_solve(const arma::cx_mat& lhs, const arma::cx_mat& rhs) {
  const double tr = arma::trace(lhs).real();
  arma::cx_mat system = lhs;
  if (!(tr > 0.0) || arma::rcond(lhs) < kRidgeRcondGate) {
    const double ridge =
        tr > 0.0 ? kRidgeRel * tr / static_cast<double>(lhs.n_rows) : kRidgeRel;
    system.diag() += arma::cx_double(ridge, 0.0);
  }
  arma::cx_mat out;
  if (!arma::solve(out, system, rhs, arma::solve_opts::no_approx)) {
    throw std::runtime_error("lmmse: signal covariance solve failed (singular matrix)");
  }
  return out;
}

arma::vec bs_distortion_std(const arma::vec& diagonal_power) {
  return arma::sqrt(diagonal_power);
}

arma::cx_double unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

} // namespace

PilotBlockModel make_pilot_block_model(const CovarianceMatrix& c_d,
                                       const CovarianceMatrix& c_i,
                                       const ImpairmentParams& imp,
                                       const SignalParams& sig) {
  if (c_d.dim() != c_i.dim()) {
    throw std::invalid_argument("pilot block: covariance dimensions differ");
  }
  const double p = sig.pilot_power;
  const double factor = imp.kappa_bs * p * (1.0 + imp.kappa_ue);
  PilotBlockModel model;
  model.chan_factor_d = c_d.factor();
  model.chan_factor_i = c_i.factor();
  model.dist_std_direct = bs_distortion_std(factor * arma::real(c_d.entries().diag()));
  model.dist_std_lrs =
      bs_distortion_std(factor * arma::real(c_d.entries().diag() + c_i.entries().diag()));
  model.ue_std = std::sqrt(ue_distortion_variance(p, imp.kappa_ue));
  model.noise_std = std::sqrt(imp.noise_power);
  model.pilot = sig.pilot_symbol;
  model.phase_noise = imp.phase_noise;
  return model;
}

PilotBlockDraw draw_pilot_block(const PilotBlockModel& model, RandomStream& stream) {
  const std::size_t m = model.chan_factor_d.n_rows;
  PilotBlockDraw draw;
  draw.h_direct = model.chan_factor_d * stream.complex_gaussian_vec(m);
  const arma::cx_vec h_i = model.chan_factor_i * stream.complex_gaussian_vec(m);
  const arma::vec dtheta = sample_phase_noise(model.phase_noise, 1, stream);
  draw.h_lrs_rotated = unit_phase(dtheta(0)) * h_i;

  const arma::cx_double sent = model.pilot + model.ue_std * stream.complex_gaussian();

  arma::cx_vec dist_d = stream.complex_gaussian_vec(m);
  dist_d %= arma::conv_to<arma::cx_vec>::from(model.dist_std_direct);
  const arma::cx_vec noise_d = model.noise_std * stream.complex_gaussian_vec(m);
  draw.y_direct = draw.h_direct * sent + dist_d + noise_d;

  arma::cx_vec dist_i = stream.complex_gaussian_vec(m);
  dist_i %= arma::conv_to<arma::cx_vec>::from(model.dist_std_lrs);
  const arma::cx_vec noise_i = model.noise_std * stream.complex_gaussian_vec(m);
  draw.y_lrs = (draw.h_direct + draw.h_lrs_rotated) * sent + dist_i + noise_i;
  return draw;
}

PilotObservation synthesize_pilot_direct(const CovarianceMatrix& c_d,
                                         const ImpairmentParams& imp,
                                         const SignalParams& sig, RandomStream& stream) {
  const std::size_t m = c_d.dim();
  const double p = sig.pilot_power;
  PilotObservation obs;
  obs.phase = PilotPhase::pilot_direct();
  obs.truth = c_d.factor() * stream.complex_gaussian_vec(m);
  const arma::cx_double sent =
      sig.pilot_symbol + std::sqrt(ue_distortion_variance(p, imp.kappa_ue)) *
                             stream.complex_gaussian();
  const arma::vec dist_std = bs_distortion_std(
      imp.kappa_bs * p * (1.0 + imp.kappa_ue) * arma::real(c_d.entries().diag()));
  arma::cx_vec dist = stream.complex_gaussian_vec(m);
  dist %= arma::conv_to<arma::cx_vec>::from(dist_std);
  const arma::cx_vec noise = std::sqrt(imp.noise_power) * stream.complex_gaussian_vec(m);
  obs.received = obs.truth * sent + dist + noise;
  return obs;
}

LrsPilotPair synthesize_pilot_lrs(std::size_t element_index, const CovarianceMatrix& c_d,
                                  const CovarianceMatrix& c_i, const ImpairmentParams& imp,
                                  const SignalParams& sig, const PhaseNoiseSpec& phase_spec,
                                  RandomStream& stream) {
  if (element_index < 1) {
    throw std::invalid_argument("synthesize_pilot_lrs: element index is 1-based");
  }
  ImpairmentParams imp_with_spec = imp;
  imp_with_spec.phase_noise = phase_spec;
  const PilotBlockModel model = make_pilot_block_model(c_d, c_i, imp_with_spec, sig);
  const PilotBlockDraw draw = draw_pilot_block(model, stream);

  LrsPilotPair pair;
  pair.direct.received = draw.y_direct;
  pair.direct.phase = PilotPhase::pilot_direct();
  pair.direct.truth = draw.h_direct;
  pair.lrs.received = draw.y_lrs;
  pair.lrs.phase = PilotPhase::pilot_lrs(element_index);
  pair.lrs.truth = draw.h_lrs_rotated;
  return pair;
}

PilotObservation separate_lrs_signal(const PilotObservation& lrs,
                                     const PilotObservation& direct) {
  if (lrs.phase.kind() != PilotPhase::Kind::pilot_lrs ||
      direct.phase.kind() != PilotPhase::Kind::pilot_direct ||
      lrs.received.n_elem != direct.received.n_elem) {
    throw std::invalid_argument("separate_lrs_signal: mismatched observation pairing");
  }
  PilotObservation out;
  out.received = lrs.received - direct.received;
  out.phase = lrs.phase;
  out.truth = lrs.truth;
  return out;
}

CovarianceMatrix pilot_covariance_direct(const CovarianceMatrix& c_d,
                                         const ImpairmentParams& imp,
                                         const SignalParams& sig) {
  const double p = sig.pilot_power;
  arma::cx_mat entries = p * (1.0 + imp.kappa_ue) * c_d.entries();
  const arma::vec dist =
      imp.kappa_bs * p * (1.0 + imp.kappa_ue) * arma::real(c_d.entries().diag());
  entries.diag() += arma::conv_to<arma::cx_vec>::from(dist);
  entries.diag() += arma::cx_double(imp.noise_power, 0.0);
  return CovarianceMatrix::from_entries(std::move(entries));
}

CovarianceMatrix pilot_covariance_lrs(const CovarianceMatrix& c_d,
                                      const CovarianceMatrix& c_i,
                                      const ImpairmentParams& imp, const SignalParams& sig) {
  if (c_d.dim() != c_i.dim()) {
    throw std::invalid_argument("pilot_covariance_lrs: covariance dimensions differ");
  }
  const double p = sig.pilot_power;
  arma::cx_mat entries = p * (1.0 + imp.kappa_ue) * c_i.entries();
  const arma::vec dist = imp.kappa_bs * p * (1.0 + imp.kappa_ue) *
                         arma::real(2.0 * c_d.entries().diag() + c_i.entries().diag());
  entries.diag() += arma::conv_to<arma::cx_vec>::from(dist);
  entries.diag() += arma::cx_double(2.0 * imp.noise_power, 0.0);
  return CovarianceMatrix::from_entries(std::move(entries));
}

arma::cx_mat lmmse_detector(const CovarianceMatrix& prior_cov,
                            const CovarianceMatrix& signal_cov, const SignalParams& sig) {
  // A = x* C Y^-1; computed as (Y^-1 C)^H * x* since C and Y are Hermitian.
  const arma::cx_mat solved = ridge_solve(signal_cov.entries(), prior_cov.entries());
  return std::conj(sig.pilot_symbol) * solved.t();
}

arma::cx_mat lmmse_error_cov(const CovarianceMatrix& prior_cov,
                             const CovarianceMatrix& signal_cov, const SignalParams& sig) {
  const arma::cx_mat solved = ridge_solve(signal_cov.entries(), prior_cov.entries());
  return prior_cov.entries() - sig.pilot_power * prior_cov.entries() * solved;
}

EstimationOutput lmmse_estimate(const PilotObservation& obs,
                                const CovarianceMatrix& prior_cov,
                                const CovarianceMatrix& signal_cov,
                                const SignalParams& sig) {
  EstimationOutput out;
  // Solve against the observation rather than forming an explicit inverse.
  const arma::cx_vec solved_obs = ridge_solve(signal_cov.entries(), obs.received);
  out.estimate = std::conj(sig.pilot_symbol) * (prior_cov.entries() * solved_obs);
  out.error_cov = lmmse_error_cov(prior_cov, signal_cov, sig);
  if (obs.truth.n_elem == out.estimate.n_elem && obs.truth.n_elem > 0) {
    const arma::cx_vec err = out.estimate - obs.truth;
    out.empirical_sq_error = std::real(arma::cdot(err, err));
  }
  return out;
}

double error_floor(ChannelKind kind, double lambda, const ImpairmentParams& imp) {
  if (!(lambda > 0.0)) throw std::invalid_argument("error_floor: lambda > 0 required");
  const double bs_term = imp.kappa_bs * (1.0 + imp.kappa_ue);
  const double kappa_eff = kind == ChannelKind::direct
                               ? 1.0 + imp.kappa_ue + bs_term
                               : 1.0 + imp.kappa_ue + 3.0 * bs_term;
  return lambda * (1.0 - 1.0 / kappa_eff);
}

EstimationOutput brute_force_lmmse_oracle(const PilotObservation& obs,
                                          const CovarianceMatrix& prior_cov,
                                          const CovarianceMatrix& signal_cov,
                                          const arma::cx_mat& cross_cov) {
  // A R_yy = R_hy  =>  R_yy^T A^T = R_hy^T. No ridge here: this route must
  // stay independent of the production solve path.
  const arma::cx_mat a_t =
      arma::solve(arma::strans(signal_cov.entries()), arma::strans(cross_cov),
                  arma::solve_opts::no_approx);
  const arma::cx_mat detector = arma::strans(a_t);

  EstimationOutput out;
  out.estimate = detector * obs.received;
  out.error_cov = prior_cov.entries() - detector * cross_cov.t() - cross_cov * detector.t() +
                  detector * signal_cov.entries() * detector.t();
  if (obs.truth.n_elem == out.estimate.n_elem && obs.truth.n_elem > 0) {
    const arma::cx_vec err = out.estimate - obs.truth;
    out.empirical_sq_error = std::real(arma::cdot(err, err));
  }
  return out;
}

double avg_error_per_antenna(const arma::cx_mat& error_cov,
                             const arma::cx_mat& normalizer_cov) {
  const double norm_trace = arma::trace(normalizer_cov).real();
  if (!(norm_trace > 0.0)) {
    throw std::invalid_argument("avg_error_per_antenna: normalizer trace must be positive");
  }
  return arma::trace(error_cov).real() / norm_trace;
}

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

EstimationPointResult run_estimation_point(const CovarianceMatrix& c_d,
                                           const CovarianceMatrix& c_i,
                                           const ImpairmentParams& imp,
                                           const SignalParams& sig, std::uint64_t trials,
                                           const RngPolicy& policy, std::string_view tag,
                                           unsigned threads) {
  const CovarianceMatrix cov_direct = pilot_covariance_direct(c_d, imp, sig);
  const CovarianceMatrix cov_lrs = pilot_covariance_lrs(c_d, c_i, imp, sig);
  const arma::cx_mat detector_direct = lmmse_detector(c_d, cov_direct, sig);
  const arma::cx_mat detector_lrs = lmmse_detector(c_i, cov_lrs, sig);
  const PilotBlockModel model = make_pilot_block_model(c_d, c_i, imp, sig);

  const double trace_d = c_d.trace();
  const double trace_i = c_i.trace();

  EstimationPointResult result;
  result.closed_direct = avg_error_per_antenna(lmmse_error_cov(c_d, cov_direct, sig),
                                               c_d.entries());
  result.closed_lrs = avg_error_per_antenna(lmmse_error_cov(c_i, cov_lrs, sig),
                                            c_i.entries());
  result.trials = trials;

  const std::string tag_str(tag);
  const auto stats = run_trials<2>(trials, threads, [&](std::uint64_t trial) {
    RandomStream stream = derive_stream(policy, tag_str, trial);
    const PilotBlockDraw draw = draw_pilot_block(model, stream);
    const arma::cx_vec err_d = detector_direct * draw.y_direct - draw.h_direct;
    const arma::cx_vec err_i =
        detector_lrs * (draw.y_lrs - draw.y_direct) - draw.h_lrs_rotated;
    return std::array<double, 2>{std::real(arma::cdot(err_d, err_d)) / trace_d,
                                 std::real(arma::cdot(err_i, err_i)) / trace_i};
  });

  result.emp_direct_mean = stats[0].mean();
  result.emp_direct_se = stats[0].std_error();
  result.emp_lrs_mean = stats[1].mean();
  result.emp_lrs_se = stats[1].std_error();
  return result;
}

} // namespace lrsim
