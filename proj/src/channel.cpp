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

#include "lrsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace lrsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

arma::cx_vec unit_phases(const arma::vec& angles) {
  arma::cx_vec out(angles.n_elem);
  for (arma::uword i = 0; i < angles.n_elem; ++i) {
    out(i) = arma::cx_double(std::cos(angles(i)), std::sin(angles(i)));
  }
  return out;
}

// Best-Fisher rejection sampler for the von Mises distribution with mean
// direction zero and concentration kappa.
double sample_von_mises(double kappa, RandomStream& stream) {
  const double a = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double b = (a - std::sqrt(2.0 * a)) / (2.0 * kappa);
  const double r = (1.0 + b * b) / (2.0 * b);
  for (;;) {
    const double u1 = stream.uniform01();
    const double u2 = stream.uniform01();
    const double z = std::cos(kPi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double u3 = stream.uniform01();
      return u3 < 0.5 ? -std::acos(f) : std::acos(f);
    }
  }
}

} // namespace

arma::cx_vec PhaseConfig::nominal_phases() const { return unit_phases(thetas); }

arma::cx_vec PhaseConfig::actual_phases() const {
  return unit_phases(thetas + delta_thetas);
}

PhaseConfig PhaseConfig::zeros(std::size_t n) {
  PhaseConfig cfg;
  cfg.thetas = arma::vec(n, arma::fill::zeros);
  cfg.delta_thetas = arma::vec(n, arma::fill::zeros);
  return cfg;
}

arma::cx_vec sample_gaussian_channel(const CovarianceMatrix& cov, RandomStream& stream) {
  return cov.factor() * stream.complex_gaussian_vec(cov.dim());
}

ChannelRealization sample_iid_cascade(const SystemDims& dims, double sigma_g2,
                                      double sigma_r2, RandomStream& stream) {
  if (dims.lrs_elements < 1) {
    throw std::invalid_argument("sample_iid_cascade: at least one reflecting element required");
  }
  const std::size_t m = dims.bs_antennas;
  const std::size_t n = dims.lrs_elements;
  const double g_std = std::sqrt(sigma_g2);
  const double r_std = std::sqrt(sigma_r2);

  ChannelRealization real;
  real.direct = arma::cx_vec(m, arma::fill::zeros);
  real.bs_lrs = arma::cx_mat(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      real.bs_lrs(i, j) = g_std * stream.complex_gaussian();
    }
  }
  real.lrs_user = r_std * stream.complex_gaussian_vec(n);
  real.cascade = real.bs_lrs;
  real.cascade.each_row() %= arma::strans(real.lrs_user);
  return real;
}

arma::vec sample_phase_noise(const PhaseNoiseSpec& spec, std::size_t n,
                             RandomStream& stream) {
  arma::vec out(n, arma::fill::zeros);
  if (spec.family == PhaseNoiseFamily::none || spec.spread == 0.0) {
    return out;
  }
  if (!(spec.spread > 0.0)) {
    throw std::invalid_argument("sample_phase_noise: spread must be non-negative");
  }
  switch (spec.family) {
    case PhaseNoiseFamily::uniform:
      for (std::size_t i = 0; i < n; ++i) {
        out(i) = spec.spread * (2.0 * stream.uniform01() - 1.0);
      }
      break;
    case PhaseNoiseFamily::von_mises: {
      const double kappa = 1.0 / (spec.spread * spec.spread);
      for (std::size_t i = 0; i < n; ++i) {
        out(i) = sample_von_mises(kappa, stream);
      }
      break;
    }
    case PhaseNoiseFamily::none:
      break;
  }
  return out;
}

arma::cx_vec effective_channel(const ChannelRealization& real, const PhaseConfig& phases,
                               bool with_phase_noise) {
  const std::size_t n = real.cascade.n_cols;
  if (phases.thetas.n_elem != n || phases.delta_thetas.n_elem != n ||
      real.lrs_user.n_elem != n || (n > 0 && real.cascade.n_rows != real.direct.n_elem)) {
    throw std::invalid_argument("effective_channel: dimension mismatch");
  }
  if (n == 0) {
    return real.direct;
  }
  const arma::cx_vec phi = with_phase_noise ? phases.actual_phases() : phases.nominal_phases();
  return real.direct + real.cascade * phi;
}

AggregateChannel sample_aggregate_channel(const SystemDims& dims, double sigma_d2,
                                          double sigma_lrs2, RandomStream& stream) {
  const std::size_t m = dims.bs_antennas;
  const double n = static_cast<double>(dims.lrs_elements);
  AggregateChannel ch;
  ch.direct = std::sqrt(sigma_d2) * stream.complex_gaussian_vec(m);
  if (dims.lrs_elements > 0) {
    ch.reflected = (n * std::sqrt(sigma_lrs2)) * stream.complex_gaussian_vec(m);
  }
  return ch;
}

} // namespace lrsim
