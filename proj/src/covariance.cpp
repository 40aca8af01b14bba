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

#include "lrsim/covariance.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lrsim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHermitianRelTol = 1e-12;
constexpr double kPsdEigRelTol = 1e-10;
constexpr double kFactorRelTol = 1e-10;

void check_hermitian(const arma::cx_mat& entries) {
  if (entries.n_rows != entries.n_cols) {
    throw std::invalid_argument("covariance: matrix must be square");
  }
  const double scale = std::max(1.0, arma::norm(entries, "fro"));
  if (arma::norm(entries - entries.t(), "fro") > kHermitianRelTol * scale) {
    throw std::invalid_argument("covariance: matrix is not Hermitian");
  }
}

} // namespace

arma::cx_mat psd_factor(const arma::cx_mat& entries) {
  check_hermitian(entries);
  const double scale = arma::norm(entries, "fro");

  arma::cx_mat lower;
  if (arma::chol(lower, entries, "lower")) {
    if (arma::norm(lower * lower.t() - entries, "fro") <=
        kFactorRelTol * std::max(1e-300, scale)) {
      return lower;
    }
  }

  // Rank-deficient or numerically singular: eigenvalue square root.
  arma::vec eigval;
  arma::cx_mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, entries)) {
    throw std::runtime_error("covariance: eigendecomposition failed");
  }
  const double max_eig = eigval.empty() ? 0.0 : eigval.max();
  const double tol = kPsdEigRelTol * std::max(max_eig, 0.0);
  if (!eigval.empty() && eigval.min() < -tol) {
    throw std::invalid_argument("covariance: matrix is not positive semi-definite");
  }
  arma::vec clamped = arma::clamp(eigval, 0.0, std::numeric_limits<double>::infinity());
  return eigvec * arma::diagmat(arma::sqrt(clamped));
}

CovarianceMatrix CovarianceMatrix::from_entries(arma::cx_mat entries) {
  arma::cx_mat factor = psd_factor(entries);
  return CovarianceMatrix(std::move(entries), std::move(factor));
}

CovarianceMatrix scaled_identity_cov(std::size_t dim, double lambda) {
  if (dim < 1) throw std::invalid_argument("scaled_identity_cov: dim >= 1 required");
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("scaled_identity_cov: lambda must be non-negative");
  }
  arma::cx_mat entries(dim, dim, arma::fill::zeros);
  entries.diag().fill(arma::cx_double(lambda, 0.0));
  return CovarianceMatrix::from_entries(std::move(entries));
}

CovarianceMatrix exp_corr_cov(std::size_t dim, double r, double scale) {
  if (dim < 1) throw std::invalid_argument("exp_corr_cov: dim >= 1 required");
  if (!(r >= 0.0 && r < 1.0)) {
    throw std::invalid_argument("exp_corr_cov: correlation coefficient must lie in [0,1)");
  }
  if (!(scale >= 0.0)) throw std::invalid_argument("exp_corr_cov: scale must be non-negative");
  arma::cx_mat entries(dim, dim);
  for (std::size_t m = 0; m < dim; ++m) {
    for (std::size_t n = 0; n < dim; ++n) {
      const auto lag = m > n ? m - n : n - m;
      entries(m, n) = arma::cx_double(scale * std::pow(r, static_cast<double>(lag)), 0.0);
    }
  }
  return CovarianceMatrix::from_entries(std::move(entries));
}

CovarianceMatrix one_ring_cov(std::size_t dim, double angular_spread_deg,
                              double nominal_angle_deg, double spacing_wavelengths,
                              double scale) {
  if (dim < 1) throw std::invalid_argument("one_ring_cov: dim >= 1 required");
  if (!(angular_spread_deg > 0.0 && angular_spread_deg <= 360.0)) {
    throw std::invalid_argument(
        "one_ring_cov: angular spread must lie in (0, 360] degrees (zero spread is rank-1)");
  }
  if (!(spacing_wavelengths >= 0.0)) {
    throw std::invalid_argument("one_ring_cov: spacing must be non-negative");
  }
  if (!(scale >= 0.0)) throw std::invalid_argument("one_ring_cov: scale must be non-negative");

  const double delta = 0.5 * angular_spread_deg * kPi / 180.0;
  const double mean_angle = nominal_angle_deg * kPi / 180.0;
  const double lo = mean_angle - delta;
  const double hi = mean_angle + delta;

  using quad = boost::math::quadrature::gauss_kronrod<double, 15>;

  // Toeplitz: the entry depends on the antenna offset only.
  arma::cx_vec lags(dim);
  lags(0) = arma::cx_double(scale, 0.0);
  for (std::size_t d = 1; d < dim; ++d) {
    const double c = 2.0 * kPi * spacing_wavelengths * static_cast<double>(d);
    const double re =
        quad::integrate([c](double t) { return std::cos(c * std::sin(t)); }, lo, hi, 15, 1e-12);
    const double im =
        quad::integrate([c](double t) { return std::sin(c * std::sin(t)); }, lo, hi, 15, 1e-12);
    lags(d) = arma::cx_double(re, im) * (scale / (2.0 * delta));
  }

  arma::cx_mat entries(dim, dim);
  for (std::size_t m = 0; m < dim; ++m) {
    for (std::size_t n = 0; n < dim; ++n) {
      entries(m, n) = m >= n ? lags(m - n) : std::conj(lags(n - m));
    }
  }
  return CovarianceMatrix::from_entries(std::move(entries));
}

void dump_covariance_csv(const CovarianceMatrix& cov, const std::string& model,
                         const std::string& params, std::ostream& out) {
  out << "dim,model,params\n";
  out << cov.dim() << "," << model << "," << params << "\n";
  const arma::cx_mat& c = cov.entries();
  for (std::size_t m = 0; m < cov.dim(); ++m) {
    for (std::size_t n = 0; n < cov.dim(); ++n) {
      if (n > 0) out << ",";
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", c(m, n).real(), c(m, n).imag());
      out << buf;
    }
    out << "\n";
  }
}

} // namespace lrsim
