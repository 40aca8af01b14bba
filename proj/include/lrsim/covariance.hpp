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
#include <cstddef>
#include <iosfwd>
#include <string>

namespace lrsim {

/// Hermitian positive semi-definite channel covariance with a cached factor
/// F such that F * F^H reproduces the entries. Values are immutable after
/// construction and safe to share across threads.
class CovarianceMatrix {
 public:
  /// Validates Hermitian symmetry (1e-12 relative) and positive
  /// semi-definiteness (eigenvalues >= -1e-10 * largest), then factors.
  /// Throws std::invalid_argument on violation.
  static CovarianceMatrix from_entries(arma::cx_mat entries);

  std::size_t dim() const { return entries_.n_rows; }
  const arma::cx_mat& entries() const { return entries_; }
  const arma::cx_mat& factor() const { return factor_; }
  double trace() const { return arma::trace(entries_).real(); }

 private:
  CovarianceMatrix(arma::cx_mat entries, arma::cx_mat factor)
      : entries_(std::move(entries)), factor_(std::move(factor)) {}

  arma::cx_mat entries_;
  arma::cx_mat factor_;
};

/// lambda * I. Rejects negative lambda.
CovarianceMatrix scaled_identity_cov(std::size_t dim, double lambda);

/// Toeplitz exponential-correlation model: entry(m, n) = scale * r^|m-n|.
/// Requires 0 <= r < 1.
CovarianceMatrix exp_corr_cov(std::size_t dim, double r, double scale);

/// One-ring scatterer model for a uniform linear array:
///   entry(m, n) = scale/(2*delta) * integral over [mean-delta, mean+delta]
///                 of exp(j*2*pi*spacing*(m-n)*sin(theta)) dtheta,
/// with delta = angular_spread/2, evaluated by adaptive quadrature well below
/// 1e-9 absolute error. Zero spread is rejected (rank-1 limit).
CovarianceMatrix one_ring_cov(std::size_t dim, double angular_spread_deg,
                              double nominal_angle_deg, double spacing_wavelengths,
                              double scale);

/// Square-root factor with F * F^H == entries to 1e-10 relative Frobenius
/// error. Uses Cholesky when possible and falls back to the eigenvalue
/// square root for rank-deficient input. Throws on non-PSD input.
arma::cx_mat psd_factor(const arma::cx_mat& entries);

/// Matrix dump: header `dim,model,params`, then row-major interleaved
/// real/imag entries.
void dump_covariance_csv(const CovarianceMatrix& cov, const std::string& model,
                         const std::string& params, std::ostream& out);

} // namespace lrsim
