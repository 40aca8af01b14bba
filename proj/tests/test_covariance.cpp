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

#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <sstream>

#include "lrsim/channel.hpp"
#include "lrsim/covariance.hpp"
#include "lrsim/rng.hpp"

using namespace lrsim;

namespace {

double rel_frobenius(const arma::cx_mat& a, const arma::cx_mat& b) {
  return arma::norm(a - b, "fro") / std::max(1e-300, arma::norm(b, "fro"));
}

// Independent PSD oracle: direct eigenvalue computation on the entries.
void check_hermitian_psd(const CovarianceMatrix& cov) {
  const arma::cx_mat& c = cov.entries();
  CHECK(arma::norm(c - c.t(), "fro") <= 1e-12 * std::max(1.0, arma::norm(c, "fro")));
  const arma::vec eigs = arma::eig_sym(c);
  const double max_eig = eigs.max();
  CHECK(eigs.min() >= -1e-10 * std::max(max_eig, 0.0) - 1e-300);
  CHECK(rel_frobenius(cov.factor() * cov.factor().t(), c) < 1e-10);
}

} // namespace

TEST_CASE("scaled identity covariance") {
  SUBCASE("unit case") {
    const auto cov = scaled_identity_cov(2, 1.0);
    CHECK(rel_frobenius(cov.entries(), arma::cx_mat(2, 2, arma::fill::eye)) == 0.0);
  }
  SUBCASE("zero is degenerate but PSD") {
    const auto cov = scaled_identity_cov(3, 0.0);
    CHECK(arma::norm(cov.entries(), "fro") == 0.0);
    CHECK(arma::norm(cov.factor(), "fro") == 0.0);
    check_hermitian_psd(cov);
  }
  SUBCASE("trace scales with lambda") {
    const auto cov = scaled_identity_cov(4, 2.5);
    CHECK(cov.trace() == doctest::Approx(10.0));
    CHECK(rel_frobenius(cov.factor(), std::sqrt(2.5) * arma::cx_mat(4, 4, arma::fill::eye)) <
          1e-14);
  }
  SUBCASE("negative lambda rejected") {
    CHECK_THROWS_AS(scaled_identity_cov(3, -0.5), std::invalid_argument);
  }
}

TEST_CASE("exponential correlation covariance") {
  SUBCASE("matches direct evaluation of r^|m-n|") {
    const auto cov = exp_corr_cov(3, 0.7, 1.0);
    arma::mat expected = {{1.0, 0.7, 0.49}, {0.7, 1.0, 0.7}, {0.49, 0.7, 1.0}};
    const arma::cx_mat expected_cx(expected, arma::mat(3, 3, arma::fill::zeros));
    CHECK(rel_frobenius(cov.entries(), expected_cx) < 1e-14);
  }
  SUBCASE("r = 0 gives a scaled identity") {
    const auto cov = exp_corr_cov(5, 0.0, 3.0);
    arma::cx_mat expected(5, 5, arma::fill::zeros);
    expected.diag().fill(arma::cx_double(3.0, 0.0));
    CHECK(rel_frobenius(cov.entries(), expected) == 0.0);
  }
  SUBCASE("dim 20 keeps trace and positive semi-definiteness") {
    const auto cov = exp_corr_cov(20, 0.7, 1.0);
    CHECK(cov.trace() == doctest::Approx(20.0));
    check_hermitian_psd(cov);
  }
  SUBCASE("r >= 1 rejected") {
    CHECK_THROWS_AS(exp_corr_cov(4, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(exp_corr_cov(4, -0.2, 1.0), std::invalid_argument);
  }
  SUBCASE("Toeplitz for random parameters") {
    RandomStream stream(7);
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t dim = 2 + static_cast<std::size_t>(stream.uniform01() * 10);
      const double r = stream.uniform01() * 0.95;
      const double scale = 0.1 + stream.uniform01() * 5.0;
      const auto cov = exp_corr_cov(dim, r, scale);
      for (std::size_t m = 1; m < dim; ++m) {
        for (std::size_t n = 1; n < dim; ++n) {
          CHECK(std::abs(cov.entries()(m, n) - cov.entries()(m - 1, n - 1)) < 1e-14);
        }
      }
      check_hermitian_psd(cov);
    }
  }
}

TEST_CASE("one-ring covariance") {
  SUBCASE("diagonal equals the scale exactly") {
    const auto cov = one_ring_cov(6, 20.0, 30.0, 0.5, 2.25);
    for (std::size_t m = 0; m < 6; ++m) {
      CHECK(cov.entries()(m, m) == arma::cx_double(2.25, 0.0));
    }
  }
  SUBCASE("full-circle spread reproduces the Bessel identity") {
    // spread 360 deg, half-wavelength spacing, offset 1: entry = J0(pi)*scale.
    const auto cov = one_ring_cov(2, 360.0, 0.0, 0.5, 1.0);
    const double expected = boost::math::cyl_bessel_j(0, 3.14159265358979323846);
    CHECK(cov.entries()(1, 0).real() == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(cov.entries()(1, 0).imag()) < 1e-9);
    CHECK(expected == doctest::Approx(-0.3042421776).epsilon(1e-8));
  }
  SUBCASE("narrow spread is PSD with reduced effective rank") {
    const auto cov = one_ring_cov(20, 20.0, 30.0, 0.5, 1.0);
    check_hermitian_psd(cov);
    const arma::vec eigs = arma::eig_sym(cov.entries());
    const double max_eig = eigs.max();
    const arma::uvec significant = arma::find(eigs > 1e-6 * max_eig);
    CHECK(significant.n_elem < 20);
  }
  SUBCASE("zero spread rejected") {
    CHECK_THROWS_AS(one_ring_cov(8, 0.0, 30.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(one_ring_cov(8, 400.0, 30.0, 0.5, 1.0), std::invalid_argument);
  }
  SUBCASE("Toeplitz structure for a uniform linear array") {
    const auto cov = one_ring_cov(8, 25.0, 15.0, 0.5, 1.5);
    for (std::size_t m = 1; m < 8; ++m) {
      for (std::size_t n = 1; n < 8; ++n) {
        CHECK(std::abs(cov.entries()(m, n) - cov.entries()(m - 1, n - 1)) < 1e-12);
      }
    }
  }
}

TEST_CASE("psd_factor") {
  SUBCASE("identity factors to identity") {
    const arma::cx_mat eye(3, 3, arma::fill::eye);
    CHECK(rel_frobenius(psd_factor(eye), eye) < 1e-14);
  }
  SUBCASE("scaled identity factors to sqrt(lambda) identity") {
    arma::cx_mat c(4, 4, arma::fill::zeros);
    c.diag().fill(arma::cx_double(6.25, 0.0));
    const arma::cx_mat f = psd_factor(c);
    CHECK(rel_frobenius(f * f.t(), c) < 1e-12);
    CHECK(std::abs(f(0, 0) - arma::cx_double(2.5, 0.0)) < 1e-12);
  }
  SUBCASE("exp-corr reconstruction stays under 1e-10") {
    const auto cov = exp_corr_cov(3, 0.7, 1.0);
    const arma::cx_mat f = psd_factor(cov.entries());
    CHECK(rel_frobenius(f * f.t(), cov.entries()) < 1e-10);
  }
  SUBCASE("rank-deficient input goes through the eigen square root") {
    arma::cx_vec v(3, arma::fill::ones);
    const arma::cx_mat rank_one = v * v.t();
    const arma::cx_mat f = psd_factor(rank_one);
    CHECK(rel_frobenius(f * f.t(), rank_one) < 1e-10);
  }
  SUBCASE("non-PSD input is rejected") {
    arma::cx_mat indefinite(2, 2, arma::fill::eye);
    indefinite(1, 1) = arma::cx_double(-1.0, 0.0);
    CHECK_THROWS_AS(psd_factor(indefinite), std::invalid_argument);
  }
  SUBCASE("non-Hermitian input is rejected") {
    arma::cx_mat skew(2, 2, arma::fill::eye);
    skew(0, 1) = arma::cx_double(0.5, 0.0);
    CHECK_THROWS_AS(psd_factor(skew), std::invalid_argument);
  }
}

TEST_CASE("sample covariance of factored draws matches the entries") {
  const auto cov = exp_corr_cov(4, 0.7, 1.0);
  RandomStream stream(2024);
  const std::size_t trials = 100000;
  arma::cx_mat acc(4, 4, arma::fill::zeros);
  for (std::size_t t = 0; t < trials; ++t) {
    const arma::cx_vec h = sample_gaussian_channel(cov, stream);
    acc += h * h.t();
  }
  acc /= static_cast<double>(trials);
  CHECK(rel_frobenius(acc, cov.entries()) < 0.05);
}

TEST_CASE("covariance dump carries the header and interleaved entries") {
  const auto cov = exp_corr_cov(2, 0.5, 1.0);
  std::ostringstream out;
  dump_covariance_csv(cov, "exp-corr", "r=0.5", out);
  const std::string text = out.str();
  CHECK(text.find("dim,model,params") == 0);
  CHECK(text.find("2,exp-corr,r=0.5") != std::string::npos);
  CHECK(text.find("0.5,") != std::string::npos);
}
