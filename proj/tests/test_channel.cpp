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

#include <cmath>
#include <complex>

#include "lrsim/channel.hpp"
#include "lrsim/covariance.hpp"
#include "lrsim/rng.hpp"

using namespace lrsim;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("sample_gaussian_channel") {
  RandomStream stream(11);
  SUBCASE("zero covariance gives the zero vector") {
    const auto cov = scaled_identity_cov(5, 0.0);
    const arma::cx_vec h = sample_gaussian_channel(cov, stream);
    CHECK(arma::norm(h) == 0.0);
  }
  SUBCASE("identity covariance gives unit per-entry variance") {
    const auto cov = scaled_identity_cov(2, 1.0);
    const std::size_t trials = 100000;
    double acc0 = 0, acc1 = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const arma::cx_vec h = sample_gaussian_channel(cov, stream);
      acc0 += std::norm(h(0));
      acc1 += std::norm(h(1));
    }
    CHECK(acc0 / trials > 0.97);
    CHECK(acc0 / trials < 1.03);
    CHECK(acc1 / trials > 0.97);
    CHECK(acc1 / trials < 1.03);
  }
  SUBCASE("lag-1 correlation follows the covariance model") {
    const auto cov = exp_corr_cov(2, 0.7, 1.0);
    const std::size_t trials = 100000;
    std::complex<double> cross{0, 0};
    double p0 = 0, p1 = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const arma::cx_vec h = sample_gaussian_channel(cov, stream);
      cross += h(0) * std::conj(h(1));
      p0 += std::norm(h(0));
      p1 += std::norm(h(1));
    }
    const double corr = std::abs(cross) / std::sqrt(p0 * p1);
    CHECK(corr > 0.68);
    CHECK(corr < 0.72);
  }
}

TEST_CASE("sample_iid_cascade") {
  RandomStream stream(23);
  SUBCASE("per-product second moment is sigma_g2 * sigma_r2") {
    const SystemDims dims{2, 5};
    double acc = 0;
    std::size_t count = 0;
    while (count < 100000) {
      const ChannelRealization real = sample_iid_cascade(dims, 1.0, 1.0, stream);
      for (arma::uword j = 0; j < real.cascade.n_cols && count < 100000; ++j) {
        for (arma::uword i = 0; i < real.cascade.n_rows && count < 100000; ++i) {
          acc += std::norm(real.cascade(i, j));
          ++count;
        }
      }
    }
    CHECK(acc / static_cast<double>(count) > 0.97);
    CHECK(acc / static_cast<double>(count) < 1.03);
  }
  SUBCASE("zero user-side variance zeroes the cascade") {
    const ChannelRealization real = sample_iid_cascade({3, 4}, 1.0, 0.0, stream);
    CHECK(arma::norm(real.cascade, "fro") == 0.0);
  }
  SUBCASE("shape and per-column identity") {
    const ChannelRealization real = sample_iid_cascade({2, 3}, 1.0, 1.0, stream);
    CHECK(real.cascade.n_rows == 2);
    CHECK(real.cascade.n_cols == 3);
    for (arma::uword j = 0; j < 3; ++j) {
      for (arma::uword i = 0; i < 2; ++i) {
        CHECK(real.cascade(i, j) == real.bs_lrs(i, j) * real.lrs_user(j));
      }
    }
  }
  SUBCASE("requires at least one element") {
    CHECK_THROWS_AS(sample_iid_cascade({2, 0}, 1.0, 1.0, stream), std::invalid_argument);
  }
}

TEST_CASE("sample_phase_noise") {
  RandomStream stream(31);
  SUBCASE("family none returns zeros") {
    const arma::vec noise = sample_phase_noise({PhaseNoiseFamily::none, 1.0}, 16, stream);
    CHECK(arma::norm(noise) == 0.0);
  }
  SUBCASE("uniform support is the configured half-width") {
    const arma::vec noise =
        sample_phase_noise({PhaseNoiseFamily::uniform, kPi / 6.0}, 100000, stream);
    CHECK(noise.max() <= kPi / 6.0);
    CHECK(noise.min() >= -kPi / 6.0);
  }
  SUBCASE("uniform mean direction is zero") {
    const arma::vec noise =
        sample_phase_noise({PhaseNoiseFamily::uniform, kPi / 6.0}, 100000, stream);
    std::complex<double> resultant{0, 0};
    for (double t : noise) resultant += std::polar(1.0, t);
    CHECK(std::abs(std::arg(resultant)) < 0.01);
  }
  SUBCASE("von Mises mean direction is zero and support bounded") {
    const arma::vec noise =
        sample_phase_noise({PhaseNoiseFamily::von_mises, 0.3}, 50000, stream);
    std::complex<double> resultant{0, 0};
    for (double t : noise) {
      CHECK(t >= -kPi);
      CHECK(t < kPi);
      resultant += std::polar(1.0, t);
    }
    CHECK(std::abs(std::arg(resultant)) < 0.01);
    // Concentration 1/spread^2: circular std close to the spread for small spreads.
    const double r_bar = std::abs(resultant) / 50000.0;
    CHECK(std::sqrt(-2.0 * std::log(r_bar)) == doctest::Approx(0.3).epsilon(0.05));
  }
  SUBCASE("zero spread collapses every family") {
    CHECK(arma::norm(sample_phase_noise({PhaseNoiseFamily::uniform, 0.0}, 8, stream)) == 0.0);
    CHECK(arma::norm(sample_phase_noise({PhaseNoiseFamily::von_mises, 0.0}, 8, stream)) ==
          0.0);
  }
}

TEST_CASE("effective_channel") {
  RandomStream stream(47);
  SUBCASE("no surface returns the direct channel") {
    ChannelRealization real;
    real.direct = stream.complex_gaussian_vec(4);
    real.bs_lrs = arma::cx_mat(4, 0);
    real.lrs_user = arma::cx_vec();
    real.cascade = arma::cx_mat(4, 0);
    const arma::cx_vec h = effective_channel(real, PhaseConfig::zeros(0), true);
    CHECK(arma::norm(h - real.direct) == 0.0);
  }
  SUBCASE("zero phase noise makes nominal and actual coincide") {
    ChannelRealization real = sample_iid_cascade({3, 4}, 1.0, 1.0, stream);
    real.direct = stream.complex_gaussian_vec(3);
    PhaseConfig phases = PhaseConfig::zeros(4);
    phases.thetas = arma::vec{0.3, 1.2, 2.0, 0.7};
    const arma::cx_vec nominal = effective_channel(real, phases, false);
    const arma::cx_vec actual = effective_channel(real, phases, true);
    CHECK(arma::norm(nominal - actual) < 1e-14);
  }
  SUBCASE("phase rotations never change instantaneous power per element") {
    PhaseConfig phases = PhaseConfig::zeros(3);
    phases.delta_thetas = arma::vec{0.4, -2.9, 1.3};
    const arma::cx_vec actual = phases.actual_phases();
    for (const auto& v : actual) {
      CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
    }
  }
  SUBCASE("aligned phases on a rank-1 cascade add coherently") {
    const std::size_t m = 4, n = 5;
    const arma::cx_vec g = stream.complex_gaussian_vec(m);
    const arma::cx_vec c = stream.complex_gaussian_vec(n);
    const arma::cx_vec r = stream.complex_gaussian_vec(n);
    ChannelRealization real;
    real.direct = arma::cx_vec(m, arma::fill::zeros);
    real.bs_lrs = g * arma::strans(c);
    real.lrs_user = r;
    real.cascade = real.bs_lrs;
    real.cascade.each_row() %= arma::strans(r);
    PhaseConfig phases = PhaseConfig::zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
      phases.thetas(i) = -std::arg(c(i) * r(i));
    }
    const arma::cx_vec h = effective_channel(real, phases, false);
    double column_norm_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      column_norm_sum += arma::norm(arma::cx_vec(real.cascade.col(i)));
    }
    CHECK(arma::norm(h) == doctest::Approx(column_norm_sum).epsilon(1e-10));
  }
  SUBCASE("linear in the direct and user-side channels") {
    ChannelRealization real = sample_iid_cascade({3, 2}, 1.0, 1.0, stream);
    real.direct = stream.complex_gaussian_vec(3);
    PhaseConfig phases = PhaseConfig::zeros(2);
    phases.thetas = arma::vec{0.1, 0.8};
    const arma::cx_vec base = effective_channel(real, phases, false);
    ChannelRealization scaled = real;
    scaled.direct *= 2.0;
    scaled.lrs_user *= 3.0;
    scaled.cascade = scaled.bs_lrs;
    scaled.cascade.each_row() %= arma::strans(scaled.lrs_user);
    const arma::cx_vec combined = effective_channel(scaled, phases, false);
    const arma::cx_vec expected =
        2.0 * real.direct + 3.0 * (base - real.direct);
    CHECK(arma::norm(combined - expected) < 1e-10 * arma::norm(expected));
  }
  SUBCASE("dimension mismatch is rejected") {
    ChannelRealization real = sample_iid_cascade({3, 2}, 1.0, 1.0, stream);
    real.direct = stream.complex_gaussian_vec(3);
    CHECK_THROWS_AS(effective_channel(real, PhaseConfig::zeros(5), false),
                    std::invalid_argument);
  }
}

TEST_CASE("aggregate channel concentration") {
  const RngPolicy policy{555};
  SUBCASE("direct statistic concentrates at sigma_d2") {
    const SystemDims dims{1024, 64};
    std::size_t within = 0;
    const std::size_t reps = 200;
    for (std::size_t t = 0; t < reps; ++t) {
      RandomStream stream = derive_stream(policy, "lln-direct", t);
      const AggregateChannel ch = sample_aggregate_channel(dims, 1.0, 1.0, stream);
      const double stat = arma::accu(arma::square(arma::abs(ch.direct))) / 1024.0;
      if (std::abs(stat - 1.0) < 0.2) ++within;
    }
    CHECK(static_cast<double>(within) / reps >= 0.95);
  }
  SUBCASE("cascade statistic concentrates at sigma_lrs2 under the N^2 normalization") {
    const SystemDims dims{1024, 64};
    std::size_t within = 0;
    const std::size_t reps = 200;
    for (std::size_t t = 0; t < reps; ++t) {
      RandomStream stream = derive_stream(policy, "lln-cascade", t);
      const AggregateChannel ch = sample_aggregate_channel(dims, 1.0, 1.0, stream);
      const double stat =
          arma::accu(arma::square(arma::abs(ch.reflected))) / (1024.0 * 64.0 * 64.0);
      if (std::abs(stat - 1.0) < 0.2) ++within;
    }
    CHECK(static_cast<double>(within) / reps >= 0.95);
  }
  SUBCASE("deviation shrinks with the array size") {
    double dev_small = 0, dev_large = 0;
    const std::size_t reps = 100;
    for (std::size_t t = 0; t < reps; ++t) {
      RandomStream s1 = derive_stream(policy, "lln-small", t);
      RandomStream s2 = derive_stream(policy, "lln-large", t);
      const AggregateChannel small = sample_aggregate_channel({64, 8}, 1.0, 1.0, s1);
      const AggregateChannel large = sample_aggregate_channel({1024, 8}, 1.0, 1.0, s2);
      dev_small +=
          std::abs(arma::accu(arma::square(arma::abs(small.direct))) / 64.0 - 1.0);
      dev_large +=
          std::abs(arma::accu(arma::square(arma::abs(large.direct))) / 1024.0 - 1.0);
    }
    CHECK(dev_large < dev_small);
  }
  SUBCASE("no surface leaves the reflected part empty") {
    RandomStream stream(3);
    const AggregateChannel ch = sample_aggregate_channel({8, 0}, 1.0, 1.0, stream);
    CHECK(ch.reflected.empty());
    CHECK(arma::norm(ch.combined() - ch.direct) == 0.0);
  }
}
