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

#include "lrsim/impairments.hpp"

#include <cmath>
#include <stdexcept>

namespace lrsim {

double ue_distortion_variance(double p, double kappa_ue) {
  if (!(p >= 0.0)) throw std::invalid_argument("ue_distortion_variance: p >= 0 required");
  return kappa_ue * p;
}

CovarianceMatrix bs_distortion_cov(const PilotPhase& phase, double p,
                                   const ImpairmentParams& imp,
                                   const CovarianceMatrix& c_d,
                                   const std::vector<CovarianceMatrix>& c_elems) {
  if (!(p >= 0.0)) throw std::invalid_argument("bs_distortion_cov: p >= 0 required");
  const double factor = imp.kappa_bs * p * (1.0 + imp.kappa_ue);

  arma::cx_vec diagonal = c_d.entries().diag();
  switch (phase.kind()) {
    case PilotPhase::Kind::pilot_direct:
      break;
    case PilotPhase::Kind::pilot_lrs: {
      const std::size_t i = phase.element();
      if (i < 1 || i > c_elems.size()) {
        throw std::out_of_range("bs_distortion_cov: pilot-lrs element index out of range");
      }
      diagonal += c_elems[i - 1].entries().diag();
      break;
    }
    case PilotPhase::Kind::uplink_data:
      for (const auto& c_i : c_elems) {
        diagonal += c_i.entries().diag();
      }
      break;
  }
  arma::cx_mat entries(c_d.dim(), c_d.dim(), arma::fill::zeros);
  const arma::vec scaled = factor * arma::real(diagonal);
  entries.diag() = arma::conv_to<arma::cx_vec>::from(scaled);
  return CovarianceMatrix::from_entries(std::move(entries));
}

CovarianceMatrix separated_signal_distortion_cov(double p, const ImpairmentParams& imp,
                                                 const CovarianceMatrix& c_d,
                                                 const CovarianceMatrix& c_i) {
  if (!(p >= 0.0)) {
    throw std::invalid_argument("separated_signal_distortion_cov: p >= 0 required");
  }
  const double factor = imp.kappa_bs * p * (1.0 + imp.kappa_ue);
  arma::vec diagonal =
      arma::real(2.0 * c_d.entries().diag() + c_i.entries().diag());
  arma::cx_mat entries(c_d.dim(), c_d.dim(), arma::fill::zeros);
  entries.diag() = arma::conv_to<arma::cx_vec>::from(factor * diagonal);
  return CovarianceMatrix::from_entries(std::move(entries));
}

double evm(double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("evm: kappa >= 0 required");
  return std::sqrt(kappa);
}

arma::cx_vec sample_distortion(const CovarianceMatrix& cov, RandomStream& stream) {
  return cov.factor() * stream.complex_gaussian_vec(cov.dim());
}

} // namespace lrsim
