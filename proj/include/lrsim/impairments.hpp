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

#include <cstddef>
#include <vector>

#include "lrsim/config.hpp"
#include "lrsim/covariance.hpp"
#include "lrsim/rng.hpp"

namespace lrsim {

/// Which slot of the communication protocol a distortion covariance refers
/// to: the direct-channel pilot subphase, the pilot subphase where element i
/// reflects (1-based, 1 <= i <= N), or the uplink data phase.
class PilotPhase {
 public:
  enum class Kind { pilot_direct, pilot_lrs, uplink_data };

  static PilotPhase pilot_direct() { return PilotPhase(Kind::pilot_direct, 0); }
  static PilotPhase pilot_lrs(std::size_t element_index) {
    return PilotPhase(Kind::pilot_lrs, element_index);
  }
  static PilotPhase uplink_data() { return PilotPhase(Kind::uplink_data, 0); }

  Kind kind() const { return kind_; }
  std::size_t element() const { return element_; }

 private:
  PilotPhase(Kind kind, std::size_t element) : kind_(kind), element_(element) {}
  Kind kind_;
  std::size_t element_;
};

/// v_UE = kappa_ue * p: transmit distortion power is proportional to the
/// transmit power.
double ue_distortion_variance(double p, double kappa_ue);

/// BS distortion covariance for the given protocol phase. All three cases
/// share the prefactor kappa_bs * p * (1 + kappa_ue) and differ in which
/// channel covariances feed the diag(.):
///   pilot_direct : diag(C_d)
///   pilot_lrs(i) : diag(C_d + C_i)
///   uplink_data  : diag(C_d + sum_i C_i)
CovarianceMatrix bs_distortion_cov(const PilotPhase& phase, double p,
                                   const ImpairmentParams& imp,
                                   const CovarianceMatrix& c_d,
                                   const std::vector<CovarianceMatrix>& c_elems);

/// Distortion covariance of the subtracted per-element pilot signal:
/// kappa_bs * p * (1 + kappa_ue) * diag(2*C_d + C_i). The direct-channel
/// contribution appears twice because subtraction superposes the distortion
/// of both subphases.
CovarianceMatrix separated_signal_distortion_cov(double p, const ImpairmentParams& imp,
                                                 const CovarianceMatrix& c_d,
                                                 const CovarianceMatrix& c_i);

/// Error vector magnitude: sqrt(kappa).
double evm(double kappa);

/// Zero-mean complex Gaussian draw with the given covariance.
arma::cx_vec sample_distortion(const CovarianceMatrix& cov, RandomStream& stream);

} // namespace lrsim
