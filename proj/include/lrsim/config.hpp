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

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "lrsim/rng.hpp"

namespace lrsim {

/// Array geometry: M base-station antennas, N reflecting elements.
/// N = 0 degenerates to a plain multi-antenna link with no surface.
struct SystemDims {
  std::size_t bs_antennas = 1;  // M
  std::size_t lrs_elements = 0; // N
};

enum class PhaseNoiseFamily { none, uniform, von_mises };

/// Circular distribution of the per-element phase error. Symmetric about
/// zero with mean direction zero. `spread` is the half-width in radians for
/// the uniform family; for von Mises the concentration is 1/spread^2.
struct PhaseNoiseSpec {
  PhaseNoiseFamily family = PhaseNoiseFamily::none;
  double spread = 0.0;
};

/// Transceiver impairment levels. kappa_* relate distortion power to signal
/// power (sqrt(kappa) is the EVM); noise_power is the thermal noise variance
/// per BS antenna.
struct ImpairmentParams {
  double kappa_ue = 0.0;
  double kappa_bs = 0.0;
  double noise_power = 1.0; // sigma^2_BS
  PhaseNoiseSpec phase_noise;
};

/// Deterministic pilot. The data phase reuses the same transmit power.
struct SignalParams {
  double pilot_power = 1.0;
  std::complex<double> pilot_symbol{1.0, 0.0};

  /// Pilot fixed to x = sqrt(p), real and positive. Every estimator output
  /// depends on x only through |x|^2 and x*, so the phase convention is
  /// immaterial.
  static SignalParams from_power(double p);
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string joined() const;
};

/// Report-style validation: returns the full list of violations and never
/// throws, whatever the inputs.
ValidationReport validate_config(const SystemDims& dims, const ImpairmentParams& imp,
                                 const SignalParams& sig);

/// Everything an experiment needs, bundled for file/CLI round trips.
struct SimConfig {
  SystemDims dims{20, 100};
  ImpairmentParams impairments{0.0, 0.0, 1.0, {}};
  SignalParams signal = SignalParams::from_power(1.0);
  RngPolicy rng{0};
  std::uint64_t trials = 10000;
};

ValidationReport validate_config(const SimConfig& cfg);

/// Flat key/value text, one `key = value` per line, `#` comments. Keys:
/// m, n, kappa_ue, kappa_bs, noise_power, pilot_power, phase_noise_family,
/// phase_noise_spread, seed, trials. Unknown keys or unparsable values throw
/// std::invalid_argument.
SimConfig parse_config_text(const std::string& text);
SimConfig load_config_file(const std::string& path);
std::string to_config_text(const SimConfig& cfg);

const char* to_string(PhaseNoiseFamily family);
PhaseNoiseFamily phase_noise_family_from_string(const std::string& name);

} // namespace lrsim
