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
#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace lrsim {

/// Seeding policy shared by every randomized operation in the library.
///
/// All draws come from streams derived per (purpose_tag, trial_index), so the
/// same triple always reproduces the same values no matter how many worker
/// threads are running or in which order trials complete.
struct RngPolicy {
  std::uint64_t master_seed = 0;
};

/// One independent random stream. Gaussian draws use Box-Muller on the raw
/// 64-bit output, so a given seed produces the same sequence on every
/// platform (mt19937_64 output is fixed by the standard).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard real Gaussian N(0, 1).
  double gaussian();

  /// Circularly symmetric complex Gaussian CN(0, 1), i.e. variance 1/2 per
  /// real component.
  std::complex<double> complex_gaussian();

  arma::cx_vec complex_gaussian_vec(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Counter-based stream id: hash(master_seed, purpose_tag, trial_index).
std::uint64_t derive_stream_seed(const RngPolicy& policy,
                                 std::string_view purpose_tag,
                                 std::uint64_t trial_index);

RandomStream derive_stream(const RngPolicy& policy, std::string_view purpose_tag,
                           std::uint64_t trial_index);

} // namespace lrsim
