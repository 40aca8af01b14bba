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

#include "lrsim/rng.hpp"

#include <cmath>

namespace lrsim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

} // namespace

double RandomStream::gaussian() {
  const double u1 = 1.0 - uniform01(); // (0, 1], keeps the log finite
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::complex<double> RandomStream::complex_gaussian() {
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-std::log(u1));
  return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

arma::cx_vec RandomStream::complex_gaussian_vec(std::size_t n) {
  arma::cx_vec v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v(i) = complex_gaussian();
  }
  return v;
}

std::uint64_t derive_stream_seed(const RngPolicy& policy,
                                 std::string_view purpose_tag,
                                 std::uint64_t trial_index) {
  const std::uint64_t base = splitmix64(policy.master_seed ^ fnv1a64(purpose_tag));
  return splitmix64(base + trial_index * 0x9e3779b97f4a7c15ull);
}

RandomStream derive_stream(const RngPolicy& policy, std::string_view purpose_tag,
                           std::uint64_t trial_index) {
  return RandomStream(derive_stream_seed(policy, purpose_tag, trial_index));
}

} // namespace lrsim
