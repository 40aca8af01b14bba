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

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lrsim {

/// Running mean/variance over scalar trial outcomes.
struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }

  void merge(const MeanAccumulator& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    count += other.count;
  }

  double mean() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }

  double sample_variance() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double var = (sum_sq - sum * sum / n) / (n - 1.0);
    return var > 0.0 ? var : 0.0;
  }

  double std_error() const {
    return count > 0 ? std::sqrt(sample_variance() / static_cast<double>(count)) : 0.0;
  }
};

/// Trials are grouped into fixed blocks; each block accumulates its own
/// trials in index order, and blocks merge in index order after all workers
/// finish. The reduction tree therefore does not depend on the thread count,
/// which keeps double-precision results bit-identical in parallel runs.
inline constexpr std::uint64_t kTrialBlockSize = 512;

/// Runs trials 0..count-1, each producing K statistics, on `threads` workers
/// (0 = hardware concurrency). TrialFn: (std::uint64_t trial) -> std::array<double, K>.
template <std::size_t K, typename TrialFn>
std::array<MeanAccumulator, K> run_trials(std::uint64_t count, unsigned threads,
                                          TrialFn&& fn) {
  std::array<MeanAccumulator, K> total{};
  if (count == 0) return total;

  const std::uint64_t n_blocks = (count + kTrialBlockSize - 1) / kTrialBlockSize;
  std::vector<std::array<MeanAccumulator, K>> blocks(n_blocks);

  unsigned n_threads = threads > 0 ? threads : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  if (n_threads > n_blocks) n_threads = static_cast<unsigned>(n_blocks);

  std::atomic<std::uint64_t> next_block{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::uint64_t b = next_block.fetch_add(1);
      if (b >= n_blocks) return;
      const std::uint64_t begin = b * kTrialBlockSize;
      const std::uint64_t end = std::min(count, begin + kTrialBlockSize);
      try {
        for (std::uint64_t trial = begin; trial < end; ++trial) {
          const std::array<double, K> values = fn(trial);
          for (std::size_t k = 0; k < K; ++k) {
            blocks[b][k].add(values[k]);
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (const auto& block : blocks) {
    for (std::size_t k = 0; k < K; ++k) {
      total[k].merge(block[k]);
    }
  }
  return total;
}

} // namespace lrsim
