// Copyright 2026 The ed2lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ed2::envs {

/// Streaming per-coordinate mean and sample variance (Welford's update).
class RunningNormalizer {
 public:
  static constexpr double kStdFloor = 1e-8;

  explicit RunningNormalizer(std::size_t dim = 1);

  std::size_t dim() const { return mean_.size(); }
  std::size_t count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }
  /// Sample standard deviation (n - 1 denominator); 0 until two samples.
  double stddev(std::size_t i) const;

  void update(std::span<const double> x);
  /// (x - mean) / max(std, kStdFloor)
  std::vector<double> apply(std::span<const double> x) const;

 private:
  void check_dim(std::size_t n) const;

  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

inline void normalizer_update(RunningNormalizer& n, std::span<const double> x) { n.update(x); }
inline std::vector<double> normalizer_apply(const RunningNormalizer& n, std::span<const double> x) {
  return n.apply(x);
}

}  // namespace ed2::envs
