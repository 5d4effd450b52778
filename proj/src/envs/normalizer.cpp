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

#include "ed2/envs/normalizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ed2/envs/env.hpp"

namespace ed2::envs {

RunningNormalizer::RunningNormalizer(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

void RunningNormalizer::check_dim(std::size_t n) const {
  if (n != mean_.size()) {
    throw EnvError("normalizer: expected " + std::to_string(mean_.size()) + " coordinates, got " + std::to_string(n));
  }
}

double RunningNormalizer::stddev(std::size_t i) const {
  if (count_ < 2) return 0.0;
  return std::sqrt(std::max(m2_[i], 0.0) / static_cast<double>(count_ - 1));
}

void RunningNormalizer::update(std::span<const double> x) {
  check_dim(x.size());
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = x[i] - mean_[i];
    mean_[i] += delta / n;
    m2_[i] += delta * (x[i] - mean_[i]);
  }
}

std::vector<double> RunningNormalizer::apply(std::span<const double> x) const {
  check_dim(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean_[i]) / std::max(stddev(i), kStdFloor);
  return out;
}

}  // namespace ed2::envs
