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

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "ed2/numcore/mlp.hpp"
#include "ed2/numcore/tensor.hpp"

namespace ed2::numcore {

struct NamedArray {
  std::string name;
  Tensor tensor;
};

/// Parameter checkpoint layout:
///
///   ed2-checkpoint v1
///   arrays <n>
///   <name> <rank> <dim0> <dim1> ...      (n lines, in storage order)
///   end
///   <raw little-endian float64 payload, arrays concatenated in header order>
///
/// Names must not contain whitespace.
void write_checkpoint(std::ostream& out, const std::vector<NamedArray>& arrays);
std::vector<NamedArray> read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedArray>& arrays);
std::vector<NamedArray> load_checkpoint(const std::filesystem::path& path);

/// Names layers as <prefix>.<layer>.weight / <prefix>.<layer>.bias.
void append_mlp(std::vector<NamedArray>& arrays, const std::string& prefix, const MlpParams& params);
/// Restores values into an already-shaped network; shapes must agree.
void restore_mlp(const std::vector<NamedArray>& arrays, const std::string& prefix, MlpParams& params);

}  // namespace ed2::numcore
