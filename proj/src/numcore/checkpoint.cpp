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

#include "ed2/numcore/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ed2::numcore {

namespace {

constexpr const char* kMagic = "ed2-checkpoint v1";

void put_le(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

double get_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("checkpoint: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_checkpoint(std::ostream& out, const std::vector<NamedArray>& arrays) {
  out << kMagic << '\n' << "arrays " << arrays.size() << '\n';
  for (const auto& a : arrays) {
    if (a.name.empty() || a.name.find_first_of(" \t\n") != std::string::npos) {
      throw std::invalid_argument("checkpoint: invalid array name '" + a.name + "'");
    }
    out << a.name << ' ' << a.tensor.rank();
    for (std::size_t d : a.tensor.shape()) out << ' ' << d;
    out << '\n';
  }
  out << "end\n";
  for (const auto& a : arrays)
    for (double v : a.tensor.values()) put_le(out, v);
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

std::vector<NamedArray> read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw std::runtime_error("checkpoint: bad magic line");
  if (!std::getline(in, line)) throw std::runtime_error("checkpoint: missing array count");
  std::istringstream count_line(line);
  std::string word;
  std::size_t count = 0;
  if (!(count_line >> word >> count) || word != "arrays") throw std::runtime_error("checkpoint: bad array count line");

  std::vector<std::pair<std::string, Shape>> header;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated header");
    std::istringstream ls(line);
    std::string name;
    std::size_t rank = 0;
    if (!(ls >> name >> rank)) throw std::runtime_error("checkpoint: bad header line '" + line + "'");
    Shape shape(rank);
    for (auto& d : shape)
      if (!(ls >> d)) throw std::runtime_error("checkpoint: bad shape for '" + name + "'");
    header.emplace_back(std::move(name), std::move(shape));
  }
  if (!std::getline(in, line) || line != "end") throw std::runtime_error("checkpoint: missing end marker");

  std::vector<NamedArray> arrays;
  for (auto& [name, shape] : header) {
    std::vector<double> values(shape_size(shape));
    for (double& v : values) v = get_le(in);
    arrays.push_back({name, Tensor(shape, std::move(values))});
  }
  return arrays;
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedArray>& arrays) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string());
  write_checkpoint(out, arrays);
}

std::vector<NamedArray> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  return read_checkpoint(in);
}

void append_mlp(std::vector<NamedArray>& arrays, const std::string& prefix, const MlpParams& params) {
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const std::string base = prefix + "." + std::to_string(l);
    arrays.push_back({base + ".weight", params.layers[l].weight});
    arrays.push_back({base + ".bias", params.layers[l].bias});
  }
}

void restore_mlp(const std::vector<NamedArray>& arrays, const std::string& prefix, MlpParams& params) {
  std::map<std::string, const Tensor*> by_name;
  for (const auto& a : arrays) by_name[a.name] = &a.tensor;
  auto fetch = [&](const std::string& name, Tensor& dst) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw std::runtime_error("checkpoint: missing array '" + name + "'");
    require_same_shape(dst, *it->second, name.c_str());
    std::copy(it->second->values().begin(), it->second->values().end(), dst.values().begin());
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const std::string base = prefix + "." + std::to_string(l);
    fetch(base + ".weight", params.layers[l].weight);
    fetch(base + ".bias", params.layers[l].bias);
  }
}

}  // namespace ed2::numcore
