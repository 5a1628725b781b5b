// Copyright (c) 2026 AutoShot Authors. All Rights Reserved.
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

#include "autoshot/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace autoshot {

namespace {

constexpr std::array<char, 4> kMagic{'A', 'S', 'C', 'P'};

template <typename U>
void put_le(std::ostream& out, U v) {
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, sizeof(U));
}

template <typename U>
U get_le(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw std::runtime_error("checkpoint: truncated file");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

void write_header(std::ostream& out, const nlohmann::json& header) {
  const std::string text = header.dump();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

nlohmann::json read_header(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("checkpoint: bad magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  const auto len = get_le<std::uint32_t>(in);
  std::string text(len, '\0');
  if (!in.read(text.data(), len)) throw std::runtime_error("checkpoint: truncated header");
  return nlohmann::json::parse(text);
}

void write_tensors(std::ostream& out, const std::vector<NamedTensor>& tensors) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.tensor->rank()));
    for (std::size_t d : t.tensor->shape()) put_le<std::uint64_t>(out, d);
    for (double v : t.tensor->data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void read_tensors(std::istream& in, const std::vector<NamedTensor>& tensors) {
  const auto count = get_le<std::uint32_t>(in);
  if (count != tensors.size()) {
    throw std::runtime_error("checkpoint: expected " + std::to_string(tensors.size()) + " tensors, file has " + std::to_string(count));
  }
  for (const auto& t : tensors) {
    const auto name_len = get_le<std::uint32_t>(in);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw std::runtime_error("checkpoint: truncated tensor name");
    if (name != t.name) throw std::runtime_error("checkpoint: expected tensor '" + t.name + "', found '" + name + "'");
    const auto rank = get_le<std::uint32_t>(in);
    nn::Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(get_le<std::uint64_t>(in));
    if (shape != t.tensor->shape()) {
      throw std::runtime_error("checkpoint: tensor '" + name + "' has shape " + nn::shape_to_string(shape) + ", expected " +
                               nn::shape_to_string(t.tensor->shape()));
    }
    for (double& v : t.tensor->data()) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  }
}

std::vector<NamedTensor> all_tensors(std::vector<NamedTensor> params, const std::vector<NamedTensor>& buffers) {
  params.insert(params.end(), buffers.begin(), buffers.end());
  return params;
}

template <typename Fn>
void with_output(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  fn(out);
}

template <typename Fn>
auto with_input(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  try {
    return fn(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace

void save_model(std::ostream& out, Model& model) {
  write_header(out, {{"kind", "model"}, {"arch", arch::to_json(model.arch)}, {"network", to_json(model.config)}});
  write_tensors(out, all_tensors(model.parameters(), model.buffers()));
}

Model load_model(std::istream& in) {
  const auto header = read_header(in);
  if (header.value("kind", "") != "model") throw std::runtime_error("checkpoint: not a model checkpoint");
  Model model = build_network(arch::arch_from_json(header.at("arch")), network_config_from_json(header.at("network")), 0);
  read_tensors(in, all_tensors(model.parameters(), model.buffers()));
  return model;
}

void save_supernet(std::ostream& out, SuperNet& net) {
  write_header(out, {{"kind", "supernet"}, {"network", to_json(net.config)}});
  write_tensors(out, all_tensors(net.parameters(), net.buffers()));
}

SuperNet load_supernet(std::istream& in) {
  const auto header = read_header(in);
  if (header.value("kind", "") != "supernet") throw std::runtime_error("checkpoint: not a supernet checkpoint");
  SuperNet net = build_supernet(network_config_from_json(header.at("network")), 0);
  read_tensors(in, all_tensors(net.parameters(), net.buffers()));
  return net;
}

void save_model_file(const std::filesystem::path& path, Model& model) {
  with_output(path, [&](std::ostream& out) { save_model(out, model); });
}

Model load_model_file(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return load_model(in); });
}

void save_supernet_file(const std::filesystem::path& path, SuperNet& net) {
  with_output(path, [&](std::ostream& out) { save_supernet(out, net); });
}

SuperNet load_supernet_file(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return load_supernet(in); });
}

nlohmann::json read_checkpoint_header(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return read_header(in); });
}

}  // namespace autoshot
