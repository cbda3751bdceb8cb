// SPDX-License-Identifier: Apache-2.0
#include "ics/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ics/io_util.hpp"

namespace ics {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

std::vector<double> softmax(std::span<const double> z) {
  if (z.size() < 2) throw UsageError("softmax: needs at least 2 entries");
  double zmax = z[0];
  for (double v : z) {
    if (!std::isfinite(v)) throw UsageError("softmax: non-finite input entry");
    zmax = std::max(zmax, v);
  }
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - zmax);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> softmax(std::span<const float> z) {
  std::vector<double> zd(z.begin(), z.end());
  return softmax(std::span<const double>(zd));
}

namespace {

constexpr char kModelMagic[4] = {'I', 'C', 'S', 'M'};
constexpr std::uint16_t kModelVersion = 1;

}  // namespace

void save_model(const Network& net, std::ostream& out) {
  out.write(kModelMagic, 4);
  io::write_u16(out, kModelVersion);
  io::write_u16(out, std::uint16_t(net.layers.size()));
  for (const LayerSpec& l : net.layers) {
    io::write_u8(out, std::uint8_t(l.kind));
    io::write_u16(out, l.kernel_len);
    io::write_u16(out, l.maps_in);
    io::write_u16(out, l.maps_out);
    io::write_u16(out, l.pool_width);
  }
  for (const auto& layer_params : net.params)
    for (const Tensor& p : layer_params)
      out.write(reinterpret_cast<const char*>(p.data()),
                std::streamsize(p.size() * sizeof(float)));
  if (!out) throw DataError("save_model: write failed");
}

void save_model(const Network& net, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("save_model: cannot open " + path);
  save_model(net, f);
}

Network load_model(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kModelMagic, 4) != 0)
    throw DataError("load_model: bad magic at offset 0, expected \"ICSM\"");
  const std::uint16_t version = io::read_u16(in, "load_model", "version");
  if (version != kModelVersion)
    throw DataError("load_model: unsupported version " + std::to_string(version));
  const std::uint16_t n_layers = io::read_u16(in, "load_model", "layer count");

  Network net;
  net.layers.reserve(n_layers);
  for (std::uint16_t i = 0; i < n_layers; ++i) {
    LayerSpec l;
    const std::uint8_t kind = io::read_u8(in, "load_model", "layer kind");
    if (kind > std::uint8_t(LayerKind::Dense))
      throw DataError("load_model: unknown layer kind " + std::to_string(kind) +
                      " in layer " + std::to_string(i));
    l.kind = LayerKind(kind);
    l.kernel_len = io::read_u16(in, "load_model", "kernel length");
    l.maps_in = io::read_u16(in, "load_model", "maps in");
    l.maps_out = io::read_u16(in, "load_model", "maps out");
    l.pool_width = io::read_u16(in, "load_model", "pool width");
    net.layers.push_back(l);
  }
  net.params.resize(n_layers);
  for (std::uint16_t i = 0; i < n_layers; ++i) {
    for (const auto& shape : param_shapes(net.layers[i])) {
      Tensor p = Tensor::zeros(shape);
      in.read(reinterpret_cast<char*>(p.data()),
              std::streamsize(p.size() * sizeof(float)));
      if (!in)
        throw DataError("load_model: truncated parameter payload in layer " +
                        std::to_string(i) + " (expected " +
                        std::to_string(p.size() * sizeof(float)) + " bytes)");
      net.params[i].push_back(std::move(p));
    }
  }
  validate_network(net);
  return net;
}

Network load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("load_model: cannot open " + path);
  return load_model(f);
}

std::uint64_t model_checksum(const Network& net) {
  std::ostringstream buf(std::ios::binary);
  save_model(net, buf);
  const std::string bytes = buf.str();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace ics
