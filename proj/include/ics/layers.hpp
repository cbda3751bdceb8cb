// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ics/error.hpp"

namespace ics {

// Layer vocabulary of the compact CNN family. Convolutions act along the
// time axis only; the spatial channel axis passes through untouched until
// global average pooling.
enum class LayerKind : std::uint8_t {
  TemporalConv = 0,
  DepthwiseTemporalConv = 1,
  PointwiseConv = 2,
  Relu = 3,
  TemporalAvgPool = 4,
  GlobalAvgPool = 5,
  Dense = 6,
};

inline const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::TemporalConv: return "TemporalConv";
    case LayerKind::DepthwiseTemporalConv: return "DepthwiseTemporalConv";
    case LayerKind::PointwiseConv: return "PointwiseConv";
    case LayerKind::Relu: return "Relu";
    case LayerKind::TemporalAvgPool: return "TemporalAvgPool";
    case LayerKind::GlobalAvgPool: return "GlobalAvgPool";
    case LayerKind::Dense: return "Dense";
  }
  return "Unknown";
}

struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  std::uint16_t kernel_len = 0;  // time extent of the kernel; 1 for pointwise
  std::uint16_t maps_in = 0;     // feature maps in (Dense: input features)
  std::uint16_t maps_out = 0;    // feature maps out (Dense: outputs)
  std::uint16_t pool_width = 0;  // TemporalAvgPool only

  bool operator==(const LayerSpec&) const = default;
};

inline LayerSpec temporal_conv(std::uint16_t maps_in, std::uint16_t maps_out,
                               std::uint16_t kernel_len) {
  return {LayerKind::TemporalConv, kernel_len, maps_in, maps_out, 0};
}

inline LayerSpec depthwise_temporal_conv(std::uint16_t maps, std::uint16_t kernel_len) {
  return {LayerKind::DepthwiseTemporalConv, kernel_len, maps, maps, 0};
}

inline LayerSpec pointwise_conv(std::uint16_t maps_in, std::uint16_t maps_out) {
  return {LayerKind::PointwiseConv, 1, maps_in, maps_out, 0};
}

inline LayerSpec relu() { return {LayerKind::Relu, 0, 0, 0, 0}; }

inline LayerSpec temporal_avg_pool(std::uint16_t width) {
  return {LayerKind::TemporalAvgPool, 0, 0, 0, width};
}

inline LayerSpec global_avg_pool() { return {LayerKind::GlobalAvgPool, 0, 0, 0, 0}; }

inline LayerSpec dense(std::uint16_t in_features, std::uint16_t out_features) {
  return {LayerKind::Dense, 0, in_features, out_features, 0};
}

// Shapes of the parameter tensors a layer owns, in declaration order
// (weights, then bias). Parameter-free layers return an empty list.
inline std::vector<std::vector<std::size_t>> param_shapes(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::TemporalConv:
      return {{l.maps_out, l.maps_in, l.kernel_len}, {l.maps_out}};
    case LayerKind::DepthwiseTemporalConv:
      return {{l.maps_out, l.kernel_len}, {l.maps_out}};
    case LayerKind::PointwiseConv:
      return {{l.maps_out, l.maps_in}, {l.maps_out}};
    case LayerKind::Dense:
      return {{l.maps_out, l.maps_in}, {l.maps_out}};
    default:
      return {};
  }
}

// Fan-in used for the uniform initialization scale.
inline std::size_t fan_in(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::TemporalConv: return std::size_t(l.maps_in) * l.kernel_len;
    case LayerKind::DepthwiseTemporalConv: return l.kernel_len;
    case LayerKind::PointwiseConv: return l.maps_in;
    case LayerKind::Dense: return l.maps_in;
    default: return 0;
  }
}

}  // namespace ics
