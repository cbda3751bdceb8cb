// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "ics/layers.hpp"
#include "ics/network.hpp"

namespace ics {

// Hyperparameters of the compact CNN family shared by teacher and student.
struct ArchitectureConfig {
  std::uint16_t conv1_maps = 16;
  std::uint16_t conv1_kernel = 16;
  std::uint16_t pool1 = 2;
  std::uint16_t conv2_maps = 32;
  std::uint16_t conv2_kernel = 8;
  std::uint16_t pool2 = 2;
  std::uint16_t depthwise_kernel = 4;
  std::uint16_t pointwise_maps = 32;

  bool operator==(const ArchitectureConfig&) const = default;
};

struct ModelSpec {
  std::size_t input_channels = 0;
  std::size_t input_timepoints = 0;
  std::size_t classes = 2;
  std::vector<LayerSpec> layers;

  bool operator==(const ModelSpec&) const = default;
};

// The layer sequence of the family for a given architecture config.
std::vector<LayerSpec> family_layers(const ArchitectureConfig& arch,
                                     std::size_t classes = 2);

// Full-channel first-stage architecture. Requires C >= 1, T >= 32 and T
// divisible by the pooling product.
ModelSpec build_teacher(std::size_t channels, std::size_t timepoints,
                        const ArchitectureConfig& arch = {});

// Same layer family with the input restricted to the selected channel
// count; parameters are fresh. Requires 1 <= n <= teacher channels.
ModelSpec build_student(const ModelSpec& teacher, std::size_t n_selected);

// Seeded construction of an initialized network from a spec.
Network make_network(const ModelSpec& spec, std::uint64_t seed);

// Total learned parameter count of a spec (kernel shapes are channel-free,
// so teacher and student counts match).
std::size_t parameter_count(const ModelSpec& spec);

}  // namespace ics
