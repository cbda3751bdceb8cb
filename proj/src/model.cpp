// SPDX-License-Identifier: Apache-2.0
#include "ics/model.hpp"

namespace ics {

std::vector<LayerSpec> family_layers(const ArchitectureConfig& arch,
                                     std::size_t classes) {
  return {
      temporal_conv(1, arch.conv1_maps, arch.conv1_kernel),
      relu(),
      temporal_avg_pool(arch.pool1),
      temporal_conv(arch.conv1_maps, arch.conv2_maps, arch.conv2_kernel),
      relu(),
      temporal_avg_pool(arch.pool2),
      depthwise_temporal_conv(arch.conv2_maps, arch.depthwise_kernel),
      relu(),
      pointwise_conv(arch.conv2_maps, arch.pointwise_maps),
      relu(),
      global_avg_pool(),
      dense(arch.pointwise_maps, std::uint16_t(classes)),
  };
}

ModelSpec build_teacher(std::size_t channels, std::size_t timepoints,
                        const ArchitectureConfig& arch) {
  if (channels < 1) throw UsageError("build_teacher: channel count must be >= 1");
  if (timepoints < 32) throw UsageError("build_teacher: timepoints must be >= 32");
  const std::size_t pool_product = std::size_t(arch.pool1) * arch.pool2;
  if (timepoints % pool_product != 0)
    throw UsageError("build_teacher: timepoints " + std::to_string(timepoints) +
                     " not divisible by pooling product " + std::to_string(pool_product));

  ModelSpec spec;
  spec.input_channels = channels;
  spec.input_timepoints = timepoints;
  spec.layers = family_layers(arch, spec.classes);
  return spec;
}

ModelSpec build_student(const ModelSpec& teacher, std::size_t n_selected) {
  if (n_selected < 1 || n_selected > teacher.input_channels)
    throw UsageError("build_student: selected channel count " +
                     std::to_string(n_selected) + " out of range [1, " +
                     std::to_string(teacher.input_channels) + "]");
  ModelSpec student = teacher;
  student.input_channels = n_selected;
  return student;
}

Network make_network(const ModelSpec& spec, std::uint64_t seed) {
  Network net;
  net.layers = spec.layers;
  net.input_channels = spec.input_channels;
  net.input_timepoints = spec.input_timepoints;
  Rng rng(seed);
  init_params(net, rng);
  validate_network(net);
  return net;
}

std::size_t parameter_count(const ModelSpec& spec) {
  std::size_t n = 0;
  for (const LayerSpec& l : spec.layers)
    for (const auto& shape : param_shapes(l)) n += numel(shape);
  return n;
}

}  // namespace ics
