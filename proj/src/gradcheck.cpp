// SPDX-License-Identifier: Apache-2.0
#include "ics/gradcheck.hpp"

#include <cmath>

namespace ics {

GradCheckReport gradient_check(const ModelSpec& spec, const TensorT<double>& batch,
                               std::span<const std::uint8_t> labels,
                               std::uint64_t seed, double step) {
  NetworkT<double> net;
  net.layers = spec.layers;
  net.input_channels = spec.input_channels;
  net.input_timepoints = spec.input_timepoints;
  Rng rng(seed);
  init_params(net, rng);
  validate_network(net);

  const auto fwd = forward(net, batch);
  const auto bwd = backward(net, batch, fwd, labels);

  GradCheckReport report;
  report.step = step;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    for (std::size_t p = 0; p < net.params[i].size(); ++p) {
      GradCheckEntry entry;
      entry.layer_index = i;
      entry.label = detail::layer_label(i, net.layers[i]) +
                    (p == 0 ? " weights" : " bias");
      entry.n_entries = net.params[i][p].size();
      for (std::size_t k = 0; k < entry.n_entries; ++k) {
        double& theta = net.params[i][p].values[k];
        const double saved = theta;
        theta = saved + step;
        const double lp = mean_ce_loss(net, batch, labels);
        theta = saved - step;
        const double lm = mean_ce_loss(net, batch, labels);
        theta = saved;
        const double numeric = (lp - lm) / (2.0 * step);
        const double analytic = bwd.grads[i][p].values[k];
        const double diff = std::abs(analytic - numeric);
        const double denom = std::max(std::abs(analytic), std::abs(numeric));
        if (denom > report.small_floor)
          entry.max_rel_error = std::max(entry.max_rel_error, diff / denom);
        else
          entry.max_small_abs_error = std::max(entry.max_small_abs_error, diff);
      }
      report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
      report.max_small_abs_error =
          std::max(report.max_small_abs_error, entry.max_small_abs_error);
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

GradCheckReport gradient_check(const ModelSpec& spec, std::uint64_t seed, double step) {
  Rng rng(seed ^ 0xd1b54a32d192ed03ull);
  const std::size_t B = 2;
  TensorT<double> batch =
      TensorT<double>::zeros({B, 1, spec.input_channels, spec.input_timepoints});
  for (auto& v : batch.values) v = rng.normal();
  std::vector<std::uint8_t> labels(B);
  for (auto& l : labels) l = std::uint8_t(rng.index(spec.classes));
  return gradient_check(spec, batch, labels, seed, step);
}

ModelSpec random_check_spec(Rng& rng) {
  ArchitectureConfig arch;
  arch.conv1_maps = std::uint16_t(2 + rng.index(3));
  arch.conv1_kernel = std::uint16_t(2 + rng.index(5));
  arch.pool1 = std::uint16_t(1 + rng.index(2));
  arch.conv2_maps = std::uint16_t(2 + rng.index(3));
  arch.conv2_kernel = std::uint16_t(1 + rng.index(4));
  arch.pool2 = std::uint16_t(1 + rng.index(2));
  arch.depthwise_kernel = std::uint16_t(1 + rng.index(4));
  arch.pointwise_maps = std::uint16_t(2 + rng.index(3));
  const std::size_t pool_product = std::size_t(arch.pool1) * arch.pool2;
  ModelSpec spec;
  spec.input_channels = 1 + rng.index(4);
  spec.input_timepoints = pool_product * (6 + rng.index(6));
  spec.layers = family_layers(arch, spec.classes);
  return spec;
}

}  // namespace ics
