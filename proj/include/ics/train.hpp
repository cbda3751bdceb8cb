// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "ics/dataset.hpp"
#include "ics/model.hpp"
#include "ics/network.hpp"

namespace ics {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 5;
  std::size_t batch_size = 50;
  std::uint64_t seed = 42;
};

struct TrainResult {
  Network net;
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

// Mini-batch training, fully determined by (spec, data, config): seeded
// initialization and a seeded shuffle order. Rejects datasets that are
// empty or single-class.
TrainResult train(const ModelSpec& spec, const EegDataset& data, const TrainConfig& cfg);

// Batch of dataset samples shaped (B, 1, C, T) for the given indices; pass
// an empty index list for all samples in order.
Tensor make_batch(const EegDataset& data, std::span<const std::size_t> indices);

// Argmax class predictions, evaluated in fixed index order.
std::vector<std::uint8_t> predict(const Network& net, const EegDataset& data,
                                  std::size_t eval_batch = 256);

// Per-sample probability rows (n x classes), evaluated in fixed index order.
std::vector<std::vector<double>> predict_probabilities(const Network& net,
                                                       const EegDataset& data,
                                                       std::size_t eval_batch = 256);

namespace detail {
// Number of train() invocations in this process; test instrumentation.
std::uint64_t train_invocations();
}  // namespace detail

}  // namespace ics
