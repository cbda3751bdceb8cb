// SPDX-License-Identifier: Apache-2.0
#include "ics/train.hpp"

#include <atomic>
#include <cmath>

#include "ics/optimizer.hpp"

namespace ics {

namespace {
std::atomic<std::uint64_t> g_train_calls{0};
}

namespace detail {
std::uint64_t train_invocations() { return g_train_calls.load(); }
}  // namespace detail

Tensor make_batch(const EegDataset& data, std::span<const std::size_t> indices) {
  const std::size_t stride = data.n_channels * data.n_timepoints;
  std::vector<std::size_t> all;
  if (indices.empty()) {
    all.resize(data.n_samples());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    indices = all;
  }
  Tensor batch = Tensor::zeros({indices.size(), 1, data.n_channels, data.n_timepoints});
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const auto s = data.sample(indices[j]);
    std::copy(s.begin(), s.end(), batch.data() + j * stride);
  }
  return batch;
}

TrainResult train(const ModelSpec& spec, const EegDataset& data, const TrainConfig& cfg) {
  g_train_calls.fetch_add(1);
  data.validate();
  if (data.n_samples() == 0) throw TrainingError("train: empty dataset");
  bool has0 = false, has1 = false;
  for (std::uint8_t l : data.labels) (l == 0 ? has0 : has1) = true;
  if (!has0 || !has1)
    throw TrainingError("train: dataset holds a single class; both are required");
  if (data.n_channels != spec.input_channels ||
      data.n_timepoints != spec.input_timepoints)
    throw DataError("train: dataset shape " + std::to_string(data.n_channels) + "x" +
                    std::to_string(data.n_timepoints) + " does not match model input " +
                    std::to_string(spec.input_channels) + "x" +
                    std::to_string(spec.input_timepoints));
  if (cfg.epochs < 1) throw UsageError("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw UsageError("train: batch size must be >= 1");

  TrainResult result;
  result.net = make_network(spec, cfg.seed);
  Adam opt(result.net, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
  Rng shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

  const std::size_t n = data.n_samples();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<std::size_t> batch_idx;
  std::vector<std::uint8_t> batch_labels;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      batch_idx.assign(order.begin() + std::ptrdiff_t(start),
                       order.begin() + std::ptrdiff_t(end));
      batch_labels.clear();
      for (std::size_t i : batch_idx) batch_labels.push_back(data.labels[i]);
      const Tensor batch = make_batch(data, batch_idx);
      const auto fwd = forward(result.net, batch);
      const auto bwd = backward(result.net, batch, fwd, batch_labels);
      if (!std::isfinite(bwd.loss))
        throw TrainingError("train: loss diverged at epoch " + std::to_string(epoch));
      opt.step(result.net, bwd.grads);
      loss_sum += bwd.loss * double(end - start);
    }
    result.epoch_loss.push_back(loss_sum / double(n));
  }
  return result;
}

std::vector<std::vector<double>> predict_probabilities(const Network& net,
                                                       const EegDataset& data,
                                                       std::size_t eval_batch) {
  const std::size_t n = data.n_samples();
  const std::size_t classes = net.classes();
  std::vector<std::vector<double>> probs;
  probs.reserve(n);
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < n; start += eval_batch) {
    const std::size_t end = std::min(n, start + eval_batch);
    idx.clear();
    for (std::size_t i = start; i < end; ++i) idx.push_back(i);
    const Tensor batch = make_batch(data, idx);
    const auto fwd = forward(net, batch);
    for (std::size_t b = 0; b < idx.size(); ++b) {
      std::span<const float> row(fwd.logits.data() + b * classes, classes);
      probs.push_back(softmax(row));
    }
  }
  return probs;
}

std::vector<std::uint8_t> predict(const Network& net, const EegDataset& data,
                                  std::size_t eval_batch) {
  const auto probs = predict_probabilities(net, data, eval_batch);
  std::vector<std::uint8_t> labels(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < probs[i].size(); ++j)
      if (probs[i][j] > probs[i][best]) best = j;
    labels[i] = std::uint8_t(best);
  }
  return labels;
}

}  // namespace ics
