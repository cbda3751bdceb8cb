// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ics/error.hpp"
#include "ics/layers.hpp"
#include "ics/rng.hpp"
#include "ics/tensor.hpp"

namespace ics {

// Shift-stable softmax computed in double. Rejects non-finite input.
std::vector<double> softmax(std::span<const double> z);
std::vector<double> softmax(std::span<const float> z);

// A layered network with its parameters. The scalar type is float for all
// production paths; double instantiations provide the shadow arithmetic used
// by the gradient checker.
template <typename T>
struct NetworkT {
  std::vector<LayerSpec> layers;
  std::vector<std::vector<TensorT<T>>> params;  // per layer: weights, bias
  // Expected input extents; 0 means unconstrained (models loaded from disk
  // do not carry them).
  std::size_t input_channels = 0;
  std::size_t input_timepoints = 0;

  std::size_t classes() const {
    return layers.empty() ? 0 : layers.back().maps_out;
  }
};

using Network = NetworkT<float>;

template <typename T>
struct ForwardResultT {
  TensorT<T> logits;                    // batch x classes
  std::vector<TensorT<T>> activations;  // activations[i] = output of layer i
  int gap_layer = -1;

  // Feature maps entering global average pooling, shape (B, K, C, T').
  const TensorT<T>& feature_maps() const { return activations[gap_layer - 1]; }
};

template <typename T>
struct BackwardResultT {
  double loss = 0.0;  // mean cross-entropy over the batch
  std::vector<std::vector<TensorT<T>>> grads;  // mirrors params
};

// Allocate parameter tensors and fill weights with fan-in-scaled uniform
// values, biases with zero. Consumes the Rng in layer declaration order.
template <typename T>
void init_params(NetworkT<T>& net, Rng& rng);

// Structural invariants of the family: exactly one GlobalAvgPool,
// immediately followed by a terminal Dense layer, and parameter tensors
// matching their declared shapes.
template <typename T>
void validate_network(const NetworkT<T>& net);

// Forward pass over a batch shaped (B, 1, C, T). Shape mismatches are
// rejected naming the offending layer.
template <typename T>
ForwardResultT<T> forward(const NetworkT<T>& net, const TensorT<T>& batch);

// Gradient of the mean cross-entropy loss with respect to every parameter.
template <typename T>
BackwardResultT<T> backward(const NetworkT<T>& net, const TensorT<T>& batch,
                            const ForwardResultT<T>& fwd,
                            std::span<const std::uint8_t> labels);

// Mean cross-entropy loss only (used by finite-difference probes).
template <typename T>
double mean_ce_loss(const NetworkT<T>& net, const TensorT<T>& batch,
                    std::span<const std::uint8_t> labels);

// Model file I/O ("ICSM" format, little-endian, f32 parameters).
void save_model(const Network& net, std::ostream& out);
void save_model(const Network& net, const std::string& path);
Network load_model(std::istream& in);
Network load_model(const std::string& path);

// FNV-1a 64-bit checksum of the serialized model bytes.
std::uint64_t model_checksum(const Network& net);

}  // namespace ics

#include "ics/network_impl.hpp"
