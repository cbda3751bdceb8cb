// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <vector>

namespace ics {

// Dense row-major tensor; the innermost axis is time.
template <typename T>
struct TensorT {
  std::vector<std::size_t> shape;
  std::vector<T> values;

  TensorT() = default;

  static TensorT zeros(std::vector<std::size_t> shape) {
    TensorT t;
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    t.shape = std::move(shape);
    t.values.assign(n, T(0));
    return t;
  }

  std::size_t size() const { return values.size(); }
  std::size_t extent(std::size_t axis) const { return shape[axis]; }

  T* data() { return values.data(); }
  const T* data() const { return values.data(); }

  bool same_shape(const TensorT& other) const { return shape == other.shape; }
};

using Tensor = TensorT<float>;

inline std::size_t numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

}  // namespace ics
