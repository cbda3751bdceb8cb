// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ics/network.hpp"

namespace ics {

// Adaptive moment estimation with bias correction. Moment buffers mirror
// the parameter tensors exactly.
template <typename T>
class AdamT {
 public:
  AdamT(const NetworkT<T>& net, double lr, double beta1 = 0.9, double beta2 = 0.999,
        double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& layer_params : net.params) {
      std::vector<TensorT<T>> m, v;
      for (const auto& p : layer_params) {
        m.push_back(TensorT<T>::zeros(p.shape));
        v.push_back(TensorT<T>::zeros(p.shape));
      }
      m_.push_back(std::move(m));
      v_.push_back(std::move(v));
    }
  }

  void step(NetworkT<T>& net, const std::vector<std::vector<TensorT<T>>>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, double(t_));
    const double bc2 = 1.0 - std::pow(beta2_, double(t_));
    for (std::size_t i = 0; i < net.params.size(); ++i) {
      for (std::size_t p = 0; p < net.params[i].size(); ++p) {
        T* w = net.params[i][p].data();
        const T* g = grads[i][p].data();
        T* m = m_[i][p].data();
        T* v = v_[i][p].data();
        const std::size_t n = net.params[i][p].size();
        for (std::size_t k = 0; k < n; ++k) {
          const double gk = double(g[k]);
          const double mk = beta1_ * double(m[k]) + (1.0 - beta1_) * gk;
          const double vk = beta2_ * double(v[k]) + (1.0 - beta2_) * gk * gk;
          m[k] = T(mk);
          v[k] = T(vk);
          w[k] = T(double(w[k]) - lr_ * (mk / bc1) / (std::sqrt(vk / bc2) + eps_));
        }
      }
    }
  }

  std::uint64_t step_count() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<TensorT<T>>> m_, v_;
};

using Adam = AdamT<float>;

}  // namespace ics
