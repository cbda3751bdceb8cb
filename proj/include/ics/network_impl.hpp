// SPDX-License-Identifier: Apache-2.0
#pragma once

// Templated forward/backward kernels. Inner loops run along the contiguous
// time axis so the compiler can vectorize them.

#include <algorithm>
#include <cstring>

namespace ics {

namespace detail {

inline std::string layer_label(std::size_t index, const LayerSpec& l) {
  return "layer " + std::to_string(index) + " (" + layer_kind_name(l.kind) + ")";
}

// Zero padding that keeps the output length equal to the input length.
inline std::ptrdiff_t same_pad(std::uint16_t kernel_len) {
  return (std::ptrdiff_t(kernel_len) - 1) / 2;
}

template <typename T>
void temporal_conv_forward(const TensorT<T>& in, const TensorT<T>& w,
                           const TensorT<T>& bias, TensorT<T>& out) {
  const std::size_t B = in.shape[0], Mi = in.shape[1], C = in.shape[2], T_ = in.shape[3];
  const std::size_t Mo = w.shape[0], K = w.shape[2];
  const std::ptrdiff_t P = same_pad(std::uint16_t(K));
  const std::size_t plane = C * T_;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t o = 0; o < Mo; ++o) {
      T* yp = out.data() + (b * Mo + o) * plane;
      std::fill(yp, yp + plane, bias.values[o]);
      for (std::size_t i = 0; i < Mi; ++i) {
        const T* xp = in.data() + (b * Mi + i) * plane;
        const T* wp = w.data() + (o * Mi + i) * K;
        for (std::size_t k = 0; k < K; ++k) {
          const T wk = wp[k];
          const std::ptrdiff_t shift = std::ptrdiff_t(k) - P;
          const std::size_t t0 = std::size_t(std::max<std::ptrdiff_t>(0, -shift));
          const std::size_t t1 =
              std::size_t(std::min<std::ptrdiff_t>(T_, std::ptrdiff_t(T_) - shift));
          for (std::size_t c = 0; c < C; ++c) {
            T* y = yp + c * T_;
            const T* x = xp + c * T_ + shift;
            for (std::size_t t = t0; t < t1; ++t) y[t] += wk * x[t];
          }
        }
      }
    }
  }
}

template <typename T>
void temporal_conv_backward(const TensorT<T>& in, const TensorT<T>& w,
                            const TensorT<T>& gout, TensorT<T>& gin,
                            TensorT<T>& gw, TensorT<T>& gb) {
  const std::size_t B = in.shape[0], Mi = in.shape[1], C = in.shape[2], T_ = in.shape[3];
  const std::size_t Mo = w.shape[0], K = w.shape[2];
  const std::ptrdiff_t P = same_pad(std::uint16_t(K));
  const std::size_t plane = C * T_;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t o = 0; o < Mo; ++o) {
      const T* gp = gout.data() + (b * Mo + o) * plane;
      double gbias = 0.0;
      for (std::size_t n = 0; n < plane; ++n) gbias += double(gp[n]);
      gb.values[o] += T(gbias);
      for (std::size_t i = 0; i < Mi; ++i) {
        const T* xp = in.data() + (b * Mi + i) * plane;
        T* gxp = gin.data() + (b * Mi + i) * plane;
        for (std::size_t k = 0; k < K; ++k) {
          const std::ptrdiff_t shift = std::ptrdiff_t(k) - P;
          const std::size_t t0 = std::size_t(std::max<std::ptrdiff_t>(0, -shift));
          const std::size_t t1 =
              std::size_t(std::min<std::ptrdiff_t>(T_, std::ptrdiff_t(T_) - shift));
          const T wk = w.values[(o * Mi + i) * K + k];
          T acc = T(0);
          for (std::size_t c = 0; c < C; ++c) {
            const T* g = gp + c * T_;
            const T* x = xp + c * T_ + shift;
            T* gx = gxp + c * T_ + shift;
            T dot = T(0);
            for (std::size_t t = t0; t < t1; ++t) {
              dot += g[t] * x[t];
              gx[t] += wk * g[t];
            }
            acc += dot;
          }
          gw.values[(o * Mi + i) * K + k] += acc;
        }
      }
    }
  }
}

template <typename T>
void depthwise_conv_forward(const TensorT<T>& in, const TensorT<T>& w,
                            const TensorT<T>& bias, TensorT<T>& out) {
  const std::size_t B = in.shape[0], M = in.shape[1], C = in.shape[2], T_ = in.shape[3];
  const std::size_t K = w.shape[1];
  const std::ptrdiff_t P = same_pad(std::uint16_t(K));
  const std::size_t plane = C * T_;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t m = 0; m < M; ++m) {
      const T* xp = in.data() + (b * M + m) * plane;
      T* yp = out.data() + (b * M + m) * plane;
      std::fill(yp, yp + plane, bias.values[m]);
      for (std::size_t k = 0; k < K; ++k) {
        const T wk = w.values[m * K + k];
        const std::ptrdiff_t shift = std::ptrdiff_t(k) - P;
        const std::size_t t0 = std::size_t(std::max<std::ptrdiff_t>(0, -shift));
        const std::size_t t1 =
            std::size_t(std::min<std::ptrdiff_t>(T_, std::ptrdiff_t(T_) - shift));
        for (std::size_t c = 0; c < C; ++c) {
          T* y = yp + c * T_;
          const T* x = xp + c * T_ + shift;
          for (std::size_t t = t0; t < t1; ++t) y[t] += wk * x[t];
        }
      }
    }
  }
}

template <typename T>
void depthwise_conv_backward(const TensorT<T>& in, const TensorT<T>& w,
                             const TensorT<T>& gout, TensorT<T>& gin,
                             TensorT<T>& gw, TensorT<T>& gb) {
  const std::size_t B = in.shape[0], M = in.shape[1], C = in.shape[2], T_ = in.shape[3];
  const std::size_t K = w.shape[1];
  const std::ptrdiff_t P = same_pad(std::uint16_t(K));
  const std::size_t plane = C * T_;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t m = 0; m < M; ++m) {
      const T* xp = in.data() + (b * M + m) * plane;
      const T* gp = gout.data() + (b * M + m) * plane;
      T* gxp = gin.data() + (b * M + m) * plane;
      double gbias = 0.0;
      for (std::size_t n = 0; n < plane; ++n) gbias += double(gp[n]);
      gb.values[m] += T(gbias);
      for (std::size_t k = 0; k < K; ++k) {
        const std::ptrdiff_t shift = std::ptrdiff_t(k) - P;
        const std::size_t t0 = std::size_t(std::max<std::ptrdiff_t>(0, -shift));
        const std::size_t t1 =
            std::size_t(std::min<std::ptrdiff_t>(T_, std::ptrdiff_t(T_) - shift));
        const T wk = w.values[m * K + k];
        T acc = T(0);
        for (std::size_t c = 0; c < C; ++c) {
          const T* g = gp + c * T_;
          const T* x = xp + c * T_ + shift;
          T* gx = gxp + c * T_ + shift;
          T dot = T(0);
          for (std::size_t t = t0; t < t1; ++t) {
            dot += g[t] * x[t];
            gx[t] += wk * g[t];
          }
          acc += dot;
        }
        gw.values[m * K + k] += acc;
      }
    }
  }
}

template <typename T>
void pointwise_conv_forward(const TensorT<T>& in, const TensorT<T>& w,
                            const TensorT<T>& bias, TensorT<T>& out) {
  const std::size_t B = in.shape[0], Mi = in.shape[1];
  const std::size_t plane = in.shape[2] * in.shape[3];
  const std::size_t Mo = w.shape[0];
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t o = 0; o < Mo; ++o) {
      T* y = out.data() + (b * Mo + o) * plane;
      std::fill(y, y + plane, bias.values[o]);
      for (std::size_t i = 0; i < Mi; ++i) {
        const T wk = w.values[o * Mi + i];
        const T* x = in.data() + (b * Mi + i) * plane;
        for (std::size_t n = 0; n < plane; ++n) y[n] += wk * x[n];
      }
    }
  }
}

template <typename T>
void pointwise_conv_backward(const TensorT<T>& in, const TensorT<T>& w,
                             const TensorT<T>& gout, TensorT<T>& gin,
                             TensorT<T>& gw, TensorT<T>& gb) {
  const std::size_t B = in.shape[0], Mi = in.shape[1];
  const std::size_t plane = in.shape[2] * in.shape[3];
  const std::size_t Mo = w.shape[0];
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t o = 0; o < Mo; ++o) {
      const T* g = gout.data() + (b * Mo + o) * plane;
      double gbias = 0.0;
      for (std::size_t n = 0; n < plane; ++n) gbias += double(g[n]);
      gb.values[o] += T(gbias);
      for (std::size_t i = 0; i < Mi; ++i) {
        const T wk = w.values[o * Mi + i];
        const T* x = in.data() + (b * Mi + i) * plane;
        T* gx = gin.data() + (b * Mi + i) * plane;
        T dot = T(0);
        for (std::size_t n = 0; n < plane; ++n) {
          dot += g[n] * x[n];
          gx[n] += wk * g[n];
        }
        gw.values[o * Mi + i] += dot;
      }
    }
  }
}

template <typename T>
void relu_forward(const TensorT<T>& in, TensorT<T>& out) {
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = in.values[i] > T(0) ? in.values[i] : T(0);
}

template <typename T>
void relu_backward(const TensorT<T>& in, const TensorT<T>& gout, TensorT<T>& gin) {
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i)
    gin.values[i] = in.values[i] > T(0) ? gout.values[i] : T(0);
}

template <typename T>
void avg_pool_forward(const TensorT<T>& in, std::size_t width, TensorT<T>& out) {
  const std::size_t rows = in.shape[0] * in.shape[1] * in.shape[2];
  const std::size_t T_ = in.shape[3], To = T_ / width;
  const T inv = T(1) / T(width);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = in.data() + r * T_;
    T* y = out.data() + r * To;
    for (std::size_t u = 0; u < To; ++u) {
      T acc = T(0);
      for (std::size_t j = 0; j < width; ++j) acc += x[u * width + j];
      y[u] = acc * inv;
    }
  }
}

template <typename T>
void avg_pool_backward(const TensorT<T>& gout, std::size_t width, TensorT<T>& gin) {
  const std::size_t rows = gin.shape[0] * gin.shape[1] * gin.shape[2];
  const std::size_t T_ = gin.shape[3], To = T_ / width;
  const T inv = T(1) / T(width);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* g = gout.data() + r * To;
    T* gx = gin.data() + r * T_;
    for (std::size_t u = 0; u < To; ++u) {
      const T v = g[u] * inv;
      for (std::size_t j = 0; j < width; ++j) gx[u * width + j] = v;
    }
  }
}

template <typename T>
void gap_forward(const TensorT<T>& in, TensorT<T>& out) {
  const std::size_t B = in.shape[0], M = in.shape[1];
  const std::size_t plane = in.shape[2] * in.shape[3];
  const double inv = 1.0 / double(plane);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t m = 0; m < M; ++m) {
      const T* x = in.data() + (b * M + m) * plane;
      double acc = 0.0;
      for (std::size_t n = 0; n < plane; ++n) acc += double(x[n]);
      out.values[b * M + m] = T(acc * inv);
    }
  }
}

template <typename T>
void gap_backward(const TensorT<T>& gout, TensorT<T>& gin) {
  const std::size_t B = gin.shape[0], M = gin.shape[1];
  const std::size_t plane = gin.shape[2] * gin.shape[3];
  const T inv = T(1) / T(plane);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t m = 0; m < M; ++m) {
      const T v = gout.values[b * M + m] * inv;
      T* gx = gin.data() + (b * M + m) * plane;
      std::fill(gx, gx + plane, v);
    }
  }
}

template <typename T>
void dense_forward(const TensorT<T>& in, const TensorT<T>& w,
                   const TensorT<T>& bias, TensorT<T>& out) {
  const std::size_t B = in.shape[0], F = in.shape[1], O = w.shape[0];
  for (std::size_t b = 0; b < B; ++b) {
    const T* x = in.data() + b * F;
    for (std::size_t j = 0; j < O; ++j) {
      const T* wr = w.data() + j * F;
      double acc = double(bias.values[j]);
      for (std::size_t i = 0; i < F; ++i) acc += double(wr[i]) * double(x[i]);
      out.values[b * O + j] = T(acc);
    }
  }
}

template <typename T>
void dense_backward(const TensorT<T>& in, const TensorT<T>& w,
                    const TensorT<T>& gout, TensorT<T>& gin, TensorT<T>& gw,
                    TensorT<T>& gb) {
  const std::size_t B = in.shape[0], F = in.shape[1], O = w.shape[0];
  for (std::size_t b = 0; b < B; ++b) {
    const T* x = in.data() + b * F;
    const T* g = gout.data() + b * O;
    T* gx = gin.data() + b * F;
    for (std::size_t j = 0; j < O; ++j) {
      const T gj = g[j];
      gb.values[j] += gj;
      const T* wr = w.data() + j * F;
      T* gwr = gw.data() + j * F;
      for (std::size_t i = 0; i < F; ++i) {
        gwr[i] += gj * x[i];
        gx[i] += wr[i] * gj;
      }
    }
  }
}

// Output shape of a layer applied to `shape`, with shape validation.
inline std::vector<std::size_t> layer_output_shape(const LayerSpec& l,
                                                   std::size_t index,
                                                   const std::vector<std::size_t>& shape) {
  const auto fail = [&](const std::string& what) {
    throw DataError(layer_label(index, l) + ": " + what);
  };
  switch (l.kind) {
    case LayerKind::TemporalConv:
    case LayerKind::PointwiseConv:
      if (shape.size() != 4) fail("expected a (batch, maps, channels, time) input");
      if (shape[1] != l.maps_in)
        fail("expected " + std::to_string(l.maps_in) + " input maps, got " +
             std::to_string(shape[1]));
      return {shape[0], l.maps_out, shape[2], shape[3]};
    case LayerKind::DepthwiseTemporalConv:
      if (shape.size() != 4) fail("expected a (batch, maps, channels, time) input");
      if (shape[1] != l.maps_in)
        fail("expected " + std::to_string(l.maps_in) + " input maps, got " +
             std::to_string(shape[1]));
      return shape;
    case LayerKind::Relu:
      return shape;
    case LayerKind::TemporalAvgPool:
      if (shape.size() != 4) fail("expected a (batch, maps, channels, time) input");
      if (l.pool_width == 0 || shape[3] % l.pool_width != 0)
        fail("time extent " + std::to_string(shape[3]) + " not divisible by pool width " +
             std::to_string(l.pool_width));
      return {shape[0], shape[1], shape[2], shape[3] / l.pool_width};
    case LayerKind::GlobalAvgPool:
      if (shape.size() != 4) fail("expected a (batch, maps, channels, time) input");
      return {shape[0], shape[1]};
    case LayerKind::Dense:
      if (shape.size() != 2) fail("expected a (batch, features) input");
      if (shape[1] != l.maps_in)
        fail("expected " + std::to_string(l.maps_in) + " input features, got " +
             std::to_string(shape[1]));
      return {shape[0], l.maps_out};
  }
  fail("unknown layer kind");
  return {};
}

}  // namespace detail

template <typename T>
void init_params(NetworkT<T>& net, Rng& rng) {
  net.params.assign(net.layers.size(), {});
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& l = net.layers[i];
    const auto shapes = param_shapes(l);
    if (shapes.empty()) continue;
    const double limit = std::sqrt(3.0 / double(fan_in(l)));
    TensorT<T> w = TensorT<T>::zeros(shapes[0]);
    for (auto& v : w.values) v = T(rng.uniform(-limit, limit));
    TensorT<T> b = TensorT<T>::zeros(shapes[1]);
    net.params[i] = {std::move(w), std::move(b)};
  }
}

template <typename T>
void validate_network(const NetworkT<T>& net) {
  const auto& ls = net.layers;
  if (ls.size() < 2) throw UsageError("network: needs at least GlobalAvgPool and Dense");
  std::size_t gap_count = 0;
  for (const auto& l : ls)
    if (l.kind == LayerKind::GlobalAvgPool) ++gap_count;
  if (gap_count != 1) throw UsageError("network: exactly one GlobalAvgPool required");
  if (ls[ls.size() - 2].kind != LayerKind::GlobalAvgPool ||
      ls.back().kind != LayerKind::Dense)
    throw UsageError("network: must terminate with GlobalAvgPool followed by Dense");
  if (ls.back().maps_out < 2)
    throw UsageError("network: terminal Dense must have at least 2 outputs");
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const LayerSpec& l = ls[i];
    if ((l.kind == LayerKind::TemporalConv ||
         l.kind == LayerKind::DepthwiseTemporalConv) &&
        l.kernel_len == 0)
      throw UsageError(detail::layer_label(i, l) + ": kernel length must be >= 1");
    if (l.kind == LayerKind::DepthwiseTemporalConv && l.maps_in != l.maps_out)
      throw UsageError(detail::layer_label(i, l) + ": maps in/out must match");
    if (l.kind == LayerKind::TemporalAvgPool && l.pool_width == 0)
      throw UsageError(detail::layer_label(i, l) + ": pool width must be >= 1");
    if (!net.params.empty()) {
      const auto shapes = param_shapes(l);
      if (net.params[i].size() != shapes.size())
        throw UsageError(detail::layer_label(i, l) + ": parameter count mismatch");
      for (std::size_t p = 0; p < shapes.size(); ++p)
        if (net.params[i][p].shape != shapes[p])
          throw UsageError(detail::layer_label(i, l) + ": parameter shape mismatch");
    }
  }
}

template <typename T>
ForwardResultT<T> forward(const NetworkT<T>& net, const TensorT<T>& batch) {
  if (batch.shape.size() != 4 || batch.shape[1] != 1)
    throw DataError("forward: batch must be shaped (B, 1, channels, time)");
  if (net.input_channels != 0 && batch.shape[2] != net.input_channels)
    throw DataError("forward: input has " + std::to_string(batch.shape[2]) +
                    " channels, model expects " + std::to_string(net.input_channels));
  if (net.input_timepoints != 0 && batch.shape[3] != net.input_timepoints)
    throw DataError("forward: input has " + std::to_string(batch.shape[3]) +
                    " timepoints, model expects " + std::to_string(net.input_timepoints));

  ForwardResultT<T> r;
  r.activations.reserve(net.layers.size());
  const TensorT<T>* cur = &batch;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& l = net.layers[i];
    TensorT<T> out = TensorT<T>::zeros(detail::layer_output_shape(l, i, cur->shape));
    switch (l.kind) {
      case LayerKind::TemporalConv:
        detail::temporal_conv_forward(*cur, net.params[i][0], net.params[i][1], out);
        break;
      case LayerKind::DepthwiseTemporalConv:
        detail::depthwise_conv_forward(*cur, net.params[i][0], net.params[i][1], out);
        break;
      case LayerKind::PointwiseConv:
        detail::pointwise_conv_forward(*cur, net.params[i][0], net.params[i][1], out);
        break;
      case LayerKind::Relu:
        detail::relu_forward(*cur, out);
        break;
      case LayerKind::TemporalAvgPool:
        detail::avg_pool_forward(*cur, l.pool_width, out);
        break;
      case LayerKind::GlobalAvgPool:
        detail::gap_forward(*cur, out);
        r.gap_layer = int(i);
        break;
      case LayerKind::Dense:
        detail::dense_forward(*cur, net.params[i][0], net.params[i][1], out);
        break;
    }
    r.activations.push_back(std::move(out));
    cur = &r.activations.back();
  }
  r.logits = r.activations.back();
  return r;
}

template <typename T>
BackwardResultT<T> backward(const NetworkT<T>& net, const TensorT<T>& batch,
                            const ForwardResultT<T>& fwd,
                            std::span<const std::uint8_t> labels) {
  const std::size_t B = batch.shape[0];
  const std::size_t K = net.classes();
  if (labels.size() != B)
    throw UsageError("backward: label count does not match batch size");
  for (std::uint8_t y : labels)
    if (y >= K) throw UsageError("backward: label out of range");

  BackwardResultT<T> r;
  r.grads.resize(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i)
    for (const auto& p : net.params[i])
      r.grads[i].push_back(TensorT<T>::zeros(p.shape));

  // dL/dlogits for the mean cross-entropy, computed per row in double.
  TensorT<T> delta = TensorT<T>::zeros(fwd.logits.shape);
  double loss = 0.0;
  std::vector<double> row(K);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t j = 0; j < K; ++j) row[j] = double(fwd.logits.values[b * K + j]);
    const std::vector<double> p = softmax(std::span<const double>(row));
    loss -= std::log(p[labels[b]]);
    for (std::size_t j = 0; j < K; ++j) {
      const double target = (j == labels[b]) ? 1.0 : 0.0;
      delta.values[b * K + j] = T((p[j] - target) / double(B));
    }
  }
  r.loss = loss / double(B);

  for (std::size_t idx = net.layers.size(); idx-- > 0;) {
    const LayerSpec& l = net.layers[idx];
    const TensorT<T>& input = idx == 0 ? batch : fwd.activations[idx - 1];
    TensorT<T> gin = TensorT<T>::zeros(input.shape);
    switch (l.kind) {
      case LayerKind::TemporalConv:
        detail::temporal_conv_backward(input, net.params[idx][0], delta, gin,
                                       r.grads[idx][0], r.grads[idx][1]);
        break;
      case LayerKind::DepthwiseTemporalConv:
        detail::depthwise_conv_backward(input, net.params[idx][0], delta, gin,
                                        r.grads[idx][0], r.grads[idx][1]);
        break;
      case LayerKind::PointwiseConv:
        detail::pointwise_conv_backward(input, net.params[idx][0], delta, gin,
                                        r.grads[idx][0], r.grads[idx][1]);
        break;
      case LayerKind::Relu:
        detail::relu_backward(input, delta, gin);
        break;
      case LayerKind::TemporalAvgPool:
        detail::avg_pool_backward(delta, l.pool_width, gin);
        break;
      case LayerKind::GlobalAvgPool:
        detail::gap_backward(delta, gin);
        break;
      case LayerKind::Dense:
        detail::dense_backward(input, net.params[idx][0], delta, gin,
                               r.grads[idx][0], r.grads[idx][1]);
        break;
    }
    delta = std::move(gin);
  }
  return r;
}

template <typename T>
double mean_ce_loss(const NetworkT<T>& net, const TensorT<T>& batch,
                    std::span<const std::uint8_t> labels) {
  const ForwardResultT<T> fwd = forward(net, batch);
  const std::size_t B = batch.shape[0], K = net.classes();
  double loss = 0.0;
  std::vector<double> row(K);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t j = 0; j < K; ++j) row[j] = double(fwd.logits.values[b * K + j]);
    loss -= std::log(softmax(std::span<const double>(row))[labels[b]]);
  }
  return loss / double(B);
}

}  // namespace ics
