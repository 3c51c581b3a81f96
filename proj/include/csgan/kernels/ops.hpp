#pragma once

#include <cmath>
#include <vector>

#include "csgan/tensor.hpp"

namespace csgan::kernels {

// ---- instance normalization ------------------------------------------------
// Per-sample, per-channel statistics over H*W; no running stats.

template <typename T>
struct InstanceNormStats {
  std::vector<T> inv_std;  // one per (n, c)
  Tensor<T> xhat;          // normalized input, needed by backward
};

template <typename T>
Tensor<T> instance_norm_forward(const Tensor<T>& x, const std::vector<T>& gamma, const std::vector<T>& beta, T eps,
                                InstanceNormStats<T>* stats) {
  const int N = x.n(), C = x.c(), S = x.h() * x.w();
  Tensor<T> y(N, C, x.h(), x.w());
  if (stats) {
    stats->inv_std.assign(static_cast<size_t>(N) * C, T(0));
    stats->xhat = Tensor<T>(N, C, x.h(), x.w());
  }
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < N; ++n) {
    for (int c = 0; c < C; ++c) {
      const T* xp = x.data() + (static_cast<size_t>(n) * C + c) * S;
      T* yp = y.data() + (static_cast<size_t>(n) * C + c) * S;
      T mean = 0;
      for (int i = 0; i < S; ++i) mean += xp[i];
      mean /= S;
      T var = 0;
      for (int i = 0; i < S; ++i) {
        const T d = xp[i] - mean;
        var += d * d;
      }
      var /= S;
      const T inv = T(1) / std::sqrt(var + eps);
      const T g = gamma[c], b = beta[c];
      T* xh = stats ? stats->xhat.data() + (static_cast<size_t>(n) * C + c) * S : nullptr;
      for (int i = 0; i < S; ++i) {
        const T h = (xp[i] - mean) * inv;
        if (xh) xh[i] = h;
        yp[i] = g * h + b;
      }
      if (stats) stats->inv_std[static_cast<size_t>(n) * C + c] = inv;
    }
  }
  return y;
}

template <typename T>
Tensor<T> instance_norm_backward(const Tensor<T>& gy, const std::vector<T>& gamma, const InstanceNormStats<T>& st,
                                 std::vector<T>& ggamma, std::vector<T>& gbeta) {
  const int N = gy.n(), C = gy.c(), S = gy.h() * gy.w();
  Tensor<T> gx(N, C, gy.h(), gy.w());
  for (int n = 0; n < N; ++n) {
    for (int c = 0; c < C; ++c) {
      const size_t off = (static_cast<size_t>(n) * C + c) * S;
      const T* gp = gy.data() + off;
      const T* xh = st.xhat.data() + off;
      T* gxp = gx.data() + off;
      T sum_g = 0, sum_gx = 0;
      for (int i = 0; i < S; ++i) {
        sum_g += gp[i];
        sum_gx += gp[i] * xh[i];
      }
      ggamma[c] += sum_gx;
      gbeta[c] += sum_g;
      const T inv = st.inv_std[static_cast<size_t>(n) * C + c];
      const T gscale = gamma[c] * inv;
      const T mg = sum_g / S, mgx = sum_gx / S;
      for (int i = 0; i < S; ++i) gxp[i] = gscale * (gp[i] - mg - xh[i] * mgx);
    }
  }
  return gx;
}

// ---- activations -----------------------------------------------------------

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.vec()) v = v > T(0) ? v : T(0);
  return y;
}

template <typename T>
Tensor<T> leaky_relu_forward(const Tensor<T>& x, T slope) {
  Tensor<T> y = x;
  for (auto& v : y.vec()) v = v > T(0) ? v : slope * v;
  return y;
}

template <typename T>
Tensor<T> tanh_forward(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.vec()) v = std::tanh(v);
  return y;
}

// ---- reflection padding ----------------------------------------------------

inline int reflect_index(int i, int n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  return i;
}

template <typename T>
Tensor<T> reflect_pad_forward(const Tensor<T>& x, int p) {
  const int N = x.n(), C = x.c(), H = x.h(), W = x.w();
  require(p < H && p < W, "reflection pad larger than image");
  Tensor<T> y(N, C, H + 2 * p, W + 2 * p);
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c)
      for (int h = 0; h < H + 2 * p; ++h) {
        const int sh = reflect_index(h - p, H);
        for (int w = 0; w < W + 2 * p; ++w) y.at(n, c, h, w) = x.at(n, c, sh, reflect_index(w - p, W));
      }
  return y;
}

template <typename T>
Tensor<T> reflect_pad_backward(const Tensor<T>& gy, int p, int H, int W) {
  const int N = gy.n(), C = gy.c();
  Tensor<T> gx(N, C, H, W);
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c)
      for (int h = 0; h < gy.h(); ++h) {
        const int sh = reflect_index(h - p, H);
        for (int w = 0; w < gy.w(); ++w) gx.at(n, c, sh, reflect_index(w - p, W)) += gy.at(n, c, h, w);
      }
  return gx;
}

}  // namespace csgan::kernels
