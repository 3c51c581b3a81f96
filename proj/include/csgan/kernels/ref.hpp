#pragma once

#include <cmath>
#include <vector>

#include "csgan/kernels/conv.hpp"
#include "csgan/tensor.hpp"

// Serial reference kernels. Direct loops, no im2col, no OpenMP. These are the
// oracles the tiled kernels are tested against and the baseline in the
// kernel benchmark.
namespace csgan::kernels::ref {

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, const std::vector<T>& bias, const ConvGeom& g) {
  const int Ci = x.c(), H = x.h(), W = x.w();
  const int Co = w.n(), k = g.kernel;
  const int Ho = conv_out_size(H, g), Wo = conv_out_size(W, g);
  Tensor<T> y(x.n(), Co, Ho, Wo);
  for (int n = 0; n < x.n(); ++n)
    for (int co = 0; co < Co; ++co)
      for (int oh = 0; oh < Ho; ++oh)
        for (int ow = 0; ow < Wo; ++ow) {
          T s = bias.empty() ? T(0) : bias[co];
          for (int ci = 0; ci < Ci; ++ci)
            for (int kh = 0; kh < k; ++kh)
              for (int kw = 0; kw < k; ++kw) {
                const int ih = oh * g.stride - g.pad + kh;
                const int iw = ow * g.stride - g.pad + kw;
                if (ih >= 0 && ih < H && iw >= 0 && iw < W) s += x.at(n, ci, ih, iw) * w.at(co, ci, kh, kw);
              }
          y.at(n, co, oh, ow) = s;
        }
  return y;
}

template <typename T>
Tensor<T> conv2d_backward_input(const Tensor<T>& gy, const Tensor<T>& w, int H, int W, const ConvGeom& g) {
  const int Co = w.n(), Ci = w.c(), k = g.kernel;
  Tensor<T> gx(gy.n(), Ci, H, W);
  for (int n = 0; n < gy.n(); ++n)
    for (int co = 0; co < Co; ++co)
      for (int oh = 0; oh < gy.h(); ++oh)
        for (int ow = 0; ow < gy.w(); ++ow) {
          const T gv = gy.at(n, co, oh, ow);
          for (int ci = 0; ci < Ci; ++ci)
            for (int kh = 0; kh < k; ++kh)
              for (int kw = 0; kw < k; ++kw) {
                const int ih = oh * g.stride - g.pad + kh;
                const int iw = ow * g.stride - g.pad + kw;
                if (ih >= 0 && ih < H && iw >= 0 && iw < W) gx.at(n, ci, ih, iw) += gv * w.at(co, ci, kh, kw);
              }
        }
  return gx;
}

template <typename T>
void conv2d_backward_weight(const Tensor<T>& x, const Tensor<T>& gy, const ConvGeom& g, Tensor<T>& gw) {
  const int Ci = x.c(), H = x.h(), W = x.w();
  const int Co = gy.c(), k = g.kernel;
  for (int n = 0; n < x.n(); ++n)
    for (int co = 0; co < Co; ++co)
      for (int oh = 0; oh < gy.h(); ++oh)
        for (int ow = 0; ow < gy.w(); ++ow) {
          const T gv = gy.at(n, co, oh, ow);
          for (int ci = 0; ci < Ci; ++ci)
            for (int kh = 0; kh < k; ++kh)
              for (int kw = 0; kw < k; ++kw) {
                const int ih = oh * g.stride - g.pad + kh;
                const int iw = ow * g.stride - g.pad + kw;
                if (ih >= 0 && ih < H && iw >= 0 && iw < W) gw.at(co, ci, kh, kw) += gv * x.at(n, ci, ih, iw);
              }
        }
}

// w layout [Ci, Co, k, k], as in the tiled kernel.
template <typename T>
Tensor<T> conv_transpose2d_forward(const Tensor<T>& x, const Tensor<T>& w, const std::vector<T>& bias,
                                   const ConvGeom& g, int out_pad) {
  const int Ci = x.c(), H = x.h(), W = x.w();
  const int Co = w.c(), k = g.kernel;
  const int Ho = (H - 1) * g.stride - 2 * g.pad + k + out_pad;
  const int Wo = (W - 1) * g.stride - 2 * g.pad + k + out_pad;
  Tensor<T> y(x.n(), Co, Ho, Wo);
  if (!bias.empty())
    for (int n = 0; n < x.n(); ++n)
      for (int co = 0; co < Co; ++co)
        for (int i = 0; i < Ho * Wo; ++i) y.data()[(static_cast<size_t>(n) * Co + co) * Ho * Wo + i] = bias[co];
  for (int n = 0; n < x.n(); ++n)
    for (int ci = 0; ci < Ci; ++ci)
      for (int ih = 0; ih < H; ++ih)
        for (int iw = 0; iw < W; ++iw) {
          const T xv = x.at(n, ci, ih, iw);
          for (int co = 0; co < Co; ++co)
            for (int kh = 0; kh < k; ++kh)
              for (int kw = 0; kw < k; ++kw) {
                const int oh = ih * g.stride - g.pad + kh;
                const int ow = iw * g.stride - g.pad + kw;
                if (oh >= 0 && oh < Ho && ow >= 0 && ow < Wo) y.at(n, co, oh, ow) += xv * w.at(ci, co, kh, kw);
              }
        }
  return y;
}

template <typename T>
Tensor<T> instance_norm_forward(const Tensor<T>& x, const std::vector<T>& gamma, const std::vector<T>& beta, T eps) {
  const int N = x.n(), C = x.c(), S = x.h() * x.w();
  Tensor<T> y(N, C, x.h(), x.w());
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c) {
      const T* xp = x.data() + (static_cast<size_t>(n) * C + c) * S;
      T* yp = y.data() + (static_cast<size_t>(n) * C + c) * S;
      T mean = 0, var = 0;
      for (int i = 0; i < S; ++i) mean += xp[i];
      mean /= S;
      for (int i = 0; i < S; ++i) var += (xp[i] - mean) * (xp[i] - mean);
      var /= S;
      for (int i = 0; i < S; ++i) yp[i] = gamma[c] * (xp[i] - mean) / std::sqrt(var + eps) + beta[c];
    }
  return y;
}

}  // namespace csgan::kernels::ref
