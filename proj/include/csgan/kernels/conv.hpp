#pragma once

#include <vector>

#include "csgan/kernels/gemm.hpp"
#include "csgan/tensor.hpp"

namespace csgan::kernels {

struct ConvGeom {
  int kernel = 3;
  int stride = 1;
  int pad = 0;
};

inline int conv_out_size(int in, const ConvGeom& g) { return (in + 2 * g.pad - g.kernel) / g.stride + 1; }

// cols layout: [C*k*k rows] x [Ho*Wo columns]. Out-of-image taps read as zero.
template <typename T>
void im2col(const T* img, int C, int H, int W, const ConvGeom& g, T* cols) {
  const int Ho = conv_out_size(H, g);
  const int Wo = conv_out_size(W, g);
  const int span = Ho * Wo;
#pragma omp parallel for schedule(static)
  for (int row = 0; row < C * g.kernel * g.kernel; ++row) {
    const int c = row / (g.kernel * g.kernel);
    const int kh = (row / g.kernel) % g.kernel;
    const int kw = row % g.kernel;
    T* dst = cols + static_cast<size_t>(row) * span;
    const T* src = img + static_cast<size_t>(c) * H * W;
    for (int oh = 0; oh < Ho; ++oh) {
      const int ih = oh * g.stride - g.pad + kh;
      if (ih < 0 || ih >= H) {
        for (int ow = 0; ow < Wo; ++ow) *dst++ = T(0);
        continue;
      }
      for (int ow = 0; ow < Wo; ++ow) {
        const int iw = ow * g.stride - g.pad + kw;
        *dst++ = (iw >= 0 && iw < W) ? src[static_cast<size_t>(ih) * W + iw] : T(0);
      }
    }
  }
}

// Adjoint of im2col: scatter-add cols back into the image.
template <typename T>
void col2im(const T* cols, int C, int H, int W, const ConvGeom& g, T* img) {
  const int Ho = conv_out_size(H, g);
  const int Wo = conv_out_size(W, g);
  const int span = Ho * Wo;
  std::fill(img, img + static_cast<size_t>(C) * H * W, T(0));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < C; ++c) {
    T* dst = img + static_cast<size_t>(c) * H * W;
    for (int kh = 0; kh < g.kernel; ++kh) {
      for (int kw = 0; kw < g.kernel; ++kw) {
        const int row = (c * g.kernel + kh) * g.kernel + kw;
        const T* src = cols + static_cast<size_t>(row) * span;
        for (int oh = 0; oh < Ho; ++oh) {
          const int ih = oh * g.stride - g.pad + kh;
          if (ih < 0 || ih >= H) continue;
          for (int ow = 0; ow < Wo; ++ow) {
            const int iw = ow * g.stride - g.pad + kw;
            if (iw >= 0 && iw < W) dst[static_cast<size_t>(ih) * W + iw] += src[static_cast<size_t>(oh) * Wo + ow];
          }
        }
      }
    }
  }
}

// y[N,Co,Ho,Wo] = conv(x[N,Ci,H,W], w[Co,Ci,k,k]) + b.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, const std::vector<T>& bias, const ConvGeom& g) {
  const int Ci = x.c(), H = x.h(), W = x.w();
  const int Co = w.n();
  const int Ho = conv_out_size(H, g), Wo = conv_out_size(W, g);
  const int K = Ci * g.kernel * g.kernel;
  const int span = Ho * Wo;
  Tensor<T> y(x.n(), Co, Ho, Wo);
  std::vector<T> cols(static_cast<size_t>(K) * span);
  for (int n = 0; n < x.n(); ++n) {
    im2col(x.data() + static_cast<size_t>(n) * Ci * H * W, Ci, H, W, g, cols.data());
    T* yn = y.data() + static_cast<size_t>(n) * Co * span;
    gemm(Co, span, K, w.data(), cols.data(), yn);
    if (!bias.empty()) {
      for (int co = 0; co < Co; ++co) {
        const T b = bias[co];
        T* row = yn + static_cast<size_t>(co) * span;
        for (int i = 0; i < span; ++i) row[i] += b;
      }
    }
  }
  return y;
}

// gx = w^T applied to gy (adjoint of the forward map).
template <typename T>
Tensor<T> conv2d_backward_input(const Tensor<T>& gy, const Tensor<T>& w, int H, int W, const ConvGeom& g) {
  const int Co = w.n(), Ci = w.c();
  const int Ho = gy.h(), Wo = gy.w();
  const int K = Ci * g.kernel * g.kernel;
  const int span = Ho * Wo;
  Tensor<T> gx(gy.n(), Ci, H, W);
  std::vector<T> cols(static_cast<size_t>(K) * span);
  // wT[K x Co]
  std::vector<T> wT(static_cast<size_t>(K) * Co);
  for (int co = 0; co < Co; ++co)
    for (int k = 0; k < K; ++k) wT[static_cast<size_t>(k) * Co + co] = w.data()[static_cast<size_t>(co) * K + k];
  for (int n = 0; n < gy.n(); ++n) {
    gemm(K, span, Co, wT.data(), gy.data() + static_cast<size_t>(n) * Co * span, cols.data());
    col2im(cols.data(), Ci, H, W, g, gx.data() + static_cast<size_t>(n) * Ci * H * W);
  }
  return gx;
}

// gw += gy * im2col(x)^T; gbias += per-channel sums of gy.
template <typename T>
void conv2d_backward_weight(const Tensor<T>& x, const Tensor<T>& gy, const ConvGeom& g, Tensor<T>& gw,
                            std::vector<T>* gbias) {
  const int Ci = x.c(), H = x.h(), W = x.w();
  const int Co = gy.c(), Ho = gy.h(), Wo = gy.w();
  const int K = Ci * g.kernel * g.kernel;
  const int span = Ho * Wo;
  std::vector<T> cols(static_cast<size_t>(K) * span);
  std::vector<T> colsT(static_cast<size_t>(span) * K);
  for (int n = 0; n < x.n(); ++n) {
    im2col(x.data() + static_cast<size_t>(n) * Ci * H * W, Ci, H, W, g, cols.data());
    for (int k = 0; k < K; ++k)
      for (int s = 0; s < span; ++s) colsT[static_cast<size_t>(s) * K + k] = cols[static_cast<size_t>(k) * span + s];
    gemm_acc(Co, K, span, gy.data() + static_cast<size_t>(n) * Co * span, colsT.data(), gw.data());
    if (gbias) {
      for (int co = 0; co < Co; ++co) {
        const T* row = gy.data() + (static_cast<size_t>(n) * Co + co) * span;
        T s = 0;
        for (int i = 0; i < span; ++i) s += row[i];
        (*gbias)[co] += s;
      }
    }
  }
}

// Transposed convolution. w layout [Ci, Co, k, k]; output side
// Ho = (H-1)*stride - 2*pad + kernel + out_pad.
template <typename T>
Tensor<T> conv_transpose2d_forward(const Tensor<T>& x, const Tensor<T>& w, const std::vector<T>& bias,
                                   const ConvGeom& g, int out_pad) {
  const int Ci = x.c(), H = x.h(), W = x.w();
  const int Co = w.c();
  const int Ho = (H - 1) * g.stride - 2 * g.pad + g.kernel + out_pad;
  const int Wo = (W - 1) * g.stride - 2 * g.pad + g.kernel + out_pad;
  require(conv_out_size(Ho, g) == H && conv_out_size(Wo, g) == W,
          "conv_transpose geometry inconsistent with stride/pad/out_pad");
  const int K = Co * g.kernel * g.kernel;
  const int span = H * W;
  // wT[K x Ci] from w[Ci x K]
  std::vector<T> wT(static_cast<size_t>(K) * Ci);
  for (int ci = 0; ci < Ci; ++ci)
    for (int k = 0; k < K; ++k) wT[static_cast<size_t>(k) * Ci + ci] = w.data()[static_cast<size_t>(ci) * K + k];
  Tensor<T> y(x.n(), Co, Ho, Wo);
  std::vector<T> cols(static_cast<size_t>(K) * span);
  for (int n = 0; n < x.n(); ++n) {
    gemm(K, span, Ci, wT.data(), x.data() + static_cast<size_t>(n) * Ci * span, cols.data());
    T* yn = y.data() + static_cast<size_t>(n) * Co * Ho * Wo;
    col2im(cols.data(), Co, Ho, Wo, g, yn);
    if (!bias.empty()) {
      for (int co = 0; co < Co; ++co) {
        const T b = bias[co];
        T* row = yn + static_cast<size_t>(co) * Ho * Wo;
        for (int i = 0; i < Ho * Wo; ++i) row[i] += b;
      }
    }
  }
  return y;
}

// Adjoint of conv_transpose2d_forward w.r.t. its input: an ordinary strided
// convolution of gy with w viewed as [Ci, Co*k*k].
template <typename T>
Tensor<T> conv_transpose2d_backward_input(const Tensor<T>& gy, const Tensor<T>& w, const ConvGeom& g) {
  const int Ci = w.n(), Co = w.c();
  const int Ho = gy.h(), Wo = gy.w();
  const int H = conv_out_size(Ho, g), W = conv_out_size(Wo, g);
  const int K = Co * g.kernel * g.kernel;
  const int span = H * W;
  Tensor<T> gx(gy.n(), Ci, H, W);
  std::vector<T> cols(static_cast<size_t>(K) * span);
  for (int n = 0; n < gy.n(); ++n) {
    im2col(gy.data() + static_cast<size_t>(n) * Co * Ho * Wo, Co, Ho, Wo, g, cols.data());
    gemm(Ci, span, K, w.data(), cols.data(), gx.data() + static_cast<size_t>(n) * Ci * span);
  }
  return gx;
}

template <typename T>
void conv_transpose2d_backward_weight(const Tensor<T>& x, const Tensor<T>& gy, const ConvGeom& g, Tensor<T>& gw,
                                      std::vector<T>* gbias) {
  const int Ci = x.c(), H = x.h(), W = x.w();
  const int Co = gy.c(), Ho = gy.h(), Wo = gy.w();
  const int K = Co * g.kernel * g.kernel;
  const int span = H * W;
  std::vector<T> cols(static_cast<size_t>(K) * span);
  std::vector<T> colsT(static_cast<size_t>(span) * K);
  for (int n = 0; n < x.n(); ++n) {
    im2col(gy.data() + static_cast<size_t>(n) * Co * Ho * Wo, Co, Ho, Wo, g, cols.data());
    for (int k = 0; k < K; ++k)
      for (int s = 0; s < span; ++s) colsT[static_cast<size_t>(s) * K + k] = cols[static_cast<size_t>(k) * span + s];
    gemm_acc(Ci, K, span, x.data() + static_cast<size_t>(n) * Ci * span, colsT.data(), gw.data());
    if (gbias) {
      for (int co = 0; co < Co; ++co) {
        const T* row = gy.data() + (static_cast<size_t>(n) * Co + co) * Ho * Wo;
        T s = 0;
        for (int i = 0; i < Ho * Wo; ++i) s += row[i];
        (*gbias)[co] += s;
      }
    }
  }
}

}  // namespace csgan::kernels
