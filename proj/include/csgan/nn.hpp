#pragma once

#include <any>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "csgan/kernels/conv.hpp"
#include "csgan/kernels/ops.hpp"
#include "csgan/tensor.hpp"

namespace csgan {

// Flat view of a parameter (or gradient) buffer.
template <typename T>
struct ParamView {
  T* data;
  size_t size;
};

// A layer owns its parameters and gradient accumulators. Per-call state
// (saved activations) lives in an externally held cache so the same layer
// can appear twice in one computation graph, as both generators do in the
// cycle pass.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, std::any& cache) = 0;
  // Accumulates parameter gradients, returns gradient w.r.t. the input.
  virtual Tensor<T> backward(const Tensor<T>& gy, const std::any& cache) = 0;
  virtual std::vector<ParamView<T>> params() { return {}; }
  virtual std::vector<ParamView<T>> grads() { return {}; }
  virtual void init_params(std::mt19937&, T /*mean*/, T /*stddev*/) {}
};

template <typename T>
using Tape = std::vector<std::any>;

template <typename T>
class Network {
 public:
  Network() = default;
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  void add_layer(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }

  Tensor<T> forward(const Tensor<T>& x, Tape<T>& tape) const {
    tape.resize(layers_.size());
    Tensor<T> cur = x;
    for (size_t i = 0; i < layers_.size(); ++i) cur = layers_[i]->forward(cur, tape[i]);
    return cur;
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    Tape<T> tape;
    return forward(x, tape);
  }

  Tensor<T> backward(const Tensor<T>& gy, const Tape<T>& tape) const {
    Tensor<T> cur = gy;
    for (size_t i = layers_.size(); i-- > 0;) cur = layers_[i]->backward(cur, tape[i]);
    return cur;
  }

  std::vector<ParamView<T>> params() const {
    std::vector<ParamView<T>> out;
    for (auto& l : layers_)
      for (auto p : l->params()) out.push_back(p);
    return out;
  }

  std::vector<ParamView<T>> grads() const {
    std::vector<ParamView<T>> out;
    for (auto& l : layers_)
      for (auto g : l->grads()) out.push_back(g);
    return out;
  }

  size_t param_count() const {
    size_t n = 0;
    for (auto p : params()) n += p.size;
    return n;
  }

  void zero_grad() {
    for (auto g : grads()) std::fill(g.data, g.data + g.size, T(0));
  }

  void init_params(std::mt19937& rng, T mean, T stddev) {
    for (auto& l : layers_) l->init_params(rng, mean, stddev);
  }

  size_t n_layers() const { return layers_.size(); }
  Layer<T>& layer(size_t i) { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

// ---- concrete layers -------------------------------------------------------

template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad)
      : geom_{kernel, stride, pad},
        w_(out_ch, in_ch, kernel, kernel),
        gw_(out_ch, in_ch, kernel, kernel),
        b_(out_ch, T(0)),
        gb_(out_ch, T(0)) {}

  Tensor<T> forward(const Tensor<T>& x, std::any& cache) override {
    cache = x;
    return kernels::conv2d_forward(x, w_, b_, geom_);
  }

  Tensor<T> backward(const Tensor<T>& gy, const std::any& cache) override {
    const auto& x = std::any_cast<const Tensor<T>&>(cache);
    kernels::conv2d_backward_weight(x, gy, geom_, gw_, &gb_);
    return kernels::conv2d_backward_input(gy, w_, x.h(), x.w(), geom_);
  }

  std::vector<ParamView<T>> params() override { return {{w_.data(), w_.size()}, {b_.data(), b_.size()}}; }
  std::vector<ParamView<T>> grads() override { return {{gw_.data(), gw_.size()}, {gb_.data(), gb_.size()}}; }

  void init_params(std::mt19937& rng, T mean, T stddev) override {
    w_.fill_gaussian(rng, mean, stddev);
    std::fill(b_.begin(), b_.end(), T(0));
  }

  Tensor<T>& weight() { return w_; }

 private:
  kernels::ConvGeom geom_;
  Tensor<T> w_, gw_;
  std::vector<T> b_, gb_;
};

template <typename T>
class ConvTranspose2d : public Layer<T> {
 public:
  ConvTranspose2d(int in_ch, int out_ch, int kernel, int stride, int pad, int out_pad)
      : geom_{kernel, stride, pad},
        out_pad_(out_pad),
        w_(in_ch, out_ch, kernel, kernel),
        gw_(in_ch, out_ch, kernel, kernel),
        b_(out_ch, T(0)),
        gb_(out_ch, T(0)) {}

  Tensor<T> forward(const Tensor<T>& x, std::any& cache) override {
    cache = x;
    return kernels::conv_transpose2d_forward(x, w_, b_, geom_, out_pad_);
  }

  Tensor<T> backward(const Tensor<T>& gy, const std::any& cache) override {
    const auto& x = std::any_cast<const Tensor<T>&>(cache);
    kernels::conv_transpose2d_backward_weight(x, gy, geom_, gw_, &gb_);
    return kernels::conv_transpose2d_backward_input(gy, w_, geom_);
  }

  std::vector<ParamView<T>> params() override { return {{w_.data(), w_.size()}, {b_.data(), b_.size()}}; }
  std::vector<ParamView<T>> grads() override { return {{gw_.data(), gw_.size()}, {gb_.data(), gb_.size()}}; }

  void init_params(std::mt19937& rng, T mean, T stddev) override {
    w_.fill_gaussian(rng, mean, stddev);
    std::fill(b_.begin(), b_.end(), T(0));
  }

  Tensor<T>& weight() { return w_; }

 private:
  kernels::ConvGeom geom_;
  int out_pad_;
  Tensor<T> w_, gw_;
  std::vector<T> b_, gb_;
};

template <typename T>
class InstanceNorm2d : public Layer<T> {
 public:
  explicit InstanceNorm2d(int channels, T eps = T(1e-5))
      : eps_(eps), gamma_(channels, T(1)), beta_(channels, T(0)), ggamma_(channels, T(0)), gbeta_(channels, T(0)) {}

  Tensor<T> forward(const Tensor<T>& x, std::any& cache) override {
    kernels::InstanceNormStats<T> stats;
    Tensor<T> y = kernels::instance_norm_forward(x, gamma_, beta_, eps_, &stats);
    cache = std::move(stats);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, const std::any& cache) override {
    const auto& stats = std::any_cast<const kernels::InstanceNormStats<T>&>(cache);
    return kernels::instance_norm_backward(gy, gamma_, stats, ggamma_, gbeta_);
  }

  std::vector<ParamView<T>> params() override {
    return {{gamma_.data(), gamma_.size()}, {beta_.data(), beta_.size()}};
  }
  std::vector<ParamView<T>> grads() override {
    return {{ggamma_.data(), ggamma_.size()}, {gbeta_.data(), gbeta_.size()}};
  }

  void init_params(std::mt19937&, T, T) override {
    std::fill(gamma_.begin(), gamma_.end(), T(1));
    std::fill(beta_.begin(), beta_.end(), T(0));
  }

 private:
  T eps_;
  std::vector<T> gamma_, beta_, ggamma_, gbeta_;
};

template <typename T>
class ReLU : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, std::any& cache) override {
    std::vector<uint8_t> mask(x.size());
    for (size_t i = 0; i < x.size(); ++i) mask[i] = x[i] > T(0);
    cache = std::move(mask);
    return kernels::relu_forward(x);
  }

  Tensor<T> backward(const Tensor<T>& gy, const std::any& cache) override {
    const auto& mask = std::any_cast<const std::vector<uint8_t>&>(cache);
    Tensor<T> gx = gy;
    for (size_t i = 0; i < gx.size(); ++i)
      if (!mask[i]) gx[i] = T(0);
    return gx;
  }
};

template <typename T>
class LeakyReLU : public Layer<T> {
 public:
  explicit LeakyReLU(T slope) : slope_(slope) {}

  Tensor<T> forward(const Tensor<T>& x, std::any& cache) override {
    std::vector<uint8_t> mask(x.size());
    for (size_t i = 0; i < x.size(); ++i) mask[i] = x[i] > T(0);
    cache = std::move(mask);
    return kernels::leaky_relu_forward(x, slope_);
  }

  Tensor<T> backward(const Tensor<T>& gy, const std::any& cache) override {
    const auto& mask = std::any_cast<const std::vector<uint8_t>&>(cache);
    Tensor<T> gx = gy;
    for (size_t i = 0; i < gx.size(); ++i)
      if (!mask[i]) gx[i] *= slope_;
    return gx;
  }

 private:
  T slope_;
};

template <typename T>
class Tanh : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, std::any& cache) override {
    Tensor<T> y = kernels::tanh_forward(x);
    cache = y;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, const std::any& cache) override {
    const auto& y = std::any_cast<const Tensor<T>&>(cache);
    Tensor<T> gx = gy;
    for (size_t i = 0; i < gx.size(); ++i) gx[i] *= (T(1) - y[i] * y[i]);
    return gx;
  }
};

template <typename T>
class ReflectPad2d : public Layer<T> {
 public:
  explicit ReflectPad2d(int pad) : pad_(pad) {}

  Tensor<T> forward(const Tensor<T>& x, std::any& cache) override {
    cache = std::pair<int, int>(x.h(), x.w());
    return kernels::reflect_pad_forward(x, pad_);
  }

  Tensor<T> backward(const Tensor<T>& gy, const std::any& cache) override {
    auto [h, w] = std::any_cast<std::pair<int, int>>(cache);
    return kernels::reflect_pad_backward(gy, pad_, h, w);
  }

 private:
  int pad_;
};

// body(x) + x, with matching shapes.
template <typename T>
class ResidualBlock : public Layer<T> {
 public:
  explicit ResidualBlock(Network<T> body) : body_(std::move(body)) {}

  Tensor<T> forward(const Tensor<T>& x, std::any& cache) override {
    Tape<T> tape;
    Tensor<T> y = body_.forward(x, tape);
    require(y.same_shape(x), "residual body must preserve shape");
    y.add_(x);
    cache = std::move(tape);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, const std::any& cache) override {
    const auto& tape = std::any_cast<const Tape<T>&>(cache);
    Tensor<T> gx = body_.backward(gy, tape);
    gx.add_(gy);
    return gx;
  }

  std::vector<ParamView<T>> params() override { return body_.params(); }
  std::vector<ParamView<T>> grads() override { return body_.grads(); }
  void init_params(std::mt19937& rng, T mean, T stddev) override { body_.init_params(rng, mean, stddev); }

  Network<T>& body() { return body_; }

 private:
  Network<T> body_;
};

}  // namespace csgan
