#pragma once

#include <cmath>
#include <vector>

#include "csgan/nn.hpp"

namespace csgan {

// Adam over a fixed set of parameter/gradient buffers. Moments are kept in
// double so float training still gets a stable accumulator.
template <typename T>
class Adam {
 public:
  Adam(std::vector<ParamView<T>> params, std::vector<ParamView<T>> grads, double beta1 = 0.5, double beta2 = 0.999,
       double eps = 1e-8)
      : params_(std::move(params)), grads_(std::move(grads)), beta1_(beta1), beta2_(beta2), eps_(eps) {
    require(params_.size() == grads_.size(), "param/grad buffer count mismatch");
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) {
      require(params_[i].size == grads_[i].size, "param/grad buffer size mismatch");
      m_[i].assign(params_[i].size, 0.0);
      v_[i].assign(params_[i].size, 0.0);
    }
  }

  void step(double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (size_t i = 0; i < params_.size(); ++i) {
      T* p = params_[i].data;
      const T* g = grads_[i].data;
      double* m = m_[i].data();
      double* v = v_[i].data();
      for (size_t j = 0; j < params_[i].size; ++j) {
        const double gj = static_cast<double>(g[j]);
        m[j] = beta1_ * m[j] + (1.0 - beta1_) * gj;
        v[j] = beta2_ * v[j] + (1.0 - beta2_) * gj * gj;
        const double mhat = m[j] / bc1;
        const double vhat = v[j] / bc2;
        p[j] = static_cast<T>(static_cast<double>(p[j]) - lr * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  int64_t t() const { return t_; }
  void set_t(int64_t t) { t_ = t; }
  std::vector<std::vector<double>>& moments1() { return m_; }
  std::vector<std::vector<double>>& moments2() { return v_; }

 private:
  std::vector<ParamView<T>> params_, grads_;
  double beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace csgan
