#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace csgan {

// Dense 4-D tensor, NCHW layout. Lower-rank data uses size-1 leading dims.
template <typename T>
class Tensor {
 public:
  Tensor() : dims_{0, 0, 0, 0} {}
  Tensor(int n, int c, int h, int w) : dims_{n, c, h, w}, data_(static_cast<size_t>(n) * c * h * w, T(0)) {}

  static Tensor full(int n, int c, int h, int w, T value) {
    Tensor t(n, c, h, w);
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
  }

  int n() const { return dims_[0]; }
  int c() const { return dims_[1]; }
  int h() const { return dims_[2]; }
  int w() const { return dims_[3]; }
  const std::array<int, 4>& dims() const { return dims_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& vec() { return data_; }
  const std::vector<T>& vec() const { return data_; }

  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }

  T& at(int n, int c, int h, int w) {
    return data_[((static_cast<size_t>(n) * dims_[1] + c) * dims_[2] + h) * dims_[3] + w];
  }
  const T& at(int n, int c, int h, int w) const {
    return data_[((static_cast<size_t>(n) * dims_[1] + c) * dims_[2] + h) * dims_[3] + w];
  }

  bool same_shape(const Tensor& o) const { return dims_ == o.dims_; }

  void zero() { std::fill(data_.begin(), data_.end(), T(0)); }

  void add_(const Tensor& o) {
    assert(same_shape(o));
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  }

  void scale_(T s) {
    for (auto& v : data_) v *= s;
  }

  void fill_gaussian(std::mt19937& rng, T mean, T stddev) {
    std::normal_distribution<double> dist(static_cast<double>(mean), static_cast<double>(stddev));
    for (auto& v : data_) v = static_cast<T>(dist(rng));
  }

  std::string shape_str() const {
    return std::to_string(dims_[0]) + "x" + std::to_string(dims_[1]) + "x" + std::to_string(dims_[2]) + "x" +
           std::to_string(dims_[3]);
  }

 private:
  std::array<int, 4> dims_;
  std::vector<T> data_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace csgan
