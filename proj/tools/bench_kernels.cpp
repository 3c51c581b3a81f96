// Timing comparison of the serial reference kernels against the tiled
// OpenMP kernels used in training.

#include <chrono>
#include <cstdio>
#include <random>

#include "csgan/kernels/conv.hpp"
#include "csgan/kernels/ref.hpp"

using namespace csgan;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e30;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = clock_type::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void bench_conv(int ci, int co, int hw, int k, int stride, int reps_ref, int reps_fast) {
  std::mt19937 rng(7);
  Tensor<float> x(1, ci, hw, hw), w(co, ci, k, k);
  x.fill_gaussian(rng, 0.f, 1.f);
  w.fill_gaussian(rng, 0.f, 0.1f);
  std::vector<float> bias(co, 0.1f);
  const kernels::ConvGeom g{k, stride, k / 2};

  const int ho = kernels::conv_out_size(hw, g);
  const double flops = 2.0 * co * ho * ho * ci * k * k;
  const double t_ref = time_best_of(reps_ref, [&] { kernels::ref::conv2d_forward(x, w, bias, g); });
  const double t_fast = time_best_of(reps_fast, [&] { kernels::conv2d_forward(x, w, bias, g); });
  std::printf("conv %3dx%-3d %3dpx k%d s%d | ref %8.2f ms (%6.2f GFLOP/s) | tiled %8.2f ms (%6.2f GFLOP/s) | x%.1f\n",
              ci, co, hw, k, stride, 1e3 * t_ref, flops / t_ref / 1e9, 1e3 * t_fast, flops / t_fast / 1e9,
              t_ref / t_fast);
}

void bench_gemm(int m, int n, int kk) {
  std::mt19937 rng(7);
  std::vector<float> a(static_cast<size_t>(m) * kk), b(static_cast<size_t>(kk) * n), c(static_cast<size_t>(m) * n);
  std::normal_distribution<float> dist;
  for (auto& v : a) v = dist(rng);
  for (auto& v : b) v = dist(rng);
  const double flops = 2.0 * m * n * kk;
  const double t_ref = time_best_of(3, [&] { kernels::ref::gemm(m, n, kk, a.data(), b.data(), c.data()); });
  const double t_fast = time_best_of(5, [&] { kernels::gemm(m, n, kk, a.data(), b.data(), c.data()); });
  std::printf("gemm %4dx%-4dx%-4d        | ref %8.2f ms (%6.2f GFLOP/s) | tiled %8.2f ms (%6.2f GFLOP/s) | x%.1f\n",
              m, n, kk, 1e3 * t_ref, flops / t_ref / 1e9, 1e3 * t_fast, flops / t_fast / 1e9, t_ref / t_fast);
}

}  // namespace

int main() {
  std::printf("-- GEMM --\n");
  bench_gemm(256, 1024, 2304);
  bench_gemm(512, 256, 512);
  std::printf("-- convolution (generator-shaped workloads) --\n");
  bench_conv(3, 64, 256, 7, 1, 1, 3);
  bench_conv(64, 128, 128, 3, 2, 1, 3);
  bench_conv(256, 256, 64, 3, 1, 1, 3);
  bench_conv(256, 256, 16, 3, 1, 3, 5);
  return 0;
}
