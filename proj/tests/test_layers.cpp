#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "csgan/networks.hpp"
#include "csgan/nn.hpp"

using namespace csgan;

namespace {

// Scalar probe loss: <y, r> for a fixed random r, so dL/dy = r.
struct Probe {
  Tensor<double> r;
  explicit Probe(const Tensor<double>& y, uint32_t seed) : r(y.n(), y.c(), y.h(), y.w()) {
    std::mt19937 rng(seed);
    r.fill_gaussian(rng, 0.0, 1.0);
  }
  double loss(const Tensor<double>& y) const {
    double s = 0;
    for (size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
    return s;
  }
};

// Central-difference check of every parameter and the input of `net`.
void gradcheck(Network<double>& net, Tensor<double> x, uint32_t seed, double tol = 1e-6, int max_checks = 40) {
  std::mt19937 rng(seed);
  x.fill_gaussian(rng, 0.0, 1.0);
  Tape<double> tape;
  Tensor<double> y = net.forward(x, tape);
  Probe probe(y, seed + 1);

  net.zero_grad();
  Tensor<double> gx = net.backward(probe.r, tape);

  const double h = 1e-6;
  auto params = net.params();
  auto grads = net.grads();
  std::uniform_int_distribution<size_t> pick_buf(0, params.size() - 1);
  for (int check = 0; check < max_checks; ++check) {
    const size_t b = params.empty() ? 0 : pick_buf(rng);
    double *p, analytic;
    if (!params.empty() && check % 2 == 0) {
      std::uniform_int_distribution<size_t> pick(0, params[b].size - 1);
      const size_t j = pick(rng);
      p = params[b].data + j;
      analytic = grads[b].data[j];
    } else {
      std::uniform_int_distribution<size_t> pick(0, x.size() - 1);
      const size_t j = pick(rng);
      p = &x[j];
      analytic = gx[j];
    }
    const double orig = *p;
    *p = orig + h;
    const double lp = probe.loss(net.forward(x));
    *p = orig - h;
    const double lm = probe.loss(net.forward(x));
    *p = orig;
    const double numeric = (lp - lm) / (2 * h);
    CHECK(analytic == doctest::Approx(numeric).epsilon(tol).scale(1.0));
  }
}

}  // namespace

TEST_CASE("conv2d gradients") {
  Network<double> net;
  net.add<Conv2d<double>>(3, 4, 3, 1, 1);
  std::mt19937 rng(1);
  net.init_params(rng, 0.0, 0.2);
  gradcheck(net, Tensor<double>(2, 3, 6, 6), 11);
}

TEST_CASE("strided conv2d gradients") {
  Network<double> net;
  net.add<Conv2d<double>>(2, 3, 4, 2, 1);
  std::mt19937 rng(2);
  net.init_params(rng, 0.0, 0.2);
  gradcheck(net, Tensor<double>(1, 2, 8, 8), 12);
}

TEST_CASE("conv transpose gradients") {
  Network<double> net;
  net.add<ConvTranspose2d<double>>(3, 2, 3, 2, 1, 1);
  std::mt19937 rng(3);
  net.init_params(rng, 0.0, 0.2);
  gradcheck(net, Tensor<double>(2, 3, 5, 5), 13);
}

TEST_CASE("instance norm gradients") {
  Network<double> net;
  net.add<InstanceNorm2d<double>>(3);
  gradcheck(net, Tensor<double>(2, 3, 5, 5), 14, 1e-5);
}

TEST_CASE("activation and pad gradients") {
  Network<double> net;
  net.add<ReflectPad2d<double>>(1);
  net.add<Conv2d<double>>(2, 2, 3, 1, 0);
  net.add<LeakyReLU<double>>(0.2);
  net.add<Tanh<double>>();
  std::mt19937 rng(5);
  net.init_params(rng, 0.0, 0.3);
  gradcheck(net, Tensor<double>(1, 2, 6, 6), 15);
}

TEST_CASE("residual block gradients and zero-weight identity") {
  Network<double> body;
  body.add<ReflectPad2d<double>>(1);
  body.add<Conv2d<double>>(2, 2, 3, 1, 0);
  body.add<InstanceNorm2d<double>>(2);
  body.add<ReLU<double>>();
  body.add<ReflectPad2d<double>>(1);
  body.add<Conv2d<double>>(2, 2, 3, 1, 0);
  body.add<InstanceNorm2d<double>>(2);
  Network<double> net;
  net.add<ResidualBlock<double>>(std::move(body));
  std::mt19937 rng(6);
  net.init_params(rng, 0.0, 0.3);
  gradcheck(net, Tensor<double>(1, 2, 6, 6), 16, 1e-5);

  // zero every weight: the block must become the identity map
  for (auto p : net.params()) std::fill(p.data, p.data + p.size, 0.0);
  Tensor<double> x(1, 2, 6, 6);
  std::mt19937 rng2(7);
  x.fill_gaussian(rng2, 0.0, 1.0);
  Tensor<double> y = net.forward(x);
  for (size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("full small generator gradcheck") {
  GeneratorConfig cfg;
  cfg.base_width = 4;
  cfg.n_residual_blocks = 1;
  cfg.image_size = 8;
  Network<double> net = build_generator<double>(cfg);
  std::mt19937 rng(8);
  net.init_params(rng, 0.0, 0.2);
  gradcheck(net, Tensor<double>(1, 3, 8, 8), 18, 1e-4, 20);
}

TEST_CASE("small discriminator gradcheck") {
  DiscriminatorConfig cfg;
  cfg.widths = {4, 8, 16, 32};
  Network<double> net = build_discriminator<double>(cfg, 16);
  std::mt19937 rng(9);
  net.init_params(rng, 0.0, 0.2);
  gradcheck(net, Tensor<double>(1, 3, 16, 16), 19, 1e-4, 20);
}
