#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "csgan/objectives.hpp"

using namespace csgan;

namespace {

template <typename T>
Tensor<T> from_values(std::initializer_list<T> vals) {
  Tensor<T> t(1, 1, 1, int(vals.size()));
  std::copy(vals.begin(), vals.end(), t.data());
  return t;
}

ModelBundle<double> tiny_bundle(uint32_t seed) {
  GeneratorConfig g;
  g.base_width = 4;
  g.n_residual_blocks = 1;
  g.image_size = 8;
  DiscriminatorConfig d;
  d.widths = {4, 8, 16, 32};
  auto b = build_bundle<double>(g, d);
  init_bundle(b, 0.0, 0.2, seed);
  return b;
}

Tensor<double> random_image(uint32_t seed, int c = 3, int hw = 8) {
  Tensor<double> t(1, c, hw, hw);
  std::mt19937 rng(seed);
  t.fill_gaussian(rng, 0.0, 0.5);
  return t;
}

}  // namespace

TEST_CASE("l1 loss and gradient on hand values") {
  auto x = from_values<double>({1, 3});
  auto y = from_values<double>({2, 5});
  CHECK(l1_loss(x, y) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(l1_loss(x, x) == 0.0);

  auto g = l1_grad(x, y, 4.0);  // sign(x-y) * 4 / 2
  CHECK(g[0] == doctest::Approx(-2.0));
  CHECK(g[1] == doctest::Approx(-2.0));
  auto g2 = l1_grad(y, x, 1.0);
  CHECK(g2[0] == doctest::Approx(0.5));
  auto gz = l1_grad(x, x, 1.0);
  CHECK(gz[0] == 0.0);
}

TEST_CASE("lsgan losses on hand values") {
  auto half = from_values<double>({0.5, 0.5});
  CHECK(lsgan_g_loss(half) == doctest::Approx(0.25).epsilon(1e-12));

  auto real = from_values<double>({0.8, 0.8});
  auto fake = from_values<double>({0.3, 0.3});
  // (0.8-1)^2 + 0.3^2
  CHECK(lsgan_d_loss(real, fake) == doctest::Approx(0.04 + 0.09).epsilon(1e-12));

  // perfect discriminator: zero loss
  auto ones = from_values<double>({1.0});
  auto zeros = from_values<double>({0.0});
  CHECK(lsgan_d_loss(ones, zeros) == 0.0);
  CHECK(lsgan_g_loss(ones) == 0.0);

  auto g = lsgan_grad(fake, 1.0, 3.0);  // 2*3*(0.3-1)/2
  CHECK(g[0] == doctest::Approx(-2.1).epsilon(1e-12));
}

TEST_CASE("total objective combines weighted terms") {
  LossBreakdown p;
  p.adv_a = 1.0;
  p.adv_b = 2.0;
  p.cyc_a = 0.5;
  p.cyc_b = 0.25;
  p.cs_a = 0.1;
  p.cs_b = 0.2;
  p.d_a = 0.7;
  p.d_b = 0.3;
  LossWeights w{10, 10, 30, 30};
  auto out = total_objective(p, w);
  CHECK(out.total_g == doctest::Approx(1 + 2 + 10 * 0.5 + 10 * 0.25 + 30 * 0.1 + 30 * 0.2).epsilon(1e-12));
  CHECK(out.total_d == doctest::Approx(1.0).epsilon(1e-12));

  // zero weights null everything but the adversarial terms
  auto bare = total_objective(p, LossWeights{0, 0, 0, 0});
  CHECK(bare.total_g == doctest::Approx(3.0).epsilon(1e-12));

  // extras are pre-weighted and added verbatim
  p.extra["syn_A"] = 5.0;
  CHECK(total_objective(p, w).total_g == doctest::Approx(out.total_g + 5.0).epsilon(1e-12));

  p.extra.clear();
  p.cs_a = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH(total_objective(p, w), doctest::Contains("cs_A"));
}

TEST_CASE("weights must be finite and non-negative") {
  LossWeights w;
  w.lambda_a = -1;
  CHECK_THROWS(w.validate());
  w.lambda_a = std::numeric_limits<double>::infinity();
  CHECK_THROWS(w.validate());
}

TEST_CASE("presets") {
  auto cs = make_preset("csgan");
  CHECK(cs.weights.lambda_a == 10.0);
  CHECK(cs.weights.mu_a == 30.0);
  CHECK(cs.bidirectional);
  CHECK_FALSE(cs.conditional_d);

  auto cy = make_preset(Method::cyclegan);
  CHECK(cy.weights.lambda_b == 10.0);
  CHECK(cy.weights.mu_b == 0.0);
  CHECK(cy.extra_weights.empty());

  auto ps = make_preset(Method::ps2gan);
  CHECK(ps.weights.mu_a == 0.0);
  CHECK(ps.extra_weights.at("syn") == 10.0);

  auto px = make_preset(Method::pix2pix);
  CHECK_FALSE(px.bidirectional);
  CHECK(px.conditional_d);
  CHECK(px.extra_weights.at("pix_l1") == 100.0);

  auto plain = make_preset(Method::gan);
  CHECK_FALSE(plain.bidirectional);
  CHECK_FALSE(plain.conditional_d);
  CHECK(plain.extra_weights.empty());

  CHECK_THROWS_WITH(parse_method("dcgan"), doctest::Contains("cyclegan"));
}

TEST_CASE("cycle pass definitions") {
  auto m = tiny_bundle(100);
  auto ra = random_image(101);
  auto rb = random_image(102);
  auto p = forward_cycle(m, ra, rb);
  // syn/cyc must match direct generator applications
  Tensor<double> syn_b = m.g_ab.forward(ra);
  Tensor<double> cyc_a = m.g_ba.forward(syn_b);
  for (size_t i = 0; i < syn_b.size(); ++i) {
    CHECK(p.syn_b[i] == doctest::Approx(syn_b[i]).epsilon(1e-12));
    CHECK(p.cyc_a[i] == doctest::Approx(cyc_a[i]).epsilon(1e-12));
  }
}

TEST_CASE("concat and slice helpers") {
  auto a = random_image(110, 2, 4);
  auto b = random_image(111, 3, 4);
  auto c = concat_channels(a, b);
  CHECK(c.c() == 5);
  CHECK(c.at(0, 0, 1, 2) == a.at(0, 0, 1, 2));
  CHECK(c.at(0, 2, 3, 3) == b.at(0, 0, 3, 3));
  auto back = second_half_channels(c, 2);
  for (size_t i = 0; i < b.size(); ++i) CHECK(back[i] == b[i]);
}

TEST_CASE("csgan objective with mu=0 reduces to cyclegan") {
  auto m1 = tiny_bundle(7);
  auto m2 = tiny_bundle(7);
  auto ra = random_image(8);
  auto rb = random_image(9);

  auto cs = make_preset(Method::csgan);
  cs.weights.mu_a = cs.weights.mu_b = 0.0;
  auto cy = make_preset(Method::cyclegan);

  auto l1 = generator_losses(m1, ra, rb, cs, static_cast<CyclePass<double>*>(nullptr), false);
  auto l2 = generator_losses(m2, ra, rb, cy, static_cast<CyclePass<double>*>(nullptr), false);
  CHECK(std::abs(l1.total_g - l2.total_g) < 1e-9);
  CHECK(l1.adv_a == doctest::Approx(l2.adv_a).epsilon(1e-12));
  CHECK(l1.cyc_b == doctest::Approx(l2.cyc_b).epsilon(1e-12));
}

TEST_CASE("total_g is affine in mu with slope cs") {
  auto m = tiny_bundle(20);
  auto ra = random_image(21);
  auto rb = random_image(22);
  auto spec = make_preset(Method::csgan);
  auto base = generator_losses(m, ra, rb, spec, static_cast<CyclePass<double>*>(nullptr), false);
  spec.weights.mu_a += 2.5;
  auto bumped = generator_losses(m, ra, rb, spec, static_cast<CyclePass<double>*>(nullptr), false);
  CHECK(bumped.total_g - base.total_g == doctest::Approx(2.5 * base.cs_a).epsilon(1e-9));
  CHECK(bumped.cs_a == doctest::Approx(base.cs_a).epsilon(1e-12));
}

namespace {

// Finite-difference check of the full generator objective against the
// gradients accumulated by generator_losses.
void objective_gradcheck(const ObjectiveSpec& spec, uint32_t seed, int checks = 8) {
  auto m = tiny_bundle(seed);
  auto ra = random_image(seed + 1);
  auto rb = random_image(seed + 2);

  m.g_ab.zero_grad();
  m.g_ba.zero_grad();
  m.d_a.zero_grad();
  m.d_b.zero_grad();
  generator_losses(m, ra, rb, spec, static_cast<CyclePass<double>*>(nullptr), true);

  std::mt19937 rng(seed + 3);
  const double h = 1e-6;
  for (Network<double>* net : {&m.g_ab, &m.g_ba}) {
    auto params = net->params();
    auto grads = net->grads();
    std::uniform_int_distribution<size_t> pick_buf(0, params.size() - 1);
    for (int c = 0; c < checks; ++c) {
      const size_t b = pick_buf(rng);
      std::uniform_int_distribution<size_t> pick(0, params[b].size - 1);
      const size_t j = pick(rng);
      const double orig = params[b].data[j];
      params[b].data[j] = orig + h;
      const double lp = generator_losses(m, ra, rb, spec, static_cast<CyclePass<double>*>(nullptr), false).total_g;
      params[b].data[j] = orig - h;
      const double lm = generator_losses(m, ra, rb, spec, static_cast<CyclePass<double>*>(nullptr), false).total_g;
      params[b].data[j] = orig;
      const double numeric = (lp - lm) / (2 * h);
      CHECK(grads[b].data[j] == doctest::Approx(numeric).epsilon(2e-4).scale(1.0));
    }
  }
}

}  // namespace

TEST_CASE("generator objective gradients: csgan") { objective_gradcheck(make_preset(Method::csgan), 30); }

TEST_CASE("generator objective gradients: cyclegan") { objective_gradcheck(make_preset(Method::cyclegan), 40); }

TEST_CASE("generator objective gradients: ps2gan") { objective_gradcheck(make_preset(Method::ps2gan), 50); }

TEST_CASE("generator objective gradients: pix2pix (conditional)") {
  // unidirectional path with a 6-channel conditional discriminator
  GeneratorConfig g;
  g.base_width = 4;
  g.n_residual_blocks = 1;
  g.image_size = 8;
  DiscriminatorConfig d;
  d.in_channels = 6;
  d.widths = {4, 8, 16, 32};
  auto m = build_bundle<double>(g, d);
  init_bundle(m, 0.0, 0.2, 60u);
  auto ra = random_image(61);
  auto rb = random_image(62);
  auto spec = make_preset(Method::pix2pix);

  m.g_ab.zero_grad();
  m.d_b.zero_grad();
  generator_losses(m, ra, rb, spec, static_cast<CyclePass<double>*>(nullptr), true);

  std::mt19937 rng(63);
  auto params = m.g_ab.params();
  auto grads = m.g_ab.grads();
  const double h = 1e-6;
  std::uniform_int_distribution<size_t> pick_buf(0, params.size() - 1);
  for (int c = 0; c < 8; ++c) {
    const size_t b = pick_buf(rng);
    std::uniform_int_distribution<size_t> pick(0, params[b].size - 1);
    const size_t j = pick(rng);
    const double orig = params[b].data[j];
    params[b].data[j] = orig + h;
    const double lp = generator_losses(m, ra, rb, spec, static_cast<CyclePass<double>*>(nullptr), false).total_g;
    params[b].data[j] = orig - h;
    const double lm = generator_losses(m, ra, rb, spec, static_cast<CyclePass<double>*>(nullptr), false).total_g;
    params[b].data[j] = orig;
    CHECK(grads[b].data[j] == doctest::Approx((lp - lm) / (2 * h)).epsilon(2e-4).scale(1.0));
  }
}

TEST_CASE("discriminator objective gradients") {
  auto m = tiny_bundle(70);
  auto ra = random_image(71);
  auto rb = random_image(72);
  auto spec = make_preset(Method::csgan);
  CyclePass<double> fakes;
  generator_losses(m, ra, rb, spec, &fakes, false);

  m.d_a.zero_grad();
  m.d_b.zero_grad();
  discriminator_losses(m, ra, rb, fakes, spec, true);

  std::mt19937 rng(73);
  const double h = 1e-6;
  for (Network<double>* net : {&m.d_a, &m.d_b}) {
    auto params = net->params();
    auto grads = net->grads();
    std::uniform_int_distribution<size_t> pick_buf(0, params.size() - 1);
    for (int c = 0; c < 6; ++c) {
      const size_t b = pick_buf(rng);
      std::uniform_int_distribution<size_t> pick(0, params[b].size - 1);
      const size_t j = pick(rng);
      const double orig = params[b].data[j];
      params[b].data[j] = orig + h;
      auto [pa, pb] = discriminator_losses(m, ra, rb, fakes, spec, false);
      params[b].data[j] = orig - h;
      auto [ma, mb] = discriminator_losses(m, ra, rb, fakes, spec, false);
      params[b].data[j] = orig;
      const double numeric = ((pa + pb) - (ma + mb)) / (2 * h);
      CHECK(grads[b].data[j] == doctest::Approx(numeric).epsilon(2e-4).scale(1.0));
    }
  }
}

TEST_CASE("halve_d_loss scales discriminator terms by one half") {
  auto m = tiny_bundle(80);
  auto ra = random_image(81);
  auto rb = random_image(82);
  auto spec = make_preset(Method::csgan);
  CyclePass<double> fakes;
  generator_losses(m, ra, rb, spec, &fakes, false);

  auto [a1, b1] = discriminator_losses(m, ra, rb, fakes, spec, false);
  spec.halve_d_loss = true;
  auto [a2, b2] = discriminator_losses(m, ra, rb, fakes, spec, false);
  CHECK(a2 == doctest::Approx(0.5 * a1).epsilon(1e-12));
  CHECK(b2 == doctest::Approx(0.5 * b1).epsilon(1e-12));
}
