#pragma once

#include <cmath>
#include <map>
#include <string>

#include "csgan/networks.hpp"
#include "csgan/nn.hpp"
#include "csgan/tensor.hpp"

namespace csgan {

struct LossWeights {
  double lambda_a = 10.0;
  double lambda_b = 10.0;
  double mu_a = 30.0;
  double mu_b = 30.0;

  void validate() const {
    for (double v : {lambda_a, lambda_b, mu_a, mu_b})
      require(std::isfinite(v) && v >= 0.0, "loss weights must be finite and non-negative");
  }
};

struct LossBreakdown {
  double adv_a = 0, adv_b = 0;  // generator-side adversarial terms
  double cyc_a = 0, cyc_b = 0;
  double cs_a = 0, cs_b = 0;
  double d_a = 0, d_b = 0;  // discriminator-side terms
  std::map<std::string, double> extra;  // preset extras, already weighted
  double total_g = 0, total_d = 0;
};

enum class Method { gan, pix2pix, cyclegan, ps2gan, csgan };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::gan: return "gan";
    case Method::pix2pix: return "pix2pix";
    case Method::cyclegan: return "cyclegan";
    case Method::ps2gan: return "ps2gan";
    case Method::csgan: return "csgan";
  }
  return "?";
}

struct ObjectiveSpec {
  Method method = Method::csgan;
  LossWeights weights;
  std::map<std::string, double> extra_weights;  // e.g. "syn" (ps2gan), "pix_l1" (pix2pix)
  bool conditional_d = false;
  bool bidirectional = true;
  bool halve_d_loss = false;  // CycleGAN-style 0.5 factor, off by default
};

inline Method parse_method(const std::string& name) {
  if (name == "gan") return Method::gan;
  if (name == "pix2pix") return Method::pix2pix;
  if (name == "cyclegan") return Method::cyclegan;
  if (name == "ps2gan") return Method::ps2gan;
  if (name == "csgan") return Method::csgan;
  throw std::invalid_argument("unknown method '" + name + "' (valid: gan, pix2pix, cyclegan, ps2gan, csgan)");
}

inline ObjectiveSpec make_preset(Method m) {
  ObjectiveSpec s;
  s.method = m;
  switch (m) {
    case Method::gan:
      s.bidirectional = false;
      s.conditional_d = false;
      s.weights = {0, 0, 0, 0};
      break;
    case Method::pix2pix:
      s.bidirectional = false;
      s.conditional_d = true;
      s.weights = {0, 0, 0, 0};
      s.extra_weights["pix_l1"] = 100.0;
      break;
    case Method::cyclegan:
      s.weights = {10, 10, 0, 0};
      break;
    case Method::ps2gan:
      s.weights = {10, 10, 0, 0};
      s.extra_weights["syn"] = 10.0;
      break;
    case Method::csgan:
      s.weights = {10, 10, 30, 30};
      break;
  }
  return s;
}

inline ObjectiveSpec make_preset(const std::string& name) { return make_preset(parse_method(name)); }

// ---- scalar losses ---------------------------------------------------------

template <typename T>
double l1_loss(const Tensor<T>& x, const Tensor<T>& y) {
  require(x.same_shape(y), "l1_loss: shape mismatch " + x.shape_str() + " vs " + y.shape_str());
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += std::abs(static_cast<double>(x[i]) - static_cast<double>(y[i]));
  return s / static_cast<double>(x.size());
}

// d(l1_loss)/dx, scaled by `weight`.
template <typename T>
Tensor<T> l1_grad(const Tensor<T>& x, const Tensor<T>& y, double weight) {
  const double inv = weight / static_cast<double>(x.size());
  Tensor<T> g(x.n(), x.c(), x.h(), x.w());
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    g[i] = static_cast<T>(d > 0 ? inv : (d < 0 ? -inv : 0.0));
  }
  return g;
}

// CS loss: L1 between the synthesized and cycled images of one domain.
template <typename T>
double cs_loss(const Tensor<T>& syn, const Tensor<T>& cyc) {
  return l1_loss(syn, cyc);
}

// Cycle-consistency: L1 between the real and cycled images of one domain.
template <typename T>
double cycle_loss(const Tensor<T>& real, const Tensor<T>& cyc) {
  return l1_loss(real, cyc);
}

template <typename T>
double mean_sq_vs(const Tensor<T>& s, double target) {
  double acc = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    const double d = static_cast<double>(s[i]) - target;
    acc += d * d;
  }
  return acc / static_cast<double>(s.size());
}

// mean((D(real)-1)^2) + mean(D(fake)^2)
template <typename T>
double lsgan_d_loss(const Tensor<T>& scores_real, const Tensor<T>& scores_fake) {
  return mean_sq_vs(scores_real, 1.0) + mean_sq_vs(scores_fake, 0.0);
}

// mean((D(fake)-1)^2), discriminator frozen
template <typename T>
double lsgan_g_loss(const Tensor<T>& scores_fake) {
  return mean_sq_vs(scores_fake, 1.0);
}

// d(mean((s-target)^2))/ds, scaled by `weight`.
template <typename T>
Tensor<T> lsgan_grad(const Tensor<T>& s, double target, double weight) {
  const double scale = 2.0 * weight / static_cast<double>(s.size());
  Tensor<T> g(s.n(), s.c(), s.h(), s.w());
  for (size_t i = 0; i < s.size(); ++i) g[i] = static_cast<T>(scale * (static_cast<double>(s[i]) - target));
  return g;
}

inline void check_finite(double v, const std::string& term) {
  if (!std::isfinite(v)) throw std::runtime_error("non-finite value in loss term '" + term + "'");
}

// Fills total_g / total_d from components. Extras are already weighted.
inline LossBreakdown total_objective(LossBreakdown parts, const LossWeights& w) {
  w.validate();
  check_finite(parts.adv_a, "adv_A");
  check_finite(parts.adv_b, "adv_B");
  check_finite(parts.cyc_a, "cyc_A");
  check_finite(parts.cyc_b, "cyc_B");
  check_finite(parts.cs_a, "cs_A");
  check_finite(parts.cs_b, "cs_B");
  parts.total_g = parts.adv_a + parts.adv_b + w.lambda_a * parts.cyc_a + w.lambda_b * parts.cyc_b +
                  w.mu_a * parts.cs_a + w.mu_b * parts.cs_b;
  for (const auto& [name, v] : parts.extra) {
    check_finite(v, name);
    parts.total_g += v;
  }
  check_finite(parts.d_a, "d_A");
  check_finite(parts.d_b, "d_B");
  parts.total_d = parts.d_a + parts.d_b;
  return parts;
}

// ---- cycle pass ------------------------------------------------------------

template <typename T>
struct CyclePass {
  Tensor<T> syn_a, syn_b, cyc_a, cyc_b;
  Tape<T> tape_ab_syn, tape_ba_syn, tape_ba_cyc, tape_ab_cyc;
};

// Syn_B = G_AB(R_A), Syn_A = G_BA(R_B), Cyc_A = G_BA(Syn_B), Cyc_B = G_AB(Syn_A)
template <typename T>
CyclePass<T> forward_cycle(const ModelBundle<T>& b, const Tensor<T>& real_a, const Tensor<T>& real_b) {
  CyclePass<T> p;
  p.syn_b = b.g_ab.forward(real_a, p.tape_ab_syn);
  p.syn_a = b.g_ba.forward(real_b, p.tape_ba_syn);
  p.cyc_a = b.g_ba.forward(p.syn_b, p.tape_ba_cyc);
  p.cyc_b = b.g_ab.forward(p.syn_a, p.tape_ab_cyc);
  return p;
}

// ---- helpers for conditional discriminators --------------------------------

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.n() == b.n() && a.h() == b.h() && a.w() == b.w(), "concat_channels: spatial/batch mismatch");
  Tensor<T> out(a.n(), a.c() + b.c(), a.h(), a.w());
  const size_t sa = static_cast<size_t>(a.c()) * a.h() * a.w();
  const size_t sb = static_cast<size_t>(b.c()) * b.h() * b.w();
  for (int n = 0; n < a.n(); ++n) {
    std::copy(a.data() + n * sa, a.data() + (n + 1) * sa, out.data() + n * (sa + sb));
    std::copy(b.data() + n * sb, b.data() + (n + 1) * sb, out.data() + n * (sa + sb) + sa);
  }
  return out;
}

// Second-half channel slice of a gradient w.r.t. a concatenated input.
template <typename T>
Tensor<T> second_half_channels(const Tensor<T>& g, int c_first) {
  const int c2 = g.c() - c_first;
  Tensor<T> out(g.n(), c2, g.h(), g.w());
  const size_t s1 = static_cast<size_t>(c_first) * g.h() * g.w();
  const size_t s2 = static_cast<size_t>(c2) * g.h() * g.w();
  for (int n = 0; n < g.n(); ++n)
    std::copy(g.data() + n * (s1 + s2) + s1, g.data() + (n + 1) * (s1 + s2), out.data() + n * s2);
  return out;
}

// ---- generator update graph ------------------------------------------------

// Computes every generator-side loss for the preset and, when `do_backward`,
// accumulates gradients into both generators. Backprop through the
// discriminators also touches their gradient buffers; the trainer zeroes
// those before the discriminator update.
template <typename T>
LossBreakdown generator_losses(ModelBundle<T>& m, const Tensor<T>& real_a, const Tensor<T>& real_b,
                               const ObjectiveSpec& spec, CyclePass<T>* out_pass = nullptr, bool do_backward = true) {
  spec.weights.validate();
  LossBreakdown parts;

  if (!spec.bidirectional) {
    // A->B only: Syn_B = G_AB(R_A); adversarial against D_B (optionally
    // conditioned on the input image), plus the pix2pix L1 when configured.
    Tape<T> tape_g;
    Tensor<T> syn_b = m.g_ab.forward(real_a, tape_g);
    Tensor<T> d_in = spec.conditional_d ? concat_channels(real_a, syn_b) : syn_b;
    Tape<T> tape_d;
    Tensor<T> scores = m.d_b.forward(d_in, tape_d);
    parts.adv_b = lsgan_g_loss(scores);

    auto it = spec.extra_weights.find("pix_l1");
    const double w_pix = it == spec.extra_weights.end() ? 0.0 : it->second;
    if (w_pix > 0) parts.extra["pix_l1"] = w_pix * l1_loss(syn_b, real_b);

    if (do_backward) {
      Tensor<T> g_din = m.d_b.backward(lsgan_grad(scores, 1.0, 1.0), tape_d);
      Tensor<T> g_syn = spec.conditional_d ? second_half_channels(g_din, real_a.c()) : std::move(g_din);
      if (w_pix > 0) g_syn.add_(l1_grad(syn_b, real_b, w_pix));
      m.g_ab.backward(g_syn, tape_g);
    }
    if (out_pass) out_pass->syn_b = std::move(syn_b);
    return total_objective(std::move(parts), spec.weights);
  }

  CyclePass<T> p = forward_cycle(m, real_a, real_b);

  Tape<T> tape_da, tape_db;
  Tensor<T> scores_a = m.d_a.forward(p.syn_a, tape_da);
  Tensor<T> scores_b = m.d_b.forward(p.syn_b, tape_db);
  parts.adv_a = lsgan_g_loss(scores_a);
  parts.adv_b = lsgan_g_loss(scores_b);
  parts.cyc_a = cycle_loss(real_a, p.cyc_a);
  parts.cyc_b = cycle_loss(real_b, p.cyc_b);
  parts.cs_a = cs_loss(p.syn_a, p.cyc_a);
  parts.cs_b = cs_loss(p.syn_b, p.cyc_b);

  auto it = spec.extra_weights.find("syn");
  const double w_syn = it == spec.extra_weights.end() ? 0.0 : it->second;
  if (w_syn > 0) {
    parts.extra["syn_A"] = w_syn * l1_loss(real_a, p.syn_a);
    parts.extra["syn_B"] = w_syn * l1_loss(real_b, p.syn_b);
  }

  if (do_backward) {
    const auto& w = spec.weights;
    // dL/dCyc: cycle term plus the CS term's cycled side
    Tensor<T> g_cyc_a = l1_grad(p.cyc_a, real_a, w.lambda_a);
    if (w.mu_a > 0) g_cyc_a.add_(l1_grad(p.cyc_a, p.syn_a, w.mu_a));
    Tensor<T> g_cyc_b = l1_grad(p.cyc_b, real_b, w.lambda_b);
    if (w.mu_b > 0) g_cyc_b.add_(l1_grad(p.cyc_b, p.syn_b, w.mu_b));

    // back through the second generator application, into the syn images
    Tensor<T> g_syn_b = m.g_ba.backward(g_cyc_a, p.tape_ba_cyc);
    Tensor<T> g_syn_a = m.g_ab.backward(g_cyc_b, p.tape_ab_cyc);

    // CS term's synthesized side
    if (w.mu_a > 0) g_syn_a.add_(l1_grad(p.syn_a, p.cyc_a, w.mu_a));
    if (w.mu_b > 0) g_syn_b.add_(l1_grad(p.syn_b, p.cyc_b, w.mu_b));

    // ps2gan synthesized terms
    if (w_syn > 0) {
      g_syn_a.add_(l1_grad(p.syn_a, real_a, w_syn));
      g_syn_b.add_(l1_grad(p.syn_b, real_b, w_syn));
    }

    // adversarial terms, discriminators as frozen scorers
    g_syn_a.add_(m.d_a.backward(lsgan_grad(scores_a, 1.0, 1.0), tape_da));
    g_syn_b.add_(m.d_b.backward(lsgan_grad(scores_b, 1.0, 1.0), tape_db));

    m.g_ab.backward(g_syn_b, p.tape_ab_syn);
    m.g_ba.backward(g_syn_a, p.tape_ba_syn);
  }
  if (out_pass) *out_pass = std::move(p);
  return total_objective(std::move(parts), spec.weights);
}

// Discriminator losses on detached fakes; accumulates D gradients when
// `do_backward`. Returns per-discriminator LSGAN values.
template <typename T>
std::pair<double, double> discriminator_losses(ModelBundle<T>& m, const Tensor<T>& real_a, const Tensor<T>& real_b,
                                               const CyclePass<T>& fakes, const ObjectiveSpec& spec,
                                               bool do_backward = true) {
  const double scale = spec.halve_d_loss ? 0.5 : 1.0;
  double loss_a = 0, loss_b = 0;

  auto run = [&](Network<T>& d, const Tensor<T>& real_in, const Tensor<T>& fake_in) {
    Tape<T> t_real, t_fake;
    Tensor<T> s_real = d.forward(real_in, t_real);
    Tensor<T> s_fake = d.forward(fake_in, t_fake);
    const double loss = scale * lsgan_d_loss(s_real, s_fake);
    if (do_backward) {
      d.backward(lsgan_grad(s_real, 1.0, scale), t_real);
      d.backward(lsgan_grad(s_fake, 0.0, scale), t_fake);
    }
    return loss;
  };

  if (spec.bidirectional) {
    loss_a = run(m.d_a, real_a, fakes.syn_a);
    loss_b = run(m.d_b, real_b, fakes.syn_b);
  } else {
    const Tensor<T>& real_in = spec.conditional_d ? concat_channels(real_a, real_b) : real_b;
    const Tensor<T>& fake_in = spec.conditional_d ? concat_channels(real_a, fakes.syn_b) : fakes.syn_b;
    loss_b = run(m.d_b, real_in, fake_in);
  }
  check_finite(loss_a, "d_A");
  check_finite(loss_b, "d_B");
  return {loss_a, loss_b};
}

}  // namespace csgan
