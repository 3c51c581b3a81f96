#pragma once

#include <iostream>
#include <random>
#include <vector>

#include "csgan/nn.hpp"

namespace csgan {

struct GeneratorConfig {
  int in_channels = 3;
  int out_channels = 3;
  int base_width = 64;
  int n_residual_blocks = 9;
  int image_size = 256;

  void validate() const {
    require(n_residual_blocks >= 1, "n_residual_blocks must be >= 1");
    require(base_width >= 1, "base_width must be >= 1");
    require(image_size % 4 == 0, "image_size must be divisible by 4 (two stride-2 stages must invert exactly)");
  }

  bool operator==(const GeneratorConfig&) const = default;
};

struct DiscriminatorConfig {
  int in_channels = 3;  // 6 for conditional presets
  std::vector<int> widths = {64, 128, 256, 512};
  int kernel = 4;
  double leaky_slope = 0.2;

  void validate() const {
    require(!widths.empty(), "discriminator needs at least one layer");
    for (size_t i = 1; i < widths.size(); ++i) require(widths[i] > widths[i - 1], "widths must be strictly increasing");
    require(leaky_slope > 0.0 && leaky_slope < 1.0, "leaky_slope must be in (0,1)");
  }

  bool operator==(const DiscriminatorConfig&) const = default;
};

// Strides of the discriminator stack: three stride-2 layers, then
// stride-1 layers (including the final 1-channel scorer).
inline std::vector<int> discriminator_strides(const DiscriminatorConfig& cfg) {
  std::vector<int> s;
  for (size_t i = 0; i < cfg.widths.size(); ++i) s.push_back(i < 3 ? 2 : 1);
  s.push_back(1);  // final scoring conv
  return s;
}

// Effective input patch seen by one output score: backward recurrence
// rf <- (rf - 1) * stride + kernel, starting from rf = 1 at the output.
inline int receptive_field_layers(const std::vector<std::pair<int, int>>& kernel_stride) {
  int rf = 1;
  for (size_t i = kernel_stride.size(); i-- > 0;) rf = (rf - 1) * kernel_stride[i].second + kernel_stride[i].first;
  return rf;
}

inline int receptive_field(const DiscriminatorConfig& cfg) {
  std::vector<std::pair<int, int>> layers;
  for (int s : discriminator_strides(cfg)) layers.emplace_back(cfg.kernel, s);
  return receptive_field_layers(layers);
}

// 3 down-convs, n residual blocks, 2 up-convs, final 7x7 conv + Tanh.
// Fully convolutional and size-preserving for sides divisible by 4.
template <typename T>
Network<T> build_generator(const GeneratorConfig& cfg) {
  cfg.validate();
  const int w1 = cfg.base_width, w2 = 2 * cfg.base_width, w4 = 4 * cfg.base_width;
  Network<T> net;
  net.template add<ReflectPad2d<T>>(3);
  net.template add<Conv2d<T>>(cfg.in_channels, w1, 7, 1, 0);
  net.template add<InstanceNorm2d<T>>(w1);
  net.template add<ReLU<T>>();
  net.template add<Conv2d<T>>(w1, w2, 3, 2, 1);
  net.template add<InstanceNorm2d<T>>(w2);
  net.template add<ReLU<T>>();
  net.template add<Conv2d<T>>(w2, w4, 3, 2, 1);
  net.template add<InstanceNorm2d<T>>(w4);
  net.template add<ReLU<T>>();
  for (int i = 0; i < cfg.n_residual_blocks; ++i) {
    Network<T> body;
    body.template add<ReflectPad2d<T>>(1);
    body.template add<Conv2d<T>>(w4, w4, 3, 1, 0);
    body.template add<InstanceNorm2d<T>>(w4);
    body.template add<ReLU<T>>();
    body.template add<ReflectPad2d<T>>(1);
    body.template add<Conv2d<T>>(w4, w4, 3, 1, 0);
    body.template add<InstanceNorm2d<T>>(w4);
    net.template add<ResidualBlock<T>>(std::move(body));
  }
  // kernel 3 / stride 2 / pad 1 / output pad 1 doubles the side exactly
  net.template add<ConvTranspose2d<T>>(w4, w2, 3, 2, 1, 1);
  net.template add<InstanceNorm2d<T>>(w2);
  net.template add<ReLU<T>>();
  net.template add<ConvTranspose2d<T>>(w2, w1, 3, 2, 1, 1);
  net.template add<InstanceNorm2d<T>>(w1);
  net.template add<ReLU<T>>();
  net.template add<ReflectPad2d<T>>(3);
  net.template add<Conv2d<T>>(w1, cfg.out_channels, 7, 1, 0);
  net.template add<Tanh<T>>();
  return net;
}

// PatchGAN stack; no normalization after the first conv, raw score map out.
template <typename T>
Network<T> build_discriminator(const DiscriminatorConfig& cfg, int input_size = 256) {
  cfg.validate();
  if (input_size < receptive_field(cfg))
    std::cerr << "warning: discriminator input " << input_size << "px is smaller than the " << receptive_field(cfg)
              << "px receptive field; patch scores are ill-posed\n";
  Network<T> net;
  auto strides = discriminator_strides(cfg);
  int in_ch = cfg.in_channels;
  for (size_t i = 0; i < cfg.widths.size(); ++i) {
    net.template add<Conv2d<T>>(in_ch, cfg.widths[i], cfg.kernel, strides[i], 1);
    if (i > 0) net.template add<InstanceNorm2d<T>>(cfg.widths[i]);
    net.template add<LeakyReLU<T>>(static_cast<T>(cfg.leaky_slope));
    in_ch = cfg.widths[i];
  }
  net.template add<Conv2d<T>>(in_ch, 1, cfg.kernel, 1, 1);
  return net;
}

template <typename T>
struct ModelBundle {
  Network<T> g_ab, g_ba, d_a, d_b;
  GeneratorConfig gen_cfg;
  DiscriminatorConfig disc_cfg;
};

template <typename T>
ModelBundle<T> build_bundle(const GeneratorConfig& gcfg, const DiscriminatorConfig& dcfg) {
  ModelBundle<T> b;
  b.gen_cfg = gcfg;
  b.disc_cfg = dcfg;
  b.g_ab = build_generator<T>(gcfg);
  b.g_ba = build_generator<T>(gcfg);
  b.d_a = build_discriminator<T>(dcfg, gcfg.image_size);
  b.d_b = build_discriminator<T>(dcfg, gcfg.image_size);
  return b;
}

// Gaussian(mean, std) on every conv / transposed-conv kernel, biases zeroed,
// norm scales 1 / shifts 0. Deterministic layer order under one rng.
template <typename T>
void init_weights(Network<T>& net, T mean, T stddev, std::mt19937& rng) {
  require(stddev > T(0), "init stddev must be positive");
  net.init_params(rng, mean, stddev);
}

template <typename T>
void init_bundle(ModelBundle<T>& b, T mean, T stddev, uint32_t seed) {
  std::mt19937 rng(seed);
  init_weights(b.g_ab, mean, stddev, rng);
  init_weights(b.g_ba, mean, stddev, rng);
  init_weights(b.d_a, mean, stddev, rng);
  init_weights(b.d_b, mean, stddev, rng);
}

}  // namespace csgan
