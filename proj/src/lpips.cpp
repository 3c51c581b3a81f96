#include "csgan/lpips.hpp"

#include <cmath>
#include <fstream>

#include "csgan/kernels/conv.hpp"
#include "csgan/kernels/ops.hpp"

namespace csgan {

double perceptual_distance(const Tensor<float>& a, const Tensor<float>& b, const FeatureProvider& provider) {
  require(a.same_shape(b), "perceptual_distance: shape mismatch");
  const auto fa = provider.features(a);
  const auto fb = provider.features(b);
  const auto& weights = provider.layer_weights();
  require(fa.size() == weights.size(), "feature provider returned wrong layer count");

  double total = 0;
  for (size_t l = 0; l < fa.size(); ++l) {
    const Tensor<float>& x = fa[l];
    const Tensor<float>& y = fb[l];
    require(x.same_shape(y), "feature shapes differ between inputs");
    const int C = x.c(), S = x.h() * x.w();
    require(static_cast<int>(weights[l].size()) == C, "layer weight count mismatch");
    constexpr double eps = 1e-10;
    double layer_sum = 0;
    for (int n = 0; n < x.n(); ++n) {
      for (int s = 0; s < S; ++s) {
        // unit-normalize the channel vector at this spatial position
        double nx = 0, ny = 0;
        for (int c = 0; c < C; ++c) {
          const double xv = x.data()[(static_cast<size_t>(n) * C + c) * S + s];
          const double yv = y.data()[(static_cast<size_t>(n) * C + c) * S + s];
          nx += xv * xv;
          ny += yv * yv;
        }
        nx = std::sqrt(nx) + eps;
        ny = std::sqrt(ny) + eps;
        for (int c = 0; c < C; ++c) {
          const double xv = x.data()[(static_cast<size_t>(n) * C + c) * S + s] / nx;
          const double yv = y.data()[(static_cast<size_t>(n) * C + c) * S + s] / ny;
          const double d = xv - yv;
          layer_sum += weights[l][c] * d * d;
        }
      }
    }
    total += layer_sum / (static_cast<double>(x.n()) * S);  // spatial average, batch mean
  }
  return total;
}

namespace {

// Binary weights file:
//   magic "CSLPIPS1" (8 bytes)
//   u32 n_convs
//   per conv: u32 in_ch, out_ch, kernel, stride, pad, relu(0/1), tap(0/1)
//             f32 weights [out, in, k, k], f32 bias [out]
//   per tapped conv, in order: f32 channel weights [out]
struct ConvSpec {
  int in_ch, out_ch, kernel, stride, pad;
  bool relu, tap;
  Tensor<float> w;
  std::vector<float> b;
};

uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

class FileFeatureProvider : public FeatureProvider {
 public:
  explicit FileFeatureProvider(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open feature weights file: " + path);
    char magic[8];
    is.read(magic, 8);
    require(std::string(magic, 8) == "CSLPIPS1", "bad feature weights file magic: " + path);
    const uint32_t n = read_u32(is);
    require(n > 0 && n < 64, "implausible conv count in feature weights file");
    size_t n_taps = 0;
    for (uint32_t i = 0; i < n; ++i) {
      ConvSpec s;
      s.in_ch = static_cast<int>(read_u32(is));
      s.out_ch = static_cast<int>(read_u32(is));
      s.kernel = static_cast<int>(read_u32(is));
      s.stride = static_cast<int>(read_u32(is));
      s.pad = static_cast<int>(read_u32(is));
      s.relu = read_u32(is) != 0;
      s.tap = read_u32(is) != 0;
      s.w = Tensor<float>(s.out_ch, s.in_ch, s.kernel, s.kernel);
      is.read(reinterpret_cast<char*>(s.w.data()), static_cast<std::streamsize>(s.w.size() * sizeof(float)));
      s.b.resize(s.out_ch);
      is.read(reinterpret_cast<char*>(s.b.data()), static_cast<std::streamsize>(s.b.size() * sizeof(float)));
      if (s.tap) ++n_taps;
      convs_.push_back(std::move(s));
    }
    require(n_taps > 0, "feature weights file taps no layers");
    for (const auto& s : convs_) {
      if (!s.tap) continue;
      std::vector<float> w(s.out_ch);
      is.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(float)));
      weights_.push_back(std::move(w));
    }
    if (!is) throw std::runtime_error("truncated feature weights file: " + path);
  }

  std::vector<Tensor<float>> features(const Tensor<float>& img) const override {
    std::vector<Tensor<float>> out;
    Tensor<float> cur = img;
    for (const auto& s : convs_) {
      require(cur.c() == s.in_ch, "feature stack channel mismatch with input");
      cur = kernels::conv2d_forward(cur, s.w, s.b, kernels::ConvGeom{s.kernel, s.stride, s.pad});
      if (s.relu) cur = kernels::relu_forward(cur);
      if (s.tap) out.push_back(cur);
    }
    return out;
  }

  const std::vector<std::vector<float>>& layer_weights() const override { return weights_; }

 private:
  std::vector<ConvSpec> convs_;
  std::vector<std::vector<float>> weights_;
};

}  // namespace

std::unique_ptr<FeatureProvider> load_feature_provider(const std::string& weights_path) {
  return std::make_unique<FileFeatureProvider>(weights_path);
}

}  // namespace csgan
