#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "csgan/data.hpp"
#include "csgan/metrics.hpp"
#include "csgan/networks.hpp"

namespace csgan {

enum class Direction { a_to_b, b_to_a };

inline Direction parse_direction(const std::string& s) {
  if (s == "AtoB" || s == "a2b" || s == "A2B") return Direction::a_to_b;
  if (s == "BtoA" || s == "b2a" || s == "B2A") return Direction::b_to_a;
  throw std::invalid_argument("unknown direction '" + s + "' (valid: AtoB, BtoA)");
}

template <typename T>
ImageU8 translate_image(const ModelBundle<T>& m, const ImageU8& input, Direction dir) {
  const Network<T>& gen = dir == Direction::a_to_b ? m.g_ab : m.g_ba;
  Tensor<float> x = to_model_range(input);
  return from_model_range(gen.forward(x));
}

// Per-pair metrics of generated-vs-ground-truth over a test split, plus the
// per-image means. Pair order follows the dataset (sorted stems).
template <typename T>
MetricReport evaluate_dataset(const ModelBundle<T>& m, const PairedDataset& ds, Direction dir,
                              std::vector<std::string> metric_names, const FeatureProvider* lpips_provider = nullptr,
                              const std::string& method = "model") {
  require(ds.size() > 0, "evaluate_dataset: empty test split");
  bool want_lpips = false;
  for (auto& n : metric_names) want_lpips |= (n == "lpips");
  if (want_lpips && !lpips_provider) {
    // metric unavailable without a provider, reported as missing rather than failing
    metric_names.erase(std::remove(metric_names.begin(), metric_names.end(), std::string("lpips")),
                       metric_names.end());
    want_lpips = false;
  }

  std::vector<ImageMetrics> rows;
  for (const auto& pair : ds.items) {
    const ImageU8& input = dir == Direction::a_to_b ? pair.a : pair.b;
    const ImageU8& truth = dir == Direction::a_to_b ? pair.b : pair.a;
    ImageU8 gen;
    try {
      gen = translate_image(m, input, dir);
      ImageMetrics row;
      row.name = pair.stem;
      row.mse = mse(gen, truth);
      row.psnr = psnr_from_mse(row.mse);
      row.ssim = ssim(gen, truth);
      if (want_lpips) row.lpips = perceptual_distance(to_model_range(gen), to_model_range(truth), *lpips_provider);
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      throw std::runtime_error("evaluation failed on image '" + pair.stem + "': " + e.what());
    }
  }
  return aggregate_report(std::move(rows), metric_names, method, ds.name);
}

}  // namespace csgan
