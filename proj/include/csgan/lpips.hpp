#pragma once

#include <memory>
#include <string>
#include <vector>

#include "csgan/tensor.hpp"

namespace csgan {

// Backend for the learned perceptual distance: pretrained multi-layer
// features plus one non-negative weight per channel per tapped layer.
class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  // Feature maps for a model-range image batch, one tensor per tapped layer.
  virtual std::vector<Tensor<float>> features(const Tensor<float>& img) const = 0;
  // Per-layer channel weights; sizes match the channel counts of features().
  virtual const std::vector<std::vector<float>>& layer_weights() const = 0;
};

// Unit-normalize each feature vector across channels, take weighted squared
// channel differences, average spatially, sum over layers.
double perceptual_distance(const Tensor<float>& a, const Tensor<float>& b, const FeatureProvider& provider);

// File-backed provider: a small strided conv stack with tapped layers, loaded
// from a binary weights file (see docs in lpips.cpp for the format).
std::unique_ptr<FeatureProvider> load_feature_provider(const std::string& weights_path);

}  // namespace csgan
