#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "csgan/tensor.hpp"

namespace csgan {

// 8-bit RGB image, CHW layout.
struct ImageU8 {
  int c = 0, h = 0, w = 0;
  std::vector<uint8_t> pix;

  uint8_t& at(int ch, int y, int x) { return pix[(static_cast<size_t>(ch) * h + y) * w + x]; }
  uint8_t at(int ch, int y, int x) const { return pix[(static_cast<size_t>(ch) * h + y) * w + x]; }
  size_t size() const { return pix.size(); }
};

enum class DatasetLayout { split_folders, combined_ab };
enum class DatasetSplit { train, test };

DatasetLayout parse_layout(const std::string& s);
const char* split_name(DatasetSplit s);

struct PairedImage {
  std::string stem;
  ImageU8 a, b;
};

// Paired two-domain dataset, eagerly decoded and resized to
// image_size x image_size. Immutable after loading.
class PairedDataset {
 public:
  std::string name;
  DatasetSplit split = DatasetSplit::train;
  int image_size = 256;
  std::vector<PairedImage> items;

  size_t size() const { return items.size(); }

  // Model-range (A, B) batch for the given pair indices.
  std::pair<Tensor<float>, Tensor<float>> batch(const std::vector<size_t>& idx,
                                                const std::vector<uint8_t>* hflip = nullptr) const;
};

// Pairs matched by filename stem (split-folders: <root>/<split>A, <root>/<split>B)
// or by vertical midline split (combined-AB: <root>/<split>, left half = A).
PairedDataset load_paired_dataset(const std::string& root, DatasetLayout layout, DatasetSplit split, int image_size,
                                  const std::string& name = "");

// ---- range conversion ------------------------------------------------------

// [0,255] -> [-1,1]
Tensor<float> to_model_range(const ImageU8& img);
// [-1,1] -> [0,255], values outside the model range clamped
ImageU8 from_model_range(const Tensor<float>& t, int batch_index = 0);

// ---- batching --------------------------------------------------------------

// One epoch's batches: a permutation of [0, n) determined solely by
// (seed, epoch), cut into batch_size chunks; the last chunk may be short.
std::vector<std::vector<size_t>> epoch_batches(size_t n_pairs, int batch_size, uint32_t seed, int epoch);

// ---- image file I/O (used by data loading, CLI and tests) ------------------

ImageU8 load_image_rgb(const std::string& path, int resize_to = 0);
void save_image_rgb(const ImageU8& img, const std::string& path);

}  // namespace csgan
