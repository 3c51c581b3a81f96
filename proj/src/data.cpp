#include "csgan/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <set>
#include <stdexcept>

namespace fs = std::filesystem;

namespace csgan {

DatasetLayout parse_layout(const std::string& s) {
  if (s == "split-folders") return DatasetLayout::split_folders;
  if (s == "combined-AB" || s == "combined-ab") return DatasetLayout::combined_ab;
  throw std::invalid_argument("unknown dataset layout '" + s + "' (valid: split-folders, combined-AB)");
}

const char* split_name(DatasetSplit s) { return s == DatasetSplit::train ? "train" : "test"; }

namespace {

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

ImageU8 from_mat(const cv::Mat& bgr) {
  ImageU8 out;
  out.c = 3;
  out.h = bgr.rows;
  out.w = bgr.cols;
  out.pix.resize(static_cast<size_t>(3) * out.h * out.w);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      const cv::Vec3b v = bgr.at<cv::Vec3b>(y, x);
      out.at(0, y, x) = v[2];  // R
      out.at(1, y, x) = v[1];  // G
      out.at(2, y, x) = v[0];  // B
    }
  return out;
}

cv::Mat to_mat(const ImageU8& img) {
  cv::Mat bgr(img.h, img.w, CV_8UC3);
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) bgr.at<cv::Vec3b>(y, x) = cv::Vec3b(img.at(2, y, x), img.at(1, y, x), img.at(0, y, x));
  return bgr;
}

cv::Mat decode(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
  if (m.empty()) throw std::runtime_error("cannot decode image: " + path);
  return m;
}

// Bilinear resize straight to the square target; aspect ratio is not kept.
cv::Mat resize_square(const cv::Mat& m, int side) {
  if (m.rows == side && m.cols == side) return m;
  cv::Mat out;
  cv::resize(m, out, cv::Size(side, side), 0, 0, cv::INTER_LINEAR);
  return out;
}

std::map<std::string, fs::path> list_by_stem(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  if (!fs::exists(dir)) throw std::runtime_error("dataset directory does not exist: " + dir.string());
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && is_image_file(e.path())) out[e.path().stem().string()] = e.path();
  return out;
}

}  // namespace

PairedDataset load_paired_dataset(const std::string& root, DatasetLayout layout, DatasetSplit split, int image_size,
                                  const std::string& name) {
  require(fs::exists(root), "dataset root does not exist: " + root);
  PairedDataset ds;
  ds.name = name.empty() ? fs::path(root).filename().string() : name;
  ds.split = split;
  ds.image_size = image_size;

  if (layout == DatasetLayout::split_folders) {
    const fs::path dir_a = fs::path(root) / (std::string(split_name(split)) + "A");
    const fs::path dir_b = fs::path(root) / (std::string(split_name(split)) + "B");
    auto files_a = list_by_stem(dir_a);
    auto files_b = list_by_stem(dir_b);
    for (const auto& [stem, pa] : files_a) {
      auto it = files_b.find(stem);
      if (it == files_b.end())
        throw std::runtime_error("pairing error: '" + pa.string() + "' has no counterpart in " + dir_b.string());
      PairedImage p;
      p.stem = stem;
      p.a = from_mat(resize_square(decode(pa.string()), image_size));
      p.b = from_mat(resize_square(decode(it->second.string()), image_size));
      ds.items.push_back(std::move(p));
    }
    for (const auto& [stem, pb] : files_b)
      if (!files_a.count(stem))
        throw std::runtime_error("pairing error: '" + pb.string() + "' has no counterpart in " + dir_a.string());
  } else {
    const fs::path dir = fs::path(root) / split_name(split);
    auto files = list_by_stem(dir);
    for (const auto& [stem, path] : files) {
      cv::Mat m = decode(path.string());
      require(m.cols % 2 == 0, "combined-AB image has odd width: " + path.string());
      cv::Mat left = m(cv::Rect(0, 0, m.cols / 2, m.rows));
      cv::Mat right = m(cv::Rect(m.cols / 2, 0, m.cols / 2, m.rows));
      PairedImage p;
      p.stem = stem;
      p.a = from_mat(resize_square(left, image_size));
      p.b = from_mat(resize_square(right, image_size));
      ds.items.push_back(std::move(p));
    }
  }
  if (ds.items.empty()) throw std::runtime_error("pairing error: no image pairs found under " + root);
  // std::map iteration already gives sorted-stem order; keep it explicit.
  std::sort(ds.items.begin(), ds.items.end(), [](const auto& x, const auto& y) { return x.stem < y.stem; });
  return ds;
}

Tensor<float> to_model_range(const ImageU8& img) {
  Tensor<float> t(1, img.c, img.h, img.w);
  for (size_t i = 0; i < img.pix.size(); ++i) t[i] = static_cast<float>(img.pix[i]) / 127.5f - 1.0f;
  return t;
}

ImageU8 from_model_range(const Tensor<float>& t, int batch_index) {
  require(batch_index < t.n(), "from_model_range: batch index out of range");
  ImageU8 img;
  img.c = t.c();
  img.h = t.h();
  img.w = t.w();
  img.pix.resize(static_cast<size_t>(img.c) * img.h * img.w);
  const float* src = t.data() + static_cast<size_t>(batch_index) * img.pix.size();
  for (size_t i = 0; i < img.pix.size(); ++i) {
    const float v = (src[i] + 1.0f) * 127.5f;
    img.pix[i] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0f, 255.0f)));
  }
  return img;
}

std::pair<Tensor<float>, Tensor<float>> PairedDataset::batch(const std::vector<size_t>& idx,
                                                             const std::vector<uint8_t>* hflip) const {
  require(!idx.empty(), "empty batch");
  const int c = items[0].a.c, h = items[0].a.h, w = items[0].a.w;
  Tensor<float> a(static_cast<int>(idx.size()), c, h, w);
  Tensor<float> b(static_cast<int>(idx.size()), c, h, w);
  for (size_t k = 0; k < idx.size(); ++k) {
    const PairedImage& p = items.at(idx[k]);
    const bool flip = hflip && (*hflip)[k];
    for (int ch = 0; ch < c; ++ch)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const int sx = flip ? w - 1 - x : x;
          a.at(static_cast<int>(k), ch, y, x) = static_cast<float>(p.a.at(ch, y, sx)) / 127.5f - 1.0f;
          b.at(static_cast<int>(k), ch, y, x) = static_cast<float>(p.b.at(ch, y, sx)) / 127.5f - 1.0f;
        }
  }
  return {std::move(a), std::move(b)};
}

std::vector<std::vector<size_t>> epoch_batches(size_t n_pairs, int batch_size, uint32_t seed, int epoch) {
  require(batch_size >= 1, "batch_size must be >= 1");
  std::vector<size_t> order(n_pairs);
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937 rng(seed + 0x9e3779b9u * static_cast<uint32_t>(epoch));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<size_t>> out;
  for (size_t i = 0; i < n_pairs; i += batch_size) {
    out.emplace_back(order.begin() + i, order.begin() + std::min(n_pairs, i + batch_size));
  }
  return out;
}

ImageU8 load_image_rgb(const std::string& path, int resize_to) {
  cv::Mat m = decode(path);
  if (resize_to > 0) m = resize_square(m, resize_to);
  return from_mat(m);
}

void save_image_rgb(const ImageU8& img, const std::string& path) {
  if (!cv::imwrite(path, to_mat(img))) throw std::runtime_error("cannot write image: " + path);
}

}  // namespace csgan
