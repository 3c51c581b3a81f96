#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include "csgan/metrics.hpp"

using namespace csgan;

namespace {

ImageU8 constant_image(int side, uint8_t v) {
  ImageU8 img;
  img.c = 3;
  img.h = img.w = side;
  img.pix.assign(size_t(3) * side * side, v);
  return img;
}

ImageU8 random_image(int side, uint32_t seed) {
  ImageU8 img = constant_image(side, 0);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& p : img.pix) p = uint8_t(d(rng));
  return img;
}

}  // namespace

TEST_CASE("mse on hand values") {
  auto a = constant_image(4, 100);
  CHECK(mse(a, a) == 0.0);

  auto b = constant_image(4, 110);
  CHECK(mse(a, b) == doctest::Approx(100.0).epsilon(1e-12));

  auto black = constant_image(4, 0);
  auto white = constant_image(4, 255);
  CHECK(mse(black, white) == doctest::Approx(65025.0).epsilon(1e-12));

  auto small = constant_image(2, 0);
  CHECK_THROWS(mse(a, small));
}

TEST_CASE("psnr closed forms") {
  CHECK(psnr_from_mse(65025.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(psnr_from_mse(650.25) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(psnr_from_mse(84.7971) == doctest::Approx(28.8475).epsilon(1e-4));
  CHECK(std::isinf(psnr_from_mse(0.0)));
  CHECK(psnr_from_mse(0.0) > 0);
  CHECK_THROWS(psnr_from_mse(-1.0));
}

TEST_CASE("ssim of an image with itself is one") {
  auto img = random_image(32, 5);
  CHECK(ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim of opposite constants hits the luminance floor") {
  auto black = constant_image(16, 0);
  auto white = constant_image(16, 255);
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double expected = c1 / (255.0 * 255.0 + c1);
  CHECK(std::abs(ssim(black, white) - expected) < 1e-8);
}

TEST_CASE("ssim is symmetric and bounded") {
  auto a = random_image(24, 6);
  auto b = random_image(24, 7);
  const double s1 = ssim(a, b);
  CHECK(s1 == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  CHECK(s1 <= 1.0);
  CHECK(s1 >= -1.0);

  // mild noise scores higher than unrelated noise
  auto near = a;
  for (auto& p : near.pix) p = uint8_t(std::min(255, p + 2));
  CHECK(ssim(a, near) > s1);

  auto tiny = constant_image(4, 0);  // smaller than the window
  CHECK_THROWS(ssim(tiny, tiny));
}

TEST_CASE("report aggregation and csv layout") {
  std::vector<ImageMetrics> rows;
  rows.push_back({"one", 100.0, 28.0, 0.5, std::nullopt});
  rows.push_back({"two", 300.0, 20.0, 0.7, std::nullopt});
  auto rep = aggregate_report(rows, {"mse", "psnr", "ssim"}, "csgan", "demo");
  CHECK(rep.aggregate.mse == doctest::Approx(200.0));
  CHECK(rep.aggregate.psnr == doctest::Approx(24.0));
  CHECK(rep.aggregate.ssim == doctest::Approx(0.6));

  const std::string csv = report_csv(rep);
  CHECK(csv.find("image,mse,psnr,ssim") == 0);
  CHECK(csv.find("one,") != std::string::npos);
  CHECK(csv.find("AGGREGATE") != std::string::npos);
  CHECK(csv.find("lpips") == std::string::npos);  // column not requested

  const std::string md = report_markdown(rep);
  CHECK(md.find("csgan") != std::string::npos);
  CHECK(md.find("demo") != std::string::npos);
}

namespace {

// Two-conv feature stack with both layers tapped; weights fixed by seed.
std::string write_feature_file(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  os.write("CSLPIPS1", 8);
  auto u32 = [&](uint32_t v) { os.write(reinterpret_cast<char*>(&v), 4); };
  std::mt19937 rng(77);
  std::normal_distribution<float> dist(0.f, 0.3f);
  auto floats = [&](size_t n) {
    std::vector<float> v(n);
    for (auto& x : v) x = dist(rng);
    os.write(reinterpret_cast<char*>(v.data()), std::streamsize(n * 4));
  };

  u32(2);  // n_convs
  // conv 1: 3 -> 4, k3 s2 p1, relu, tapped
  for (uint32_t v : {3u, 4u, 3u, 2u, 1u, 1u, 1u}) u32(v);
  floats(4 * 3 * 3 * 3);
  floats(4);
  // conv 2: 4 -> 6, k3 s2 p1, relu, tapped
  for (uint32_t v : {4u, 6u, 3u, 2u, 1u, 1u, 1u}) u32(v);
  floats(6 * 4 * 3 * 3);
  floats(6);
  // channel weights, non-negative
  std::vector<float> w1{0.5f, 1.0f, 0.25f, 0.75f};
  std::vector<float> w2{1.f, 1.f, 0.5f, 0.5f, 0.25f, 0.25f};
  os.write(reinterpret_cast<char*>(w1.data()), 16);
  os.write(reinterpret_cast<char*>(w2.data()), 24);
  return p.string();
}

}  // namespace

TEST_CASE("file feature provider and perceptual distance") {
  auto dir = std::filesystem::temp_directory_path();
  const std::string path = write_feature_file(dir / "lpips_test.bin");
  auto provider = load_feature_provider(path);
  REQUIRE(provider);
  CHECK(provider->layer_weights().size() == 2);

  Tensor<float> a(1, 3, 16, 16), b(1, 3, 16, 16);
  std::mt19937 rng(9);
  a.fill_gaussian(rng, 0.0f, 0.5f);
  b.fill_gaussian(rng, 0.0f, 0.5f);

  CHECK(perceptual_distance(a, a, *provider) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  const double d = perceptual_distance(a, b, *provider);
  CHECK(d > 0.0);
  CHECK(d == doctest::Approx(perceptual_distance(b, a, *provider)).epsilon(1e-12));

  auto feats = provider->features(a);
  REQUIRE(feats.size() == 2);
  CHECK(feats[0].c() == 4);
  CHECK(feats[0].h() == 8);
  CHECK(feats[1].c() == 6);
  CHECK(feats[1].h() == 4);

  std::filesystem::remove(path);
  CHECK_THROWS(load_feature_provider(path));
}

TEST_CASE("truncated feature files are rejected") {
  auto dir = std::filesystem::temp_directory_path();
  const auto p = dir / "lpips_trunc.bin";
  write_feature_file(p);
  std::filesystem::resize_file(p, 40);
  CHECK_THROWS(load_feature_provider(p.string()));
  std::filesystem::remove(p);
}
