#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csgan/data.hpp"
#include "csgan/lpips.hpp"

namespace csgan {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

// Mean squared pixel difference in 0..255 units, over all channels.
double mse(const ImageU8& a, const ImageU8& b);

// 10*log10(255^2 / m); +inf for m == 0.
double psnr_from_mse(double m);

// Gaussian-windowed SSIM, averaged over valid window positions and channels.
double ssim(const ImageU8& a, const ImageU8& b, const SsimParams& p = {});

struct ImageMetrics {
  std::string name;
  double mse = 0;
  double psnr = 0;
  double ssim = 0;
  std::optional<double> lpips;
};

struct MetricReport {
  std::string method;
  std::string dataset;
  std::vector<std::string> columns;  // subset of {mse, psnr, ssim, lpips}
  std::vector<ImageMetrics> per_image;
  ImageMetrics aggregate;  // arithmetic means of the per-image values
};

MetricReport aggregate_report(std::vector<ImageMetrics> rows, const std::vector<std::string>& columns,
                              const std::string& method, const std::string& dataset);

// CSV: image,<columns...> rows plus a final AGGREGATE row.
std::string report_csv(const MetricReport& r);
// Markdown table in the comparison-table layout (one row per method).
std::string report_markdown(const MetricReport& r);

}  // namespace csgan
