#include "csgan/metrics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace csgan {

double mse(const ImageU8& a, const ImageU8& b) {
  require(a.c == b.c && a.h == b.h && a.w == b.w, "mse: image shape mismatch");
  double s = 0;
  for (size_t i = 0; i < a.pix.size(); ++i) {
    const double d = static_cast<double>(a.pix[i]) - static_cast<double>(b.pix[i]);
    s += d * d;
  }
  return s / static_cast<double>(a.pix.size());
}

double psnr_from_mse(double m) {
  require(m >= 0, "psnr_from_mse: negative MSE");
  if (m == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

namespace {

std::vector<double> gaussian_window(int n, double sigma) {
  std::vector<double> w(static_cast<size_t>(n) * n);
  const double c = (n - 1) / 2.0;
  double sum = 0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double v = std::exp(-((x - c) * (x - c) + (y - c) * (y - c)) / (2.0 * sigma * sigma));
      w[static_cast<size_t>(y) * n + x] = v;
      sum += v;
    }
  for (auto& v : w) v /= sum;
  return w;
}

}  // namespace

double ssim(const ImageU8& a, const ImageU8& b, const SsimParams& p) {
  require(a.c == b.c && a.h == b.h && a.w == b.w, "ssim: image shape mismatch");
  require(a.h >= p.window && a.w >= p.window, "ssim: image smaller than the window");
  const auto win = gaussian_window(p.window, p.sigma);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  double total = 0;
  size_t count = 0;
  for (int ch = 0; ch < a.c; ++ch) {
    for (int y = 0; y + p.window <= a.h; ++y) {
      for (int x = 0; x + p.window <= a.w; ++x) {
        double ma = 0, mb = 0;
        for (int wy = 0; wy < p.window; ++wy)
          for (int wx = 0; wx < p.window; ++wx) {
            const double wv = win[static_cast<size_t>(wy) * p.window + wx];
            ma += wv * a.at(ch, y + wy, x + wx);
            mb += wv * b.at(ch, y + wy, x + wx);
          }
        double va = 0, vb = 0, cov = 0;
        for (int wy = 0; wy < p.window; ++wy)
          for (int wx = 0; wx < p.window; ++wx) {
            const double wv = win[static_cast<size_t>(wy) * p.window + wx];
            const double da = a.at(ch, y + wy, x + wx) - ma;
            const double db = b.at(ch, y + wy, x + wx) - mb;
            va += wv * da * da;
            vb += wv * db * db;
            cov += wv * da * db;
          }
        total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
  }
  return total / static_cast<double>(count);
}

MetricReport aggregate_report(std::vector<ImageMetrics> rows, const std::vector<std::string>& columns,
                              const std::string& method, const std::string& dataset) {
  require(!rows.empty(), "metric report needs at least one image");
  MetricReport r;
  r.method = method;
  r.dataset = dataset;
  r.columns = columns;
  r.per_image = std::move(rows);
  r.aggregate.name = "AGGREGATE";
  double lp_sum = 0;
  size_t lp_n = 0;
  for (const auto& row : r.per_image) {
    r.aggregate.mse += row.mse;
    r.aggregate.psnr += row.psnr;
    r.aggregate.ssim += row.ssim;
    if (row.lpips) {
      lp_sum += *row.lpips;
      ++lp_n;
    }
  }
  const double n = static_cast<double>(r.per_image.size());
  r.aggregate.mse /= n;
  r.aggregate.psnr /= n;
  r.aggregate.ssim /= n;
  if (lp_n == r.per_image.size() && lp_n > 0) r.aggregate.lpips = lp_sum / static_cast<double>(lp_n);
  return r;
}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

std::string cell(const ImageMetrics& m, const std::string& col) {
  if (col == "mse") return fmt(m.mse);
  if (col == "psnr") return fmt(m.psnr);
  if (col == "ssim") return fmt(m.ssim);
  if (col == "lpips") return m.lpips ? fmt(*m.lpips) : std::string("n/a");
  throw std::invalid_argument("unknown metric column '" + col + "'");
}

void append_row(std::ostringstream& os, const MetricReport& r, const ImageMetrics& m, char sep) {
  os << m.name;
  for (const auto& c : r.columns) os << sep << cell(m, c);
}

}  // namespace

std::string report_csv(const MetricReport& r) {
  std::ostringstream os;
  os << "image";
  for (const auto& c : r.columns) os << ',' << c;
  os << '\n';
  for (const auto& row : r.per_image) {
    append_row(os, r, row, ',');
    os << '\n';
  }
  append_row(os, r, r.aggregate, ',');
  os << '\n';
  return os.str();
}

std::string report_markdown(const MetricReport& r) {
  std::ostringstream os;
  os << "Dataset: " << r.dataset << "\n\n";
  os << "| Method |";
  for (const auto& c : r.columns) {
    std::string u = c;
    for (auto& ch : u) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    os << ' ' << u << " |";
  }
  os << "\n|---|";
  for (size_t i = 0; i < r.columns.size(); ++i) os << "---|";
  os << "\n| " << r.method;
  for (const auto& c : r.columns) os << " | " << cell(r.aggregate, c);
  os << " |\n";
  return os.str();
}

}  // namespace csgan
