#include <cmath>
#include <limits>
#include <numbers>

#include "myriad/error.hpp"
#include "myriad/imaging.hpp"
#include "myriad/numkernel.hpp"

namespace myriad {

namespace {

template <class A, class B>
void require_same_shape(const A& a, const B& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(Errc::ShapeMismatch, "images differ in shape");
  }
}

constexpr int kWin = 11;
constexpr double kWinSigma = 1.5;

}  // namespace

double psnr(const Image& ref, const Image& test) {
  require_same_shape(ref, test);
  CompensatedSum acc;
  const auto a = ref.pixels();
  const auto b = test.pixels();
  for (std::size_t i = 0; i < a.size(); ++i) acc.add((a[i] - b[i]) * (a[i] - b[i]));
  const double mse = acc.value() / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ref.peak() * ref.peak() / mse);
}

double ssim(const Image& ref, const Image& test) {
  require_same_shape(ref, test);
  const std::size_t w = ref.width();
  const std::size_t h = ref.height();
  if (w < kWin || h < kWin) throw Error(Errc::TooSmall, "SSIM needs both sides >= 11");

  double g[kWin];
  double gsum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double x = i - kWin / 2;
    g[i] = std::exp(-x * x / (2.0 * kWinSigma * kWinSigma));
    gsum += g[i];
  }
  for (double& v : g) v /= gsum;

  const double c1 = (0.01 * ref.peak()) * (0.01 * ref.peak());
  const double c2 = (0.03 * ref.peak()) * (0.03 * ref.peak());
  CompensatedSum total;
  for (std::size_t r = 0; r + kWin <= h; ++r) {
    for (std::size_t c = 0; c + kWin <= w; ++c) {
      double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (int i = 0; i < kWin; ++i) {
        for (int j = 0; j < kWin; ++j) {
          const double wt = g[i] * g[j];
          const double x = ref(r + i, c + j);
          const double y = test(r + i, c + j);
          mx += wt * x;
          my += wt * y;
          xx += wt * x * x;
          yy += wt * y * y;
          xy += wt * x * y;
        }
      }
      const double vx = xx - mx * mx;
      const double vy = yy - my * my;
      const double cxy = xy - mx * my;
      total.add(((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2)));
    }
  }
  const auto count = static_cast<double>((h - kWin + 1) * (w - kWin + 1));
  return total.value() / count;
}

double s1_distance(double alpha, double beta) noexcept {
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(alpha - beta + pi, 2.0 * pi);
  if (r < 0.0) r += 2.0 * pi;
  return std::abs(r - pi);
}

double s1_mse(const S1Image& ref, const S1Image& test) {
  require_same_shape(ref, test);
  CompensatedSum acc;
  const auto a = ref.angles();
  const auto b = test.angles();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = s1_distance(a[i], b[i]);
    acc.add(d * d);
  }
  return acc.value() / static_cast<double>(a.size());
}

}  // namespace myriad
