#include <cmath>
#include <numbers>

#include "myriad/error.hpp"
#include "myriad/imaging.hpp"

namespace myriad {

namespace {

// Region label at a point of the unit square; shapes are scale-free so the
// phantoms keep their layout at any side length.
int region(double x, double y) {
  const double dx = x - 0.68;
  const double dy = y - 0.30;
  if (dx * dx + dy * dy < 0.17 * 0.17) return 1;
  if (x > 0.12 && x < 0.45 && y > 0.10 && y < 0.42) return 2;
  // Triangle with vertices (0.15, 0.88), (0.50, 0.88), (0.15, 0.55).
  if (x > 0.15 && y < 0.88 && (x - 0.15) + (0.88 - y) < 0.35) return 3;
  if (x > 0.58 && x < 0.90 && y > 0.60 && y < 0.70) return 4;
  if (x > 0.58 && x < 0.90 && y > 0.76 && y < 0.90) return 5;
  return 0;
}

}  // namespace

Image make_piecewise_phantom(std::size_t side) {
  if (side == 0) throw Error(Errc::InvalidArgument, "phantom side must be positive");
  constexpr double level[] = {110.0, 40.0, 200.0, 160.0, 240.0, 70.0};
  Image img(side, side);
  const auto s = static_cast<double>(side);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) img.set(r, c, level[region((c + 0.5) / s, (r + 0.5) / s)]);
  return img;
}

S1Image make_s1_phantom(std::size_t side) {
  if (side == 0) throw Error(Errc::InvalidArgument, "phantom side must be positive");
  constexpr double pi = std::numbers::pi;
  // Regions 1 and 4 sit on either side of the -pi/pi seam.
  const double level[] = {-2.0, pi - 0.15, 0.4, 1.6, -pi + 0.1, -0.9};
  S1Image img(side, side);
  const auto s = static_cast<double>(side);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) img.set(r, c, level[region((c + 0.5) / s, (r + 0.5) / s)]);
  return img;
}

}  // namespace myriad
