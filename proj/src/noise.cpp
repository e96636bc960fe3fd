#include <cmath>

#include "myriad/distributions.hpp"
#include "myriad/error.hpp"
#include "myriad/imaging.hpp"
#include "myriad/rng.hpp"

namespace myriad {

Image add_student_t_noise(const Image& u, double nu, double sigma, std::uint64_t seed) {
  if (!(nu >= 1.0)) throw Error(Errc::InvalidNu, "noise degrees of freedom must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(Errc::InvalidArgument, "sigma must be positive");
  Rng rng(seed);
  std::vector<double> px(u.pixels().begin(), u.pixels().end());
  for (double& v : px) {
    const double eta = rng.normal();
    const double y = rng.gamma(0.5 * nu, 0.5 * nu);
    v += sigma * eta / std::sqrt(y);
  }
  return Image(u.width(), u.height(), std::move(px), u.peak());
}

S1Image add_wrapped_cauchy_noise(const S1Image& u, double gamma, std::uint64_t seed) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(Errc::InvalidArgument, "gamma must be positive");
  Rng rng(seed);
  std::vector<double> a(u.angles().begin(), u.angles().end());
  for (double& v : a) v = wrap_angle(v + rng.cauchy(0.0, gamma));
  return S1Image(u.width(), u.height(), std::move(a));
}

}  // namespace myriad
