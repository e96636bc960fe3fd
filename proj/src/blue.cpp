#include <Eigen/Dense>

#include "myriad/error.hpp"
#include "myriad/estimators.hpp"

namespace myriad {

Vector blue_restore(std::span<const double> p, std::span<const double> mu_hat, const SpdMatrix& sigma_hat,
                    double nu, double sigma_noise) {
  const std::size_t d = sigma_hat.dim();
  if (p.size() != d || mu_hat.size() != d) throw Error(Errc::DimensionMismatch, "blue_restore: dimensions disagree");
  if (!(sigma_noise >= 0.0)) throw Error(Errc::InvalidArgument, "noise level must be non-negative");
  if (!(nu > 2.0)) return Vector(mu_hat.begin(), mu_hat.end());

  const CholeskyFactor f = cholesky(sigma_hat);
  Vector diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = p[i] - mu_hat[i];
  const Vector y = f.solve(diff);

  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd m(n, n);
  const double shift = nu / (nu - 2.0) * sigma_noise * sigma_noise;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = sigma_hat(i, j) - (i == j ? shift : 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  const Eigen::VectorXd r = v * lam.cwiseProduct(v.transpose() * yv);

  Vector out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = mu_hat[i] + r(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace myriad
