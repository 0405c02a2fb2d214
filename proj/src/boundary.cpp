#include "translab/boundary.hpp"

#include <Eigen/Dense>

namespace translab::boundary {

LimitFit extrapolate_limit(const std::vector<double>& freqs, const std::vector<double>& values) {
  const int m = static_cast<int>(freqs.size());
  if (m < 3 || values.size() != freqs.size())
    throw std::invalid_argument("extrapolate_limit: need at least 3 sequence entries");

  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    double u = 1.0 / freqs[i];
    A(i, 0) = 1.0;
    A(i, 1) = u;
    A(i, 2) = u * u;
    y[i] = values[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  LimitFit fit;
  if (qr.rank() < 3) {
    fit.ill_conditioned = true;
    fit.limit = values.back();
    return fit;
  }
  Eigen::Vector3d coef = qr.solve(y);
  fit.limit = coef[0];

  double rss = (A * coef - y).squaredNorm();
  Eigen::Matrix3d gram = (A.transpose() * A).inverse();
  double sigma2 = m > 3 ? rss / (m - 3) : 0.0;
  fit.err = std::sqrt(std::max(sigma2 * gram(0, 0), 0.0)) + 1e-14 * std::abs(fit.limit);
  return fit;
}

LimitFit tail_limit(const std::vector<double>& freqs, const std::vector<double>& values,
                    int tail_points) {
  const int m = static_cast<int>(freqs.size());
  if (m < 3 || values.size() != freqs.size())
    throw std::invalid_argument("tail_limit: need at least 3 sequence entries");
  int k = std::min(m, std::max(3, tail_points));

  Eigen::MatrixXd A(k, 2);
  Eigen::VectorXd y(k);
  for (int i = 0; i < k; ++i) {
    int j = m - k + i;
    A(i, 0) = 1.0;
    A(i, 1) = 1.0 / freqs[j];
    y[i] = values[j];
  }
  Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  LimitFit fit;
  fit.limit = coef[0];
  double rss = (A * coef - y).squaredNorm();
  double sigma2 = k > 2 ? rss / (k - 2) : 0.0;
  Eigen::Matrix2d gram = (A.transpose() * A).inverse();
  // also bound the model error by the distance to the last raw value
  fit.err = std::sqrt(std::max(sigma2 * gram(0, 0), 0.0)) +
            0.5 * std::abs(values.back() - fit.limit) + 1e-14 * std::abs(fit.limit);
  return fit;
}

}  // namespace translab::boundary
