#include "translab/calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace translab::calculus {

GridFunction frac_power_apply(const SpectralDecomposition& spec, double s, const GridFunction& u) {
  if (s < -2.0 || s > 2.0) throw std::invalid_argument("frac_power_apply: s must lie in [-2, 2]");
  return spec.apply_spectral([s](double l) { return std::pow(l, s); }, u);
}

GridFunctionC frac_power_apply(const SpectralDecomposition& spec, double s, const GridFunctionC& u) {
  if (s < -2.0 || s > 2.0) throw std::invalid_argument("frac_power_apply: s must lie in [-2, 2]");
  return spec.apply_spectral([s](double l) { return std::pow(l, s); }, u);
}

GridFunction heat_apply(const SpectralDecomposition& spec, double t, const GridFunction& u) {
  if (t < 0) throw std::invalid_argument("heat_apply: t must be nonnegative");
  return spec.apply_spectral([t](double l) { return std::exp(-t * l); }, u);
}

Eigen::MatrixXd heat_kernel(const SpectralDecomposition& spec, double t) {
  if (!(t > 0)) throw std::invalid_argument("heat_kernel: t must be positive");
  return spec.kernel_matrix([t](double l) { return std::exp(-t * l); });
}

QuadratureRule semigroup_rule(const SpectralDecomposition& spec) {
  double t_max = 40.0 / spec.lambda_min();
  double t_min = 1e-28 / spec.lambda_max();
  return QuadratureRule::log_panels(t_min, t_max, 1.0, 16);
}

QuadResult neg_power_via_semigroup(const SpectralDecomposition& spec, double s, const GridFunction& u,
                                   const QuadratureRule& q) {
  if (!(s > 0 && s < 1)) throw std::invalid_argument("neg_power_via_semigroup: s in (0,1)");
  if (q.nodes.empty() || std::exp(-spec.lambda_min() * q.nodes.back()) > 1e-10)
    throw std::invalid_argument("neg_power_via_semigroup: quadrature tail not negligible");
  const double c = 1.0 / gamma_fn(s);
  auto fl = [&](double l, bool coarse) {
    double acc = 0;
    const auto& nodes = coarse ? q.nodes_coarse : q.nodes;
    const auto& w = coarse ? q.weights_coarse : q.weights;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      acc += w[j] * std::exp(-l * nodes[j]) * std::pow(nodes[j], s - 1.0);
    return c * acc;
  };
  QuadResult out;
  out.value = spec.apply_spectral([&](double l) { return fl(l, false); }, u);
  GridFunction coarse = spec.apply_spectral([&](double l) { return fl(l, true); }, u);
  out.est_error = spec.weighted_norm(GridFunction(out.value - coarse));
  return out;
}

QuadResult frac_power_via_semigroup(const SpectralDecomposition& spec, double s, const GridFunction& u,
                                    const QuadratureRule& q) {
  if (!(s > 0 && s < 1)) throw std::invalid_argument("frac_power_via_semigroup: s in (0,1)");
  const double c = 1.0 / gamma_fn(-s);  // negative for s in (0,1)
  // split at t = 1: expm1 below (cancellation-free near 0), bare semigroup
  // above, and the constant part's tail integral -1/s added in closed form
  auto fl = [&](double l, bool coarse) {
    double acc = -1.0 / s;
    const auto& nodes = coarse ? q.nodes_coarse : q.nodes;
    const auto& w = coarse ? q.weights_coarse : q.weights;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      double t = nodes[j];
      double f = t <= 1.0 ? std::expm1(-l * t) : std::exp(-l * t);
      acc += w[j] * f * std::pow(t, -1.0 - s);
    }
    return c * acc;
  };
  QuadResult out;
  out.value = spec.apply_spectral([&](double l) { return fl(l, false); }, u);
  GridFunction coarse = spec.apply_spectral([&](double l) { return fl(l, true); }, u);
  out.est_error = spec.weighted_norm(GridFunction(out.value - coarse));
  return out;
}

GridFunction cosine_apply(const SpectralDecomposition& spec, double t, const GridFunction& u) {
  return spec.apply_spectral([t](double l) { return std::cos(t * std::sqrt(l)); }, u);
}

GridFunction sine_apply(const SpectralDecomposition& spec, double t, const GridFunction& u) {
  return spec.apply_spectral([t](double l) {
    double m = std::sqrt(l);
    return std::sin(t * m) / m;
  }, u);
}

WaveState wave_propagate(const SpectralDecomposition& spec, const GridFunction& w0,
                         const GridFunction& w1, const Eigen::MatrixXd& F, double dt_src, double t) {
  if (t < 0) throw std::invalid_argument("wave_propagate: t must be nonnegative");

  // eigenvalue enumeration must match the coefficient layout, so the wave
  // propagator is offered for the dense backend only
  if (spec.is_tensor()) throw std::logic_error("wave_propagate: dense decomposition required");
  Eigen::VectorXd c0 = spec.coefficients(w0);
  Eigen::VectorXd c1 = spec.coefficients(w1);
  const Eigen::VectorXd& l = spec.dense_eigenvalues();

  const int K = spec.modes();
  double est = 0;
  Eigen::VectorXd cw(K), cv(K);
  for (int k = 0; k < K; ++k) {
    double m = std::sqrt(l[k]);
    cw[k] = std::cos(t * m) * c0[k] + std::sin(t * m) / m * c1[k];
    cv[k] = -m * std::sin(t * m) * c0[k] + std::cos(t * m) * c1[k];
  }

  if (F.cols() > 1) {
    // Duhamel term on the sampled source; t must land on the source mesh
    double steps = t / dt_src;
    int m_pts = static_cast<int>(std::llround(steps)) + 1;
    if (std::abs(steps - std::llround(steps)) > 1e-9)
      throw std::invalid_argument("wave_propagate: t must align with the source time mesh");
    if (m_pts > F.cols()) throw std::invalid_argument("wave_propagate: source samples do not cover [0, t]");
    Eigen::MatrixXd Fc(K, m_pts);  // mode coefficients of F at each sample
    for (int j = 0; j < m_pts; ++j) Fc.col(j) = spec.coefficients(F.col(j));
    if (m_pts >= 2) {
      std::vector<double> sw = simpson_weights(m_pts, dt_src);
      std::vector<double> tw(m_pts, dt_src);  // trapezoid companion for the error estimate
      tw.front() = tw.back() = 0.5 * dt_src;
      double est2 = 0;
      for (int k = 0; k < K; ++k) {
        double mu = std::sqrt(l[k]);
        double acc_w = 0, acc_v = 0, acc_tr = 0;
        for (int j = 0; j < m_pts; ++j) {
          double tau = j * dt_src;
          double s = std::sin((t - tau) * mu) / mu * Fc(k, j);
          acc_w += sw[j] * s;
          acc_tr += tw[j] * s;
          acc_v += sw[j] * std::cos((t - tau) * mu) * Fc(k, j);
        }
        cw[k] += acc_w;
        cv[k] += acc_v;
        est2 += (acc_w - acc_tr) * (acc_w - acc_tr);
      }
      est = std::sqrt(est2);
    }
  }

  WaveState out;
  out.w = spec.reconstruct(cw);
  out.v = spec.reconstruct(cv);
  out.duhamel_est_error = est;
  return out;
}

double wave_energy(const op::DiscreteOperator& op, const WaveState& s) {
  double kin = s.v.dot(op.Mdiag.cwiseProduct(s.v));
  double pot = s.w.dot(op.A * s.w);
  return kin + pot;
}

}  // namespace translab::calculus
