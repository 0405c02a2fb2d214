#include "translab/transmute.hpp"

#include <cmath>
#include <stdexcept>

namespace translab::transmute {

namespace {

double kannai_weight(double t) { return 1.0 / (4.0 * std::sqrt(M_PI) * std::pow(t, 1.5)); }

double kannai_sum(const std::vector<double>& nodes, const std::vector<double>& w, double lambda,
                  double t) {
  double acc = 0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    double st = std::sqrt(nodes[j]);
    acc += w[j] * std::exp(-nodes[j] / (4.0 * t)) * std::sin(st * lambda) / lambda;
  }
  return kannai_weight(t) * acc;
}

}  // namespace

KannaiScalar scalar_kannai(double lambda, double t, const QuadratureRule& q) {
  if (!(lambda > 0 && t > 0)) throw std::invalid_argument("scalar_kannai: lambda, t must be positive");
  if (std::exp(-q.nodes.back() / (4.0 * t)) > 1e-14)
    throw std::invalid_argument("scalar_kannai: quadrature range too short for this t");
  KannaiScalar out;
  out.lhs = std::exp(-t * lambda * lambda);
  out.rhs = kannai_sum(q.nodes, q.weights, lambda, t);
  out.est_error = std::abs(out.rhs - kannai_sum(q.nodes_coarse, q.weights_coarse, lambda, t));
  return out;
}

GridFunction kannai_heat_from_wave(const SpectralDecomposition& spec, const GridFunction& f, double t,
                                   const QuadratureRule& q) {
  if (!(t > 0)) throw std::invalid_argument("kannai_heat_from_wave: t must be positive");
  return spec.apply_spectral(
      [&](double l) { return kannai_sum(q.nodes, q.weights, std::sqrt(l), t); }, f);
}

Eigen::MatrixXd wave_source_to_solution(const SpectralDecomposition& spec, const Region& gamma,
                                        const Eigen::MatrixXd& F, double dt, int steps) {
  for (int j = 0; j < F.cols(); ++j)
    for (int i = 0; i < F.rows(); ++i)
      if (F(i, j) != 0.0 && !gamma.contains_interior(i))
        throw std::invalid_argument("wave_source_to_solution: source not supported in Gamma");

  const auto& members = gamma.members();
  Eigen::MatrixXd trace(members.size(), steps + 1);
  GridFunction zero = GridFunction::Zero(spec.size());
  for (int j = 0; j <= steps; ++j) {
    auto st = calculus::wave_propagate(spec, zero, zero, F, dt, j * dt);
    for (std::size_t m = 0; m < members.size(); ++m) trace(m, j) = st.w[members[m]];
  }
  return trace;
}

double lambda_max_bound(const DiscreteOperator& op) {
  // Gershgorin row sums of M^{-1/2} A M^{-1/2}
  Eigen::VectorXd minv_sqrt = op.Mdiag.cwiseSqrt().cwiseInverse();
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(op.A.rows());
  for (int c = 0; c < op.A.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.A, c); it; ++it)
      rowsum[it.row()] += std::abs(it.value() * minv_sqrt[it.row()] * minv_sqrt[it.col()]);
  return rowsum.maxCoeff();
}

LeapfrogResult wave_leapfrog(const DiscreteOperator& op, const GridFunction& w0,
                             const GridFunction& w1, const Eigen::MatrixXd& F, double dt, int steps) {
  double lmax = lambda_max_bound(op);
  if (dt > 0.9 * 2.0 / std::sqrt(lmax))
    throw std::invalid_argument("wave_leapfrog: dt exceeds the stability bound");

  const int n = static_cast<int>(op.A.rows());
  const bool has_source = F.cols() > 0;
  auto source_at = [&](int j) -> GridFunction {
    if (!has_source) return GridFunction::Zero(n);
    if (j >= F.cols()) return GridFunction::Zero(n);
    return F.col(j);
  };

  LeapfrogResult out;
  out.dt = dt;
  out.w.resize(n, steps + 1);
  GridFunction prev = w0;
  GridFunction acc0 = (op.A * w0).cwiseQuotient(op.Mdiag);
  GridFunction cur = w0 + dt * w1 + 0.5 * dt * dt * (source_at(0) - acc0);
  out.w.col(0) = prev;
  if (steps >= 1) out.w.col(1) = cur;

  // staggered invariant ||(w^{n+1}-w^n)/dt||_M^2 + (A w^n . w^{n+1})
  auto staggered = [&](const GridFunction& a, const GridFunction& b) {
    GridFunction d = (b - a) / dt;
    return d.dot(op.Mdiag.cwiseProduct(d)) + (op.A * a).dot(b);
  };
  double e0 = staggered(prev, cur);
  double max_drift = 0;

  for (int j = 1; j < steps; ++j) {
    GridFunction acc = (op.A * cur).cwiseQuotient(op.Mdiag);
    GridFunction next = 2.0 * cur - prev + dt * dt * (source_at(j) - acc);
    prev.swap(cur);
    cur.swap(next);
    out.w.col(j + 1) = cur;
    if (!has_source && e0 != 0.0)
      max_drift = std::max(max_drift, std::abs(staggered(prev, cur) - e0) / std::abs(e0));
  }
  out.energy_drift = max_drift;
  return out;
}

namespace {

// leapfrog on Omega' = Omega \ Gamma with time-dependent Dirichlet data on
// dGamma; returns the full-grid trajectory with Gamma rows carrying the data
Eigen::MatrixXd exterior_leapfrog(const DiscreteOperator& op, const Region& gamma,
                                  const Eigen::MatrixXd& f_dGamma, double dt, int steps) {
  double lmax = lambda_max_bound(op);
  if (dt > 0.9 * 2.0 / std::sqrt(lmax))
    throw std::invalid_argument("restricted_dn_wave: dt exceeds the stability bound");
  const auto& bnodes = gamma.boundary_nodes();
  if (f_dGamma.rows() != static_cast<Eigen::Index>(bnodes.size()) || f_dGamma.cols() < steps + 1)
    throw std::invalid_argument("restricted_dn_wave: boundary data shape mismatch");
  for (std::size_t i = 0; i < bnodes.size(); ++i)
    if (f_dGamma(i, 0) != 0.0)
      throw std::invalid_argument("restricted_dn_wave: boundary data must vanish at t = 0");

  const int n = static_cast<int>(op.A.rows());
  std::vector<char> is_exterior(n, 1);
  for (int m : gamma.members()) is_exterior[m] = 0;

  auto impose = [&](GridFunction& w, int j) {
    for (int m : gamma.members()) w[m] = 0.0;
    for (std::size_t i = 0; i < bnodes.size(); ++i) w[bnodes[i]] = f_dGamma(i, j);
  };

  Eigen::MatrixXd traj(n, steps + 1);
  GridFunction prev = GridFunction::Zero(n);
  impose(prev, 0);
  // zero initial data and zero initial velocity on Omega'
  GridFunction cur = GridFunction::Zero(n);
  impose(cur, 1);
  traj.col(0) = prev;
  if (steps >= 1) traj.col(1) = cur;
  for (int j = 1; j < steps; ++j) {
    GridFunction acc = (op.A * cur).cwiseQuotient(op.Mdiag);
    GridFunction next = 2.0 * cur - prev;
    for (int i = 0; i < n; ++i)
      if (is_exterior[i]) next[i] -= dt * dt * acc[i];
    impose(next, j + 1);
    prev.swap(cur);
    cur.swap(next);
    traj.col(j + 1) = cur;
  }
  return traj;
}

template <int N>
RestrictedDnResult restricted_dn_impl(const DiscreteOperator& op, const geometry::MetricField<N>& g,
                                      const Region& gamma, const Eigen::MatrixXd& f_dGamma, double dt,
                                      int steps) {
  const Grid& grid = *op.grid;
  Eigen::MatrixXd traj = exterior_leapfrog(op, gamma, f_dGamma, dt, steps);

  // dGamma nodes with a unique outward axis direction (corners skipped)
  struct TraceNode {
    int iidx;
    int axis;
    int sign;  // exterior neighbor at +sign along axis
  };
  std::vector<TraceNode> nodes;
  std::vector<char> member(grid.interior_count(), 0);
  for (int m : gamma.members()) member[m] = 1;
  for (int b : gamma.boundary_nodes()) {
    auto nbs = grid.interior_neighbors(b);
    int axis = -1, sign = 0, count = 0;
    const int dirs = grid.dim() == 1 ? 2 : 4;
    for (int q = 0; q < dirs; ++q) {
      int nb = nbs[q];
      bool exterior_nb = nb >= 0 && !member[nb];
      if (exterior_nb) {
        ++count;
        axis = q / 2;
        sign = q % 2 == 0 ? -1 : 1;
      }
    }
    if (count == 1) nodes.push_back({b, axis, sign});
  }

  RestrictedDnResult out;
  out.dn.resize(nodes.size(), steps + 1);
  for (const auto& tn : nodes) out.trace_nodes.push_back(tn.iidx);

  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const auto& tn = nodes[r];
    int gid = grid.interior_gid(tn.iidx);
    auto ij = grid.axis_indices(gid);
    auto x = grid.point_vec<N>(gid);
    auto gi = geometry::mat_inv<double, N>(g.eval(x));

    // Euclidean outward covector of Omega' points from the exterior neighbor
    // toward Gamma: n = -sign * e_axis; normalize in the metric
    Vec<double, N> nvec{};
    nvec[tn.axis] = -static_cast<double>(tn.sign);
    double nnorm = std::sqrt(geometry::quad_form<double, N>(gi, nvec));

    for (int j = 0; j <= steps; ++j) {
      // gradient at the boundary node: one-sided along the outward axis,
      // central along the tangential axis (neighbors carry prescribed data)
      Vec<double, N> grad{};
      for (int a = 0; a < N; ++a) {
        double h = grid.spacing(a);
        auto at = [&](int off) {
          std::array<int, 2> q = ij;
          q[a] += off;
          int other = grid.interior_index(grid.global_id(q[0], q[1]));
          return other >= 0 ? traj(other, j) : 0.0;  // Omega boundary value
        };
        if (a == tn.axis) {
          grad[a] = tn.sign * (-3.0 * at(0) + 4.0 * at(tn.sign) - at(2 * tn.sign)) / (2.0 * h);
        } else {
          grad[a] = (at(1) - at(-1)) / (2.0 * h);
        }
      }
      double conormal = 0;
      for (int i = 0; i < N; ++i)
        for (int jj = 0; jj < N; ++jj) conormal += gi[i][jj] * nvec[i] * grad[jj];
      out.dn(r, j) = conormal / nnorm;
    }
  }
  return out;
}

}  // namespace

RestrictedDnResult restricted_dn_wave(const DiscreteOperator& op, const geometry::MetricField<1>& g,
                                      const Region& gamma, const Eigen::MatrixXd& f_dGamma, double dt,
                                      int steps) {
  return restricted_dn_impl<1>(op, g, gamma, f_dGamma, dt, steps);
}
RestrictedDnResult restricted_dn_wave(const DiscreteOperator& op, const geometry::MetricField<2>& g,
                                      const Region& gamma, const Eigen::MatrixXd& f_dGamma, double dt,
                                      int steps) {
  return restricted_dn_impl<2>(op, g, gamma, f_dGamma, dt, steps);
}

HeatMoments heat_moment_vanish(const SpectralDecomposition& spec1, const SpectralDecomposition& spec2,
                               const GridFunction& f, const Region& o1, const Region& o2, int k_max) {
  if (k_max < 0 || k_max > 4) throw std::invalid_argument("heat_moment_vanish: k_max in 0..4");
  for (int i = 0; i < f.size(); ++i)
    if (f[i] != 0.0 && !o1.contains_interior(i))
      throw std::invalid_argument("heat_moment_vanish: source not supported in O1");
  double dist = Region::distance(o1, o2);
  if (!(dist > 0)) throw std::invalid_argument("heat_moment_vanish: O1 and O2 must be disjoint");

  // Gaussian-decay start and spectral-decay end of the time integral
  double t_min = dist * dist / 166.0;
  double t_max = 40.0 / std::min(spec1.lambda_min(), spec2.lambda_min());
  auto q = QuadratureRule::log_panels(t_min, t_max, 0.5, 16);

  // per-node response rows r(x, k) = phi_k(x) <f, phi_k>_M
  Eigen::VectorXd c1 = spec1.coefficients(f);
  Eigen::VectorXd c2 = spec2.coefficients(f);
  const auto& members = o2.members();
  Eigen::MatrixXd r1(members.size(), spec1.modes()), r2(members.size(), spec2.modes());
  for (std::size_t m = 0; m < members.size(); ++m) {
    r1.row(m) = spec1.dense_eigenvectors().row(members[m]).cwiseProduct(c1.transpose());
    r2.row(m) = spec2.dense_eigenvectors().row(members[m]).cwiseProduct(c2.transpose());
  }
  const auto& l1 = spec1.dense_eigenvalues();
  const auto& l2 = spec2.dense_eigenvalues();

  HeatMoments out;
  out.raw.assign(k_max + 1, 0.0);
  out.normalized.assign(k_max + 1, 0.0);
  Eigen::VectorXd mom = Eigen::VectorXd::Zero(members.size());
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(members.size());
  for (int k = 0; k <= k_max; ++k) {
    mom.setZero();
    scale.setZero();
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
      double t = q.nodes[j];
      double wgt = q.weights[j] * std::pow(t, -k - 0.5);
      Eigen::VectorXd v1 = r1 * (-t * l1.array()).exp().matrix();
      Eigen::VectorXd v2 = r2 * (-t * l2.array()).exp().matrix();
      mom += wgt * (v1 - v2);
      scale += wgt * 0.5 * (v1.cwiseAbs() + v2.cwiseAbs());
    }
    out.raw[k] = mom.cwiseAbs().maxCoeff();
    out.normalized[k] = out.raw[k] / scale.maxCoeff();
  }
  return out;
}

}  // namespace translab::transmute
