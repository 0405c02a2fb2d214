#include "translab/extension.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

#include "translab/operator.hpp"

namespace translab::extension {

GridFunction extend_spectral(const SpectralDecomposition& spec, const GridFunction& f, double y) {
  if (y < 0) throw std::invalid_argument("extend_spectral: y must be nonnegative");
  return spec.apply_spectral([y](double l) { return std::exp(-y * std::sqrt(l)); }, f);
}

GridFunction dn_operator(const SpectralDecomposition& spec, const GridFunction& f) {
  return spec.apply_spectral([](double l) { return std::sqrt(l); }, f);
}

namespace {
template <class VecT>
void check_support(const VecT& f, const Region& gamma) {
  for (int i = 0; i < f.size(); ++i)
    if (!gamma.contains_interior(i) && std::abs(f[i]) != 0.0)
      throw std::invalid_argument("nd_map: Neumann data supported outside Gamma");
}
}  // namespace

GridFunction nd_map(const SpectralDecomposition& spec, const GridFunction& f, const Region& gamma) {
  check_support(f, gamma);
  return spec.apply_spectral([](double l) { return 1.0 / std::sqrt(l); }, f);
}

GridFunctionC nd_map(const SpectralDecomposition& spec, const GridFunctionC& f, const Region& gamma) {
  check_support(f, gamma);
  // real kernel: act on real and imaginary parts by linearity
  return spec.apply_spectral([](double l) { return 1.0 / std::sqrt(l); }, f);
}

GridFunction source_to_solution_nonlocal(const SpectralDecomposition& spec, const GridFunction& f,
                                         const Region& gamma) {
  return nd_map(spec, f, gamma);
}

namespace {

CylinderSolution cylinder_solve_impl(const op::DiscreteOperator& sop, const GridFunction& f, double Y,
                                     int y_nodes, double lambda1_hint) {
  if (y_nodes < 3) throw std::invalid_argument("solve_cylinder_direct: need at least 3 height nodes");
  if (!(Y > 0)) throw std::invalid_argument("solve_cylinder_direct: Y must be positive");
  if (lambda1_hint > 0 && std::exp(-std::sqrt(lambda1_hint) * Y) >= 1e-6)
    throw std::invalid_argument("solve_cylinder_direct: Y too small for the decay precondition");

  const int ni = static_cast<int>(sop.A.rows());
  const int J = y_nodes - 1;  // unknown y-levels j = 0..J-1; j = J is the Dirichlet cap
  const double dy = Y / (y_nodes - 1);

  // K = A_x (x) W_y + M_x (x) K_y  with trapezoid W_y and Neumann-at-0 stiffness K_y
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(sop.A.nonZeros()) * J + 3u * ni * J);
  auto wy = [&](int j) { return j == 0 ? 0.5 * dy : dy; };
  for (int j = 0; j < J; ++j) {
    for (int c = 0; c < sop.A.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sop.A, c); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()) + ni * j, static_cast<int>(it.col()) + ni * j,
                           it.value() * wy(j));
    double kdiag = (j == 0 ? 1.0 : 2.0) / dy;
    for (int i = 0; i < ni; ++i) {
      trips.emplace_back(i + ni * j, i + ni * j, sop.Mdiag[i] * kdiag);
      if (j + 1 < J) {
        trips.emplace_back(i + ni * j, i + ni * (j + 1), -sop.Mdiag[i] / dy);
        trips.emplace_back(i + ni * (j + 1), i + ni * j, -sop.Mdiag[i] / dy);
      }
    }
  }
  Eigen::SparseMatrix<double> K(ni * J, ni * J);
  K.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd b = Eigen::VectorXd::Zero(ni * J);
  b.head(ni) = sop.Mdiag.cwiseProduct(f);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(K);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("solve_cylinder_direct: factorization failed");
  Eigen::VectorXd z = solver.solve(b);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("solve_cylinder_direct: linear solve failed");

  CylinderSolution out;
  out.height = Y;
  out.dy = dy;
  out.values.resize(ni, y_nodes);
  for (int j = 0; j < J; ++j) out.values.col(j) = z.segment(ni * j, ni);
  out.values.col(J).setZero();
  return out;
}

}  // namespace

CylinderSolution solve_cylinder_direct(std::shared_ptr<const Grid> grid,
                                       const geometry::MetricField<1>& g,
                                       const geometry::ScalarField<1>& V, const GridFunction& f,
                                       double Y, int y_nodes, double lambda1_hint) {
  return cylinder_solve_impl(op::assemble(std::move(grid), g, V), f, Y, y_nodes, lambda1_hint);
}

CylinderSolution solve_cylinder_direct(std::shared_ptr<const Grid> grid,
                                       const geometry::MetricField<2>& g,
                                       const geometry::ScalarField<2>& V, const GridFunction& f,
                                       double Y, int y_nodes, double lambda1_hint) {
  return cylinder_solve_impl(op::assemble(std::move(grid), g, V), f, Y, y_nodes, lambda1_hint);
}

double gamma_rel_l2(const Region& gamma, const GridFunction& a, const GridFunction& b) {
  const Grid& g = gamma.grid();
  double num = 0, den = 0;
  for (int k : gamma.members()) {
    double w = g.lebesgue_weight(k);
    num += w * (a[k] - b[k]) * (a[k] - b[k]);
    den += w * b[k] * b[k];
  }
  return std::sqrt(num / den);
}

}  // namespace translab::extension
