#include <cmath>
#include <cstdlib>
#include <memory>
#include <random>

#include "doctest.h"
#include "translab/operator.hpp"

using namespace translab;
using namespace translab::geometry;
using namespace translab::op;

namespace {

std::shared_ptr<Grid> grid1d(int nodes, double a = 0.0, double b = M_PI) {
  GridSpec s;
  s.dim = 1;
  s.extents[0] = {a, b};
  s.nodes[0] = nodes;
  return std::make_shared<Grid>(build_grid(s));
}

std::shared_ptr<Grid> grid2d(int nodes, double a = 0.0, double b = M_PI) {
  GridSpec s;
  s.dim = 2;
  s.extents[0] = s.extents[1] = {a, b};
  s.nodes[0] = s.nodes[1] = nodes;
  return std::make_shared<Grid>(build_grid(s));
}

// separable 2D fields matching the 1D factors of the tensor test
struct SepMetric final : MetricFieldOf<2, SepMetric> {
  template <class T>
  Mat<T, 2> formula(const Vec<T, 2>& x) const {
    Mat<T, 2> r{};
    r[0][0] = 1.0 + 0.15 * (x[0] * x[0]);
    r[1][1] = T(1.3);
    return r;
  }
};
struct SepPot final : ScalarFieldOf<2, SepPot> {
  template <class T>
  T formula(const Vec<T, 2>&) const {
    return T(0.2);
  }
};

Eigen::VectorXd smooth_random(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  auto unif = [&](double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
  };
  Eigen::VectorXd u = Eigen::VectorXd::Zero(g.interior_count());
  for (int b = 0; b < 5; ++b) {
    double c0 = unif(0.6, M_PI - 0.6), c1 = unif(0.6, M_PI - 0.6), w = unif(0.3, 0.8), a = unif(-1, 1);
    for (int k = 0; k < g.interior_count(); ++k) {
      auto p = g.point(g.interior_gid(k));
      if (g.dim() == 1) {
        u[k] += a * bump_profile((p[0] - c0) / w);
      } else {
        u[k] += a * bump_profile((p[0] - c0) / w) * bump_profile((p[1] - c1) / w);
      }
    }
  }
  return u;
}

}  // namespace

TEST_CASE("assemble 1D: flat stencil and mass") {
  auto gr = grid1d(5);
  IdentityMetric<1> g;
  ZeroPotential<1> V;
  auto op = assemble(gr, g, V);
  double h = gr->spacing(0);

  Eigen::MatrixXd A = Eigen::MatrixXd(op.A);
  Eigen::MatrixXd ref(3, 3);
  // bilinear-form scaling of the standard stencil: (1/h^2) tridiag(-1,2,-1) * h
  ref << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  ref /= h;
  CHECK((A - ref).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((op.Mdiag.array() - h).abs().maxCoeff() < 1e-15);
}

TEST_CASE("assemble: constant potential adds c*M exactly") {
  auto gr = grid1d(41);
  DiagonalPolyMetric<1> g({1.0}, {0.3});
  ZeroPotential<1> V0;
  GaussianPotential<1> Vc(2.5, 0.0, {0.0}, 1.0);  // constant 2.5
  auto op0 = assemble(gr, g, V0);
  auto opc = assemble(gr, g, Vc);
  Eigen::MatrixXd diff = Eigen::MatrixXd(opc.A) - Eigen::MatrixXd(op0.A);
  Eigen::MatrixXd expected = 2.5 * op0.Mdiag.asDiagonal();
  CHECK((diff - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assemble 2D: flat five-point stencil") {
  auto gr = grid2d(5);
  IdentityMetric<2> g;
  ZeroPotential<2> V;
  auto op = assemble(gr, g, V);
  double hx = gr->spacing(0), hy = gr->spacing(1);

  // hand-assembled bilinear form of the 5-point scheme
  int ni = gr->interior_count();
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(ni, ni);
  int nxi = gr->interior_per_axis(0);
  for (int j = 0; j < gr->interior_per_axis(1); ++j)
    for (int i = 0; i < nxi; ++i) {
      int k = i + nxi * j;
      ref(k, k) = 2 * hy / hx + 2 * hx / hy;
      if (i > 0) ref(k, k - 1) = -hy / hx;
      if (i + 1 < nxi) ref(k, k + 1) = -hy / hx;
      if (j > 0) ref(k, k - nxi) = -hx / hy;
      if (j + 1 < gr->interior_per_axis(1)) ref(k, k + nxi) = -hx / hy;
    }
  CHECK((Eigen::MatrixXd(op.A) - ref).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("assembled form matches the weighted Dirichlet quadrature") {
  auto gr = grid1d(201, 0.0, 2.0);
  DiagonalPolyMetric<1> g({1.0}, {0.5});
  GaussianPotential<1> V(0.3, 1.0, {1.0}, 0.4);
  auto op = assemble(gr, g, V);

  // polynomial test functions vanishing at the ends
  auto f1 = [](double x) { return x * (2.0 - x); };
  auto f2 = [](double x) { return x * x * (2.0 - x); };
  auto df1 = [](double x) { return 2.0 - 2.0 * x; };
  auto df2 = [](double x) { return 4.0 * x - 3.0 * x * x; };

  int ni = gr->interior_count();
  Eigen::VectorXd u(ni), v(ni);
  for (int k = 0; k < ni; ++k) {
    double x = gr->point(gr->interior_gid(k))[0];
    u[k] = f1(x);
    v[k] = f2(x);
  }
  double bilinear = u.dot(op.A * v);

  // fine quadrature of int (g^{11} f1' f2' + V f1 f2) |g|^{1/2} dx
  double ref = 0;
  int nq = 20000;
  double hq = 2.0 / nq;
  for (int q = 0; q < nq; ++q) {
    double x = (q + 0.5) * hq;
    auto G = g.eval(Vec<double, 1>{x});
    double gi = 1.0 / G[0][0], sq = std::sqrt(G[0][0]);
    ref += hq * (gi * df1(x) * df2(x) + V.eval(Vec<double, 1>{x}) * f1(x) * f2(x)) * sq;
  }
  CHECK(bilinear == doctest::Approx(ref).epsilon(5e-4));
}

TEST_CASE("assemble symmetry and nonnegativity") {
  auto gr = grid2d(17);
  OffdiagBumpMetric g(1.0, 1.4, 0.35, {1.5, 1.7}, 1.0);
  GaussianPotential<2> V(0.1, 0.8, {1.4, 1.6}, 0.6);
  auto op = assemble(gr, g, V);

  Eigen::MatrixXd A = Eigen::MatrixXd(op.A);
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * A.cwiseAbs().maxCoeff());
  CHECK(op.Mdiag.minCoeff() > 0);

  for (unsigned s = 1; s <= 5; ++s) {
    Eigen::VectorXd u = smooth_random(*gr, s);
    CHECK(u.dot(A * u) >= 0.0);
    if (u.norm() > 1e-12) CHECK(u.dot(A * u) > 0.0);
  }
}

// loses positive definiteness near x = (2, 2)
struct BadMetric final : MetricFieldOf<2, BadMetric> {
  template <class T>
  Mat<T, 2> formula(const Vec<T, 2>& x) const {
    Mat<T, 2> r{};
    r[0][0] = T(1.0);
    r[1][1] = T(1.0);
    r[0][1] = r[1][0] = 1.2 * bump_profile((x[0] - 2.0) / 0.5) * bump_profile((x[1] - 2.0) / 0.5);
    return r;
  }
};

TEST_CASE("assemble rejects a metric violating ellipticity") {
  auto gr = grid2d(17);
  BadMetric g;
  ZeroPotential<2> V;
  CHECK_THROWS(assemble(gr, g, V));
}

TEST_CASE("eigendecompose: closed-form Dirichlet spectrum on (0,pi)") {
  auto gr = grid1d(513);
  IdentityMetric<1> g;
  ZeroPotential<1> V0;
  auto op = assemble(gr, g, V0);
  auto spec = eigendecompose(op);

  for (int k = 1; k <= 10; ++k) {
    double lam = spec.dense_eigenvalues()[k - 1];
    CHECK(std::abs(lam - k * k) / (k * k) < 0.005);
  }

  // V = 1 shifts the spectrum by one
  GaussianPotential<1> V1(1.0, 0.0, {0.0}, 1.0);
  auto spec1 = eigendecompose(assemble(gr, g, V1));
  for (int k = 1; k <= 10; ++k) {
    double lam = spec1.dense_eigenvalues()[k - 1];
    CHECK(std::abs(lam - (k * k + 1.0)) / (k * k + 1.0) < 0.005);
  }

  // M-orthonormality and eigen-residuals
  const auto& Phi = spec.dense_eigenvectors();
  Eigen::MatrixXd G = Phi.transpose() * op.Mdiag.asDiagonal() * Phi;
  CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-10);
  for (int k : {0, 4, 100, 510}) {
    Eigen::VectorXd r = op.A * Phi.col(k) - spec.dense_eigenvalues()[k] * op.Mdiag.cwiseProduct(Phi.col(k));
    CHECK(r.norm() <= 1e-8 * spec.dense_eigenvalues()[k] * op.Mdiag.cwiseProduct(Phi.col(k)).norm());
  }
}

TEST_CASE("eigendecompose: 2D ground state near 2") {
  auto gr = grid2d(41);
  IdentityMetric<2> g;
  ZeroPotential<2> V;
  auto spec = eigendecompose(assemble(gr, g, V));
  CHECK(spec.lambda_min() == doctest::Approx(2.0).epsilon(0.005));
}

TEST_CASE("eigendecompose: rejects K beyond size; monotone in V") {
  auto gr = grid1d(33);
  IdentityMetric<1> g;
  ZeroPotential<1> V0;
  auto op = assemble(gr, g, V0);
  CHECK_THROWS(eigendecompose(op, 1000));

  GaussianPotential<1> Vp(0.0, 1.0, {1.6}, 0.5);
  auto s0 = eigendecompose(op);
  auto sp = eigendecompose(assemble(gr, g, Vp));
  CHECK(s0.lambda_min() > 0);
  CHECK(sp.lambda_min() > s0.lambda_min());
}

TEST_CASE("grid refinement: second-order eigenvalue convergence") {
  IdentityMetric<1> id;
  DiagonalPolyMetric<1> g({1.0}, {0.2});
  GaussianPotential<1> V(0.0, 0.5, {1.5}, 0.7);
  double l1 = eigendecompose(assemble(grid1d(65), g, V)).lambda_min();
  double l2 = eigendecompose(assemble(grid1d(129), g, V)).lambda_min();
  double l3 = eigendecompose(assemble(grid1d(257), g, V)).lambda_min();
  double order = std::log2(std::abs((l1 - l2) / (l2 - l3)));
  CHECK(order >= 1.7);
}

TEST_CASE("tensor decomposition equals the dense decomposition of the product operator") {
  // separable diagonal metric g = diag(a(x), b(y)) with V = V1(x) + V2(y)
  auto grx = grid1d(21);
  auto gry = grid1d(17);
  DiagonalPolyMetric<1> gx({1.0}, {0.15});
  DiagonalPolyMetric<1> gy({1.3}, {0.0});
  GaussianPotential<1> vx(0.2, 0.0, {0.0}, 1.0);
  ZeroPotential<1> vy;
  auto sx = eigendecompose(assemble(grx, gx, vx));
  auto sy = eigendecompose(assemble(gry, gy, vy));
  auto st = SpectralDecomposition::tensor(sx, sy);

  // the same operator assembled in 2D; metric diag(a(x0), b(x1)), V = V1(x0)
  GridSpec s2;
  s2.dim = 2;
  s2.extents[0] = {0.0, M_PI};
  s2.extents[1] = {0.0, M_PI};
  s2.nodes = {21, 17};
  auto gr2 = std::make_shared<Grid>(build_grid(s2));
  SepMetric g2;
  SepPot v2;
  auto op2 = assemble(gr2, g2, v2);
  auto sd = eigendecompose(op2);

  Eigen::VectorXd u = smooth_random(*gr2, 7);
  auto f = [](double l) { return std::pow(l, -0.5); };
  Eigen::VectorXd a = st.apply_spectral(f, u);
  Eigen::VectorXd b = sd.apply_spectral(f, u);
  CHECK((a - b).norm() <= 1e-9 * b.norm());

  Eigen::VectorXd lt = st.eigenvalues();
  Eigen::VectorXd ld = sd.eigenvalues();
  CHECK((lt - ld).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("eigendecomposition cache roundtrip") {
  auto gr = grid1d(41);
  IdentityMetric<1> g;
  ZeroPotential<1> V;
  auto op = assemble(gr, g, V, "testsig1d41");
  std::string dir = "./translab_cache_test";
  auto s1 = eigendecompose_cached(op, -1, dir);
  auto s2 = eigendecompose_cached(op, -1, dir);  // hits the cache
  CHECK((s1.dense_eigenvalues() - s2.dense_eigenvalues()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.dense_eigenvectors() - s2.dense_eigenvectors()).cwiseAbs().maxCoeff() == 0.0);
  std::remove((dir + "/testsig1d41.bin").c_str());
}
