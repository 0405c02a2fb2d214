#include <cmath>
#include <memory>

#include "doctest.h"
#include "translab/grid.hpp"

using namespace translab;
using namespace translab::geometry;

namespace {

// V(x) = x on (0, pi), used by the pullback composition check
struct LinearPotential1 final : ScalarFieldOf<1, LinearPotential1> {
  template <class T>
  T formula(const Vec<T, 1>& x) const {
    return x[0];
  }
};

GridSpec spec1d(double a, double b, int nodes) {
  GridSpec s;
  s.dim = 1;
  s.extents[0] = {a, b};
  s.nodes[0] = nodes;
  return s;
}

GridSpec spec2d(double a, double b, int n) {
  GridSpec s;
  s.dim = 2;
  s.extents[0] = {a, b};
  s.extents[1] = {a, b};
  s.nodes[0] = s.nodes[1] = n;
  return s;
}

}  // namespace

TEST_CASE("build_grid: 1D interval basics") {
  Grid g = build_grid(spec1d(0.0, M_PI, 9));
  CHECK(g.interior_count() == 7);
  CHECK(g.spacing(0) == doctest::Approx(M_PI / 8).epsilon(1e-15));

  // every interior node has all axis-neighbors inside the node set
  for (int k = 0; k < g.interior_count(); ++k) {
    auto ij = g.axis_indices(g.interior_gid(k));
    CHECK(ij[0] >= 1);
    CHECK(ij[0] <= g.nodes_per_axis(0) - 2);
  }
}

TEST_CASE("build_grid: 2D interior block") {
  Grid g = build_grid(spec2d(0.0, 1.0, 5));
  CHECK(g.interior_count() == 9);
}

TEST_CASE("build_grid: interior quadrature weights tile the domain") {
  Grid g = build_grid(spec1d(0.0, M_PI, 513));
  double vol = 0;
  for (int k = 0; k < g.interior_count(); ++k) vol += g.lebesgue_weight(k);
  CHECK(std::abs(vol - M_PI) / M_PI < 1e-12);

  Grid g2 = build_grid(spec2d(0.0, 1.0, 33));
  double vol2 = 0;
  for (int k = 0; k < g2.interior_count(); ++k) vol2 += g2.lebesgue_weight(k);
  CHECK(std::abs(vol2 - 1.0) < 1e-12);
}

TEST_CASE("build_grid: rejects bad input") {
  GridSpec s = spec1d(0.0, 1.0, 9);
  s.dim = 3;
  CHECK_THROWS(build_grid(s));
  s = spec1d(1.0, 1.0, 9);
  CHECK_THROWS(build_grid(s));
  s = spec1d(0.0, 1.0, 2);
  CHECK_THROWS(build_grid(s));
}

TEST_CASE("metric_norm: examples and homogeneity") {
  IdentityMetric<2> id2;
  Vec<double, 2> x{0.3, 0.4};
  CHECK(metric_norm<2>(id2, x, {3.0, 4.0}) == doctest::Approx(5.0).epsilon(1e-14));

  DiagonalPolyMetric<1> g4({4.0}, {0.0});
  CHECK(metric_norm<1>(g4, {0.5}, {2.0}) == doctest::Approx(1.0).epsilon(1e-14));

  DiagonalPolyMetric<1> gp({1.0}, {0.25});
  CHECK(metric_norm<1>(gp, {1.0}, {1.0}) == doctest::Approx(1.0 / std::sqrt(1.25)).epsilon(1e-14));

  // 1-homogeneity
  OffdiagBumpMetric ob(1.0, 2.0, 0.4, {0.5, 0.5}, 0.4);
  Vec<double, 2> xi{0.7, -0.2};
  double n1 = metric_norm<2>(ob, x, xi);
  Vec<double, 2> xi3{-2.1, 0.6};
  CHECK(metric_norm<2>(ob, x, xi3) == doctest::Approx(3.0 * n1).epsilon(1e-14));

  CHECK_THROWS(metric_norm<2>(id2, x, {0.0, 0.0}));
}

TEST_CASE("metric polarization recovers the inverse metric") {
  OffdiagBumpMetric g(1.3, 0.9, 0.25, {0.4, 0.6}, 0.5);
  Vec<double, 2> x{0.45, 0.55};
  auto gi = g.ginv(x);
  auto q = [&](Vec<double, 2> xi) {
    double n = metric_norm<2>(g, x, xi);
    return n * n;
  };
  double q10 = q({1.0, 0.0}), q01 = q({0.0, 1.0}), q11 = q({1.0, 1.0});
  CHECK(std::abs(q10 - gi[0][0]) < 1e-12);
  CHECK(std::abs(q01 - gi[1][1]) < 1e-12);
  CHECK(std::abs(0.5 * (q11 - q10 - q01) - gi[0][1]) < 1e-12);
}

TEST_CASE("metric fields: symmetry, ellipticity, derivatives vs finite differences") {
  OffdiagBumpMetric g(1.0, 1.5, 0.3, {0.5, 0.5}, 0.45);
  Grid gr = build_grid(spec2d(0.0, 1.0, 17));

  double lam = g.ellipticity();
  // a usable class constant for this preset
  lam = 0.4;
  for (int k = 0; k < gr.interior_count(); ++k) {
    auto p = gr.point(gr.interior_gid(k));
    Vec<double, 2> x{p[0], p[1]};
    auto G = g.eval(x);
    CHECK(std::abs(G[0][1] - G[1][0]) <= 1e-14);
    for (auto xi : {Vec<double, 2>{1, 0}, Vec<double, 2>{0, 1}, Vec<double, 2>{M_SQRT1_2, M_SQRT1_2}}) {
      double qf = quad_form<double, 2>(G, xi);
      CHECK(qf >= lam - 1e-12);
      CHECK(qf <= 1.0 / lam + 1e-12);
    }
  }

  // jet first/second derivatives against central differences
  Vec<double, 2> x{0.42, 0.61};
  const double d = 1e-5;
  auto dg = g.dg(x);
  auto d2g = g.d2g(x);
  for (int k = 0; k < 2; ++k) {
    Vec<double, 2> xp = x, xm = x;
    xp[k] += d;
    xm[k] -= d;
    auto Gp = g.eval(xp), Gm = g.eval(xm), G0 = g.eval(x);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(dg[k][i][j] == doctest::Approx((Gp[i][j] - Gm[i][j]) / (2 * d)).epsilon(1e-6));
        CHECK(d2g[k][k][i][j] ==
              doctest::Approx((Gp[i][j] - 2 * G0[i][j] + Gm[i][j]) / (d * d)).epsilon(2e-4));
      }
  }
}

TEST_CASE("diffeomorphism: frozen region, jacobian, inverse") {
  Box<1> frozen{{0.8}, {2.0}};
  BumpShiftDiffeo<1> psi(0.15, {2.6}, 0.35, {1.0}, frozen);

  // identity with identity jacobian on the frozen region
  for (double x : {0.9, 1.3, 1.9}) {
    auto y = psi.eval(Vec<double, 1>{x});
    CHECK(y[0] == doctest::Approx(x).epsilon(1e-15));
    CHECK(psi.jacobian({x})[0][0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  // orientation preserved, boundary fixed
  for (double x = 0.05; x < M_PI; x += 0.07) CHECK(psi.jacobian({x})[0][0] > 0);
  CHECK(psi.eval(Vec<double, 1>{0.0})[0] == doctest::Approx(0.0));
  CHECK(psi.eval(Vec<double, 1>{M_PI})[0] == doctest::Approx(M_PI));

  // inverse roundtrip
  for (double x = 0.1; x < M_PI; x += 0.21) {
    auto y = psi.eval(Vec<double, 1>{x});
    auto xr = psi.inverse(y);
    CHECK(std::abs(xr[0] - x) < 1e-10);
  }

  CHECK_THROWS(BumpShiftDiffeo<1>(0.1, {1.5}, 0.4, {1.0}, frozen));  // support hits frozen box
}

TEST_CASE("pullback: identity map leaves fields unchanged") {
  auto g = std::make_shared<DiagonalPolyMetric<1>>(Vec<double, 1>{1.0}, Vec<double, 1>{0.25});
  auto v = std::make_shared<GaussianPotential<1>>(0.2, 1.0, Vec<double, 1>{1.5}, 0.4);
  auto psi = std::make_shared<IdentityDiffeo<1>>(Box<1>{{0.5}, {1.5}});
  auto out = pullback<1>(psi, g, v);
  for (double x = 0.1; x < 3.0; x += 0.3) {
    CHECK(out.metric->eval(Vec<double, 1>{x})[0][0] ==
          doctest::Approx(g->eval(Vec<double, 1>{x})[0][0]).epsilon(1e-15));
    CHECK(out.potential->eval(Vec<double, 1>{x}) ==
          doctest::Approx(v->eval(Vec<double, 1>{x})).epsilon(1e-15));
  }
}

TEST_CASE("pullback: euclidean metric gives the Gram matrix of the jacobian") {
  auto g = std::make_shared<IdentityMetric<2>>();
  auto v = std::make_shared<ZeroPotential<2>>();
  Box<2> frozen{{0.05, 0.05}, {0.3, 0.3}};
  auto psi = std::make_shared<BumpShiftDiffeo<2>>(0.08, Vec<double, 2>{0.7, 0.6}, 0.25,
                                                  Vec<double, 2>{0.6, -0.8}, frozen);
  auto out = pullback<2>(psi, g, v);
  for (double x = 0.45; x < 0.95; x += 0.1)
    for (double y = 0.45; y < 0.95; y += 0.1) {
      Vec<double, 2> p{x, y};
      auto J = psi->jacobian(p);
      auto G = out.metric->eval(p);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double gram = 0;
          for (int k = 0; k < 2; ++k) gram += J[k][i] * J[k][j];
          CHECK(G[i][j] == doctest::Approx(gram).epsilon(1e-13));
        }
    }
}

TEST_CASE("pullback: 1D potential composes through the deformation") {
  auto g = std::make_shared<IdentityMetric<1>>();
  auto v = std::make_shared<LinearPotential1>();
  auto psi = std::make_shared<BumpShiftDiffeo<1>>(0.1, Vec<double, 1>{2.3}, 0.4, Vec<double, 1>{1.0},
                                                  Box<1>{{0.6}, {1.4}});
  auto out = pullback<1>(psi, g, v);
  for (double x = 0.2; x < 3.0; x += 0.13) {
    double delta = psi->eval(Vec<double, 1>{x})[0] - x;
    CHECK(out.potential->eval(Vec<double, 1>{x}) == doctest::Approx(x + delta).epsilon(1e-14));
  }
}

TEST_CASE("pullback is functorial on composable maps") {
  auto g = std::make_shared<DiagonalPolyMetric<1>>(Vec<double, 1>{1.0}, Vec<double, 1>{0.1});
  auto v = std::make_shared<GaussianPotential<1>>(0.0, 0.7, Vec<double, 1>{1.2}, 0.5);
  Box<1> frozen{{0.7}, {1.3}};
  auto p1 = std::make_shared<BumpShiftDiffeo<1>>(0.07, Vec<double, 1>{2.4}, 0.3, Vec<double, 1>{1.0}, frozen);
  auto p2 = std::make_shared<BumpShiftDiffeo<1>>(-0.05, Vec<double, 1>{2.2}, 0.45, Vec<double, 1>{1.0}, frozen);
  auto comp = std::make_shared<ComposedDiffeo<1>>(p2, p1);  // p2 after p1

  auto direct = pullback<1>(comp, g, v);
  auto step1 = pullback<1>(p2, g, v);                                  // pullback by the outer map
  auto step2 = pullback<1>(p1, step1.metric, step1.potential);         // then by the inner map
  for (double x = 0.2; x < 3.0; x += 0.17) {
    Vec<double, 1> p{x};
    CHECK(std::abs(direct.metric->eval(p)[0][0] - step2.metric->eval(p)[0][0]) < 1e-10);
    CHECK(std::abs(direct.potential->eval(p) - step2.potential->eval(p)) < 1e-10);
  }
}

TEST_CASE("pullback rejects a singular jacobian") {
  auto g = std::make_shared<IdentityMetric<1>>();
  auto v = std::make_shared<ZeroPotential<1>>();
  // amplitude large enough to fold the map
  auto psi = std::make_shared<BumpShiftDiffeo<1>>(-1.2, Vec<double, 1>{2.4}, 0.5, Vec<double, 1>{1.0},
                                                  Box<1>{{0.5}, {1.5}});
  std::vector<Vec<double, 1>> samples;
  for (double x = 2.0; x < 2.9; x += 0.02) samples.push_back({x});
  CHECK_THROWS(pullback<1>(psi, g, v, samples));
}

TEST_CASE("region: membership, boundary, connectivity") {
  auto gr = std::make_shared<Grid>(build_grid(spec1d(0.0, M_PI, 33)));
  Region gamma(gr, Box<2>{{1.0, 0}, {2.0, 0}});
  CHECK(!gamma.members().empty());
  for (int k : gamma.members()) {
    auto p = gr->point(gr->interior_gid(k));
    CHECK(p[0] >= 1.0 - 1e-9);
    CHECK(p[0] <= 2.0 + 1e-9);
  }
  CHECK(gamma.boundary_nodes().size() == 2);  // two ends of the subinterval

  Region whole = Region::whole_interior(gr);
  CHECK(static_cast<int>(whole.members().size()) == gr->interior_count());

  Region left(gr, Box<2>{{0.2, 0}, {0.8, 0}});
  Region right(gr, Box<2>{{2.4, 0}, {2.9, 0}});
  CHECK(Region::distance(left, right) >= 1.5);
}
