#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "translab/extension.hpp"

using namespace translab;
using namespace translab::geometry;
using namespace translab::op;
using namespace translab::extension;

namespace {

struct Setup {
  std::shared_ptr<Grid> grid;
  DiscreteOperator oper;
  SpectralDecomposition spec;
};

Setup flat_interval(int nodes) {
  GridSpec s;
  s.dim = 1;
  s.extents[0] = {0.0, M_PI};
  s.nodes[0] = nodes;
  auto gr = std::make_shared<Grid>(build_grid(s));
  IdentityMetric<1> g;
  ZeroPotential<1> V;
  auto op = assemble(gr, g, V);
  auto spec = eigendecompose(op);
  return {gr, std::move(op), std::move(spec)};
}

Eigen::VectorXd sample_sin(const Grid& g, int k) {
  Eigen::VectorXd u(g.interior_count());
  for (int i = 0; i < g.interior_count(); ++i) u[i] = std::sin(k * g.point(g.interior_gid(i))[0]);
  return u;
}

Eigen::VectorXd gamma_bump(const Grid& g, double c, double w) {
  Eigen::VectorXd u(g.interior_count());
  for (int i = 0; i < g.interior_count(); ++i)
    u[i] = bump_profile((g.point(g.interior_gid(i))[0] - c) / w);
  return u;
}

}  // namespace

TEST_CASE("extend_spectral: boundary value, mode decay, monotone norm") {
  auto S = flat_interval(257);
  Eigen::VectorXd f = gamma_bump(*S.grid, 1.5, 0.6);

  CHECK((extend_spectral(S.spec, f, 0.0) - f).norm() < 1e-11 * f.norm());

  double l1 = S.spec.dense_eigenvalues()[0];
  Eigen::VectorXd u1 = S.spec.dense_eigenvectors().col(0);
  CHECK((extend_spectral(S.spec, u1, 1.0) - std::exp(-std::sqrt(l1)) * u1).norm() < 1e-11);

  Eigen::VectorXd s2 = sample_sin(*S.grid, 2);
  CHECK((extend_spectral(S.spec, s2, 0.5) - std::exp(-1.0) * s2).norm() < 1e-3 * s2.norm());

  double prev = S.spec.weighted_norm(f);
  for (double y : {0.2, 0.5, 1.0, 2.0}) {
    double cur = S.spec.weighted_norm(extend_spectral(S.spec, f, y));
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS(extend_spectral(S.spec, f, -0.1));
}

TEST_CASE("dn_operator: T^2 = P and positivity") {
  auto S = flat_interval(257);
  double l1 = S.spec.dense_eigenvalues()[0];
  Eigen::VectorXd u1 = S.spec.dense_eigenvectors().col(0);
  CHECK((dn_operator(S.spec, u1) - std::sqrt(l1) * u1).norm() < 1e-11);

  Eigen::VectorXd f = gamma_bump(*S.grid, 1.7, 0.7) - 0.4 * gamma_bump(*S.grid, 1.2, 0.5);
  Eigen::VectorXd TTf = dn_operator(S.spec, dn_operator(S.spec, f));
  Eigen::VectorXd Pf = S.oper.apply(f);
  CHECK((TTf - Pf).norm() <= 1e-10 * Pf.norm());

  double ip = dn_operator(S.spec, f).dot(S.oper.Mdiag.cwiseProduct(f));
  CHECK(ip > 0);
}

TEST_CASE("dn_operator: one-sided difference of the extension, Richardson in delta") {
  auto S = flat_interval(257);
  Eigen::VectorXd f = gamma_bump(*S.grid, 1.5, 0.6);
  Eigen::VectorXd Tf = dn_operator(S.spec, f);

  auto fd = [&](double d) {
    return Eigen::VectorXd(-(extend_spectral(S.spec, f, d) - f) / d);
  };
  double d = 0.02;
  Eigen::VectorXd r1 = fd(d), r2 = fd(d / 2);
  double e1 = (r1 - Tf).norm(), e2 = (r2 - Tf).norm();
  CHECK(e2 < 0.6 * e1);  // first order in delta
  Eigen::VectorXd rich = 2.0 * r2 - r1;
  CHECK((rich - Tf).norm() < 0.3 * e2);  // extrapolation kills the leading term
}

TEST_CASE("nd_map: closed-form action, support guard, pairing symmetry") {
  auto S = flat_interval(513);
  auto whole = Region::whole_interior(S.grid);

  for (int k : {1, 2, 5}) {
    Eigen::VectorXd sk = sample_sin(*S.grid, k);
    Eigen::VectorXd nd = nd_map(S.spec, sk, whole);
    CHECK((nd - sk / k).norm() < 2e-4 * (sk / k).norm());
  }

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(S.grid->interior_count());
  CHECK(nd_map(S.spec, zero, whole).norm() == 0.0);

  Region gamma(S.grid, Box<2>{{0.9, 0}, {2.2, 0}});
  Eigen::VectorXd bad = sample_sin(*S.grid, 1);
  CHECK_THROWS(nd_map(S.spec, bad, gamma));

  // <F, |g|^{1/2} Lambda f> = <f, |g|^{1/2} Lambda F> on Gamma-supported data
  Eigen::VectorXd f = gamma_bump(*S.grid, 1.3, 0.35);
  Eigen::VectorXd F = gamma_bump(*S.grid, 1.8, 0.3);
  // |g| = 1 here; Lebesgue weights
  double ip1 = 0, ip2 = 0;
  Eigen::VectorXd Lf = nd_map(S.spec, f, gamma), LF = nd_map(S.spec, F, gamma);
  for (int k = 0; k < f.size(); ++k) {
    double w = S.grid->lebesgue_weight(k);
    ip1 += w * F[k] * Lf[k];
    ip2 += w * f[k] * LF[k];
  }
  CHECK(std::abs(ip1 - ip2) <= 1e-10 * std::abs(ip1));

  // source-to-solution map is the same spectral operation
  Eigen::VectorXd sts = source_to_solution_nonlocal(S.spec, f, gamma);
  CHECK((sts - Lf).cwiseAbs().maxCoeff() <= 1e-12 * Lf.cwiseAbs().maxCoeff());

  // Lambda is positive under the weighted pairing on Gamma-supported data
  CHECK(ip1 > 0.0);
  double self_pairing = 0;
  for (int k = 0; k < f.size(); ++k) self_pairing += S.grid->lebesgue_weight(k) * f[k] * Lf[k];
  CHECK(self_pairing > 0.0);
}

TEST_CASE("cylinder solve: zero data, spectral cross-check, decay invariant") {
  auto S = flat_interval(129);
  IdentityMetric<1> g;
  ZeroPotential<1> V;
  auto whole = Region::whole_interior(S.grid);
  double l1 = S.spec.lambda_min();
  double Y = 19.0;  // e^{-sqrt(l1) Y} ~ 5.6e-9

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(S.grid->interior_count());
  auto z = solve_cylinder_direct(S.grid, g, V, zero, Y, 65, l1);
  CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);

  // f = sin(x): trace ~ sin(x), within 2% of the spectral ND map at 129x257
  Eigen::VectorXd f = sample_sin(*S.grid, 1);
  auto sol = solve_cylinder_direct(S.grid, g, V, f, Y, 257, l1);
  Eigen::VectorXd trace = sol.trace_bottom();
  Eigen::VectorXd nd = nd_map(S.spec, f, whole);
  CHECK(gamma_rel_l2(whole, trace, nd) < 0.02);

  // trace decay near the cap consistent with the spectral form
  double fn = S.spec.weighted_norm(f);
  int jprobe = 255;  // one level below the cap
  double bound = std::exp(-std::sqrt(l1) * (jprobe * sol.dy)) * fn / std::sqrt(l1) * 10.0;
  CHECK(S.spec.weighted_norm(Eigen::VectorXd(sol.values.col(jprobe))) <= bound);

  // cylinder trace vs the spectrally extended ND data at a positive height
  Eigen::VectorXd uy = extend_spectral(S.spec, nd, 8 * sol.dy);
  CHECK(gamma_rel_l2(whole, Eigen::VectorXd(sol.values.col(8)), uy) < 0.03);

  CHECK_THROWS(solve_cylinder_direct(S.grid, g, V, f, 2.0, 33, l1));  // Y too small
}

TEST_CASE("cylinder solve vs nd_map: joint refinement with order >= 1.5") {
  IdentityMetric<1> g;
  GaussianPotential<1> V(0.3, 0.5, {1.4}, 0.5);
  double errs[2];
  int idx = 0;
  for (int nodes : {65, 129}) {
    GridSpec s;
    s.dim = 1;
    s.extents[0] = {0.0, M_PI};
    s.nodes[0] = nodes;
    auto gr = std::make_shared<Grid>(build_grid(s));
    auto sp = eigendecompose(assemble(gr, g, V));
    auto whole = Region::whole_interior(gr);
    Eigen::VectorXd f = gamma_bump(*gr, 1.5, 0.7);
    int ynodes = (nodes - 1) * 2 + 1;
    auto sol = solve_cylinder_direct(gr, g, V, f, 16.0, ynodes, sp.lambda_min());
    errs[idx++] = gamma_rel_l2(whole, sol.trace_bottom(), nd_map(sp, f, whole));
  }
  double order = std::log2(errs[0] / errs[1]);
  CHECK(order >= 1.5);
}
