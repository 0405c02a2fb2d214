#include <cmath>
#include <memory>

#include "doctest.h"
#include "translab/boundary.hpp"

using namespace translab;
using namespace translab::geometry;
using namespace translab::op;
using namespace translab::boundary;
using translab::wkb::OscillatoryProbe;

namespace {

std::shared_ptr<Grid> grid1d(int nodes) {
  GridSpec s;
  s.dim = 1;
  s.extents[0] = {0.0, M_PI};
  s.nodes[0] = nodes;
  return std::make_shared<Grid>(build_grid(s));
}

std::shared_ptr<Grid> grid2d(int nodes) {
  GridSpec s;
  s.dim = 2;
  s.extents[0] = s.extents[1] = {0.0, M_PI};
  s.nodes[0] = s.nodes[1] = nodes;
  return std::make_shared<Grid>(build_grid(s));
}

}  // namespace

TEST_CASE("extrapolate_limit: exact low-order sequences") {
  std::vector<double> freqs{8, 16, 32, 64};
  std::vector<double> v1, v2;
  for (double f : freqs) {
    v1.push_back(2.5 - 0.7 / f);
    v2.push_back(3.25);
  }
  auto f1 = extrapolate_limit(freqs, v1);
  CHECK(std::abs(f1.limit - 2.5) < 1e-12);
  auto f2 = extrapolate_limit(freqs, v2);
  CHECK(std::abs(f2.limit - 3.25) < 1e-12);
  CHECK_THROWS(extrapolate_limit({8, 16}, {1.0, 2.0}));

  auto t1 = tail_limit(freqs, v1);
  CHECK(std::abs(t1.limit - 2.5) < 1e-12);
  auto t2 = tail_limit(freqs, v2);
  CHECK(std::abs(t2.limit - 3.25) < 1e-12);
}

TEST_CASE("pairing limit on the identity metric (1D, 513 nodes)") {
  auto gr = grid1d(513);
  IdentityMetric<1> g;
  ZeroPotential<1> V;
  auto spec = eigendecompose(assemble(gr, g, V));
  Region gamma(gr, Box<2>{{0.5, 0}, {2.7, 0}});

  auto probe = OscillatoryProbe<1>::make({1.6}, 0.7, {1.0}, 8);
  std::vector<double> freqs{16, 24, 32, 48};
  auto seq = pairing_sequence<1>(spec, gamma, probe, freqs);

  double Q = bump_mass<1>(*gr, probe);
  std::vector<double> re;
  for (auto z : seq) re.push_back(z.real());
  auto fit = extrapolate_limit(freqs, re);
  CHECK(std::abs(fit.limit - Q) / Q < 0.05);

  // imaginary part of the pairing vanishes in the limit
  CHECK(std::abs(seq.back().imag()) < 0.01 * std::abs(seq.back().real()));

  // scaling xi -> 2 xi halves the limit (1-homogeneity of |xi|_g)
  auto probe2 = OscillatoryProbe<1>::make({1.6}, 0.7, {2.0}, 8);
  std::vector<double> freqs2{8, 12, 16, 24};
  auto seq2 = pairing_sequence<1>(spec, gamma, probe2, freqs2);
  std::vector<double> re2;
  for (auto z : seq2) re2.push_back(z.real());
  auto fit2 = extrapolate_limit(freqs2, re2);
  CHECK(std::abs(fit2.limit - 0.5 * Q) / (0.5 * Q) < 0.05);

  // zero bump gives zero pairings
  OscillatoryProbe<1> zero = probe;
  zero.bump = std::make_shared<ZeroPotential<1>>();
  auto seq0 = pairing_sequence<1>(spec, gamma, zero, freqs);
  for (auto z : seq0) CHECK(std::abs(z) == 0.0);

  // aliasing guard
  CHECK_THROWS(pairing_sequence<1>(spec, gamma, probe, {1000.0}));
}

TEST_CASE("metric recovery in 1D: constant diagonal and identity") {
  auto gr = grid1d(513);
  Region gamma(gr, Box<2>{{0.5, 0}, {2.7, 0}});
  std::vector<Vec<double, 1>> centers{{1.4}, {1.8}};
  std::vector<double> freqs{24, 32, 48, 64};

  DiagonalPolyMetric<1> g4({4.0}, {0.0});
  ZeroPotential<1> V;
  auto spec4 = eigendecompose(assemble(gr, g4, V));
  auto rec4 = recover_metric_on_gamma<1>(spec4, gamma, centers, 0.8, freqs);
  for (const auto& r : rec4) {
    REQUIRE(r.ok);
    CHECK(std::abs(r.ginv[0][0] - 0.25) / 0.25 < 0.05);
    CHECK(std::abs(r.g[0][0] - 4.0) / 4.0 < 0.05);
  }

  IdentityMetric<1> gid;
  auto specid = eigendecompose(assemble(gr, gid, V));
  auto recid = recover_metric_on_gamma<1>(specid, gamma, centers, 0.8, freqs);
  for (const auto& r : recid) {
    REQUIRE(r.ok);
    CHECK(std::abs(r.g[0][0] - 1.0) < 0.05);
  }
}

TEST_CASE("polarization: recovered quadratic form is a quadratic form (2D tensor)") {
  auto grx = grid1d(129);
  DiagonalPolyMetric<1> gx({1.0}, {0.0});
  DiagonalPolyMetric<1> gy({1.0}, {0.0});
  ZeroPotential<1> V1;
  auto sx = eigendecompose(assemble(grx, gx, V1));
  auto sy = eigendecompose(assemble(grid1d(129), gy, V1));
  auto spec = SpectralDecomposition::tensor(sx, sy);

  auto gr2 = grid2d(129);
  Region gamma(gr2, Box<2>{{0.25, 0.25}, {2.9, 2.9}});
  Vec<double, 2> c{1.6, 1.6};
  double width = 0.75;
  std::vector<double> base{16, 18, 20, 22};

  auto q_of = [&](Vec<double, 2> xi) {
    auto fr = scaled_freqs<2>(*gr2, base, xi);
    auto probe = OscillatoryProbe<2>::make(c, width, xi, fr.front());
    auto seq = pairing_sequence<2>(spec, gamma, probe, fr);
    std::vector<double> re;
    for (auto z : seq) re.push_back(z.real());
    auto fit = tail_limit(fr, re);
    double Q = bump_mass<2>(*gr2, probe);
    double xin = Q / fit.limit;
    return xin * xin;
  };

  double q10 = q_of({1, 0}), q01 = q_of({0, 1});
  double qpp = q_of({1, 1}), qpm = q_of({1, -1});
  // parallelogram law within the compounded fit error
  CHECK(std::abs(qpp + qpm - 2 * q10 - 2 * q01) < 0.06 * (qpp + qpm));
  // identity metric: both axis values near 1
  CHECK(std::abs(q10 - 1.0) < 0.06);
  CHECK(std::abs(q01 - 1.0) < 0.06);
}

TEST_CASE("metric recovery in 2D with an off-diagonal bump") {
  // wide coupling bump so the window resolves the field at the probe scale
  auto gr = grid2d(65);
  OffdiagBumpMetric g(1.0, 1.0, 0.5, {1.6, 1.6}, 3.0);
  ZeroPotential<2> V;
  auto spec = eigendecompose(assemble(gr, g, V));
  Region gamma(gr, Box<2>{{0.25, 0.25}, {2.9, 2.9}});

  std::vector<Vec<double, 2>> centers{{1.6, 1.6}};
  std::vector<double> freqs{10, 12, 14, 15};
  auto rec = recover_metric_on_gamma<2>(spec, gamma, centers, 0.75, freqs);
  REQUIRE(rec[0].ok);

  auto gtrue = g.eval(centers[0]);
  // symmetric positive definite result, off-diagonal sign and magnitude
  CHECK(rec[0].g[0][1] == rec[0].g[1][0]);
  CHECK(rec[0].g[0][0] > 0);
  CHECK(rec[0].g[0][0] * rec[0].g[1][1] - rec[0].g[0][1] * rec[0].g[1][0] > 0);
  CHECK(rec[0].g[0][1] * gtrue[0][1] > 0);  // same sign
  CHECK(std::abs(rec[0].g[0][1] - gtrue[0][1]) / std::abs(gtrue[0][1]) < 0.10);
  CHECK(std::abs(rec[0].g[0][0] - gtrue[0][0]) / gtrue[0][0] < 0.10);
}

TEST_CASE("narrower bump reduces the recovery bias on a smooth field") {
  // strong metric curvature at the center so localization bias dominates
  auto gr = grid1d(1025);
  DiagonalPolyMetric<1> g({1.0}, {2.0});
  ZeroPotential<1> V;
  auto spec = eigendecompose(assemble(gr, g, V));
  Region gamma(gr, Box<2>{{0.05, 0}, {2.95, 0}});
  std::vector<Vec<double, 1>> centers{{1.0}};
  std::vector<double> freqs{48, 64, 96, 128};

  double gtrue = g.eval(Vec<double, 1>{1.0})[0][0];
  double biases[3];
  int i = 0;
  for (double width : {0.9, 0.65, 0.45}) {
    auto rec = recover_metric_on_gamma<1>(spec, gamma, centers, width, freqs);
    REQUIRE(rec[0].ok);
    biases[i++] = std::abs(rec[0].g[0][0] - gtrue);
  }
  CHECK(biases[1] < biases[0]);
  CHECK(biases[2] < biases[1]);
}

TEST_CASE("potential difference: constant shift against the quadrature target") {
  auto gr = grid1d(513);
  IdentityMetric<1> g;
  GaussianPotential<1> V1(1.0, 0.0, {0.0}, 1.0);  // V = 1
  ZeroPotential<1> V0;
  auto spec1 = eigendecompose(assemble(gr, g, V1));
  auto spec0 = eigendecompose(assemble(gr, g, V0));
  Region gamma(gr, Box<2>{{0.5, 0}, {2.7, 0}});

  auto probe = OscillatoryProbe<1>::make({1.6}, 0.7, {1.0}, 8);
  std::vector<double> freqs{32, 48, 64, 96};
  auto pd = recover_potential_difference<1>(spec1, spec0, g, g, gamma, probe, freqs);

  double Q = bump_mass<1>(*gr, probe);
  // |g| = 1, |xi|_g = 1: target is int eta^2 / 2
  CHECK(std::abs(pd.estimate - 0.5 * Q) / (0.5 * Q) < 0.10);

  // identical potentials: limit at noise level relative to the probe scale
  auto pd0 = recover_potential_difference<1>(spec1, spec1, g, g, gamma, probe, freqs);
  CHECK(std::abs(pd0.estimate) < 1e-3 * 0.5 * Q);

  // difference supported away from the bump contributes nothing at leading order
  auto Vfar = std::make_shared<SumPotential<1>>(
      std::make_shared<GaussianPotential<1>>(1.0, 0.0, Vec<double, 1>{0.0}, 1.0),
      std::make_shared<CompactBumpPotential<1>>(0.8, Vec<double, 1>{2.9}, 0.12));
  auto specfar = eigendecompose(assemble(gr, g, *Vfar));
  auto pdfar = recover_potential_difference<1>(specfar, spec1, g, g, gamma, probe, freqs);
  CHECK(std::abs(pdfar.estimate) < 0.02 * 0.5 * Q);

  // mismatched metrics are rejected
  DiagonalPolyMetric<1> gother({1.1}, {0.0});
  auto specother = eigendecompose(assemble(gr, gother, V0));
  CHECK_THROWS(recover_potential_difference<1>(spec1, specother, g, gother, gamma, probe, freqs));
}
