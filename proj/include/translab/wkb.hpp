#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include "translab/grid.hpp"

// Oscillatory approximate solutions Phi_N(x,y) = e^{N(i x.xi - |xi|_g y)}
// (eta/|xi|_g + N^{-1} psi_1 + N^{-2} psi_2) built from the two-step ODE
// cascade, plus the analytic residual bands used for the decay-order check.
// Every coefficient function is a templated expression over jet scalars, so
// the gradients and Hessians entering the bands are exact.

namespace translab::wkb {

using geometry::Grid;
using geometry::MetricField;
using geometry::Region;
using geometry::ScalarField;
using translab::Vec;
using Cd = std::complex<double>;

template <int N>
struct OscillatoryProbe {
  std::shared_ptr<const ScalarField<N>> bump;  // eta, compactly supported
  Vec<double, N> center{};
  double width = 0;
  Vec<double, N> xi{};
  double freq = 1;  // the large parameter N >= 1

  static OscillatoryProbe make(const Vec<double, N>& center, double width, const Vec<double, N>& xi,
                               double freq, int exponent = 8) {
    double x2 = 0;
    for (int k = 0; k < N; ++k) x2 += xi[k] * xi[k];
    if (x2 == 0) throw std::invalid_argument("OscillatoryProbe: xi must be nonzero");
    if (freq < 1) throw std::invalid_argument("OscillatoryProbe: frequency must be >= 1");
    OscillatoryProbe p;
    p.bump = std::make_shared<geometry::PolynomialBump<N>>(1.0, center, width, exponent);
    p.center = center;
    p.width = width;
    p.xi = xi;
    p.freq = freq;
    return p;
  }

  double euclid_norm_xi() const {
    double s = 0;
    for (int k = 0; k < N; ++k) s += xi[k] * xi[k];
    return std::sqrt(s);
  }
};

// support of eta strictly inside Gamma with a two-cell margin
template <int NN>
void validate_probe(const OscillatoryProbe<NN>& probe, const Region& gamma) {
  const Grid& g = gamma.grid();
  double margin = 2.0 * std::max(g.spacing(0), g.dim() == 2 ? g.spacing(1) : 0.0);
  // bounding box of Gamma's member nodes
  Vec<double, NN> lo, hi;
  for (int d = 0; d < NN; ++d) {
    lo[d] = 1e300;
    hi[d] = -1e300;
  }
  for (int k : gamma.members()) {
    auto p = g.point(g.interior_gid(k));
    for (int d = 0; d < NN; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  for (int d = 0; d < NN; ++d) {
    if (probe.center[d] - probe.width < lo[d] + margin - 1e-12 ||
        probe.center[d] + probe.width > hi[d] - margin + 1e-12)
      throw std::invalid_argument("OscillatoryProbe: bump support not strictly inside Gamma");
  }
}

template <int N>
class WkbSolution {
 public:
  WkbSolution(std::shared_ptr<const MetricField<N>> g, std::shared_ptr<const ScalarField<N>> V,
              OscillatoryProbe<N> probe)
      : g_(std::move(g)), V_(std::move(V)), probe_(std::move(probe)) {
    if (probe_.euclid_norm_xi() == 0) throw std::invalid_argument("WkbSolution: xi must be nonzero");
  }

  const OscillatoryProbe<N>& probe() const { return probe_; }

  // ---- pointwise cascade coefficients (complex) --------------------------

  struct Coeffs {
    double xin = 0;       // |xi|_g
    Cd eta_t{};           // eta / |xi|_g
    Cd f1{}, f2{};
    Cd h0{}, h1{}, h2{};
    Cd F1{}, F2{}, F3{}, F4{};
    Cd H0{}, H1{}, H2{}, H3{}, H4{};
  };

  Coeffs coeffs(const Vec<double, N>& x) const {
    Coeffs c;
    c.xin = jet_value(xin_t<double>(x));
    c.eta_t = to_cd(eta_t_t<double>(x));
    c.f1 = to_cd(f1_t<double>(x));
    c.f2 = to_cd(f2_t<double>(x));
    c.h0 = to_cd(h_t<double>(0, x));
    c.h1 = to_cd(h_t<double>(1, x));
    c.h2 = to_cd(h_t<double>(2, x));
    c.F1 = to_cd(F_t<double>(1, x));
    c.F2 = to_cd(F_t<double>(2, x));
    c.F3 = to_cd(F_t<double>(3, x));
    c.F4 = to_cd(F_t<double>(4, x));
    c.H0 = to_cd(H_t<double>(0, x));
    c.H1 = to_cd(H_t<double>(1, x));
    c.H2 = to_cd(H_t<double>(2, x));
    c.H3 = to_cd(H_t<double>(3, x));
    c.H4 = to_cd(H_t<double>(4, x));
    return c;
  }

  // ---- Phi_N evaluation ---------------------------------------------------

  // Neumann data phi_N(x) = freq * e^{i freq x.xi} eta(x)
  Cd phi_N_data(const Vec<double, N>& x) const {
    double ph = phase(x);
    return probe_.freq * V_eta(x) * Cd(std::cos(ph), std::sin(ph));
  }

  Cd phi(const Vec<double, N>& x, double y) const {
    auto c = coeffs(x);
    double z = probe_.freq * y;
    double nn = probe_.freq;
    Cd p = Cd(c.eta_t) + (c.h0 + z * (c.h1 + z * c.h2)) / nn +
           (c.H0 + z * (c.H1 + z * (c.H2 + z * (c.H3 + z * c.H4)))) / (nn * nn);
    double ph = phase(x);
    return p * std::exp(-c.xin * z) * Cd(std::cos(ph), std::sin(ph));
  }

  // analytic -d_y Phi_N at y = 0
  Cd phi_neumann(const Vec<double, N>& x) const {
    auto c = coeffs(x);
    double nn = probe_.freq;
    // -d_z of each psi_k at z=0 times freq^{1-k}
    Cd t0 = c.xin * c.eta_t;                  // = eta
    Cd t1 = c.xin * c.h0 - c.h1;              // vanishes by construction
    Cd t2 = c.xin * c.H0 - c.H1;              // vanishes by construction
    double ph = phase(x);
    return (nn * t0 + t1 + t2 / nn) * Cd(std::cos(ph), std::sin(ph));
  }

  // ---- residual bands ------------------------------------------------------

  struct Bands {
    std::array<Cd, 6> c1{};  // z-coefficients of -i L1 psi_2 + L2 psi_1
    std::array<Cd, 7> c2{};  // z-coefficients of L2 psi_2
    double xin = 0;
  };

  Bands bands(const Vec<double, N>& x) const {
    Bands b;
    b.xin = jet_value(xin_t<double>(x));

    // scalar building blocks at double level
    auto xd = jet_seed<double, N>(x);
    auto gi = ginv_t<double>(x);
    auto dgx = divginv_t<double>(x);
    double dgxi = 0;
    for (int j = 0; j < N; ++j) dgxi += dgx[j] * probe_.xi[j];

    Vec<double, N> grad_xin{};
    {
      auto xx = xin_t<Jet1<N>>(xd);
      for (int j = 0; j < N; ++j) grad_xin[j] = xx.d[j];
    }
    double xi_d_xin = contract_xi(gi, grad_xin);
    double dxin2 = contract(gi, grad_xin, grad_xin);
    double A1;
    {
      auto x1 = jet_seed<double, N>(x);
      auto xx = xin_t<Jet2<N>>(jet_seed<Jet1<N>, N>(x1));
      double acc = 0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) acc += gi[i][j] * jet_value(xx.d[i].d[j]);
      for (int j = 0; j < N; ++j) acc += dgx[j] * grad_xin[j];
      A1 = acc;
    }

    Cd h[3], H[5];
    for (int k = 0; k < 3; ++k) h[k] = to_cd(h_t<double>(k, x));
    for (int k = 0; k < 5; ++k) H[k] = to_cd(H_t<double>(k, x));

    Cd L1H[5], L2h[3], L2H[5];
    Vec<Cd, N> grad_h[3], grad_H[5];
    for (int k = 0; k < 3; ++k) {
      grad_h[k] = grad_of_h(k, x);
      L2h[k] = L2_of_h(k, x, gi, dgx);
    }
    for (int k = 0; k < 5; ++k) {
      grad_H[k] = grad_of_H(k, x);
      L1H[k] = Cd(0);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) L1H[k] += 2.0 * gi[i][j] * probe_.xi[i] * grad_H[k][j];
      L1H[k] += dgxi * H[k];
      L2H[k] = L2_of_H(k, x, gi, dgx);
    }

    const Cd I(0, 1);
    for (int m = 0; m < 6; ++m) {
      Cd v(0);
      if (m < 5) v += I * L1H[m];
      if (m >= 1 && m - 1 < 5) v += -I * 2.0 * xi_d_xin * H[m - 1];
      if (m < 3) v += L2h[m];
      if (m >= 1 && m - 1 < 3) {
        Cd cross(0);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) cross += gi[i][j] * grad_h[m - 1][i] * grad_xin[j];
        v += -(h[m - 1] * A1 + 2.0 * cross);
      }
      if (m >= 2 && m - 2 < 3) v += h[m - 2] * dxin2;
      b.c1[m] = v;
    }
    for (int m = 0; m < 7; ++m) {
      Cd v(0);
      if (m < 5) v += L2H[m];
      if (m >= 1 && m - 1 < 5) {
        Cd cross(0);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) cross += gi[i][j] * grad_H[m - 1][i] * grad_xin[j];
        v += -(H[m - 1] * A1 + 2.0 * cross);
      }
      if (m >= 2 && m - 2 < 5) v += H[m - 2] * dxin2;
      b.c2[m] = v;
    }
    return b;
  }

  // residual assembled from the bands, with c1/c2 the z-coefficients of
  // i L1 psi_2 + L2 psi_1 and L2 psi_2:
  // (-Delta_g~ + V) Phi_N = -e^{i freq x.xi - xin z} [freq^{-1} sum c1_m z^m + freq^{-2} sum c2_m z^m]
  Cd residual_from_bands(const Vec<double, N>& x, double y) const {
    Bands b = bands(x);
    double z = probe_.freq * y;
    Cd s1(0), s2(0);
    double zp = 1;
    for (int m = 0; m < 7; ++m) {
      if (m < 6) s1 += b.c1[m] * zp;
      s2 += b.c2[m] * zp;
      zp *= z;
    }
    double nn = probe_.freq;
    double ph = phase(x);
    return -(s1 / nn + s2 / (nn * nn)) * std::exp(-b.xin * z) * Cd(std::cos(ph), std::sin(ph));
  }

  // direct evaluation of (-Delta_g - d_y^2 + V) Phi_N via jets in x and the
  // closed y-form; independent of the band bookkeeping
  Cd residual_direct(const Vec<double, N>& x, double y) const {
    auto gi = ginv_t<double>(x);
    auto dgx = divginv_t<double>(x);
    double Vv = V_->eval(x);

    // x-part: g^{-1}:D^2 Phi + div g^{-1} . grad Phi
    auto x1 = jet_seed<double, N>(x);
    auto ph2 = phi_full_t<Jet2<N>>(jet_seed<Jet1<N>, N>(x1), y);
    Cd val(jet_value(ph2.re), jet_value(ph2.im));
    Cd lap(0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        lap += gi[i][j] * Cd(jet_value(ph2.re.d[i].d[j]), jet_value(ph2.im.d[i].d[j]));
    for (int j = 0; j < N; ++j) lap += dgx[j] * Cd(jet_value(ph2.re.d[j]), jet_value(ph2.im.d[j]));

    // y-part: second derivative of the closed form in y
    Cd dyy = phi_dyy(x, y);

    return -(lap + dyy) + Vv * val;
  }

  // ---- ODE cascade spot checks --------------------------------------------

  // psi_k(x, z) for k = 0, 1, 2 (z is the scaled height)
  Cd psi(int k, const Vec<double, N>& x, double z) const { return to_cd(psi_full<double>(k, x, z)); }

  // L0 psi_k = (-d_z^2 + xin^2) psi_k evaluated analytically
  Cd L0_psi(int k, const Vec<double, N>& x, double z) const {
    auto c = coeffs(x);
    auto p = poly_of(c, k);
    // L0 (p e^{-az}) = (-p'' + 2 a p') e^{-az}
    std::array<Cd, 5> dp{}, ddp{};
    for (int m = 1; m < 5; ++m) dp[m - 1] = double(m) * p[m];
    for (int m = 1; m < 5; ++m) ddp[m - 1] = double(m) * dp[m];
    Cd s(0);
    double zp = 1;
    for (int m = 0; m < 5; ++m) {
      s += (-ddp[m] + 2.0 * c.xin * dp[m]) * zp;
      zp *= z;
    }
    return s * std::exp(-c.xin * z);
  }

  // i L1 psi_k via direct jet differentiation of the full psi_k(., z)
  Cd iL1_psi(int k, const Vec<double, N>& x, double z) const {
    auto gi = ginv_t<double>(x);
    auto dgx = divginv_t<double>(x);
    auto pj = psi_full<Jet1<N>>(k, jet_seed<double, N>(x), z);
    Cd val(jet_value(pj.re), jet_value(pj.im));
    Cd acc(0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) acc += 2.0 * gi[i][j] * probe_.xi[i] * Cd(pj.re.d[j], pj.im.d[j]);
    double dgxi = 0;
    for (int j = 0; j < N; ++j) dgxi += dgx[j] * probe_.xi[j];
    acc += dgxi * val;
    return Cd(0, 1) * acc;
  }

  // L2 psi_k via direct jet differentiation
  Cd L2_psi(int k, const Vec<double, N>& x, double z) const {
    auto gi = ginv_t<double>(x);
    auto dgx = divginv_t<double>(x);
    auto x1 = jet_seed<double, N>(x);
    auto pj = psi_full<Jet2<N>>(k, jet_seed<Jet1<N>, N>(x1), z);
    Cd val(jet_value(pj.re), jet_value(pj.im));
    Cd acc(0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) acc += gi[i][j] * Cd(jet_value(pj.re.d[i].d[j]), jet_value(pj.im.d[i].d[j]));
    for (int j = 0; j < N; ++j) acc += dgx[j] * Cd(jet_value(pj.re.d[j]), jet_value(pj.im.d[j]));
    return acc - V_->eval(x) * val;
  }

  double eta_value(const Vec<double, N>& x) const { return V_eta(x); }

 private:
  template <class T>
  using CxT = translab::Cx<T>;

  static Cd to_cd(double v) { return Cd(v, 0); }
  static Cd to_cd(const CxT<double>& v) { return Cd(v.re, v.im); }

  double phase(const Vec<double, N>& x) const {
    double ph = 0;
    for (int k = 0; k < N; ++k) ph += x[k] * probe_.xi[k];
    return probe_.freq * ph;
  }
  double V_eta(const Vec<double, N>& x) const { return probe_.bump->eval(x); }

  // ---- templated cascade over jet scalars ---------------------------------

  template <class T>
  Mat<T, N> ginv_t(const Vec<T, N>& x) const {
    return geometry::mat_inv<T, N>(g_->eval(x));
  }

  template <class T>
  T xin_t(const Vec<T, N>& x) const {
    auto gi = ginv_t<T>(x);
    T s(0.0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) s += gi[i][j] * (probe_.xi[i] * probe_.xi[j]);
    return sqrt(s);
  }

  // div(g^{-1})^j = |g|^{-1/2} d_i (|g|^{1/2} g^{ij})
  template <class T>
  Vec<T, N> divginv_t(const Vec<T, N>& x) const {
    auto xd = jet_seed<T, N>(x);
    auto G = g_->eval(xd);
    auto Gi = geometry::mat_inv<Dual<T, N>, N>(G);
    auto sq = sqrt(geometry::mat_det<Dual<T, N>, N>(G));
    Vec<T, N> out{};
    for (int j = 0; j < N; ++j) {
      T s(0.0);
      for (int i = 0; i < N; ++i) s += (sq * Gi[i][j]).d[i];
      out[j] = s / sq.v;
    }
    return out;
  }

  template <class T>
  T eta_t_t(const Vec<T, N>& x) const {
    return probe_.bump->eval(x) / xin_t<T>(x);
  }

  template <class T>
  CxT<T> f1_t(const Vec<T, N>& x) const {
    auto gi = ginv_t<T>(x);
    auto dgx = divginv_t<T>(x);
    auto ed = eta_t_t<Dual<T, N>>(jet_seed<T, N>(x));
    T acc(0.0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) acc += gi[i][j] * probe_.xi[i] * ed.d[j] * 2.0;
    T dgxi(0.0);
    for (int j = 0; j < N; ++j) dgxi += dgx[j] * probe_.xi[j];
    return cx_i_times(acc + dgxi * ed.v);
  }

  template <class T>
  CxT<T> f2_t(const Vec<T, N>& x) const {
    auto gi = ginv_t<T>(x);
    auto xd = xin_t<Dual<T, N>>(jet_seed<T, N>(x));
    T acc(0.0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) acc += gi[i][j] * probe_.xi[i] * xd.d[j];
    T v = eta_t_t<T>(x) * acc * (-2.0);
    return cx_i_times(v);
  }

  template <class T>
  CxT<T> h_t(int k, const Vec<T, N>& x) const {
    T xin = xin_t<T>(x);
    CxT<T> f1 = f1_t<T>(x), f2 = f2_t<T>(x);
    CxT<T> h1 = f1 / (2.0 * xin) + f2 / (4.0 * xin * xin);
    if (k == 1) return h1;
    if (k == 2) return f2 / (4.0 * xin);
    return h1 / xin;  // h0
  }

  // F_1..F_4: z-coefficients of i L1 psi_1 + L2 psi_0
  template <class T>
  CxT<T> F_t(int m, const Vec<T, N>& x) const {
    auto gi = ginv_t<T>(x);
    auto dgx = divginv_t<T>(x);
    T dgxi(0.0);
    for (int j = 0; j < N; ++j) dgxi += dgx[j] * probe_.xi[j];

    auto xs = jet_seed<T, N>(x);
    auto xinj = xin_t<Dual<T, N>>(xs);
    Vec<T, N> grad_xin{};
    for (int j = 0; j < N; ++j) grad_xin[j] = xinj.d[j];
    T xi_d_xin(0.0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) xi_d_xin += gi[i][j] * probe_.xi[i] * grad_xin[j];

    auto L1h = [&](int k) {
      auto hj = h_t<Dual<T, N>>(k, xs);
      T a(0.0), b(0.0);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          a += gi[i][j] * probe_.xi[i] * hj.re.d[j] * 2.0;
          b += gi[i][j] * probe_.xi[i] * hj.im.d[j] * 2.0;
        }
      CxT<T> g2(a, b);
      return g2 + dgxi * CxT<T>(hj.re.v, hj.im.v);
    };

    const auto I = [](const CxT<T>& z) { return cx_i_times(z); };

    if (m == 4) {
      CxT<T> h2 = h_t<T>(2, x);
      return I(h2 * xi_d_xin) * (-2.0);
    }

    if (m == 1) {
      // i L1 h0 + L2 eta~
      auto x1 = jet_seed<T, N>(x);
      auto ej = eta_t_t<Dual<Dual<T, N>, N>>(jet_seed<Dual<T, N>, N>(x1));
      T acc(0.0);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) acc += gi[i][j] * ej.d[i].d[j];
      for (int j = 0; j < N; ++j) acc += dgx[j] * ej.d[j].v;
      T L2eta = acc - V_->eval(x) * ej.v.v;
      return I(L1h(0)) + CxT<T>(L2eta);
    }

    if (m == 2) {
      // i L1 h1 - 2 i (xi.d xin) h0 - (eta~ A1 + 2 <d eta~, d xin>_g)
      auto x1 = jet_seed<T, N>(x);
      auto xin2 = xin_t<Dual<Dual<T, N>, N>>(jet_seed<Dual<T, N>, N>(x1));
      T a1(0.0);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) a1 += gi[i][j] * xin2.d[i].d[j];
      for (int j = 0; j < N; ++j) a1 += dgx[j] * grad_xin[j];
      auto ed = eta_t_t<Dual<T, N>>(xs);
      T cross(0.0);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) cross += gi[i][j] * ed.d[i] * grad_xin[j];
      CxT<T> h0 = h_t<T>(0, x);
      return I(L1h(1)) - I(h0 * xi_d_xin) * 2.0 - CxT<T>(ed.v * a1 + 2.0 * cross);
    }

    // m == 3: i L1 h2 - 2 i (xi.d xin) h1 + |d xin|_g^2 eta~
    T dxin2(0.0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) dxin2 += gi[i][j] * grad_xin[i] * grad_xin[j];
    CxT<T> h1 = h_t<T>(1, x);
    return I(L1h(2)) - I(h1 * xi_d_xin) * 2.0 + CxT<T>(eta_t_t<T>(x) * dxin2);
  }

  template <class T>
  CxT<T> H_t(int k, const Vec<T, N>& x) const {
    T xin = xin_t<T>(x);
    CxT<T> F1 = F_t<T>(1, x), F2 = F_t<T>(2, x), F3 = F_t<T>(3, x), F4 = F_t<T>(4, x);
    CxT<T> H4 = F4 / (8.0 * xin);
    if (k == 4) return H4;
    CxT<T> H3 = (F3 + 12.0 * H4) / (6.0 * xin);
    if (k == 3) return H3;
    CxT<T> H2 = (F2 + 6.0 * H3) / (4.0 * xin);
    if (k == 2) return H2;
    CxT<T> H1 = (F1 + 2.0 * H2) / (2.0 * xin);
    if (k == 1) return H1;
    return H1 / xin;  // H0
  }

  // gradient/Hessian extractions of the complex coefficients
  Vec<Cd, N> grad_of_h(int k, const Vec<double, N>& x) const {
    auto hj = h_t<Jet1<N>>(k, jet_seed<double, N>(x));
    Vec<Cd, N> out;
    for (int j = 0; j < N; ++j) out[j] = Cd(hj.re.d[j], hj.im.d[j]);
    return out;
  }
  Vec<Cd, N> grad_of_H(int k, const Vec<double, N>& x) const {
    auto hj = H_t<Jet1<N>>(k, jet_seed<double, N>(x));
    Vec<Cd, N> out;
    for (int j = 0; j < N; ++j) out[j] = Cd(hj.re.d[j], hj.im.d[j]);
    return out;
  }
  Cd L2_of_h(int k, const Vec<double, N>& x, const Mat<double, N>& gi,
             const Vec<double, N>& dgx) const {
    auto x1 = jet_seed<double, N>(x);
    auto hj = h_t<Jet2<N>>(k, jet_seed<Jet1<N>, N>(x1));
    Cd acc(0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) acc += gi[i][j] * Cd(jet_value(hj.re.d[i].d[j]), jet_value(hj.im.d[i].d[j]));
    for (int j = 0; j < N; ++j) acc += dgx[j] * Cd(jet_value(hj.re.d[j]), jet_value(hj.im.d[j]));
    return acc - V_->eval(x) * Cd(jet_value(hj.re), jet_value(hj.im));
  }
  Cd L2_of_H(int k, const Vec<double, N>& x, const Mat<double, N>& gi,
             const Vec<double, N>& dgx) const {
    auto x1 = jet_seed<double, N>(x);
    auto hj = H_t<Jet2<N>>(k, jet_seed<Jet1<N>, N>(x1));
    Cd acc(0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) acc += gi[i][j] * Cd(jet_value(hj.re.d[i].d[j]), jet_value(hj.im.d[i].d[j]));
    for (int j = 0; j < N; ++j) acc += dgx[j] * Cd(jet_value(hj.re.d[j]), jet_value(hj.im.d[j]));
    return acc - V_->eval(x) * Cd(jet_value(hj.re), jet_value(hj.im));
  }

  static std::array<Cd, 5> poly_of(const Coeffs& c, int k) {
    std::array<Cd, 5> p{};
    if (k == 0) {
      p[0] = c.eta_t;
    } else if (k == 1) {
      p[0] = c.h0;
      p[1] = c.h1;
      p[2] = c.h2;
    } else {
      p[0] = c.H0;
      p[1] = c.H1;
      p[2] = c.H2;
      p[3] = c.H3;
      p[4] = c.H4;
    }
    return p;
  }

  // full psi_k(x, z) at jet level T
  template <class T>
  CxT<T> psi_full(int k, const Vec<T, N>& x, double z) const {
    T a = xin_t<T>(x);
    CxT<T> p(0.0);
    if (k == 0) {
      p = CxT<T>(eta_t_t<T>(x));
    } else if (k == 1) {
      CxT<T> h0 = h_t<T>(0, x), h1 = h_t<T>(1, x), h2 = h_t<T>(2, x);
      p = h0 + z * h1 + (z * z) * h2;
    } else {
      CxT<T> H0 = H_t<T>(0, x), H1 = H_t<T>(1, x), H2 = H_t<T>(2, x), H3 = H_t<T>(3, x),
             H4 = H_t<T>(4, x);
      p = H0 + z * H1 + (z * z) * H2 + (z * z * z) * H3 + (z * z * z * z) * H4;
    }
    return p * exp(a * (-z));
  }

  // Phi_N(x, y) with x at jet level T (y fixed)
  template <class T>
  CxT<T> phi_full_t(const Vec<T, N>& x, double y) const {
    double nn = probe_.freq;
    double z_scale = nn * y;
    CxT<T> s = psi_full<T>(0, x, z_scale);
    s = s + psi_full<T>(1, x, z_scale) / nn;
    s = s + psi_full<T>(2, x, z_scale) / (nn * nn);
    // phase e^{i nn x.xi}
    T ph(0.0);
    for (int k = 0; k < N; ++k) ph += x[k] * (nn * probe_.xi[k]);
    CxT<T> e(cos(ph), sin(ph));
    return s * e;
  }

  // d^2/dy^2 of Phi_N at (x, y), closed form in y
  Cd phi_dyy(const Vec<double, N>& x, double y) const {
    auto c = coeffs(x);
    double nn = probe_.freq;
    double z = nn * y;
    Cd acc(0);
    for (int k = 0; k < 3; ++k) {
      auto p = poly_of(c, k);
      // d_z^2 (p e^{-az}) = (p'' - 2 a p' + a^2 p) e^{-az}
      std::array<Cd, 5> dp{}, ddp{};
      for (int m = 1; m < 5; ++m) dp[m - 1] = double(m) * p[m];
      for (int m = 1; m < 5; ++m) ddp[m - 1] = double(m) * dp[m];
      Cd s(0);
      double zp = 1;
      for (int m = 0; m < 5; ++m) {
        s += (ddp[m] - 2.0 * c.xin * dp[m] + c.xin * c.xin * p[m]) * zp;
        zp *= z;
      }
      // d_y^2 = nn^2 d_z^2 and psi_k carries freq^{-k}
      acc += s * std::pow(nn, 2.0 - k);
    }
    double ph = phase(x);
    return acc * std::exp(-c.xin * z) * Cd(std::cos(ph), std::sin(ph));
  }

  std::shared_ptr<const MetricField<N>> g_;
  std::shared_ptr<const ScalarField<N>> V_;
  OscillatoryProbe<N> probe_;

  static double contract(const Mat<double, N>& gi, const Vec<double, N>& a, const Vec<double, N>& b) {
    double s = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) s += gi[i][j] * a[i] * b[j];
    return s;
  }
  double contract_xi(const Mat<double, N>& gi, const Vec<double, N>& a) const {
    double s = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) s += gi[i][j] * probe_.xi[i] * a[j];
    return s;
  }
};

template <int N>
WkbSolution<N> build_wkb(std::shared_ptr<const MetricField<N>> g,
                         std::shared_ptr<const ScalarField<N>> V, OscillatoryProbe<N> probe) {
  return WkbSolution<N>(std::move(g), std::move(V), std::move(probe));
}

// ---- residual norms ----------------------------------------------------

struct ResidualReport {
  std::vector<double> freqs;
  std::vector<double> abs_norm;  // L2(Omega x (0, y_max)) of the residual
  std::vector<double> rel_norm;  // normalized by ||Phi_N||_{L2}
  double slope = 0;              // least-squares slope of log rel_norm vs log freq
};

// Closed-form y-integrals int_0^inf z^m e^{-2 xin z} dz = m!/(2 xin)^{m+1};
// requires y_max * freq * min|xi|_g >= 20 so the truncation tail is negligible.
template <int N>
ResidualReport wkb_residual(const WkbSolution<N>& sol, const Grid& grid, double y_max,
                            const std::vector<double>& freqs) {
  if (freqs.size() < 2) throw std::invalid_argument("wkb_residual: need at least two frequencies");
  double fmax = *std::max_element(freqs.begin(), freqs.end());

  struct NodeData {
    double w;
    typename WkbSolution<N>::Bands b;
    typename WkbSolution<N>::Coeffs c;
  };
  std::vector<NodeData> data;
  double min_xin = 1e300;
  for (int k = 0; k < grid.interior_count(); ++k) {
    auto x = grid.point_vec<N>(grid.interior_gid(k));
    if (sol.eta_value(x) == 0.0) continue;
    NodeData nd;
    nd.w = grid.lebesgue_weight(k);
    nd.b = sol.bands(x);
    nd.c = sol.coeffs(x);
    for (int m = 0; m < 7; ++m) {
      if (m < 6 && (std::isnan(nd.b.c1[m].real()) || std::isnan(nd.b.c1[m].imag())))
        throw std::runtime_error("wkb_residual: non-smooth field derivatives (NaN)");
      if (std::isnan(nd.b.c2[m].real()) || std::isnan(nd.b.c2[m].imag()))
        throw std::runtime_error("wkb_residual: non-smooth field derivatives (NaN)");
    }
    min_xin = std::min(min_xin, nd.b.xin);
    data.push_back(std::move(nd));
  }
  if (data.empty()) {
    ResidualReport r;
    r.freqs = freqs;
    r.abs_norm.assign(freqs.size(), 0.0);
    r.rel_norm.assign(freqs.size(), 0.0);
    return r;
  }
  if (y_max * fmax * min_xin < 20.0)
    throw std::invalid_argument("wkb_residual: y_max too small for the largest frequency");

  static const double fact[14] = {1,    1,     2,      6,       24,       120,        720,
                                  5040, 40320, 362880, 3628800, 39916800, 479001600., 6227020800.};

  ResidualReport rep;
  rep.freqs = freqs;
  for (double nn : freqs) {
    double num2 = 0, den2 = 0;
    for (const auto& nd : data) {
      std::array<Cd, 7> a{};
      for (int m = 0; m < 7; ++m) {
        Cd v = nd.b.c2[m] / (nn * nn);
        if (m < 6) v += nd.b.c1[m] / nn;
        a[m] = v;
      }
      std::array<Cd, 5> p{};
      p[0] = nd.c.eta_t + nd.c.h0 / nn + nd.c.H0 / (nn * nn);
      p[1] = nd.c.h1 / nn + nd.c.H1 / (nn * nn);
      p[2] = nd.c.h2 / nn + nd.c.H2 / (nn * nn);
      p[3] = nd.c.H3 / (nn * nn);
      p[4] = nd.c.H4 / (nn * nn);
      double ax = 2.0 * nd.b.xin;
      double Inum = 0, Iden = 0;
      for (int m = 0; m < 7; ++m)
        for (int mm = 0; mm < 7; ++mm) {
          double mom = fact[m + mm] / std::pow(ax, m + mm + 1);
          Inum += (a[m] * std::conj(a[mm])).real() * mom;
          if (m < 5 && mm < 5) Iden += (p[m] * std::conj(p[mm])).real() * mom;
        }
      num2 += nd.w * Inum / nn;
      den2 += nd.w * Iden / nn;
    }
    rep.abs_norm.push_back(std::sqrt(num2));
    rep.rel_norm.push_back(std::sqrt(num2 / den2));
  }

  // slope of log rel vs log freq
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = static_cast<int>(freqs.size());
  for (int i = 0; i < n; ++i) {
    double lx = std::log(freqs[i]), ly = std::log(rep.rel_norm[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

// max relative deviation of -d_y Phi_N|_{y=0} from phi_N over the grid,
// real and imaginary parts separately
template <int N>
std::pair<double, double> wkb_neumann_check(const WkbSolution<N>& sol, const Grid& grid) {
  double max_re = 0, max_im = 0, scale = 0;
  for (int k = 0; k < grid.interior_count(); ++k) {
    auto x = grid.point_vec<N>(grid.interior_gid(k));
    Cd got = sol.phi_neumann(x);
    Cd want = sol.phi_N_data(x);
    max_re = std::max(max_re, std::abs(got.real() - want.real()));
    max_im = std::max(max_im, std::abs(got.imag() - want.imag()));
    scale = std::max(scale, std::abs(want));
  }
  if (scale == 0) return {0, 0};
  return {max_re / scale, max_im / scale};
}

}  // namespace translab::wkb
