#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "translab/jet.hpp"

// Analytic metric/potential fields and diffeomorphisms on Omega, with
// evaluation overloads at every jet order the rest of the project needs.
// Presets implement a single templated formula; derivatives of any
// composition (pullbacks in particular) follow from the jet arithmetic
// instead of hand-written chain rules.

namespace translab::geometry {

// ---------------------------------------------------------------- small mats

template <class T, int N>
T mat_det(const Mat<T, N>& a) {
  if constexpr (N == 1) {
    return a[0][0];
  } else {
    return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  }
}

template <class T, int N>
Mat<T, N> mat_inv(const Mat<T, N>& a) {
  Mat<T, N> r;
  if constexpr (N == 1) {
    r[0][0] = T(1.0) / a[0][0];
  } else {
    T inv_det = T(1.0) / mat_det<T, N>(a);
    r[0][0] = a[1][1] * inv_det;
    r[1][1] = a[0][0] * inv_det;
    r[0][1] = -a[0][1] * inv_det;
    r[1][0] = -a[1][0] * inv_det;
  }
  return r;
}

template <class T, int N>
T quad_form(const Mat<T, N>& a, const Vec<double, N>& xi) {
  T s(0.0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) s += a[i][j] * (xi[i] * xi[j]);
  return s;
}

// ------------------------------------------------------------------- scalars

template <int N>
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double eval(const Vec<double, N>& x) const = 0;
  virtual Jet1<N> eval(const Vec<Jet1<N>, N>& x) const = 0;
  virtual Jet2<N> eval(const Vec<Jet2<N>, N>& x) const = 0;
  virtual Jet3<N> eval(const Vec<Jet3<N>, N>& x) const = 0;
  virtual Jet4<N> eval(const Vec<Jet4<N>, N>& x) const = 0;

  double operator()(const Vec<double, N>& x) const { return eval(x); }

  Vec<double, N> gradient(const Vec<double, N>& x) const {
    auto fx = eval(jet_seed<double, N>(x));
    Vec<double, N> g;
    for (int i = 0; i < N; ++i) g[i] = fx.d[i];
    return g;
  }
  Mat<double, N> hessian(const Vec<double, N>& x) const {
    auto x1 = jet_seed<double, N>(x);
    auto fx = eval(jet_seed<Jet1<N>, N>(x1));
    Mat<double, N> h;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) h[i][j] = fx.d[i].d[j];
    return h;
  }
};

template <int N, class D>
class ScalarFieldOf : public ScalarField<N> {
 public:
  double eval(const Vec<double, N>& x) const override { return self().template formula<double>(x); }
  Jet1<N> eval(const Vec<Jet1<N>, N>& x) const override { return self().template formula<Jet1<N>>(x); }
  Jet2<N> eval(const Vec<Jet2<N>, N>& x) const override { return self().template formula<Jet2<N>>(x); }
  Jet3<N> eval(const Vec<Jet3<N>, N>& x) const override { return self().template formula<Jet3<N>>(x); }
  Jet4<N> eval(const Vec<Jet4<N>, N>& x) const override { return self().template formula<Jet4<N>>(x); }

 private:
  const D& self() const { return static_cast<const D&>(*this); }
};

// ------------------------------------------------------------------- metrics

template <int N>
class MetricField {
 public:
  virtual ~MetricField() = default;
  virtual Mat<double, N> eval(const Vec<double, N>& x) const = 0;
  virtual Mat<Jet1<N>, N> eval(const Vec<Jet1<N>, N>& x) const = 0;
  virtual Mat<Jet2<N>, N> eval(const Vec<Jet2<N>, N>& x) const = 0;
  virtual Mat<Jet3<N>, N> eval(const Vec<Jet3<N>, N>& x) const = 0;
  virtual Mat<Jet4<N>, N> eval(const Vec<Jet4<N>, N>& x) const = 0;

  // ellipticity class constant, lambda |xi|^2 <= g_ij xi^i xi^j <= |xi|^2 / lambda
  double ellipticity() const { return lambda_; }
  void set_ellipticity(double l) { lambda_ = l; }

  Mat<double, N> g(const Vec<double, N>& x) const { return eval(x); }
  Mat<double, N> ginv(const Vec<double, N>& x) const { return mat_inv<double, N>(eval(x)); }
  double det(const Vec<double, N>& x) const { return mat_det<double, N>(eval(x)); }
  double sqrt_det(const Vec<double, N>& x) const { return std::sqrt(det(x)); }

  // d_k g_ij
  std::array<Mat<double, N>, N> dg(const Vec<double, N>& x) const {
    auto gx = eval(jet_seed<double, N>(x));
    std::array<Mat<double, N>, N> r;
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r[k][i][j] = gx[i][j].d[k];
    return r;
  }
  // d_k d_l g_ij, indexed [k][l]
  std::array<std::array<Mat<double, N>, N>, N> d2g(const Vec<double, N>& x) const {
    auto x1 = jet_seed<double, N>(x);
    auto gx = eval(jet_seed<Jet1<N>, N>(x1));
    std::array<std::array<Mat<double, N>, N>, N> r;
    for (int k = 0; k < N; ++k)
      for (int l = 0; l < N; ++l)
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) r[k][l][i][j] = gx[i][j].d[k].d[l];
    return r;
  }

 private:
  double lambda_ = 1.0;
};

template <int N, class D>
class MetricFieldOf : public MetricField<N> {
 public:
  Mat<double, N> eval(const Vec<double, N>& x) const override { return self().template formula<double>(x); }
  Mat<Jet1<N>, N> eval(const Vec<Jet1<N>, N>& x) const override { return self().template formula<Jet1<N>>(x); }
  Mat<Jet2<N>, N> eval(const Vec<Jet2<N>, N>& x) const override { return self().template formula<Jet2<N>>(x); }
  Mat<Jet3<N>, N> eval(const Vec<Jet3<N>, N>& x) const override { return self().template formula<Jet3<N>>(x); }
  Mat<Jet4<N>, N> eval(const Vec<Jet4<N>, N>& x) const override { return self().template formula<Jet4<N>>(x); }

 private:
  const D& self() const { return static_cast<const D&>(*this); }
};

// |xi|_g = sqrt(g^{ij} xi_i xi_j); the WKB cascade divides by it, xi = 0 is rejected
template <int N>
double metric_norm(const MetricField<N>& g, const Vec<double, N>& x, const Vec<double, N>& xi) {
  double nrm2 = 0;
  for (int i = 0; i < N; ++i) nrm2 += xi[i] * xi[i];
  if (nrm2 == 0.0) throw std::invalid_argument("metric_norm: xi must be nonzero");
  return std::sqrt(quad_form<double, N>(mat_inv<double, N>(g.eval(x)), xi));
}

// ---------------------------------------------------------------------- bump

// C^infty bump on |u|<1, normalized to 1 at u=0
template <class T>
T bump_profile(const T& u) {
  double uv = jet_value(u);
  if (uv * uv >= 1.0) return T(0.0);
  return exp(1.0 - 1.0 / (1.0 - u * u));
}

template <class T, int N>
T bump_nd(const Vec<T, N>& x, const Vec<double, N>& center, double width) {
  T r(1.0);
  for (int k = 0; k < N; ++k) r = r * bump_profile((x[k] - center[k]) / width);
  return r;
}

// ------------------------------------------------------------------- presets

template <int N>
class IdentityMetric final : public MetricFieldOf<N, IdentityMetric<N>> {
 public:
  IdentityMetric() { this->set_ellipticity(1.0); }
  template <class T>
  Mat<T, N> formula(const Vec<T, N>&) const {
    Mat<T, N> r{};
    for (int i = 0; i < N; ++i) r[i][i] = T(1.0);
    return r;
  }
};

// g_kk(x) = a_k + b_k x_k^2, off-diagonal zero
template <int N>
class DiagonalPolyMetric final : public MetricFieldOf<N, DiagonalPolyMetric<N>> {
 public:
  DiagonalPolyMetric(const Vec<double, N>& a, const Vec<double, N>& b) : a_(a), b_(b) {
    for (int k = 0; k < N; ++k)
      if (a_[k] <= 0) throw std::invalid_argument("DiagonalPolyMetric: a_k must be positive");
  }
  template <class T>
  Mat<T, N> formula(const Vec<T, N>& x) const {
    Mat<T, N> r{};
    for (int k = 0; k < N; ++k) r[k][k] = a_[k] + b_[k] * (x[k] * x[k]);
    return r;
  }

 private:
  Vec<double, N> a_, b_;
};

// 2D metric with a localized off-diagonal coupling
class OffdiagBumpMetric final : public MetricFieldOf<2, OffdiagBumpMetric> {
 public:
  OffdiagBumpMetric(double d1, double d2, double amp, const Vec<double, 2>& center, double width)
      : d1_(d1), d2_(d2), amp_(amp), center_(center), width_(width) {
    if (amp_ * amp_ >= d1_ * d2_)
      throw std::invalid_argument("OffdiagBumpMetric: |amp| too large for positive definiteness");
  }
  template <class T>
  Mat<T, 2> formula(const Vec<T, 2>& x) const {
    Mat<T, 2> r{};
    r[0][0] = T(d1_);
    r[1][1] = T(d2_);
    r[0][1] = r[1][0] = amp_ * bump_nd<T, 2>(x, center_, width_);
    return r;
  }

 private:
  double d1_, d2_, amp_;
  Vec<double, 2> center_;
  double width_;
};

template <int N>
class ZeroPotential final : public ScalarFieldOf<N, ZeroPotential<N>> {
 public:
  template <class T>
  T formula(const Vec<T, N>&) const {
    return T(0.0);
  }
};

// V(x) = c0 + amp * exp(-|x - c|^2 / (2 sigma^2)); nonnegative for c0, amp >= 0
template <int N>
class GaussianPotential final : public ScalarFieldOf<N, GaussianPotential<N>> {
 public:
  GaussianPotential(double c0, double amp, const Vec<double, N>& center, double sigma)
      : c0_(c0), amp_(amp), center_(center), sigma_(sigma) {
    if (c0 < 0 || amp < 0) throw std::invalid_argument("GaussianPotential: requires c0, amp >= 0");
  }
  template <class T>
  T formula(const Vec<T, N>& x) const {
    T q(0.0);
    for (int k = 0; k < N; ++k) q += (x[k] - center_[k]) * (x[k] - center_[k]);
    return c0_ + amp_ * exp(q * (-0.5 / (sigma_ * sigma_)));
  }

 private:
  double c0_, amp_;
  Vec<double, N> center_;
  double sigma_;
};

// C^{p-1} polynomial bump prod_k (1 - u_k^2)^p; tame derivative growth makes
// it the default probe profile for the oscillatory asymptotics
template <int N>
class PolynomialBump final : public ScalarFieldOf<N, PolynomialBump<N>> {
 public:
  PolynomialBump(double amp, const Vec<double, N>& center, double width, int exponent = 8)
      : amp_(amp), center_(center), width_(width), p_(exponent) {
    if (exponent < 5) throw std::invalid_argument("PolynomialBump: exponent >= 5 (four derivatives used)");
  }
  template <class T>
  T formula(const Vec<T, N>& x) const {
    T r(amp_);
    for (int k = 0; k < N; ++k) {
      T u = (x[k] - center_[k]) / width_;
      double uv = jet_value(u);
      if (uv * uv >= 1.0) return T(0.0);
      r = r * jet_pow_int(1.0 - u * u, p_);
    }
    return r;
  }

 private:
  double amp_;
  Vec<double, N> center_;
  double width_;
  int p_;
};

// compactly supported nonnegative potential perturbation (test construction)
template <int N>
class CompactBumpPotential final : public ScalarFieldOf<N, CompactBumpPotential<N>> {
 public:
  CompactBumpPotential(double amp, const Vec<double, N>& center, double width)
      : amp_(amp), center_(center), width_(width) {
    if (amp < 0) throw std::invalid_argument("CompactBumpPotential: amp >= 0");
  }
  template <class T>
  T formula(const Vec<T, N>& x) const {
    return amp_ * bump_nd<T, N>(x, center_, width_);
  }

 private:
  double amp_;
  Vec<double, N> center_;
  double width_;
};

// pointwise sum, keeps analytic jets of both parts
template <int N>
class SumPotential final : public ScalarField<N> {
 public:
  SumPotential(std::shared_ptr<const ScalarField<N>> a, std::shared_ptr<const ScalarField<N>> b)
      : a_(std::move(a)), b_(std::move(b)) {}
  double eval(const Vec<double, N>& x) const override { return a_->eval(x) + b_->eval(x); }
  Jet1<N> eval(const Vec<Jet1<N>, N>& x) const override { return a_->eval(x) + b_->eval(x); }
  Jet2<N> eval(const Vec<Jet2<N>, N>& x) const override { return a_->eval(x) + b_->eval(x); }
  Jet3<N> eval(const Vec<Jet3<N>, N>& x) const override { return a_->eval(x) + b_->eval(x); }
  Jet4<N> eval(const Vec<Jet4<N>, N>& x) const override { return a_->eval(x) + b_->eval(x); }

 private:
  std::shared_ptr<const ScalarField<N>> a_, b_;
};

// ------------------------------------------------------------ diffeomorphisms

template <int N>
struct Box {
  Vec<double, N> lo{}, hi{};
  bool contains(const Vec<double, N>& x) const {
    for (int k = 0; k < N; ++k)
      if (x[k] < lo[k] || x[k] > hi[k]) return false;
    return true;
  }
};

template <int N>
class Diffeomorphism {
 public:
  virtual ~Diffeomorphism() = default;
  virtual Vec<double, N> eval(const Vec<double, N>& x) const = 0;
  virtual Vec<Jet1<N>, N> eval(const Vec<Jet1<N>, N>& x) const = 0;
  virtual Vec<Jet2<N>, N> eval(const Vec<Jet2<N>, N>& x) const = 0;
  virtual Vec<Jet3<N>, N> eval(const Vec<Jet3<N>, N>& x) const = 0;
  virtual Vec<Jet4<N>, N> eval(const Vec<Jet4<N>, N>& x) const = 0;
  virtual Vec<Jet5<N>, N> eval(const Vec<Jet5<N>, N>& x) const = 0;

  // region on which the map is the identity (must contain a neighborhood of Gamma)
  virtual Box<N> frozen_region() const = 0;

  Vec<double, N> operator()(const Vec<double, N>& x) const { return eval(x); }

  Mat<double, N> jacobian(const Vec<double, N>& x) const {
    auto px = eval(jet_seed<double, N>(x));
    Mat<double, N> j;
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) j[i][k] = px[i].d[k];  // j[i][k] = d Psi^i / d x^k
    return j;
  }

  // Newton inversion; the deformations used here are small perturbations of the identity
  Vec<double, N> inverse(const Vec<double, N>& y) const {
    Vec<double, N> x = y;
    for (int it = 0; it < 60; ++it) {
      Vec<double, N> r = eval(x);
      double err2 = 0;
      for (int k = 0; k < N; ++k) {
        r[k] -= y[k];
        err2 += r[k] * r[k];
      }
      if (err2 < 1e-30) break;
      Mat<double, N> jinv = mat_inv<double, N>(jacobian(x));
      for (int i = 0; i < N; ++i) {
        double s = 0;
        for (int k = 0; k < N; ++k) s += jinv[i][k] * r[k];
        x[i] -= s;
      }
    }
    return x;
  }
};

template <int N, class D>
class DiffeomorphismOf : public Diffeomorphism<N> {
 public:
  Vec<double, N> eval(const Vec<double, N>& x) const override { return self().template formula<double>(x); }
  Vec<Jet1<N>, N> eval(const Vec<Jet1<N>, N>& x) const override { return self().template formula<Jet1<N>>(x); }
  Vec<Jet2<N>, N> eval(const Vec<Jet2<N>, N>& x) const override { return self().template formula<Jet2<N>>(x); }
  Vec<Jet3<N>, N> eval(const Vec<Jet3<N>, N>& x) const override { return self().template formula<Jet3<N>>(x); }
  Vec<Jet4<N>, N> eval(const Vec<Jet4<N>, N>& x) const override { return self().template formula<Jet4<N>>(x); }
  Vec<Jet5<N>, N> eval(const Vec<Jet5<N>, N>& x) const override { return self().template formula<Jet5<N>>(x); }

 private:
  const D& self() const { return static_cast<const D&>(*this); }
};

template <int N>
class IdentityDiffeo final : public DiffeomorphismOf<N, IdentityDiffeo<N>> {
 public:
  explicit IdentityDiffeo(const Box<N>& frozen) : frozen_(frozen) {}
  template <class T>
  Vec<T, N> formula(const Vec<T, N>& x) const {
    return x;
  }
  Box<N> frozen_region() const override { return frozen_; }

 private:
  Box<N> frozen_;
};

// Psi(x) = x + amp * bump(x; center, width) * dir; supported away from the frozen region
template <int N>
class BumpShiftDiffeo final : public DiffeomorphismOf<N, BumpShiftDiffeo<N>> {
 public:
  BumpShiftDiffeo(double amp, const Vec<double, N>& center, double width, const Vec<double, N>& dir,
                  const Box<N>& frozen)
      : amp_(amp), center_(center), width_(width), dir_(dir), frozen_(frozen) {
    bool disjoint = false;
    for (int k = 0; k < N; ++k) {
      double lo = center[k] - width, hi = center[k] + width;
      if (hi < frozen.lo[k] || lo > frozen.hi[k]) disjoint = true;  // separated on one axis suffices
    }
    if (!disjoint)
      throw std::invalid_argument("BumpShiftDiffeo: bump support intersects the frozen region");
  }
  template <class T>
  Vec<T, N> formula(const Vec<T, N>& x) const {
    T b = bump_nd<T, N>(x, center_, width_);
    Vec<T, N> r = x;
    for (int k = 0; k < N; ++k) r[k] += amp_ * dir_[k] * b;
    return r;
  }
  Box<N> frozen_region() const override { return frozen_; }

 private:
  double amp_;
  Vec<double, N> center_;
  double width_;
  Vec<double, N> dir_;
  Box<N> frozen_;
};

template <int N>
class ComposedDiffeo final : public Diffeomorphism<N> {
 public:
  // psi2 after psi1
  ComposedDiffeo(std::shared_ptr<const Diffeomorphism<N>> psi2,
                 std::shared_ptr<const Diffeomorphism<N>> psi1)
      : psi2_(std::move(psi2)), psi1_(std::move(psi1)) {}

  Vec<double, N> eval(const Vec<double, N>& x) const override { return psi2_->eval(psi1_->eval(x)); }
  Vec<Jet1<N>, N> eval(const Vec<Jet1<N>, N>& x) const override { return psi2_->eval(psi1_->eval(x)); }
  Vec<Jet2<N>, N> eval(const Vec<Jet2<N>, N>& x) const override { return psi2_->eval(psi1_->eval(x)); }
  Vec<Jet3<N>, N> eval(const Vec<Jet3<N>, N>& x) const override { return psi2_->eval(psi1_->eval(x)); }
  Vec<Jet4<N>, N> eval(const Vec<Jet4<N>, N>& x) const override { return psi2_->eval(psi1_->eval(x)); }
  Vec<Jet5<N>, N> eval(const Vec<Jet5<N>, N>& x) const override { return psi2_->eval(psi1_->eval(x)); }

  Box<N> frozen_region() const override {
    Box<N> a = psi1_->frozen_region(), b = psi2_->frozen_region(), r;
    for (int k = 0; k < N; ++k) {
      r.lo[k] = std::max(a.lo[k], b.lo[k]);
      r.hi[k] = std::min(a.hi[k], b.hi[k]);
    }
    return r;
  }

 private:
  std::shared_ptr<const Diffeomorphism<N>> psi2_, psi1_;
};

// ------------------------------------------------------------------ pullback

// (Psi* g)_{ij}(x) = dPsi^k/dx^i  g_{kl}(Psi(x))  dPsi^l/dx^j
template <int N>
class PullbackMetric final : public MetricField<N> {
 public:
  PullbackMetric(std::shared_ptr<const Diffeomorphism<N>> psi,
                 std::shared_ptr<const MetricField<N>> base)
      : psi_(std::move(psi)), base_(std::move(base)) {
    this->set_ellipticity(base_->ellipticity());
  }

  Mat<double, N> eval(const Vec<double, N>& x) const override { return formula<double>(x); }
  Mat<Jet1<N>, N> eval(const Vec<Jet1<N>, N>& x) const override { return formula<Jet1<N>>(x); }
  Mat<Jet2<N>, N> eval(const Vec<Jet2<N>, N>& x) const override { return formula<Jet2<N>>(x); }
  Mat<Jet3<N>, N> eval(const Vec<Jet3<N>, N>& x) const override { return formula<Jet3<N>>(x); }
  Mat<Jet4<N>, N> eval(const Vec<Jet4<N>, N>& x) const override { return formula<Jet4<N>>(x); }

 private:
  template <class T>
  Mat<T, N> formula(const Vec<T, N>& x) const {
    // Jacobian at level T needs one extra dual level on Psi
    auto px = psi_->eval(jet_seed<T, N>(x));
    Vec<T, N> y;
    Mat<T, N> j;
    for (int i = 0; i < N; ++i) {
      y[i] = px[i].v;
      for (int k = 0; k < N; ++k) j[i][k] = px[i].d[k];
    }
    Mat<T, N> gb = base_->eval(y);
    Mat<T, N> r{};
    for (int i = 0; i < N; ++i)
      for (int jdx = 0; jdx < N; ++jdx) {
        T s(0.0);
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) s += j[k][i] * gb[k][l] * j[l][jdx];
        r[i][jdx] = s;
      }
    return r;
  }

  std::shared_ptr<const Diffeomorphism<N>> psi_;
  std::shared_ptr<const MetricField<N>> base_;
};

template <int N>
class PullbackPotential final : public ScalarField<N> {
 public:
  PullbackPotential(std::shared_ptr<const Diffeomorphism<N>> psi,
                    std::shared_ptr<const ScalarField<N>> base)
      : psi_(std::move(psi)), base_(std::move(base)) {}

  double eval(const Vec<double, N>& x) const override { return base_->eval(psi_->eval(x)); }
  Jet1<N> eval(const Vec<Jet1<N>, N>& x) const override { return base_->eval(psi_->eval(x)); }
  Jet2<N> eval(const Vec<Jet2<N>, N>& x) const override { return base_->eval(psi_->eval(x)); }
  Jet3<N> eval(const Vec<Jet3<N>, N>& x) const override { return base_->eval(psi_->eval(x)); }
  Jet4<N> eval(const Vec<Jet4<N>, N>& x) const override { return base_->eval(psi_->eval(x)); }

 private:
  std::shared_ptr<const Diffeomorphism<N>> psi_;
  std::shared_ptr<const ScalarField<N>> base_;
};

template <int N>
struct FieldPair {
  std::shared_ptr<const MetricField<N>> metric;
  std::shared_ptr<const ScalarField<N>> potential;
};

// Validates the Jacobian on the sample points and returns (Psi* g, V o Psi).
template <int N>
FieldPair<N> pullback(std::shared_ptr<const Diffeomorphism<N>> psi,
                      std::shared_ptr<const MetricField<N>> g,
                      std::shared_ptr<const ScalarField<N>> v,
                      const std::vector<Vec<double, N>>& sample_points = {}) {
  for (const auto& x : sample_points) {
    double det = mat_det<double, N>(psi->jacobian(x));
    if (!(det > 1e-12)) throw std::invalid_argument("pullback: Jacobian singular or orientation-reversing");
  }
  FieldPair<N> out;
  out.metric = std::make_shared<PullbackMetric<N>>(psi, g);
  out.potential = std::make_shared<PullbackPotential<N>>(psi, v);
  return out;
}

}  // namespace translab::geometry
