#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

// Forward-mode dual numbers, nestable to obtain higher derivatives.
// Dual<double,N> carries one derivative order in N variables; nesting
// Dual<Dual<double,N>,N> carries two, and so on. All field presets and
// WKB coefficient functions are written as templates over the scalar
// type, so any composition (pullbacks included) has exact derivatives
// at every order the nesting provides.

namespace translab {

template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(double c) : v(c) {}  // constant lift, zero partials
  Dual(const T& value)
    requires(!std::is_same_v<T, double>)
      : v(value) {}

  static Dual variable(const T& value, int i) {
    Dual r(value);
    r.d[i] = T(1.0);
    return r;
  }

  Dual operator-() const {
    Dual r;
    r.v = -v;
    for (int i = 0; i < N; ++i) r.d[i] = -d[i];
    return r;
  }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v + b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v - b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v / b.v;
    const T inv2 = T(1.0) / (b.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
    return r;
  }

  friend Dual operator+(const Dual& a, double c) { return a + Dual(c); }
  friend Dual operator+(double c, const Dual& a) { return Dual(c) + a; }
  friend Dual operator-(const Dual& a, double c) { return a - Dual(c); }
  friend Dual operator-(double c, const Dual& a) { return Dual(c) - a; }
  friend Dual operator*(const Dual& a, double c) {
    Dual r;
    r.v = a.v * c;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * c;
    return r;
  }
  friend Dual operator*(double c, const Dual& a) { return a * c; }
  friend Dual operator/(const Dual& a, double c) { return a * (1.0 / c); }
  friend Dual operator/(double c, const Dual& a) { return Dual(c) / a; }

  Dual& operator+=(const Dual& b) { return *this = *this + b; }
  Dual& operator-=(const Dual& b) { return *this = *this - b; }
  Dual& operator*=(const Dual& b) { return *this = *this * b; }
  Dual& operator/=(const Dual& b) { return *this = *this / b; }
};

inline double jet_value(double x) { return x; }
template <class T, int N>
double jet_value(const Dual<T, N>& x) {
  return jet_value(x.v);
}

// chain rule for unary elementary functions: f(a), f'(a)
template <class T, int N>
Dual<T, N> jet_chain(const Dual<T, N>& a, const T& f, const T& fp) {
  Dual<T, N> r;
  r.v = f;
  for (int i = 0; i < N; ++i) r.d[i] = fp * a.d[i];
  return r;
}

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

template <class T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  T s = sqrt(a.v);
  return jet_chain(a, s, T(0.5) / s);
}
template <class T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  T e = exp(a.v);
  return jet_chain(a, e, e);
}
template <class T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
  return jet_chain(a, log(a.v), T(1.0) / a.v);
}
template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  return jet_chain(a, sin(a.v), cos(a.v));
}
template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  return jet_chain(a, cos(a.v), -sin(a.v));
}

template <class T>
T jet_pow_int(const T& a, int k) {
  T r(1.0);
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

// fixed nesting ladder used across the project
template <int N> using Jet1 = Dual<double, N>;
template <int N> using Jet2 = Dual<Jet1<N>, N>;
template <int N> using Jet3 = Dual<Jet2<N>, N>;
template <int N> using Jet4 = Dual<Jet3<N>, N>;
template <int N> using Jet5 = Dual<Jet4<N>, N>;

template <class T, int N>
using Vec = std::array<T, N>;

template <class T, int N>
using Mat = std::array<std::array<T, N>, N>;

template <class T, int N>
Vec<Dual<T, N>, N> jet_seed(const Vec<T, N>& x) {
  Vec<Dual<T, N>, N> s;
  for (int i = 0; i < N; ++i) s[i] = Dual<T, N>::variable(x[i], i);
  return s;
}

// minimal complex type over a generic real scalar (std::complex is not
// usable with dual coefficients)
template <class T>
struct Cx {
  T re{}, im{};
  Cx() = default;
  Cx(double r) : re(r), im(0.0) {}
  Cx(const T& r)
    requires(!std::is_same_v<T, double>)
      : re(r), im(0.0) {}
  Cx(const T& r, const T& i) : re(r), im(i) {}

  Cx operator-() const { return Cx(-re, -im); }
  friend Cx operator+(const Cx& a, const Cx& b) { return Cx(a.re + b.re, a.im + b.im); }
  friend Cx operator-(const Cx& a, const Cx& b) { return Cx(a.re - b.re, a.im - b.im); }
  friend Cx operator*(const Cx& a, const Cx& b) {
    return Cx(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend Cx operator*(const Cx& a, const T& s) { return Cx(a.re * s, a.im * s); }
  friend Cx operator*(const T& s, const Cx& a) { return a * s; }
  friend Cx operator*(const Cx& a, double s)
    requires(!std::is_same_v<T, double>)
  {
    return Cx(a.re * s, a.im * s);
  }
  friend Cx operator*(double s, const Cx& a)
    requires(!std::is_same_v<T, double>)
  {
    return Cx(a.re * s, a.im * s);
  }
  friend Cx operator/(const Cx& a, const T& s) { return Cx(a.re / s, a.im / s); }
  friend Cx operator/(const Cx& a, double s)
    requires(!std::is_same_v<T, double>)
  {
    return Cx(a.re * (1.0 / s), a.im * (1.0 / s));
  }
  Cx& operator+=(const Cx& b) { return *this = *this + b; }
  Cx& operator-=(const Cx& b) { return *this = *this - b; }
};

template <class T>
Cx<T> cx_i_times(const T& r) {  // i * r for real r
  return Cx<T>(T(0.0), r);
}
template <class T>
Cx<T> cx_i_times(const Cx<T>& z) {  // i * z
  return Cx<T>(-z.im, z.re);
}
template <class T>
Cx<T> conj(const Cx<T>& z) {
  return Cx<T>(z.re, -z.im);
}

}  // namespace translab
