#pragma once

#include <cmath>
#include <stdexcept>

namespace translab::calculus {

// Lanczos approximation (g = 7, 9 terms), relative accuracy ~1e-15 on the
// real axis away from the poles; reflection formula for x < 0.5.
inline double gamma_fn(double x) {
  static const double g = 7.0;
  static const double c[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                              771.32342877765313,   -176.61502916214059,   12.507343278686905,
                              -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x == std::floor(x) && x <= 0.0) throw std::domain_error("gamma_fn: pole at nonpositive integer");
  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
  }
  x -= 1.0;
  double a = c[0];
  double t = x + g + 0.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (x + i);
  return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

}  // namespace translab::calculus
