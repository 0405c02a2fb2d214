#pragma once

#include <string>
#include <vector>

namespace translab::calculus {

// Gauss-Legendre nodes/weights on [-1, 1]
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Quadrature over (0, infinity) as explicit nodes/weights in the original
// variable. Construction embeds the substitution (log panels for dt/t-type
// integrals, tau = sigma^2 for the transmutation integral); a coarsened
// companion rule provides the error estimate.
struct QuadratureRule {
  std::string scheme;
  std::vector<double> nodes;    // strictly increasing, > 0
  std::vector<double> weights;  // positive
  std::vector<double> nodes_coarse;
  std::vector<double> weights_coarse;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;

  // composite Gauss panels in u = log t covering [t_min, t_max]
  static QuadratureRule log_panels(double t_min, double t_max, double panel_width = 1.0,
                                   int points_per_panel = 16);

  // tau-rule for the Gaussian-weighted sine integral: tau = sigma^2 with
  // composite Gauss panels in sigma on (0, 2 sqrt(t) v_max]; panel width
  // resolves oscillation up to frequency mu_max in sigma
  static QuadratureRule kannai_tau(double t, double mu_max, double v_max = 7.0);

  template <class F>
  double integrate(F&& f) const {
    double s = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * f(nodes[j]);
    return s;
  }
  template <class F>
  double integrate_coarse(F&& f) const {
    double s = 0;
    for (std::size_t j = 0; j < nodes_coarse.size(); ++j) s += weights_coarse[j] * f(nodes_coarse[j]);
    return s;
  }
};

// composite Simpson weights on a uniform mesh with m >= 2 points
// (3/8 correction when the interval count is odd; trapezoid for m = 2)
std::vector<double> simpson_weights(int m, double dt);

}  // namespace translab::calculus
