#include "translab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace translab::calculus {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

namespace {

void log_section(double t_lo, double t_hi, double panel_width, int pts,
                 std::vector<double>& nodes, std::vector<double>& weights) {
  std::vector<double> gx, gw;
  gauss_legendre(pts, gx, gw);
  double u0 = std::log(t_lo), u1 = std::log(t_hi);
  int panels = std::max(1, static_cast<int>(std::ceil((u1 - u0) / panel_width)));
  double du = (u1 - u0) / panels;
  for (int p = 0; p < panels; ++p) {
    double a = u0 + p * du, b = a + du;
    for (int j = 0; j < pts; ++j) {
      double u = 0.5 * (a + b) + 0.5 * (b - a) * gx[j];
      double t = std::exp(u);
      nodes.push_back(t);
      weights.push_back(0.5 * (b - a) * gw[j] * t);  // dt = t du
    }
  }
}

// panel edge snapped at t = 1 so integrands split there stay panel-smooth
void build_log_panels(double t_min, double t_max, double panel_width, int pts,
                      std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  if (t_min < 1.0 && 1.0 < t_max) {
    log_section(t_min, 1.0, panel_width, pts, nodes, weights);
    log_section(1.0, t_max, panel_width, pts, nodes, weights);
  } else {
    log_section(t_min, t_max, panel_width, pts, nodes, weights);
  }
}

void build_sigma_panels(double sigma_max, double panel_width, int pts,
                        std::vector<double>& nodes, std::vector<double>& weights) {
  std::vector<double> gx, gw;
  gauss_legendre(pts, gx, gw);
  int panels = std::max(8, static_cast<int>(std::ceil(sigma_max / panel_width)));
  double ds = sigma_max / panels;
  nodes.clear();
  weights.clear();
  for (int p = 0; p < panels; ++p) {
    double a = p * ds, b = a + ds;
    for (int j = 0; j < pts; ++j) {
      double s = 0.5 * (a + b) + 0.5 * (b - a) * gx[j];
      nodes.push_back(s * s);                            // tau = sigma^2
      weights.push_back(0.5 * (b - a) * gw[j] * 2.0 * s);  // d tau = 2 sigma d sigma
    }
  }
}

}  // namespace

QuadratureRule QuadratureRule::log_panels(double t_min, double t_max, double panel_width,
                                          int points_per_panel) {
  if (!(t_min > 0 && t_max > t_min)) throw std::invalid_argument("log_panels: need 0 < t_min < t_max");
  QuadratureRule q;
  q.scheme = "log-gauss";
  build_log_panels(t_min, t_max, panel_width, points_per_panel, q.nodes, q.weights);
  build_log_panels(t_min, t_max, panel_width, points_per_panel / 2, q.nodes_coarse, q.weights_coarse);
  return q;
}

QuadratureRule QuadratureRule::kannai_tau(double t, double mu_max, double v_max) {
  if (!(t > 0)) throw std::invalid_argument("kannai_tau: need t > 0");
  QuadratureRule q;
  q.scheme = "kannai-sigma-gauss";
  double sigma_max = 2.0 * std::sqrt(t) * v_max;  // e^{-sigma_max^2/(4t)} = e^{-v_max^2} < 1e-14
  // resolve sin(mu sigma): keep mu * panel_halfwidth modest for Gauss-20
  double width = std::min(sigma_max / 8.0, 16.0 / std::max(mu_max, 1e-8));
  build_sigma_panels(sigma_max, width, 20, q.nodes, q.weights);
  build_sigma_panels(sigma_max, width, 12, q.nodes_coarse, q.weights_coarse);
  return q;
}

std::vector<double> simpson_weights(int m, double dt) {
  if (m < 2) throw std::invalid_argument("simpson_weights: need at least two samples");
  std::vector<double> w(m, 0.0);
  if (m == 2) {
    w[0] = w[1] = 0.5 * dt;
    return w;
  }
  int intervals = m - 1;
  int simpson_end = intervals % 2 == 0 ? m - 1 : m - 4;  // last 3 intervals by 3/8 when odd
  if (intervals % 2 != 0 && m < 5) {                     // m == 4: pure 3/8
    w[0] = w[3] = 3.0 / 8.0 * dt;
    w[1] = w[2] = 9.0 / 8.0 * dt;
    return w;
  }
  for (int i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += dt / 3.0;
    w[i + 1] += 4.0 * dt / 3.0;
    w[i + 2] += dt / 3.0;
  }
  if (intervals % 2 != 0) {
    w[m - 4] += 3.0 / 8.0 * dt;
    w[m - 3] += 9.0 / 8.0 * dt;
    w[m - 2] += 9.0 / 8.0 * dt;
    w[m - 1] += 3.0 / 8.0 * dt;
  }
  return w;
}

}  // namespace translab::calculus
