#pragma once

#include "translab/calculus.hpp"
#include "translab/extension.hpp"

// Kannai transmutation between wave and heat propagators, the wave
// source-to-solution map on Gamma, a leapfrog time stepper as the
// time-domain oracle, the restricted DN map on dGamma, and the
// heat-moment vanishing check.

namespace translab::transmute {

using calculus::QuadratureRule;
using geometry::Grid;
using geometry::Region;
using op::DiscreteOperator;
using op::GridFunction;
using op::SpectralDecomposition;

struct KannaiScalar {
  double lhs = 0;  // e^{-t lambda^2}
  double rhs = 0;  // (1/(4 sqrt(pi) t^{3/2})) int_0^inf e^{-tau/(4t)} sin(sqrt(tau) lambda)/lambda dtau
  double est_error = 0;
};

KannaiScalar scalar_kannai(double lambda, double t, const QuadratureRule& q);

// e^{-tP} f through the sine propagator under the Gaussian weight
GridFunction kannai_heat_from_wave(const SpectralDecomposition& spec, const GridFunction& f, double t,
                                   const QuadratureRule& q);

// J^Gamma: solution trace on Gamma for the zero-initial-data wave equation,
// F sampled on the uniform mesh {j dt}, j = 0..steps. Column j of the result
// is w(j dt) restricted to Gamma's members.
Eigen::MatrixXd wave_source_to_solution(const SpectralDecomposition& spec, const Region& gamma,
                                        const Eigen::MatrixXd& F, double dt, int steps);

struct LeapfrogResult {
  Eigen::MatrixXd w;          // interior x (steps+1)
  double energy_drift = 0;    // relative drift of the staggered invariant (F = 0 only)
  double dt = 0;
};

// explicit leapfrog for M w'' + A w = M F with Dirichlet conditions;
// rejects dt above 0.9 * 2/sqrt(lambda_max)
LeapfrogResult wave_leapfrog(const DiscreteOperator& op, const GridFunction& w0,
                             const GridFunction& w1, const Eigen::MatrixXd& F, double dt, int steps);

// upper bound for the largest generalized eigenvalue (Gershgorin on M^{-1/2} A M^{-1/2})
double lambda_max_bound(const DiscreteOperator& op);

struct RestrictedDnResult {
  std::vector<int> trace_nodes;  // dGamma members with a unique outward axis direction
  Eigen::MatrixXd dn;            // conormal derivative traces, nodes x (steps+1)
};

// Dirichlet data f on dGamma x (0,T) (rows follow region.boundary_nodes()),
// leapfrog on Omega' = Omega \ Gamma with homogeneous outer boundary, metric
// conormal nu_g . g^{-1} grad w by one-sided second-order differences
RestrictedDnResult restricted_dn_wave(const DiscreteOperator& op, const geometry::MetricField<1>& g,
                                      const Region& gamma, const Eigen::MatrixXd& f_dGamma, double dt,
                                      int steps);
RestrictedDnResult restricted_dn_wave(const DiscreteOperator& op, const geometry::MetricField<2>& g,
                                      const Region& gamma, const Eigen::MatrixXd& f_dGamma, double dt,
                                      int steps);

struct HeatMoments {
  std::vector<double> raw;         // max over O2 of |int (e^{-tP1} - e^{-tP2}) f dt/t^{k+1/2}|
  std::vector<double> normalized;  // raw over the one-sided moment scale
};

// moments k = 0..k_max of the semigroup difference observed on O2 for a source
// supported in O1; the small-t panel starts where the Gaussian bound makes the
// true integrand negligible (t_min ~ dist(O1,O2)^2 / 166)
HeatMoments heat_moment_vanish(const SpectralDecomposition& spec1, const SpectralDecomposition& spec2,
                               const GridFunction& f, const Region& o1, const Region& o2, int k_max);

}  // namespace translab::transmute
