#pragma once

#include "translab/gammafn.hpp"
#include "translab/operator.hpp"
#include "translab/quadrature.hpp"

// Spectral functional calculus on a SpectralDecomposition: fractional powers,
// heat semigroup/kernel, wave propagators, and the semigroup-integral
// representations used as independent cross-checks of the direct powers.

namespace translab::calculus {

using op::GridFunction;
using op::GridFunctionC;
using op::SpectralDecomposition;

// P^s u = sum_k lambda_k^s u_k phi_k, s in [-2, 2]
GridFunction frac_power_apply(const SpectralDecomposition& spec, double s, const GridFunction& u);
GridFunctionC frac_power_apply(const SpectralDecomposition& spec, double s, const GridFunctionC& u);

// e^{-tP} u, t >= 0
GridFunction heat_apply(const SpectralDecomposition& spec, double t, const GridFunction& u);

// K_t = Phi diag(e^{-t lambda}) Phi^T, t > 0; K_t M u reproduces heat_apply
Eigen::MatrixXd heat_kernel(const SpectralDecomposition& spec, double t);

struct QuadResult {
  GridFunction value;
  double est_error = 0;  // weighted-norm difference against the coarsened rule
};

// P^{-s} u = (1/Gamma(s)) int_0^inf e^{-tP} u dt / t^{1-s},  s in (0,1)
QuadResult neg_power_via_semigroup(const SpectralDecomposition& spec, double s, const GridFunction& u,
                                   const QuadratureRule& q);

// P^{s} u = (1/Gamma(-s)) int_0^inf (e^{-tP} u - u) dt / t^{1+s},  s in (0,1)
QuadResult frac_power_via_semigroup(const SpectralDecomposition& spec, double s, const GridFunction& u,
                                    const QuadratureRule& q);

// default rule covering the spectrum of spec with tail e^{-lambda_min t_max} < 1e-12
QuadratureRule semigroup_rule(const SpectralDecomposition& spec);

// cos(t P^{1/2}) u  and  P^{-1/2} sin(t P^{1/2}) u
GridFunction cosine_apply(const SpectralDecomposition& spec, double t, const GridFunction& u);
GridFunction sine_apply(const SpectralDecomposition& spec, double t, const GridFunction& u);

struct WaveState {
  GridFunction w;  // displacement
  GridFunction v;  // velocity
  double duhamel_est_error = 0;  // Simpson-vs-trapezoid discrepancy of the source term
};

// w(t) = cos(tP^{1/2}) w0 + P^{-1/2} sin(tP^{1/2}) w1 + int_0^t P^{-1/2} sin((t-s)P^{1/2}) F(s) ds.
// F columns are samples on the uniform mesh {j dt_src}; Simpson in s
// (mesh fineness is the caller's contract). Pass F with zero columns for F = 0.
WaveState wave_propagate(const SpectralDecomposition& spec, const GridFunction& w0,
                         const GridFunction& w1, const Eigen::MatrixXd& F, double dt_src, double t);

// ||v||_M^2 + w^T A w
double wave_energy(const op::DiscreteOperator& op, const WaveState& s);

}  // namespace translab::calculus
