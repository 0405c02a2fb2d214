#pragma once

#include "translab/calculus.hpp"
#include "translab/grid.hpp"

// Caffarelli-Silvestre extension at s = 1/2 and the measurement maps built
// from it: the Dirichlet-to-Neumann operator T, the partial ND map on Gamma,
// the nonlocal source-to-solution map, and a truncated-cylinder finite
// difference solver used as the independent oracle for the spectral ND map.

namespace translab::extension {

using geometry::Grid;
using geometry::Region;
using op::GridFunction;
using op::GridFunctionC;
using op::SpectralDecomposition;

// u(.,y) = sum_k e^{-y sqrt(lambda_k)} f_k phi_k
GridFunction extend_spectral(const SpectralDecomposition& spec, const GridFunction& f, double y);

// T f = -d_y u|_{y=0} = P^{1/2} f
GridFunction dn_operator(const SpectralDecomposition& spec, const GridFunction& f);

// partial Neumann-to-Dirichlet map Lambda^Gamma f = P^{-1/2} f |_Gamma for
// Neumann data f supported in Gamma (values outside must vanish). The full
// node vector is returned; the map's content is its Gamma restriction.
GridFunction nd_map(const SpectralDecomposition& spec, const GridFunction& f, const Region& gamma);
GridFunctionC nd_map(const SpectralDecomposition& spec, const GridFunctionC& f, const Region& gamma);

// source-to-solution map of P^{1/2} v = f; spectrally identical to nd_map,
// kept as a named map mirroring the nonlocal reduction
GridFunction source_to_solution_nonlocal(const SpectralDecomposition& spec, const GridFunction& f,
                                         const Region& gamma);

struct CylinderSolution {
  // column j holds u(., y_j) on interior spatial nodes, j = 0..y_nodes-1;
  // the Dirichlet cap row y = Y is included as the (zero) last column
  Eigen::MatrixXd values;
  double height = 0;
  double dy = 0;

  GridFunction trace_bottom() const { return values.col(0); }
};

// Finite differences on Omega x [0, Y]: (-Delta_g - d_y^2 + V) u = 0 with
// Neumann data -d_y u = f at y = 0 (ghost-node elimination, second order),
// homogeneous Dirichlet on the lateral boundary and at the cap y = Y.
CylinderSolution solve_cylinder_direct(std::shared_ptr<const Grid> grid,
                                       const geometry::MetricField<1>& g,
                                       const geometry::ScalarField<1>& V, const GridFunction& f,
                                       double Y, int y_nodes, double lambda1_hint = -1.0);
CylinderSolution solve_cylinder_direct(std::shared_ptr<const Grid> grid,
                                       const geometry::MetricField<2>& g,
                                       const geometry::ScalarField<2>& V, const GridFunction& f,
                                       double Y, int y_nodes, double lambda1_hint = -1.0);

// L2(Gamma) relative discrepancy of two grid functions, Lebesgue-weighted
double gamma_rel_l2(const Region& gamma, const GridFunction& a, const GridFunction& b);

}  // namespace translab::extension
