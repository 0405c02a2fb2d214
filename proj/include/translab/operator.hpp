#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "translab/grid.hpp"

namespace translab::op {

using geometry::Grid;
using geometry::MetricField;
using geometry::ScalarField;

// real- or complex-valued function on interior nodes
using GridFunction = Eigen::VectorXd;
using GridFunctionC = Eigen::VectorXcd;

// Discrete self-adjoint realization of P_{g,V} = -Delta_g + V with Dirichlet
// conditions in L^2(Omega, dV_g). A is the bilinear-form (stiffness) matrix,
//   u^T A v  ~  int (g^{ij} d_i u d_j v + V u v) |g|^{1/2} dx,
// M the lumped mass diag(|g|^{1/2}(x_i) h^n); eigenpairs solve A phi = lambda M phi.
struct DiscreteOperator {
  std::shared_ptr<const Grid> grid;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd Mdiag;
  std::string field_signature;  // content key for the eigendecomposition cache

  // operator application M^{-1} A u (the nodal action of P_{g,V})
  GridFunction apply(const GridFunction& u) const {
    return (A * u).cwiseQuotient(Mdiag);
  }
};

DiscreteOperator assemble(std::shared_ptr<const Grid> grid, const MetricField<1>& g,
                          const ScalarField<1>& V, const std::string& signature = "");
DiscreteOperator assemble(std::shared_ptr<const Grid> grid, const MetricField<2>& g,
                          const ScalarField<2>& V, const std::string& signature = "");

// Eigenpairs of A phi = lambda M phi, M-orthonormal.
// Two backends: a dense decomposition (the default), and an exact tensor
// factorization for separable 2D operators A = Ax (x) My + Mx (x) Ay.
class SpectralDecomposition {
 public:
  static SpectralDecomposition dense(const DiscreteOperator& op, int K);
  // tensor product of two 1D decompositions; node ordering ix + nx*iy
  static SpectralDecomposition tensor(SpectralDecomposition sx, SpectralDecomposition sy);

  int modes() const;
  int size() const;  // interior node count
  double lambda_min() const;
  double lambda_max() const;
  bool is_tensor() const { return tensor_; }

  // all eigenvalues, ascending
  Eigen::VectorXd eigenvalues() const;

  // weighted coefficients c_k = <u, phi_k>_M and reconstruction
  Eigen::VectorXd coefficients(const GridFunction& u) const;
  GridFunction reconstruct(const Eigen::VectorXd& c) const;

  // sum_k f(lambda_k) <u,phi_k>_M phi_k
  GridFunction apply_spectral(const std::function<double(double)>& f, const GridFunction& u) const;
  GridFunctionC apply_spectral(const std::function<double(double)>& f, const GridFunctionC& u) const;

  // kernel matrix  sum_k f(lambda_k) phi_k phi_k^T  (dense backend only)
  Eigen::MatrixXd kernel_matrix(const std::function<double(double)>& f) const;

  const Eigen::VectorXd& mass() const { return Mdiag_; }
  double weighted_norm(const GridFunction& u) const { return std::sqrt(u.dot(Mdiag_.cwiseProduct(u))); }
  double weighted_norm(const GridFunctionC& u) const {
    return std::sqrt(u.cwiseAbs2().cwiseProduct(Mdiag_).sum());
  }

  // dense accessors (throw for the tensor backend)
  const Eigen::VectorXd& dense_eigenvalues() const;
  const Eigen::MatrixXd& dense_eigenvectors() const;

  // binary cache (dense backend): JSON header + little-endian float64 payload
  void save(const std::string& path) const;
  static std::optional<SpectralDecomposition> load(const std::string& path, const std::string& signature);

 private:
  SpectralDecomposition() = default;

  bool tensor_ = false;
  // dense
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd phi_;  // columns phi_k
  Eigen::VectorXd Mdiag_;
  std::string signature_;
  // tensor factors
  std::shared_ptr<SpectralDecomposition> sx_, sy_;
};

SpectralDecomposition eigendecompose(const DiscreteOperator& op, int K = -1);

// cache-aware variant; cache_dir empty means no caching
SpectralDecomposition eigendecompose_cached(const DiscreteOperator& op, int K,
                                            const std::string& cache_dir);

}  // namespace translab::op
