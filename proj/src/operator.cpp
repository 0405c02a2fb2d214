#include "translab/operator.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#ifdef TRANSLAB_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace translab::op {

namespace {

using translab::Vec;
using Trip = Eigen::Triplet<double>;

// coefficient matrices |g|^{1/2} g^{ij} and |g|^{1/2} at one point
template <int N>
void flux_coeffs(const MetricField<N>& g, const Vec<double, N>& x, double c[2][2], double& sq) {
  auto G = g.eval(x);
  auto Gi = geometry::mat_inv<double, N>(G);
  double det = geometry::mat_det<double, N>(G);
  if (!(det > 0)) throw std::invalid_argument("assemble: metric not positive definite at a node");
  sq = std::sqrt(det);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) c[i][j] = sq * Gi[i][j];
  // node-level ellipticity of the flux matrix
  if constexpr (N == 2) {
    if (!(c[0][0] > 0 && c[1][1] > 0 && c[0][0] * c[1][1] - c[0][1] * c[1][0] > 0))
      throw std::invalid_argument("assemble: flux coefficient matrix not positive definite");
  } else {
    if (!(c[0][0] > 0)) throw std::invalid_argument("assemble: flux coefficient not positive");
  }
}

}  // namespace

DiscreteOperator assemble(std::shared_ptr<const Grid> grid, const MetricField<1>& g,
                          const ScalarField<1>& V, const std::string& signature) {
  const Grid& G = *grid;
  const int m = G.nodes_per_axis(0);
  const int ni = m - 2;
  const double h = G.spacing(0);

  std::vector<double> a(m), sq(m), vv(m);
  for (int i = 0; i < m; ++i) {
    Vec<double, 1> x{G.point(i)[0]};
    double c[2][2];
    flux_coeffs<1>(g, x, c, sq[i]);
    a[i] = c[0][0];
    vv[i] = V.eval(x);
    if (vv[i] < 0) throw std::invalid_argument("assemble: potential must be nonnegative");
  }

  std::vector<Trip> trips;
  Eigen::VectorXd Md(ni);
  for (int k = 0; k < ni; ++k) {
    int i = k + 1;
    double am = 0.5 * (a[i - 1] + a[i]);  // face i-1/2
    double ap = 0.5 * (a[i] + a[i + 1]);  // face i+1/2
    if (!(am > 0 && ap > 0)) throw std::invalid_argument("assemble: face coefficient not positive");
    trips.emplace_back(k, k, (am + ap) / h + sq[i] * vv[i] * h);
    if (k > 0) trips.emplace_back(k, k - 1, -am / h);
    if (k + 1 < ni) trips.emplace_back(k, k + 1, -ap / h);
    Md[k] = sq[i] * h;
  }

  DiscreteOperator out;
  out.grid = std::move(grid);
  out.A.resize(ni, ni);
  out.A.setFromTriplets(trips.begin(), trips.end());
  out.Mdiag = std::move(Md);
  out.field_signature = signature;
  return out;
}

DiscreteOperator assemble(std::shared_ptr<const Grid> grid, const MetricField<2>& g,
                          const ScalarField<2>& V, const std::string& signature) {
  const Grid& G = *grid;
  const int nx = G.nodes_per_axis(0), ny = G.nodes_per_axis(1);
  const int nxi = nx - 2, nyi = ny - 2, ni = nxi * nyi;
  const double hx = G.spacing(0), hy = G.spacing(1);
  const double cell = hx * hy;

  // nodal flux coefficients over the full grid
  std::vector<double> c11(nx * ny), c22(nx * ny), c12(nx * ny), sq(nx * ny), vv(nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int gid = i + nx * j;
      auto p = G.point(gid);
      Vec<double, 2> x{p[0], p[1]};
      double c[2][2];
      flux_coeffs<2>(g, x, c, sq[gid]);
      c11[gid] = c[0][0];
      c22[gid] = c[1][1];
      c12[gid] = c[0][1];
      vv[gid] = V.eval(x);
      if (vv[gid] < 0) throw std::invalid_argument("assemble: potential must be nonnegative");
    }

  auto iid = [&](int i, int j) { return (i - 1) + nxi * (j - 1); };  // interior index

  std::vector<Trip> trips;
  Eigen::VectorXd Md(ni);
  for (int j = 1; j + 1 < ny; ++j)
    for (int i = 1; i + 1 < nx; ++i) {
      int gid = i + nx * j, k = iid(i, j);
      double axm = 0.5 * (c11[gid - 1] + c11[gid]);
      double axp = 0.5 * (c11[gid] + c11[gid + 1]);
      double aym = 0.5 * (c22[gid - nx] + c22[gid]);
      double ayp = 0.5 * (c22[gid] + c22[gid + nx]);
      if (!(axm > 0 && axp > 0 && aym > 0 && ayp > 0))
        throw std::invalid_argument("assemble: face coefficient not positive");
      // diagonal flux terms of int c^{ii} d_i u d_i v dx (face midpoint rule)
      trips.emplace_back(k, k, (axm + axp) * hy / hx + (aym + ayp) * hx / hy + sq[gid] * vv[gid] * cell);
      if (i > 1) trips.emplace_back(k, iid(i - 1, j), -axm * hy / hx);
      if (i + 2 < nx) trips.emplace_back(k, iid(i + 1, j), -axp * hy / hx);
      if (j > 1) trips.emplace_back(k, iid(i, j - 1), -aym * hx / hy);
      if (j + 2 < ny) trips.emplace_back(k, iid(i, j + 1), -ayp * hx / hy);
      Md[k] = sq[gid] * cell;
    }

  Eigen::SparseMatrix<double> A(ni, ni);
  A.setFromTriplets(trips.begin(), trips.end());

  // mixed term int c^{12} (d_1 u d_2 v + d_2 u d_1 v) dx with node-centered
  // central differences: S = Dx^T C Dy + Dy^T C Dx, then symmetrized
  bool have_offdiag = false;
  for (double v : c12)
    if (v != 0.0) have_offdiag = true;
  if (have_offdiag) {
    std::vector<Trip> tx, ty;
    for (int j = 1; j + 1 < ny; ++j)
      for (int i = 1; i + 1 < nx; ++i) {
        int k = iid(i, j);
        if (i > 1) tx.emplace_back(k, iid(i - 1, j), -0.5 / hx);
        if (i + 2 < nx) tx.emplace_back(k, iid(i + 1, j), 0.5 / hx);
        if (j > 1) ty.emplace_back(k, iid(i, j - 1), -0.5 / hy);
        if (j + 2 < ny) ty.emplace_back(k, iid(i, j + 1), 0.5 / hy);
      }
    Eigen::SparseMatrix<double> Dx(ni, ni), Dy(ni, ni);
    Dx.setFromTriplets(tx.begin(), tx.end());
    Dy.setFromTriplets(ty.begin(), ty.end());
    Eigen::VectorXd Cw(ni);
    for (int j = 1; j + 1 < ny; ++j)
      for (int i = 1; i + 1 < nx; ++i) Cw[iid(i, j)] = c12[i + nx * j] * cell;
    Eigen::SparseMatrix<double> S =
        Dx.transpose() * Cw.asDiagonal() * Dy + Dy.transpose() * Cw.asDiagonal() * Dx;
    Eigen::SparseMatrix<double> St = S.transpose();
    A = A + 0.5 * (S + St);
  }

  DiscreteOperator out;
  out.grid = std::move(grid);
  out.A = std::move(A);
  out.Mdiag = std::move(Md);
  out.field_signature = signature;
  return out;
}

// ----------------------------------------------------------- decomposition

namespace {

void dense_sym_eig(Eigen::MatrixXd& B, Eigen::VectorXd& evals) {
#ifdef TRANSLAB_HAVE_LAPACKE
  const int n = static_cast<int>(B.rows());
  evals.resize(n);
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, B.data(), n, evals.data());
  if (info != 0) throw std::runtime_error("eigendecompose: dsyevd failed, info=" + std::to_string(info));
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver failed");
  evals = es.eigenvalues();
  B = es.eigenvectors();
#endif
}

}  // namespace

SpectralDecomposition SpectralDecomposition::dense(const DiscreteOperator& op, int K) {
  const int n = static_cast<int>(op.A.rows());
  if (K < 0) K = n;
  if (K > n) throw std::invalid_argument("eigendecompose: K exceeds matrix size");

  Eigen::VectorXd msqrt_inv = op.Mdiag.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd B = Eigen::MatrixXd(op.A);
  B = msqrt_inv.asDiagonal() * B * msqrt_inv.asDiagonal();
  B = 0.5 * (B + B.transpose()).eval();

  Eigen::VectorXd evals;
  dense_sym_eig(B, evals);

  SpectralDecomposition out;
  out.lambda_ = evals.head(K);
  out.phi_ = msqrt_inv.asDiagonal() * B.leftCols(K);
  out.Mdiag_ = op.Mdiag;
  out.signature_ = op.field_signature;
  if (!(out.lambda_[0] > 0))
    throw std::runtime_error("eigendecompose: smallest eigenvalue not positive");
  return out;
}

SpectralDecomposition SpectralDecomposition::tensor(SpectralDecomposition sx, SpectralDecomposition sy) {
  if (sx.tensor_ || sy.tensor_) throw std::invalid_argument("tensor: factors must be dense");
  SpectralDecomposition out;
  out.tensor_ = true;
  out.sx_ = std::make_shared<SpectralDecomposition>(std::move(sx));
  out.sy_ = std::make_shared<SpectralDecomposition>(std::move(sy));
  const auto& mx = out.sx_->Mdiag_;
  const auto& my = out.sy_->Mdiag_;
  out.Mdiag_.resize(mx.size() * my.size());
  for (int j = 0; j < my.size(); ++j)
    for (int i = 0; i < mx.size(); ++i) out.Mdiag_[i + mx.size() * j] = mx[i] * my[j];
  return out;
}

int SpectralDecomposition::modes() const {
  return tensor_ ? sx_->modes() * sy_->modes() : static_cast<int>(lambda_.size());
}
int SpectralDecomposition::size() const {
  return tensor_ ? sx_->size() * sy_->size() : static_cast<int>(phi_.rows());
}
double SpectralDecomposition::lambda_min() const {
  return tensor_ ? sx_->lambda_min() + sy_->lambda_min() : lambda_[0];
}
double SpectralDecomposition::lambda_max() const {
  return tensor_ ? sx_->lambda_max() + sy_->lambda_max() : lambda_[lambda_.size() - 1];
}

Eigen::VectorXd SpectralDecomposition::eigenvalues() const {
  if (!tensor_) return lambda_;
  Eigen::VectorXd out(modes());
  int q = 0;
  for (int j = 0; j < sy_->modes(); ++j)
    for (int i = 0; i < sx_->modes(); ++i) out[q++] = sx_->lambda_[i] + sy_->lambda_[j];
  std::sort(out.data(), out.data() + out.size());
  return out;
}

Eigen::VectorXd SpectralDecomposition::coefficients(const GridFunction& u) const {
  if (!tensor_) return phi_.transpose() * Mdiag_.cwiseProduct(u);
  const int nx = sx_->size(), ny = sy_->size();
  Eigen::Map<const Eigen::MatrixXd> U(u.data(), nx, ny);
  Eigen::MatrixXd C = sx_->phi_.transpose() * sx_->Mdiag_.asDiagonal() * U * sy_->Mdiag_.asDiagonal() * sy_->phi_;
  return Eigen::Map<Eigen::VectorXd>(C.data(), C.size());
}

GridFunction SpectralDecomposition::reconstruct(const Eigen::VectorXd& c) const {
  if (!tensor_) return phi_ * c;
  const int kx = sx_->modes(), ky = sy_->modes();
  Eigen::Map<const Eigen::MatrixXd> C(c.data(), kx, ky);
  Eigen::MatrixXd U = sx_->phi_ * C * sy_->phi_.transpose();
  return Eigen::Map<Eigen::VectorXd>(U.data(), U.size());
}

GridFunction SpectralDecomposition::apply_spectral(const std::function<double(double)>& f,
                                                   const GridFunction& u) const {
  Eigen::VectorXd c = coefficients(u);
  if (!tensor_) {
    for (int k = 0; k < c.size(); ++k) c[k] *= f(lambda_[k]);
  } else {
    const int kx = sx_->modes();
    for (int j = 0; j < sy_->modes(); ++j)
      for (int i = 0; i < kx; ++i) c[i + kx * j] *= f(sx_->lambda_[i] + sy_->lambda_[j]);
  }
  return reconstruct(c);
}

GridFunctionC SpectralDecomposition::apply_spectral(const std::function<double(double)>& f,
                                                    const GridFunctionC& u) const {
  GridFunction re = apply_spectral(f, GridFunction(u.real()));
  GridFunction im = apply_spectral(f, GridFunction(u.imag()));
  return re.cast<std::complex<double>>() + std::complex<double>(0, 1) * im.cast<std::complex<double>>();
}

Eigen::MatrixXd SpectralDecomposition::kernel_matrix(const std::function<double(double)>& f) const {
  if (tensor_) throw std::logic_error("kernel_matrix: not available for the tensor backend");
  Eigen::VectorXd fl(lambda_.size());
  for (int k = 0; k < lambda_.size(); ++k) fl[k] = f(lambda_[k]);
  return phi_ * fl.asDiagonal() * phi_.transpose();
}

const Eigen::VectorXd& SpectralDecomposition::dense_eigenvalues() const {
  if (tensor_) throw std::logic_error("dense_eigenvalues: tensor backend");
  return lambda_;
}
const Eigen::MatrixXd& SpectralDecomposition::dense_eigenvectors() const {
  if (tensor_) throw std::logic_error("dense_eigenvectors: tensor backend");
  return phi_;
}

SpectralDecomposition eigendecompose(const DiscreteOperator& op, int K) {
  return SpectralDecomposition::dense(op, K);
}

// ------------------------------------------------------------------- cache

namespace {
void write_doubles(std::ofstream& os, const double* p, std::size_t count) {
  static_assert(sizeof(double) == 8);
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(count * 8));
}
}  // namespace

void SpectralDecomposition::save(const std::string& path) const {
  if (tensor_) throw std::logic_error("save: tensor backend not cached");
  nlohmann::json hdr;
  hdr["hash"] = signature_;
  hdr["modes"] = modes();
  hdr["size"] = size();
  hdr["layout"] = "lambda,phi(col-major),mass";
  hdr["endianness"] = "little";
  std::string h = hdr.dump();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cache: cannot open " + path);
  std::uint64_t hl = h.size();
  os.write(reinterpret_cast<const char*>(&hl), 8);
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  write_doubles(os, lambda_.data(), lambda_.size());
  write_doubles(os, phi_.data(), static_cast<std::size_t>(phi_.size()));
  write_doubles(os, Mdiag_.data(), Mdiag_.size());
}

std::optional<SpectralDecomposition> SpectralDecomposition::load(const std::string& path,
                                                                 const std::string& signature) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::uint64_t hl = 0;
  is.read(reinterpret_cast<char*>(&hl), 8);
  if (!is || hl > (1u << 20)) return std::nullopt;
  std::string h(hl, '\0');
  is.read(h.data(), static_cast<std::streamsize>(hl));
  nlohmann::json hdr = nlohmann::json::parse(h, nullptr, false);
  if (hdr.is_discarded() || hdr.value("hash", "") != signature) return std::nullopt;
  int K = hdr["modes"], n = hdr["size"];
  SpectralDecomposition out;
  out.lambda_.resize(K);
  out.phi_.resize(n, K);
  out.Mdiag_.resize(n);
  out.signature_ = signature;
  is.read(reinterpret_cast<char*>(out.lambda_.data()), K * 8);
  is.read(reinterpret_cast<char*>(out.phi_.data()), static_cast<std::streamsize>(out.phi_.size()) * 8);
  is.read(reinterpret_cast<char*>(out.Mdiag_.data()), n * 8);
  if (!is) return std::nullopt;
  return out;
}

SpectralDecomposition eigendecompose_cached(const DiscreteOperator& op, int K,
                                            const std::string& cache_dir) {
  if (cache_dir.empty() || op.field_signature.empty()) return eigendecompose(op, K);
  std::filesystem::create_directories(cache_dir);
  std::string path = cache_dir + "/" + op.field_signature + ".bin";
  if (auto hit = SpectralDecomposition::load(path, op.field_signature)) {
    if (hit->modes() >= (K < 0 ? op.A.rows() : K)) return *hit;
  }
  SpectralDecomposition fresh = eigendecompose(op, K);
  fresh.save(path);
  return fresh;
}

}  // namespace translab::op
