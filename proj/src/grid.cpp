#include "translab/grid.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace translab::geometry {

Grid::Grid(const GridSpec& spec) : spec_(spec), dim_(spec.dim) {
  if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("Grid: dimension must be 1 or 2");
  for (int k = 0; k < dim_; ++k) {
    n_[k] = spec.nodes[k];
    if (n_[k] < 3) throw std::invalid_argument("Grid: need at least 3 nodes per axis");
    double lo = spec.extents[k][0], hi = spec.extents[k][1];
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("Grid: degenerate axis extents");
    h_[k] = (hi - lo) / (n_[k] - 1);
  }
  if (dim_ == 1) n_[1] = 1;

  interior_index_.assign(total_nodes(), -1);
  // 1D folded trapezoid weights per axis: interior cells plus the two boundary
  // half-cells folded onto their interior neighbors, so weights sum to |Omega|
  auto axis_w = [&](int axis, int i) {
    double w = h_[axis];
    if (i == 1) w += 0.5 * h_[axis];
    if (i == n_[axis] - 2) w += 0.5 * h_[axis];
    return w;
  };

  if (dim_ == 1) {
    for (int i = 1; i + 1 < n_[0]; ++i) {
      interior_index_[i] = static_cast<int>(interior_ids_.size());
      interior_ids_.push_back(i);
      leb_w_.push_back(axis_w(0, i));
    }
  } else {
    for (int j = 1; j + 1 < n_[1]; ++j)
      for (int i = 1; i + 1 < n_[0]; ++i) {
        int gid = global_id(i, j);
        interior_index_[gid] = static_cast<int>(interior_ids_.size());
        interior_ids_.push_back(gid);
        leb_w_.push_back(axis_w(0, i) * axis_w(1, j));
      }
  }
}

double Grid::domain_volume() const {
  double v = 1.0;
  for (int k = 0; k < dim_; ++k) v *= spec_.extents[k][1] - spec_.extents[k][0];
  return v;
}

std::array<int, 4> Grid::interior_neighbors(int iidx) const {
  std::array<int, 4> out{-1, -1, -1, -1};
  auto ij = axis_indices(interior_gid(iidx));
  const int di[4] = {-1, 1, 0, 0};
  const int dj[4] = {0, 0, -1, 1};
  int nd = dim_ == 1 ? 2 : 4;
  for (int q = 0; q < nd; ++q) {
    int ii = ij[0] + di[q], jj = ij[1] + dj[q];
    if (ii < 0 || ii >= n_[0] || jj < 0 || jj >= (dim_ == 1 ? 1 : n_[1])) continue;
    out[q] = interior_index_[global_id(ii, jj)];
  }
  return out;
}

Grid build_grid(const GridSpec& spec) { return Grid(spec); }

Region::Region(std::shared_ptr<const Grid> grid, std::vector<char> member)
    : grid_(std::move(grid)), member_(std::move(member)) {
  finalize();
}

Region::Region(std::shared_ptr<const Grid> grid, const Box<2>& box) : grid_(std::move(grid)) {
  member_.assign(grid_->interior_count(), 0);
  for (int k = 0; k < grid_->interior_count(); ++k) {
    auto p = grid_->point(grid_->interior_gid(k));
    bool in = true;
    for (int a = 0; a < grid_->dim(); ++a)
      if (p[a] < box.lo[a] - 1e-12 || p[a] > box.hi[a] + 1e-12) in = false;
    member_[k] = in ? 1 : 0;
  }
  finalize();
}

Region Region::whole_interior(std::shared_ptr<const Grid> grid) {
  std::vector<char> m(grid->interior_count(), 1);
  return Region(std::move(grid), std::move(m));
}

void Region::finalize() {
  for (int k = 0; k < grid_->interior_count(); ++k)
    if (member_[k]) members_.push_back(k);
  if (members_.empty()) throw std::invalid_argument("Region: empty node set");

  // connectivity in the grid adjacency graph
  std::vector<char> seen(grid_->interior_count(), 0);
  std::queue<int> q;
  q.push(members_.front());
  seen[members_.front()] = 1;
  std::size_t reached = 0;
  while (!q.empty()) {
    int k = q.front();
    q.pop();
    ++reached;
    for (int nb : grid_->interior_neighbors(k))
      if (nb >= 0 && member_[nb] && !seen[nb]) {
        seen[nb] = 1;
        q.push(nb);
      }
  }
  if (reached != members_.size()) throw std::invalid_argument("Region: node set is not connected");

  for (int k : members_) {
    auto nbs = grid_->interior_neighbors(k);
    bool on_edge = false;
    int nd = grid_->dim() == 1 ? 2 : 4;
    for (int qd = 0; qd < nd; ++qd) {
      int nb = nbs[qd];
      if (nb < 0 || !member_[nb]) on_edge = true;  // neighbor outside Gamma (or boundary node)
    }
    if (on_edge) boundary_.push_back(k);
  }
}

double Region::distance(const Region& a, const Region& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int ka : a.members()) {
    auto pa = a.grid().point(a.grid().interior_gid(ka));
    for (int kb : b.members()) {
      auto pb = b.grid().point(b.grid().interior_gid(kb));
      double d2 = 0;
      for (int q = 0; q < a.grid().dim(); ++q) d2 += (pa[q] - pb[q]) * (pa[q] - pb[q]);
      best = std::min(best, std::sqrt(d2));
    }
  }
  return best;
}

}  // namespace translab::geometry
