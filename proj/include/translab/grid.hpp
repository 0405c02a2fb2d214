#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "translab/fields.hpp"

namespace translab::geometry {

struct GridSpec {
  int dim = 1;
  std::array<std::array<double, 2>, 2> extents{{{0.0, 1.0}, {0.0, 1.0}}};
  std::array<int, 2> nodes{{9, 9}};
  std::string length_units = "L";
};

// Uniform tensor grid on an axis-aligned box. Nodes include the boundary;
// unknowns live on interior nodes only (homogeneous Dirichlet data).
class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  int dim() const { return dim_; }
  const GridSpec& spec() const { return spec_; }
  double spacing(int axis) const { return h_[axis]; }
  int nodes_per_axis(int axis) const { return n_[axis]; }
  int interior_per_axis(int axis) const { return n_[axis] - 2; }

  int total_nodes() const { return dim_ == 1 ? n_[0] : n_[0] * n_[1]; }
  int interior_count() const { return static_cast<int>(interior_ids_.size()); }

  // global node id <-> axis indices
  int global_id(int i, int j = 0) const { return dim_ == 1 ? i : i + n_[0] * j; }
  std::array<int, 2> axis_indices(int gid) const {
    if (dim_ == 1) return {gid, 0};
    return {gid % n_[0], gid / n_[0]};
  }

  bool is_interior(int gid) const { return interior_index_[gid] >= 0; }
  int interior_index(int gid) const { return interior_index_[gid]; }
  int interior_gid(int iidx) const { return interior_ids_[iidx]; }

  std::array<double, 2> point(int gid) const {
    auto ij = axis_indices(gid);
    return {spec_.extents[0][0] + ij[0] * h_[0],
            dim_ == 2 ? spec_.extents[1][0] + ij[1] * h_[1] : 0.0};
  }
  template <int N>
  Vec<double, N> point_vec(int gid) const {
    auto p = point(gid);
    Vec<double, N> r;
    for (int k = 0; k < N; ++k) r[k] = p[k];
    return r;
  }

  // Lebesgue quadrature weight of interior node (boundary cell volume folded
  // onto the adjacent interior node so the weights tile the whole box)
  double lebesgue_weight(int iidx) const { return leb_w_[iidx]; }
  double cell_volume() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }
  double domain_volume() const;

  // interior axis-neighbors of an interior node, -1 when the neighbor is a boundary node
  std::array<int, 4> interior_neighbors(int iidx) const;

 private:
  GridSpec spec_;
  int dim_;
  std::array<int, 2> n_{};
  std::array<double, 2> h_{};
  std::vector<int> interior_ids_;
  std::vector<int> interior_index_;
  std::vector<double> leb_w_;
};

Grid build_grid(const GridSpec& spec);

// Measurement window Gamma, a connected set of interior nodes.
class Region {
 public:
  Region(std::shared_ptr<const Grid> grid, const Box<2>& box);
  static Region whole_interior(std::shared_ptr<const Grid> grid);

  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> grid_ptr() const { return grid_; }

  bool contains_interior(int iidx) const { return member_[iidx]; }
  const std::vector<int>& members() const { return members_; }            // interior indices
  const std::vector<int>& boundary_nodes() const { return boundary_; }    // interior indices on dGamma

  // Euclidean distance between node sets of two regions on the same grid
  static double distance(const Region& a, const Region& b);

 private:
  Region(std::shared_ptr<const Grid> grid, std::vector<char> member);
  void finalize();

  std::shared_ptr<const Grid> grid_;
  std::vector<char> member_;
  std::vector<int> members_;
  std::vector<int> boundary_;
};

}  // namespace translab::geometry
