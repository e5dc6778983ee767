#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "nnrenyi/knn.hpp"
#include "nnrenyi/point_set.hpp"

namespace nnrenyi {

inline constexpr std::size_t kBoundaryTarget = std::numeric_limits<std::size_t>::max();

struct Edge {
  std::size_t source;
  std::size_t target;  // kBoundaryTarget when the edge ends on the cube boundary
  unsigned rank;       // element of S this edge realizes
  double length;

  bool to_boundary() const noexcept { return target == kBoundaryTarget; }
};

/// Directed generalized nearest-neighbor graph NN_S(V), optionally with
/// boundary edges NN*_S(V, B). Edges are stored in (source, rank) order.
class NNGraph {
 public:
  NNGraph(std::size_t vertices, std::size_t dim, NeighborSpec spec, std::vector<Edge> edges,
          bool with_boundary, std::vector<double> boundary_points = {});

  std::span<const Edge> edges() const noexcept { return edges_; }
  const NeighborSpec& spec() const noexcept { return spec_; }
  std::size_t vertex_count() const noexcept { return vertices_; }
  std::size_t dim() const noexcept { return dim_; }
  bool with_boundary() const noexcept { return with_boundary_; }

  // Nearest boundary point of `source`; only valid for boundary graphs.
  std::span<const double> boundary_point(std::size_t source) const noexcept {
    return {boundary_points_.data() + source * dim_, dim_};
  }

  // Boundary edges are not counted.
  std::vector<std::size_t> in_degrees() const;
  std::size_t max_in_degree() const;

 private:
  std::size_t vertices_;
  std::size_t dim_;
  NeighborSpec spec_;
  std::vector<Edge> edges_;
  bool with_boundary_;
  std::vector<double> boundary_points_;
};

// Requires n > max(S). Ties between equidistant neighbors go to the lower index.
NNGraph build_nn_graph(const PointSet& ps, const NeighborSpec& spec,
                       KnnMethod method = KnnMethod::Auto);

// Nearest point of the cube's boundary to x: x projected onto its closest
// face; ties across faces go to the lowest axis, lower face first.
std::vector<double> nearest_boundary_point(const Cube& cube, std::span<const double> x,
                                           double* distance = nullptr);

// NN*_S(V, B): every NN edge longer than the distance to the nearest boundary
// point is rerouted to that point. Also defined when n <= max(S): ranks with
// no neighbor inside V go to the boundary.
NNGraph build_boundary_graph(const PointSet& ps, const NeighborSpec& spec, const Cube& cube);

// Sum of length^p over edges in stored order, compensated. 0^0 counts as 1.
double l_p(const NNGraph& graph, double p);

double l_p(const PointSet& ps, const NeighborSpec& spec, double p);
double l_p_star(const PointSet& ps, const NeighborSpec& spec, const Cube& cube, double p);

// One graph, several powers (the NN graph does not depend on p).
std::vector<double> l_p_many(const NNGraph& graph, std::span<const double> powers);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace nnrenyi
