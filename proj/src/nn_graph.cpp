#include "nnrenyi/nn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nnrenyi/error.hpp"
#include "nnrenyi/parallel.hpp"

namespace nnrenyi {

NNGraph::NNGraph(std::size_t vertices, std::size_t dim, NeighborSpec spec, std::vector<Edge> edges,
                 bool with_boundary, std::vector<double> boundary_points)
    : vertices_(vertices),
      dim_(dim),
      spec_(std::move(spec)),
      edges_(std::move(edges)),
      with_boundary_(with_boundary),
      boundary_points_(std::move(boundary_points)) {}

std::vector<std::size_t> NNGraph::in_degrees() const {
  std::vector<std::size_t> deg(vertices_, 0);
  for (const Edge& e : edges_)
    if (!e.to_boundary()) ++deg[e.target];
  return deg;
}

std::size_t NNGraph::max_in_degree() const {
  const auto deg = in_degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

NNGraph build_nn_graph(const PointSet& ps, const NeighborSpec& spec, KnnMethod method) {
  const unsigned k = spec.k();
  if (ps.size() <= k)
    throw DataError("sample smaller than neighbor order: n = " + std::to_string(ps.size()) +
                    ", max(S) = " + std::to_string(k));
  const auto neighbors = all_knn(ps, k, method);
  const auto& ranks = spec.ranks();
  std::vector<Edge> edges(ps.size() * ranks.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t r = 0; r < ranks.size(); ++r) {
      const Neighbor& nb = neighbors[i * k + ranks[r] - 1];
      edges[i * ranks.size() + r] = Edge{i, nb.index, ranks[r], nb.distance};
    }
  }
  return NNGraph(ps.size(), ps.dim(), spec, std::move(edges), false);
}

std::vector<double> nearest_boundary_point(const Cube& cube, std::span<const double> x,
                                           double* distance) {
  std::size_t axis = 0;
  double face = cube.lower(0);
  double best = x[0] - cube.lower(0);
  for (std::size_t j = 0; j < cube.dim(); ++j) {
    const double to_lower = x[j] - cube.lower(j);
    const double to_upper = cube.upper(j) - x[j];
    if (to_lower < best) {
      best = to_lower;
      axis = j;
      face = cube.lower(j);
    }
    if (to_upper < best) {
      best = to_upper;
      axis = j;
      face = cube.upper(j);
    }
  }
  std::vector<double> b(x.begin(), x.end());
  b[axis] = face;
  if (distance) *distance = best;
  return b;
}

NNGraph build_boundary_graph(const PointSet& ps, const NeighborSpec& spec, const Cube& cube) {
  if (cube.dim() != ps.dim()) throw UsageError("cube dimension does not match point dimension");
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (!cube.contains(ps[i]))
      throw DataError("point " + std::to_string(i) + " lies outside the cube");

  const auto& ranks = spec.ranks();
  const std::size_t available = std::min<std::size_t>(spec.k(), ps.size() - 1);
  std::vector<Neighbor> neighbors;
  if (available > 0) neighbors = all_knn(ps, static_cast<unsigned>(available));

  std::vector<Edge> edges(ps.size() * ranks.size());
  std::vector<double> boundary(ps.size() * ps.dim());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    double to_boundary = 0.0;
    const auto b = nearest_boundary_point(cube, ps[i], &to_boundary);
    std::copy(b.begin(), b.end(), boundary.begin() + i * ps.dim());
    for (std::size_t r = 0; r < ranks.size(); ++r) {
      Edge e{i, kBoundaryTarget, ranks[r], to_boundary};
      if (ranks[r] <= available) {
        const Neighbor& nb = neighbors[i * available + ranks[r] - 1];
        if (nb.distance <= to_boundary) {
          e.target = nb.index;
          e.length = nb.distance;
        }
      }
      edges[i * ranks.size() + r] = e;
    }
  }
  return NNGraph(ps.size(), ps.dim(), spec, std::move(edges), true, std::move(boundary));
}

double l_p(const NNGraph& graph, double p) {
  if (!(p >= 0.0)) throw UsageError("power p must be >= 0");
  CompensatedSum sum;
  for (const Edge& e : graph.edges()) sum.add(std::pow(e.length, p));
  return sum.value();
}

std::vector<double> l_p_many(const NNGraph& graph, std::span<const double> powers) {
  std::vector<double> out;
  out.reserve(powers.size());
  for (double p : powers) out.push_back(l_p(graph, p));
  return out;
}

double l_p(const PointSet& ps, const NeighborSpec& spec, double p) {
  return l_p(build_nn_graph(ps, spec), p);
}

double l_p_star(const PointSet& ps, const NeighborSpec& spec, const Cube& cube, double p) {
  return l_p(build_boundary_graph(ps, spec, cube), p);
}

}  // namespace nnrenyi
