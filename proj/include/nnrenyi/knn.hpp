#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "nnrenyi/point_set.hpp"

namespace nnrenyi {

struct Neighbor {
  std::size_t index;
  double distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

enum class KnnMethod {
  Auto,        // kd-tree up to kMaxKdTreeDim dimensions, exhaustive scan above
  KdTree,
  Exhaustive,
};

inline constexpr std::size_t kMaxKdTreeDim = 20;
inline constexpr std::size_t kKdLeafSize = 16;

// Squared Euclidean distance, accumulated in coordinate order. Every search
// path uses this exact function so their results compare bit-for-bit.
inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

/// Exact k-nearest-neighbor index over a PointSet.
///
/// Neighbors are ordered by ascending distance with ties broken by ascending
/// point index. The query point itself is excluded; coincident duplicates
/// are not. The index keeps a reference to `points`, which must outlive it.
class KnnIndex {
 public:
  explicit KnnIndex(const PointSet& points, KnnMethod method = KnnMethod::Auto);
  ~KnnIndex();
  KnnIndex(KnnIndex&&) noexcept;
  KnnIndex& operator=(KnnIndex&&) noexcept;

  KnnMethod method() const noexcept { return method_; }
  const PointSet& points() const noexcept { return *points_; }

  std::vector<Neighbor> query(std::size_t query_index, unsigned k) const;

  // Writes exactly out.size() neighbors; out.size() must be < points().size().
  void query_into(std::size_t query_index, std::span<Neighbor> out) const;

 private:
  struct KdTree;
  const PointSet* points_;
  KnnMethod method_;
  std::unique_ptr<KdTree> tree_;
};

std::vector<Neighbor> knn_query(const PointSet& ps, std::size_t query_index, unsigned k,
                                KnnMethod method = KnnMethod::Auto);

// k nearest neighbors of every point, row i at [i*k, (i+1)*k). Parallel over
// query points; output order does not depend on scheduling.
std::vector<Neighbor> all_knn(const PointSet& ps, unsigned k, KnnMethod method = KnnMethod::Auto);

}  // namespace nnrenyi
