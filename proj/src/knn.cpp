#include "nnrenyi/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "nnrenyi/error.hpp"
#include "nnrenyi/parallel.hpp"

namespace nnrenyi {

namespace {

struct Candidate {
  double sq;
  std::size_t index;
  bool operator<(const Candidate& o) const noexcept {
    return sq < o.sq || (sq == o.sq && index < o.index);
  }
};

// Bounded max-heap on (squared distance, index).
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k + 1); }

  bool full() const noexcept { return heap_.size() == k_; }
  double worst() const noexcept { return heap_.front().sq; }

  void offer(Candidate c) {
    if (!full()) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (c < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  void drain(std::span<Neighbor> out) {
    std::sort_heap(heap_.begin(), heap_.end());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = Neighbor{heap_[i].index, std::sqrt(heap_[i].sq)};
  }

 private:
  std::size_t k_;
  std::vector<Candidate> heap_;
};

void check_query(const PointSet& ps, std::size_t query_index, std::size_t k) {
  if (query_index >= ps.size())
    throw UsageError("query index " + std::to_string(query_index) + " out of range");
  if (k == 0) throw UsageError("k must be >= 1");
  if (k >= ps.size())
    throw DataError("insufficient points: k = " + std::to_string(k) + " needs more than " +
                    std::to_string(k) + " points, have " + std::to_string(ps.size()));
}

void exhaustive_query(const PointSet& ps, std::size_t qi, std::span<Neighbor> out) {
  TopK top(out.size());
  const auto q = ps[qi];
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i == qi) continue;
    top.offer({squared_distance(q, ps[i]), i});
  }
  top.drain(out);
}

}  // namespace

struct KnnIndex::KdTree {
  struct Node {
    std::size_t begin = 0, end = 0;  // range in perm
    std::size_t left = 0, right = 0; // child node ids; 0 means leaf
    std::size_t split_dim = 0;
    double split_value = 0.0;
  };

  const PointSet& ps;
  std::size_t d;
  std::vector<std::size_t> perm;
  std::vector<Node> nodes;
  std::vector<double> box_lo, box_hi;  // per node, d values each

  explicit KdTree(const PointSet& points) : ps(points), d(points.dim()), perm(points.size()) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    nodes.reserve(2 * (ps.size() / kKdLeafSize + 1));
    build(0, ps.size());
  }

  std::size_t build(std::size_t b, std::size_t e) {
    const std::size_t id = nodes.size();
    nodes.push_back(Node{b, e});
    box_lo.resize((id + 1) * d);
    box_hi.resize((id + 1) * d);
    for (std::size_t j = 0; j < d; ++j) {
      double lo = ps.at(perm[b], j), hi = lo;
      for (std::size_t t = b + 1; t < e; ++t) {
        const double v = ps.at(perm[t], j);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      box_lo[id * d + j] = lo;
      box_hi[id * d + j] = hi;
    }
    if (e - b <= kKdLeafSize) return id;

    std::size_t dim = 0;
    double spread = -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double s = box_hi[id * d + j] - box_lo[id * d + j];
      if (s > spread) {
        spread = s;
        dim = j;
      }
    }
    if (spread <= 0.0) return id;  // all points coincide

    const std::size_t mid = b + (e - b) / 2;
    std::nth_element(perm.begin() + b, perm.begin() + mid, perm.begin() + e,
                     [&](std::size_t x, std::size_t y) {
                       const double vx = ps.at(x, dim), vy = ps.at(y, dim);
                       return vx < vy || (vx == vy && x < y);
                     });
    const double split = ps.at(perm[mid], dim);
    const std::size_t left = build(b, mid);
    const std::size_t right = build(mid, e);
    nodes[id].left = left;
    nodes[id].right = right;
    nodes[id].split_dim = dim;
    nodes[id].split_value = split;
    return id;
  }

  // Lower bound on the squared distance from q to any point in the node's
  // box. Each term is <= the matching term of squared_distance and is summed
  // in the same order, so the bound never exceeds a computed distance.
  double box_bound(std::size_t id, std::span<const double> q) const noexcept {
    double s = 0.0;
    const double* lo = &box_lo[id * d];
    const double* hi = &box_hi[id * d];
    for (std::size_t j = 0; j < d; ++j) {
      double t = 0.0;
      if (q[j] < lo[j])
        t = lo[j] - q[j];
      else if (q[j] > hi[j])
        t = q[j] - hi[j];
      s += t * t;
    }
    return s;
  }

  void search(std::size_t id, std::span<const double> q, std::size_t qi, TopK& top) const {
    const Node& node = nodes[id];
    if (node.left == 0) {
      for (std::size_t t = node.begin; t < node.end; ++t) {
        const std::size_t i = perm[t];
        if (i == qi) continue;
        top.offer({squared_distance(q, ps[i]), i});
      }
      return;
    }
    std::size_t first = node.left, second = node.right;
    if (q[node.split_dim] >= node.split_value) std::swap(first, second);
    for (std::size_t child : {first, second}) {
      // Strict comparison keeps equal-distance candidates reachable for the
      // index tie-break.
      if (top.full() && box_bound(child, q) > top.worst()) continue;
      search(child, q, qi, top);
    }
  }
};

KnnIndex::KnnIndex(const PointSet& points, KnnMethod method) : points_(&points), method_(method) {
  if (method_ == KnnMethod::Auto)
    method_ = points.dim() > kMaxKdTreeDim ? KnnMethod::Exhaustive : KnnMethod::KdTree;
  if (method_ == KnnMethod::KdTree) tree_ = std::make_unique<KdTree>(points);
}

KnnIndex::~KnnIndex() = default;
KnnIndex::KnnIndex(KnnIndex&&) noexcept = default;
KnnIndex& KnnIndex::operator=(KnnIndex&&) noexcept = default;

std::vector<Neighbor> KnnIndex::query(std::size_t query_index, unsigned k) const {
  check_query(*points_, query_index, k);
  std::vector<Neighbor> out(k);
  query_into(query_index, out);
  return out;
}

void KnnIndex::query_into(std::size_t query_index, std::span<Neighbor> out) const {
  check_query(*points_, query_index, out.size());
  if (method_ == KnnMethod::Exhaustive) {
    exhaustive_query(*points_, query_index, out);
    return;
  }
  TopK top(out.size());
  tree_->search(0, (*points_)[query_index], query_index, top);
  top.drain(out);
}

std::vector<Neighbor> knn_query(const PointSet& ps, std::size_t query_index, unsigned k,
                                KnnMethod method) {
  check_query(ps, query_index, k);
  return KnnIndex(ps, method).query(query_index, k);
}

std::vector<Neighbor> all_knn(const PointSet& ps, unsigned k, KnnMethod method) {
  if (k == 0) throw UsageError("k must be >= 1");
  if (k >= ps.size())
    throw DataError("insufficient points: need more than " + std::to_string(k) + " points, have " +
                    std::to_string(ps.size()));
  KnnIndex index(ps, method);
  std::vector<Neighbor> out(ps.size() * k);
  parallel_for(ps.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      index.query_into(i, std::span<Neighbor>(out.data() + i * k, k));
  });
  return out;
}

}  // namespace nnrenyi
