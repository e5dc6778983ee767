#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nnrenyi {

/// Immutable sample of n points in R^d, stored row-major.
///
/// Construction validates that n, d > 0 and that every coordinate is finite.
class PointSet {
 public:
  PointSet(std::size_t n, std::size_t d, std::vector<double> coords);

  // One point per inner list; all must share a length.
  PointSet(std::initializer_list<std::initializer_list<double>> rows);

  // 1-D convenience: one point per value.
  static PointSet line(std::span<const double> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * d_, d_};
  }
  double at(std::size_t i, std::size_t j) const noexcept { return coords_[i * d_ + j]; }

  std::span<const double> coords() const noexcept { return coords_; }

  // Points with the given indices, in order.
  PointSet subset(std::span<const std::size_t> indices) const;

  // Column subset, in the order given.
  PointSet columns(std::span<const std::size_t> cols) const;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> coords_;
};

/// Finite non-empty set S of positive neighbor ranks, kept sorted and unique.
class NeighborSpec {
 public:
  explicit NeighborSpec(std::vector<unsigned> ranks);
  NeighborSpec(std::initializer_list<unsigned> ranks)
      : NeighborSpec(std::vector<unsigned>(ranks)) {}

  // Parses "1,2,3".
  static NeighborSpec parse(const std::string_view text);

  const std::vector<unsigned>& ranks() const noexcept { return ranks_; }
  unsigned k() const noexcept { return ranks_.back(); }
  std::size_t size() const noexcept { return ranks_.size(); }
  bool singleton() const noexcept { return ranks_.size() == 1; }

  std::string to_string() const;

  friend bool operator==(const NeighborSpec&, const NeighborSpec&) = default;

 private:
  std::vector<unsigned> ranks_;
};

/// Axis-aligned cube prod_j [lower_j, lower_j + side].
class Cube {
 public:
  Cube(std::vector<double> lower, double side);
  static Cube unit(std::size_t d) { return Cube(std::vector<double>(d, 0.0), 1.0); }

  std::size_t dim() const noexcept { return lower_.size(); }
  double side() const noexcept { return side_; }
  double lower(std::size_t j) const noexcept { return lower_[j]; }
  double upper(std::size_t j) const noexcept { return upper_[j]; }

  bool contains(std::span<const double> x) const noexcept;

  // Cube with explicitly given upper faces, for partitions whose faces must be
  // computed as (i + 1) / m rather than lower + side.
  static Cube with_faces(std::vector<double> lower, std::vector<double> upper);

 private:
  Cube() = default;
  std::vector<double> lower_;
  std::vector<double> upper_;
  double side_ = 0.0;
};

}  // namespace nnrenyi
