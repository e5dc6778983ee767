#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nnrenyi/point_set.hpp"

namespace nnrenyi {

struct UniformCube {
  std::size_t d = 1;
  double side = 1.0;
};

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// Uniform draws along one of the built-in 3-D polyline shapes. `dims` < 3
// keeps only the leading coordinates (a projection of the shape).
struct Wireframe {
  int shape_id = 0;
  std::size_t dims = 3;
};

struct DistributionSpec;

struct Product {
  std::vector<DistributionSpec> components;
};

struct DistributionSpec {
  std::variant<UniformCube, Gaussian, Wireframe, Product> kind;

  std::size_t dim() const;
  void validate() const;  // throws UsageError
};

inline constexpr int kWireframeShapeCount = 6;

struct Segment {
  std::array<double, 3> a, b;
};

// Segments of a built-in shape: 0 helix, 1 trefoil knot, 2 cube edges,
// 3 star, 4 circle pair, 5 zigzag.
const std::vector<Segment>& wireframe_segments(int shape_id);
const char* wireframe_name(int shape_id);

// n i.i.d. draws; identical output for identical (spec, n, seed). Product
// components draw from derived streams 0, 1, ... of `seed`.
PointSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

// Symmetric positive definite matrix Q diag(lambda) Q^T with Q from the QR
// factorization of a Gaussian matrix and lambda log-uniform in [1, condition_cap].
Eigen::MatrixXd random_covariance(std::size_t d, double condition_cap, std::uint64_t seed);

// Random invertible q x q mixing matrix with bounded condition number.
Eigen::MatrixXd random_mixing(std::size_t q, double condition_cap, std::uint64_t seed);

// Each row s becomes A s. A must have full column rank and cols == dim(s).
PointSet mix(const PointSet& sources, const Eigen::MatrixXd& mixing);

// Symmetric square root of a positive definite matrix; throws UsageError
// when `m` is not symmetric positive definite.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m);

Eigen::MatrixXd to_matrix(const PointSet& ps);  // n x d
PointSet from_matrix(const Eigen::MatrixXd& m);

}  // namespace nnrenyi
