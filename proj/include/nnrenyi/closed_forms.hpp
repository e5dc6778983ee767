#pragma once

#include <Eigen/Dense>

namespace nnrenyi {

// Reference values used as ground truth by experiments and tests.

// H_alpha of N(mu, cov):
//   (d/2) log 2pi + (1/2) log|cov| - (d/2) log(alpha) / (1 - alpha).
double gaussian_renyi_entropy(const Eigen::MatrixXd& cov, double alpha);

// I_alpha of N(mu, cov); depends only on the correlation matrix R:
//   (1/(alpha-1)) [ -(alpha/2) log|R| - (1/2) log|alpha R^-1 + (1-alpha) I| ].
double gaussian_renyi_mi(const Eigen::MatrixXd& cov, double alpha);

// H_alpha of the uniform distribution on a cube of side `side` in R^d.
double uniform_cube_renyi_entropy(std::size_t d, double side);

Eigen::MatrixXd correlation_from_covariance(const Eigen::MatrixXd& cov);

}  // namespace nnrenyi
