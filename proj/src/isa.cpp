#include "nnrenyi/isa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <numeric>

#include "nnrenyi/error.hpp"
#include "nnrenyi/rng.hpp"
#include "nnrenyi/samplers.hpp"

namespace nnrenyi {

Eigen::MatrixXd sample_covariance(const PointSet& ps) {
  if (ps.size() < 2) throw DataError("covariance needs at least 2 points");
  Eigen::MatrixXd x = to_matrix(ps);
  x.rowwise() -= x.colwise().mean();
  return (x.transpose() * x) / static_cast<double>(ps.size() - 1);
}

Whitening whiten(const PointSet& ps, std::size_t out_dim) {
  const std::size_t d = ps.dim();
  if (out_dim == 0) out_dim = d;
  if (out_dim > d) throw UsageError("whitening cannot increase dimension");
  Eigen::MatrixXd x = to_matrix(ps);
  const Eigen::VectorXd mean = x.colwise().mean();
  x.rowwise() -= mean.transpose();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(ps.size() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double top = lambda[lambda.size() - 1];
  const Eigen::Index first = static_cast<Eigen::Index>(d - out_dim);
  if (!(top > 0.0) || !(lambda[first] > 1e-12 * top))
    throw DataError("singular covariance: cannot whiten");
  Eigen::MatrixXd w;
  if (out_dim == d) {
    w = eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  } else {
    const Eigen::MatrixXd e = eig.eigenvectors().rightCols(static_cast<Eigen::Index>(out_dim));
    const Eigen::VectorXd l = lambda.tail(static_cast<Eigen::Index>(out_dim));
    w = l.cwiseSqrt().cwiseInverse().asDiagonal() * e.transpose();
  }
  const Eigen::MatrixXd y = x * w.transpose();
  return Whitening{from_matrix(y), w, mean};
}

namespace {

Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w * w.transpose());
  return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose() * w;
}

}  // namespace

FastIcaResult fastica(const PointSet& whitened, std::uint64_t seed, const FastIcaOptions& options) {
  const Eigen::Index d = static_cast<Eigen::Index>(whitened.dim());
  const double n = static_cast<double>(whitened.size());
  const Eigen::MatrixXd x = to_matrix(whitened).transpose();  // d x n

  Rng rng(seed);
  Eigen::MatrixXd w(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) w(i, j) = rng.normal();
  w = symmetric_decorrelation(w);

  FastIcaResult result;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXd g = (w * x).array().tanh().matrix();
    const Eigen::VectorXd gprime_mean = (1.0 - g.array().square()).rowwise().mean();
    Eigen::MatrixXd next = (g * x.transpose()) / n - gprime_mean.asDiagonal() * w;
    next = symmetric_decorrelation(next);
    const double change = (1.0 - (next * w.transpose()).diagonal().cwiseAbs().array()).abs().maxCoeff();
    w = next;
    result.iterations = it;
    if (change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged)
    result.warnings.push_back("FastICA did not converge within " + std::to_string(options.max_iterations) +
                              " iterations");
  result.unmixing = w;
  return result;
}

GroupingObjective::GroupingObjective(const PointSet& components, const EstimatorSettings& settings)
    : components_(components), settings_(settings) {
  settings_.validate();
}

const GammaValue& GroupingObjective::gamma_for(std::size_t dim) {
  auto it = gamma_.find(dim);
  if (it == gamma_.end()) it = gamma_.emplace(dim, resolve_gamma(settings_, dim)).first;
  return it->second;
}

double GroupingObjective::block(std::vector<std::size_t> members) {
  std::sort(members.begin(), members.end());
  if (members.size() < 2) return 0.0;  // a single component carries no dependence
  auto it = cache_.find(members);
  if (it != cache_.end()) return it->second;
  const PointSet cols = components_.columns(members);
  const double v = renyi_mi(cols, settings_, gamma_for(members.size())).value;
  cache_.emplace(members, v);
  return v;
}

double GroupingObjective::pair(std::size_t a, std::size_t b) { return block({a, b}); }

double GroupingObjective::total(const Partition& partition) {
  double s = 0.0;
  for (const auto& b : partition) s += block(b);
  return s;
}

namespace {

void check_grouping_shape(const PointSet& components, std::size_t block_dim, std::size_t blocks) {
  if (block_dim < 1 || blocks < 1) throw UsageError("block dimension and count must be >= 1");
  if (components.dim() != block_dim * blocks)
    throw UsageError("cannot split " + std::to_string(components.dim()) + " components into " +
                     std::to_string(blocks) + " blocks of " + std::to_string(block_dim));
}

Partition canonical(Partition p) {
  for (auto& b : p) std::sort(b.begin(), b.end());
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace

IsaSolution group_components(const PointSet& components, std::size_t block_dim, std::size_t blocks,
                             const EstimatorSettings& settings) {
  check_grouping_shape(components, block_dim, blocks);
  GroupingObjective objective(components, settings);
  const std::size_t total = components.dim();
  IsaSolution sol;
  sol.warnings = mi_guarantee_warnings(block_dim, settings.alpha);

  if (blocks == 1 || block_dim == 1) {
    Partition p(blocks);
    for (std::size_t i = 0; i < total; ++i) p[i / block_dim].push_back(i);
    sol.blocks = canonical(p);
    sol.objective = objective.total(sol.blocks);
    return sol;
  }

  std::vector<std::vector<double>> mi(total, std::vector<double>(total, 0.0));
  for (std::size_t a = 0; a < total; ++a)
    for (std::size_t b = a + 1; b < total; ++b) mi[a][b] = mi[b][a] = objective.pair(a, b);

  std::vector<bool> used(total, false);
  Partition partition;
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    std::vector<std::size_t> members;
    if (blk + 1 == blocks) {
      for (std::size_t i = 0; i < total; ++i)
        if (!used[i]) members.push_back(i);
    } else {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t ba = 0, bb = 0;
      for (std::size_t a = 0; a < total; ++a)
        for (std::size_t b = a + 1; b < total; ++b)
          if (!used[a] && !used[b] && mi[a][b] > best) {
            best = mi[a][b];
            ba = a;
            bb = b;
          }
      members = {ba, bb};
      used[ba] = used[bb] = true;
      while (members.size() < block_dim) {
        double best_gain = -std::numeric_limits<double>::infinity();
        std::size_t pick = 0;
        for (std::size_t c = 0; c < total; ++c) {
          if (used[c]) continue;
          double gain = 0.0;
          for (std::size_t m : members) gain += mi[c][m];
          if (gain > best_gain) {
            best_gain = gain;
            pick = c;
          }
        }
        members.push_back(pick);
        used[pick] = true;
      }
    }
    for (std::size_t m : members) used[m] = true;
    partition.push_back(members);
  }

  double current = objective.total(partition);
  for (;;) {
    double best_gain = 0.0;
    std::size_t bx = 0, by = 0, ix = 0, iy = 0;
    for (std::size_t x = 0; x < blocks; ++x) {
      for (std::size_t y = x + 1; y < blocks; ++y) {
        const double base = objective.block(partition[x]) + objective.block(partition[y]);
        for (std::size_t i = 0; i < block_dim; ++i) {
          for (std::size_t j = 0; j < block_dim; ++j) {
            auto px = partition[x], py = partition[y];
            std::swap(px[i], py[j]);
            const double gain = objective.block(px) + objective.block(py) - base;
            if (gain > best_gain) {
              best_gain = gain;
              bx = x, by = y, ix = i, iy = j;
            }
          }
        }
      }
    }
    if (!(best_gain > 0.0)) break;
    std::swap(partition[bx][ix], partition[by][iy]);
    const double next = objective.total(partition);
    if (!(next > current)) {  // guards against rounding in the gain
      std::swap(partition[bx][ix], partition[by][iy]);
      break;
    }
    current = next;
    ++sol.swaps;
  }
  sol.blocks = canonical(partition);
  sol.objective = objective.total(sol.blocks);
  return sol;
}

std::size_t partition_count(std::size_t block_dim, std::size_t blocks) {
  // (dm)! / ((d!)^m m!)
  double logc = std::lgamma(static_cast<double>(block_dim * blocks) + 1.0) -
                static_cast<double>(blocks) * std::lgamma(static_cast<double>(block_dim) + 1.0) -
                std::lgamma(static_cast<double>(blocks) + 1.0);
  return static_cast<std::size_t>(std::llround(std::exp(logc)));
}

namespace {

void enumerate_partitions(std::vector<std::size_t>& free_items, std::size_t block_dim, Partition& current,
                          const std::function<void(const Partition&)>& visit) {
  if (free_items.empty()) {
    visit(current);
    return;
  }
  // The smallest free item anchors the next block; choose its companions.
  const std::size_t anchor = free_items.front();
  std::vector<std::size_t> rest(free_items.begin() + 1, free_items.end());
  std::vector<bool> pick(rest.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(block_dim - 1), true);
  do {
    std::vector<std::size_t> blk{anchor}, remaining;
    for (std::size_t i = 0; i < rest.size(); ++i) (pick[i] ? blk : remaining).push_back(rest[i]);
    current.push_back(blk);
    enumerate_partitions(remaining, block_dim, current, visit);
    current.pop_back();
  } while (std::prev_permutation(pick.begin(), pick.end()));
}

}  // namespace

IsaSolution exhaustive_grouping(const PointSet& components, std::size_t block_dim, std::size_t blocks,
                                const EstimatorSettings& settings) {
  check_grouping_shape(components, block_dim, blocks);
  if (components.dim() > 12) throw UsageError("exhaustive grouping limited to 12 components");
  GroupingObjective objective(components, settings);
  std::vector<std::size_t> items(components.dim());
  std::iota(items.begin(), items.end(), std::size_t{0});
  Partition current, best;
  double best_value = -std::numeric_limits<double>::infinity();
  enumerate_partitions(items, block_dim, current, [&](const Partition& p) {
    const double v = objective.total(p);
    if (v > best_value) {
      best_value = v;
      best = p;
    }
  });
  IsaSolution sol;
  sol.blocks = canonical(best);
  sol.objective = best_value;
  sol.warnings = mi_guarantee_warnings(block_dim, settings.alpha);
  return sol;
}

Eigen::MatrixXd block_norms(const Eigen::MatrixXd& g, std::size_t block_dim, std::size_t blocks) {
  const auto dm = static_cast<Eigen::Index>(block_dim * blocks);
  if (g.rows() != dm || g.cols() != dm)
    throw UsageError("block matrix must be " + std::to_string(dm) + " x " + std::to_string(dm));
  const auto d = static_cast<Eigen::Index>(block_dim);
  Eigen::MatrixXd out(blocks, blocks);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = g.block(i * d, j * d, d, d).norm();
  return out;
}

double amari_block_index(const Eigen::MatrixXd& g, std::size_t block_dim, std::size_t blocks) {
  const Eigen::MatrixXd b = block_norms(g, block_dim, blocks);
  const auto m = b.rows();
  if (m < 2) return 0.0;
  double rows = 0.0, cols = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double mx = b.row(i).maxCoeff();
    if (mx > 0.0) rows += b.row(i).sum() / mx - 1.0;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mx = b.col(j).maxCoeff();
    if (mx > 0.0) cols += b.col(j).sum() / mx - 1.0;
  }
  return (rows + cols) / (2.0 * static_cast<double>(m) * static_cast<double>(m - 1));
}

void IsaProblem::validate() const {
  if (subspace_dim < 1) throw UsageError("subspace dimension must be >= 1");
  if (num_sources < 2) throw UsageError("ISA needs at least 2 sources");
  if (observations.dim() < subspace_dim * num_sources)
    throw UsageError("observation dimension q must be >= d * m");
  if (true_mixing) {
    if (static_cast<std::size_t>(true_mixing->rows()) != observations.dim() ||
        static_cast<std::size_t>(true_mixing->cols()) != subspace_dim * num_sources)
      throw UsageError("true mixing must be q x dm");
  }
}

IsaSolution solve_isa(const IsaProblem& problem, const EstimatorSettings& settings, std::uint64_t seed,
                      const FastIcaOptions& ica) {
  problem.validate();
  const std::size_t dm = problem.subspace_dim * problem.num_sources;
  const Whitening white = whiten(problem.observations, dm);
  const FastIcaResult ica_result = fastica(white.data, derive_seed(seed, 1), ica);
  const Eigen::MatrixXd w_ica = ica_result.unmixing * white.matrix;  // dm x q
  const PointSet ics = from_matrix(to_matrix(white.data) * ica_result.unmixing.transpose());

  IsaSolution sol = group_components(ics, problem.subspace_dim, problem.num_sources, settings);
  sol.warnings.insert(sol.warnings.end(), ica_result.warnings.begin(), ica_result.warnings.end());

  Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dm), static_cast<Eigen::Index>(dm));
  Eigen::Index row = 0;
  for (const auto& blk : sol.blocks)
    for (std::size_t c : blk) perm(row++, static_cast<Eigen::Index>(c)) = 1.0;
  sol.separation = perm * w_ica;
  if (problem.true_mixing) {
    const Eigen::MatrixXd g = sol.separation * *problem.true_mixing;
    sol.block_norms = block_norms(g, problem.subspace_dim, problem.num_sources);
    sol.score = amari_block_index(g, problem.subspace_dim, problem.num_sources);
  }
  return sol;
}

}  // namespace nnrenyi
