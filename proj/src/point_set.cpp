#include "nnrenyi/point_set.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "nnrenyi/error.hpp"

namespace nnrenyi {

PointSet::PointSet(std::size_t n, std::size_t d, std::vector<double> coords)
    : n_(n), d_(d), coords_(std::move(coords)) {
  if (n_ == 0 || d_ == 0) throw DataError("no data: point set needs n > 0 and d > 0");
  if (coords_.size() != n_ * d_) throw DataError("coordinate buffer does not match n x d");
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      std::ostringstream msg;
      msg << "non-finite coordinate at point " << i / d_ << ", column " << i % d_;
      throw DataError(msg.str());
    }
  }
}

namespace {
std::size_t row_dim(std::initializer_list<std::initializer_list<double>> rows) {
  return rows.size() ? rows.begin()->size() : 0;
}

std::vector<double> flatten(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t d = row_dim(rows);
  std::vector<double> out;
  out.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw DataError("rows of differing dimension");
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}
}  // namespace

PointSet::PointSet(std::initializer_list<std::initializer_list<double>> rows)
    : PointSet(rows.size(), row_dim(rows), flatten(rows)) {}

PointSet PointSet::line(std::span<const double> values) {
  return PointSet(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

PointSet PointSet::subset(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * d_);
  for (std::size_t i : indices) {
    auto p = (*this)[i];
    out.insert(out.end(), p.begin(), p.end());
  }
  return PointSet(indices.size(), d_, std::move(out));
}

PointSet PointSet::columns(std::span<const std::size_t> cols) const {
  std::vector<double> out;
  out.reserve(n_ * cols.size());
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t c : cols) out.push_back(at(i, c));
  return PointSet(n_, cols.size(), std::move(out));
}

NeighborSpec::NeighborSpec(std::vector<unsigned> ranks) : ranks_(std::move(ranks)) {
  if (ranks_.empty()) throw UsageError("neighbor set S must be non-empty");
  std::sort(ranks_.begin(), ranks_.end());
  ranks_.erase(std::unique(ranks_.begin(), ranks_.end()), ranks_.end());
  if (ranks_.front() == 0) throw UsageError("neighbor ranks must be >= 1");
}

NeighborSpec NeighborSpec::parse(std::string_view text) {
  std::vector<unsigned> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    auto tok = text.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      throw UsageError("cannot parse neighbor set '" + std::string(text) + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return NeighborSpec(std::move(out));
}

std::string NeighborSpec::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < ranks_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(ranks_[i]);
  }
  return s;
}

Cube::Cube(std::vector<double> lower, double side) : lower_(std::move(lower)), side_(side) {
  if (!(side_ > 0.0) || !std::isfinite(side_)) throw UsageError("cube side must be positive");
  if (lower_.empty()) throw UsageError("cube dimension must be positive");
  upper_.resize(lower_.size());
  for (std::size_t j = 0; j < lower_.size(); ++j) upper_[j] = lower_[j] + side_;
}

Cube Cube::with_faces(std::vector<double> lower, std::vector<double> upper) {
  if (lower.empty() || lower.size() != upper.size())
    throw UsageError("cube faces of mismatched dimension");
  Cube c;
  c.side_ = upper[0] - lower[0];
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!(upper[j] > lower[j])) throw UsageError("cube side must be positive");
  c.lower_ = std::move(lower);
  c.upper_ = std::move(upper);
  return c;
}

bool Cube::contains(std::span<const double> x) const noexcept {
  if (x.size() != lower_.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < lower_[j] || x[j] > upper_[j]) return false;
  return true;
}

}  // namespace nnrenyi
