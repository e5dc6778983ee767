#include "nnrenyi/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nnrenyi/error.hpp"
#include "nnrenyi/rng.hpp"

namespace nnrenyi {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

using P3 = std::array<double, 3>;

std::vector<Segment> polyline(const std::vector<P3>& pts, bool closed) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) out.push_back({pts[i], pts[i + 1]});
  if (closed && pts.size() > 2) out.push_back({pts.back(), pts.front()});
  return out;
}

std::vector<Segment> make_shape(int id) {
  constexpr double pi = std::numbers::pi;
  std::vector<P3> pts;
  switch (id) {
    case 0:  // helix, two turns
      for (int i = 0; i <= 48; ++i) {
        const double t = 4.0 * pi * i / 48.0;
        pts.push_back({std::cos(t), std::sin(t), t / (2.0 * pi) - 1.0});
      }
      return polyline(pts, false);
    case 1:  // trefoil knot
      for (int i = 0; i < 60; ++i) {
        const double t = 2.0 * pi * i / 60.0;
        pts.push_back({(std::sin(t) + 2.0 * std::sin(2.0 * t)) / 3.0,
                       (std::cos(t) - 2.0 * std::cos(2.0 * t)) / 3.0, -std::sin(3.0 * t) / 3.0 * 2.0});
      }
      return polyline(pts, true);
    case 2: {  // edges of [-1,1]^3
      std::vector<Segment> out;
      for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        for (double sb : {-1.0, 1.0})
          for (double sc : {-1.0, 1.0}) {
            P3 p{}, q{};
            p[a] = -1.0;
            q[a] = 1.0;
            p[b] = q[b] = sb;
            p[c] = q[c] = sc;
            out.push_back({p, q});
          }
      }
      return out;
    }
    case 3:  // five-pointed star with alternating height
      for (int i = 0; i < 10; ++i) {
        const double t = pi / 2.0 + 2.0 * pi * i / 10.0;
        const double r = (i % 2 == 0) ? 1.0 : 0.4;
        pts.push_back({r * std::cos(t), r * std::sin(t), (i % 2 == 0) ? 0.5 : -0.5});
      }
      return polyline(pts, true);
    case 4: {  // two linked circles in orthogonal planes
      std::vector<P3> c1, c2;
      for (int i = 0; i < 40; ++i) {
        const double t = 2.0 * pi * i / 40.0;
        c1.push_back({std::cos(t) - 0.5, std::sin(t), 0.0});
        c2.push_back({std::cos(t) + 0.5, 0.0, std::sin(t)});
      }
      auto out = polyline(c1, true);
      auto more = polyline(c2, true);
      out.insert(out.end(), more.begin(), more.end());
      return out;
    }
    case 5:  // zigzag along a diagonal
      for (int i = 0; i <= 8; ++i) {
        const double s = -1.0 + 2.0 * i / 8.0;
        pts.push_back({s, (i % 2 == 0) ? 1.0 : -1.0, (i % 4 < 2) ? s : -s});
      }
      return polyline(pts, false);
    default:
      throw UsageError("unknown wireframe shape id " + std::to_string(id));
  }
}

double seg_length(const Segment& s) {
  double l = 0.0;
  for (int j = 0; j < 3; ++j) l += (s.b[j] - s.a[j]) * (s.b[j] - s.a[j]);
  return std::sqrt(l);
}

void sample_wireframe(const Wireframe& w, std::size_t n, Rng& rng, std::vector<double>& out) {
  const auto& segs = wireframe_segments(w.shape_id);
  std::vector<double> cum(segs.size());
  double total = 0.0;
  for (std::size_t s = 0; s < segs.size(); ++s) cum[s] = (total += seg_length(segs[s]));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * total;
    std::size_t s = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (s >= segs.size()) s = segs.size() - 1;
    const double t = rng.uniform();
    for (std::size_t j = 0; j < w.dims; ++j)
      out.push_back(segs[s].a[j] + t * (segs[s].b[j] - segs[s].a[j]));
  }
}

// Row-major n x dim block for one leaf distribution.
std::vector<double> sample_leaf(const DistributionSpec& spec, std::size_t n, Rng& rng) {
  std::vector<double> out;
  out.reserve(n * spec.dim());
  std::visit(overloaded{
                 [&](const UniformCube& u) {
                   for (std::size_t i = 0; i < n * u.d; ++i) out.push_back(u.side * rng.uniform());
                 },
                 [&](const Gaussian& g) {
                   const Eigen::MatrixXd root = symmetric_sqrt(g.covariance);
                   const auto d = g.mean.size();
                   Eigen::VectorXd z(d);
                   for (std::size_t i = 0; i < n; ++i) {
                     for (Eigen::Index j = 0; j < d; ++j) z[j] = rng.normal();
                     const Eigen::VectorXd x = g.mean + root * z;
                     out.insert(out.end(), x.data(), x.data() + d);
                   }
                 },
                 [&](const Wireframe& w) { sample_wireframe(w, n, rng, out); },
                 [&](const Product&) {},
             },
             spec.kind);
  return out;
}

}  // namespace

const std::vector<Segment>& wireframe_segments(int shape_id) {
  static const std::array<std::vector<Segment>, kWireframeShapeCount> shapes = [] {
    std::array<std::vector<Segment>, kWireframeShapeCount> s;
    for (int i = 0; i < kWireframeShapeCount; ++i) s[i] = make_shape(i);
    return s;
  }();
  if (shape_id < 0 || shape_id >= kWireframeShapeCount)
    throw UsageError("unknown wireframe shape id " + std::to_string(shape_id));
  return shapes[shape_id];
}

const char* wireframe_name(int shape_id) {
  static const char* names[] = {"helix", "trefoil", "cube_edges", "star", "circle_pair", "zigzag"};
  if (shape_id < 0 || shape_id >= kWireframeShapeCount)
    throw UsageError("unknown wireframe shape id " + std::to_string(shape_id));
  return names[shape_id];
}

std::size_t DistributionSpec::dim() const {
  return std::visit(overloaded{
                        [](const UniformCube& u) { return u.d; },
                        [](const Gaussian& g) { return static_cast<std::size_t>(g.mean.size()); },
                        [](const Wireframe& w) { return w.dims; },
                        [](const Product& p) {
                          std::size_t d = 0;
                          for (const auto& c : p.components) d += c.dim();
                          return d;
                        },
                    },
                    kind);
}

void DistributionSpec::validate() const {
  std::visit(overloaded{
                 [](const UniformCube& u) {
                   if (u.d < 1) throw UsageError("uniform_cube: d must be >= 1");
                   if (!(u.side > 0.0)) throw UsageError("uniform_cube: side must be positive");
                 },
                 [](const Gaussian& g) {
                   if (g.mean.size() < 1) throw UsageError("gaussian: empty mean");
                   if (g.covariance.rows() != g.mean.size() || g.covariance.cols() != g.mean.size())
                     throw UsageError("gaussian: covariance shape does not match mean");
                   (void)symmetric_sqrt(g.covariance);
                 },
                 [](const Wireframe& w) {
                   (void)wireframe_segments(w.shape_id);
                   if (w.dims < 1 || w.dims > 3) throw UsageError("wireframe: dims must be 1..3");
                 },
                 [](const Product& p) {
                   if (p.components.empty()) throw UsageError("product: no components");
                   for (const auto& c : p.components) c.validate();
                 },
             },
             kind);
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw UsageError("covariance must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!m.isApprox(m.transpose(), 1e-12) && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw UsageError("covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0))
    throw UsageError("covariance is not positive definite");
  return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

PointSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw UsageError("sample size must be >= 1");
  const std::size_t d = spec.dim();
  if (const auto* prod = std::get_if<Product>(&spec.kind)) {
    std::vector<double> out(n * d);
    std::size_t col = 0;
    for (std::size_t c = 0; c < prod->components.size(); ++c) {
      const PointSet part = sample(prod->components[c], n, derive_seed(seed, c));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < part.dim(); ++j) out[i * d + col + j] = part.at(i, j);
      col += part.dim();
    }
    return PointSet(n, d, std::move(out));
  }
  Rng rng(seed);
  return PointSet(n, d, sample_leaf(spec, n, rng));
}

Eigen::MatrixXd random_covariance(std::size_t d, double condition_cap, std::uint64_t seed) {
  if (d < 1) throw UsageError("random_covariance: d must be >= 1");
  if (!(condition_cap >= 1.0)) throw UsageError("random_covariance: condition cap must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd lambda(d);
  const double log_cap = std::log(condition_cap);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = std::exp(rng.uniform() * log_cap);
  Eigen::MatrixXd c = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (c + c.transpose());
}

Eigen::MatrixXd random_mixing(std::size_t q, double condition_cap, std::uint64_t seed) {
  if (q < 1) throw UsageError("random_mixing: size must be >= 1");
  if (!(condition_cap >= 1.0)) throw UsageError("random_mixing: condition cap must be >= 1");
  Rng rng(seed);
  auto orthogonal = [&] {
    Eigen::MatrixXd g(q, q);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return Eigen::MatrixXd(qr.householderQ());
  };
  const Eigen::MatrixXd u = orthogonal();
  const Eigen::MatrixXd v = orthogonal();
  Eigen::VectorXd s(q);
  const double log_cap = std::log(condition_cap);
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = std::exp(rng.uniform() * log_cap);
  return u * s.asDiagonal() * v.transpose();
}

PointSet mix(const PointSet& sources, const Eigen::MatrixXd& mixing) {
  if (static_cast<std::size_t>(mixing.cols()) != sources.dim())
    throw UsageError("mixing matrix column count does not match source dimension");
  if (mixing.rows() < mixing.cols()) throw UsageError("mixing matrix must have rows >= cols");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mixing);
  if (lu.rank() < mixing.cols()) throw UsageError("mixing matrix is rank deficient");
  const Eigen::MatrixXd x = to_matrix(sources) * mixing.transpose();
  return from_matrix(x);
}

Eigen::MatrixXd to_matrix(const PointSet& ps) {
  Eigen::MatrixXd m(ps.size(), ps.dim());
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < ps.dim(); ++j) m(i, j) = ps.at(i, j);
  return m;
}

PointSet from_matrix(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  return PointSet(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), std::move(out));
}

}  // namespace nnrenyi
