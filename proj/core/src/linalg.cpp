// SPDX-License-Identifier: Apache-2.0
#include "nohis/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nohis/error.hpp"

namespace nohis {

namespace {

constexpr int kMaxPowerIterations = 300;
constexpr double kPowerTolerance = 1e-10;
constexpr int kSquarings = 4;

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(Errc::dimension_mismatch,
                "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

std::vector<std::size_t> all_rows(const VectorSet& set) {
  std::vector<std::size_t> rows(set.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

void normalize_in_place(std::span<double> z) {
  const double len = norm(z);
  for (double& c : z) c /= len;
}

void fix_sign(std::span<double> z) {
  for (double c : z) {
    if (std::abs(c) > 1e-12) {
      if (c < 0) {
        for (double& x : z) x = -x;
      }
      return;
    }
  }
}

// Distance between two unit vectors, ignoring sign.
double direction_change(std::span<const double> a, std::span<const double> b) {
  double plus = 0, minus = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    plus += (a[i] - b[i]) * (a[i] - b[i]);
    minus += (a[i] + b[i]) * (a[i] + b[i]);
  }
  return std::sqrt(std::min(plus, minus));
}

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
    }
  }
  return c;
}

double trace(const std::vector<double>& m, std::size_t n) {
  double t = 0;
  for (std::size_t i = 0; i < n; ++i) t += m[i * n + i];
  return t;
}

// Power iteration on an explicitly formed n x n scatter matrix. The matrix is
// first raised to the 2^kSquarings power so that small eigen-gaps still
// converge within the iteration budget.
DenseVector dominant_eigenvector_explicit(std::vector<double> cov, std::size_t n) {
  double tr = trace(cov, n);
  for (double& c : cov) c /= tr;
  for (int s = 0; s < kSquarings; ++s) {
    cov = matmul(cov, cov, n);
    tr = trace(cov, n);
    if (!(tr > 0) || !std::isfinite(tr)) break;
    for (double& c : cov) c /= tr;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (cov[i * n + i] > cov[best * n + best]) best = i;
  }
  DenseVector z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = cov[i * n + best];
  normalize_in_place(z);

  DenseVector next(n);
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0;
      for (std::size_t j = 0; j < n; ++j) acc += cov[i * n + j] * z[j];
      next[i] = acc;
    }
    normalize_in_place(next);
    const double change = direction_change(next, z);
    z.swap(next);
    if (change < kPowerTolerance) break;
  }
  return z;
}

DenseVector dominant_eigenvector_matrix_free(const VectorSet& set, std::span<const std::size_t> members,
                                             std::span<const double> center) {
  const std::size_t n = set.dim();
  DenseVector z(n, 0.0);
  double longest = -1;
  for (std::size_t idx : members) {
    const auto x = set[idx];
    const double d = squared_distance(x, center);
    if (d > longest) {
      longest = d;
      for (std::size_t i = 0; i < n; ++i) z[i] = x[i] - center[i];
    }
  }
  normalize_in_place(z);

  DenseVector next(n);
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t idx : members) {
      const auto x = set[idx];
      double proj = 0;
      for (std::size_t i = 0; i < n; ++i) proj += (x[i] - center[i]) * z[i];
      for (std::size_t i = 0; i < n; ++i) next[i] += proj * (x[i] - center[i]);
    }
    normalize_in_place(next);
    const double change = direction_change(next, z);
    z.swap(next);
    if (change < kPowerTolerance) break;
  }
  return z;
}

}  // namespace

VectorSet::VectorSet(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0 || data_.size() % dim_ != 0) {
    throw Error(Errc::invalid_argument, "vector data length is not a multiple of the dimension");
  }
}

void VectorSet::push_back(std::span<const double> v) {
  require_same_dim(dim_, v.size());
  data_.insert(data_.end(), v.begin(), v.end());
}

void Reflection::apply(std::span<const double> in, std::span<double> out) const {
  if (is_identity()) {
    if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  const double twice = 2.0 * dot(in, v);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] - twice * v[i];
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double norm(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

DenseVector centroid(const VectorSet& set) { return centroid(set, all_rows(set)); }

DenseVector centroid(const VectorSet& set, std::span<const std::size_t> members) {
  if (members.empty()) throw Error(Errc::empty_cluster, "empty cluster");
  DenseVector w(set.dim(), 0.0);
  for (std::size_t idx : members) {
    const auto x = set[idx];
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += x[i];
  }
  const double inv = 1.0 / static_cast<double>(members.size());
  for (double& c : w) c *= inv;
  return w;
}

double scatter_value(const VectorSet& set) {
  const auto rows = all_rows(set);
  const auto w = centroid(set, rows);
  return scatter_value(set, rows, w);
}

double scatter_value(const VectorSet& set, std::span<const std::size_t> members,
                     std::span<const double> center) {
  if (members.empty()) throw Error(Errc::empty_cluster, "empty cluster");
  double acc = 0;
  for (std::size_t idx : members) acc += squared_distance(set[idx], center);
  return acc;
}

DenseVector leading_principal_component(const VectorSet& set) {
  const auto rows = all_rows(set);
  const auto w = centroid(set, rows);
  return leading_principal_component(set, rows, w);
}

DenseVector leading_principal_component(const VectorSet& set, std::span<const std::size_t> members,
                                        std::span<const double> center) {
  const std::size_t n = set.dim();
  if (members.empty()) throw Error(Errc::empty_cluster, "empty cluster");
  if (members.size() < 2) throw Error(Errc::degenerate_cluster, "degenerate cluster");
  require_same_dim(n, center.size());

  DenseVector u;
  if (n <= detail::kExplicitCovarianceMaxDim) {
    std::vector<double> cov(n * n, 0.0);
    DenseVector c(n);
    for (std::size_t idx : members) {
      const auto x = set[idx];
      for (std::size_t i = 0; i < n; ++i) c[i] = x[i] - center[i];
      for (std::size_t i = 0; i < n; ++i) {
        if (c[i] == 0.0) continue;
        for (std::size_t j = i; j < n; ++j) cov[i * n + j] += c[i] * c[j];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) cov[i * n + j] = cov[j * n + i];
    }
    const double tr = trace(cov, n);
    if (!(tr > 0) || !std::isfinite(tr)) throw Error(Errc::degenerate_cluster, "degenerate cluster");
    u = dominant_eigenvector_explicit(std::move(cov), n);
  } else {
    if (!(scatter_value(set, members, center) > 0)) {
      throw Error(Errc::degenerate_cluster, "degenerate cluster");
    }
    u = dominant_eigenvector_matrix_free(set, members, center);
  }
  fix_sign(u);
  return u;
}

Reflection make_reflection(std::span<const double> u) {
  if (u.empty()) throw Error(Errc::invalid_argument, "empty direction");
  if (std::abs(norm(u) - 1.0) > 1e-9) throw Error(Errc::unnormalized_direction, "unnormalized direction");
  DenseVector diff(u.begin(), u.end());
  diff[0] -= 1.0;
  const double len = norm(diff);
  if (len < 1e-9) return Reflection{};
  for (double& c : diff) c /= len;
  return Reflection{std::move(diff)};
}

DenseVector reflect(const Reflection& spec, std::span<const double> x) {
  if (!spec.is_identity()) require_same_dim(spec.v.size(), x.size());
  DenseVector out(x.size());
  spec.apply(x, out);
  return out;
}

VectorSet reflect_set(const Reflection& spec, const VectorSet& set) {
  if (!spec.is_identity()) require_same_dim(spec.v.size(), set.dim());
  VectorSet out = set;
  for (std::size_t i = 0; i < out.size(); ++i) spec.apply(out[i], out.row(i));
  return out;
}

}  // namespace nohis
