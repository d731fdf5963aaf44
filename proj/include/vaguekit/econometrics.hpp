#pragma once

// Estimation core: empirical quantiles, winsorization, median splits,
// singleton dropping, fixed-effect demeaning, OLS and two-way clustered
// covariance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "vaguekit/error.hpp"
#include "vaguekit/table.hpp"

namespace vaguekit::econ {

using Codes = std::vector<std::int64_t>;

// ---------------------------------------------------------------------------
// Descriptive statistics

/// Nearest-rank quantile x_(ceil(n p)) of sorted data; p = 0 gives the minimum.
inline double quantile_type1(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  const double n = static_cast<double>(sorted.size());
  std::size_t k = static_cast<std::size_t>(std::ceil(n * p - 1e-12));
  return sorted[k == 0 ? 0 : k - 1];
}

inline std::vector<double> finite_sorted(std::span<const double> x) {
  std::vector<double> v;
  for (double d : x)
    if (!std::isnan(d)) v.push_back(d);
  std::sort(v.begin(), v.end());
  return v;
}

/// Average of the two middle values for even n.
inline double median(std::span<const double> x) {
  auto v = finite_sorted(x);
  if (v.empty()) throw DomainError("median of an empty sample");
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Summary {
  std::size_t n = 0;
  double mean = 0, sd = 0, min = 0, p25 = 0, p50 = 0, p75 = 0, max = 0;
};

/// NaNs are skipped. Quartiles are nearest-rank; sd uses n - 1.
inline Summary describe(std::span<const double> x) {
  auto v = finite_sorted(x);
  if (v.empty()) throw DomainError("cannot summarize an empty sample");
  Summary s;
  s.n = v.size();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(s.n);
  double ss = 0;
  for (double d : v) ss += (d - s.mean) * (d - s.mean);
  s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
  s.min = v.front();
  s.max = v.back();
  s.p25 = quantile_type1(v, 0.25);
  s.p50 = quantile_type1(v, 0.50);
  s.p75 = quantile_type1(v, 0.75);
  return s;
}

/// Clips at the nearest-rank lower_p and upper_p quantiles of the non-NaN
/// values. NaNs pass through.
inline std::vector<double> winsorize(std::span<const double> x, double lower_p = 0.01, double upper_p = 0.99) {
  if (!(lower_p >= 0.0 && lower_p < upper_p && upper_p <= 1.0))
    throw DomainError("winsorize needs 0 <= lower_p < upper_p <= 1");
  auto v = finite_sorted(x);
  if (v.empty()) throw DomainError("winsorize of an empty sample");
  const double lo = quantile_type1(v, lower_p), hi = quantile_type1(v, upper_p);
  std::vector<double> out(x.begin(), x.end());
  for (double& d : out)
    if (!std::isnan(d)) d = std::clamp(d, lo, hi);
  return out;
}

/// 1 when the value strictly exceeds its group's median, else 0; NaN stays
/// NaN. An empty `groups` means one global group.
inline std::vector<double> median_split(std::span<const double> x, const Codes& groups = {}) {
  if (!groups.empty() && groups.size() != x.size()) throw StructuralError("median_split: group codes length mismatch");
  std::map<std::int64_t, std::vector<double>> members;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isnan(x[i])) members[groups.empty() ? 0 : groups[i]].push_back(x[i]);
  std::map<std::int64_t, double> med;
  for (auto& [g, v] : members) med[g] = median(v);
  std::vector<double> out(x.size(), kNaN);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isnan(x[i])) out[i] = x[i] > med[groups.empty() ? 0 : groups[i]] ? 1.0 : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Singletons and demeaning

struct SingletonDrop {
  std::vector<std::size_t> kept;  ///< indices into the input rows
  std::size_t dropped = 0;
  std::size_t rounds = 0;
};

/// Repeatedly removes rows that are alone in their group under any of the
/// fixed-effect codings, until none remain.
inline SingletonDrop drop_singletons(const std::vector<Codes>& fes, std::size_t n) {
  SingletonDrop r;
  std::vector<char> alive(n, 1);
  std::size_t n_alive = n;
  while (true) {
    bool changed = false;
    for (const auto& codes : fes) {
      std::unordered_map<std::int64_t, std::size_t> count;
      for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) ++count[codes[i]];
      for (std::size_t i = 0; i < n; ++i)
        if (alive[i] && count[codes[i]] == 1) {
          alive[i] = 0;
          --n_alive;
          changed = true;
        }
    }
    if (!changed) break;
    ++r.rounds;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (alive[i]) r.kept.push_back(i);
  r.dropped = n - n_alive;
  return r;
}

/// Re-codes a subset of rows densely.
inline Codes recode(const Codes& codes, const std::vector<std::size_t>& rows, std::size_t* groups = nullptr) {
  std::unordered_map<std::int64_t, std::int64_t> m;
  Codes out;
  out.reserve(rows.size());
  for (auto i : rows) {
    auto [it, fresh] = m.emplace(codes[i], static_cast<std::int64_t>(m.size()));
    out.push_back(it->second);
  }
  if (groups) *groups = m.size();
  return out;
}

inline std::size_t count_groups(const Codes& c) {
  return c.empty() ? 0 : static_cast<std::size_t>(*std::max_element(c.begin(), c.end()) + 1);
}

struct DemeanDiagnostics {
  std::size_t iterations = 0;
  double final_change = 0.0;
  std::vector<double> trace;  ///< max scaled change per sweep
};

/// Alternating projections on the columns of M, in place. Codes must be dense
/// (0..G-1). Change is measured per column relative to its largest absolute
/// original value.
inline DemeanDiagnostics demean_fe(Eigen::MatrixXd& M, const std::vector<Codes>& fes, double tol = 1e-10,
                                   std::size_t max_iter = 10000) {
  if (!(tol > 0.0)) throw DomainError("demean tolerance must be positive");
  DemeanDiagnostics d;
  if (fes.empty() || M.size() == 0) return d;
  const Eigen::Index n = M.rows(), k = M.cols();
  for (const auto& c : fes)
    if (static_cast<Eigen::Index>(c.size()) != n) throw StructuralError("fixed-effect codes length mismatch");

  std::vector<double> scale(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double s = M.col(j).cwiseAbs().maxCoeff();
    scale[j] = s > 0 ? s : 1.0;
  }
  std::vector<std::size_t> groups;
  std::vector<std::vector<double>> counts;
  for (const auto& c : fes) {
    groups.push_back(count_groups(c));
    std::vector<double> cnt(groups.back(), 0.0);
    for (auto g : c) cnt[g] += 1.0;
    counts.push_back(std::move(cnt));
  }

  std::vector<double> sums;
  while (true) {
    double change = 0.0;
    for (std::size_t f = 0; f < fes.size(); ++f) {
      const auto& codes = fes[f];
      for (Eigen::Index j = 0; j < k; ++j) {
        sums.assign(groups[f], 0.0);
        double* col = M.col(j).data();
        for (Eigen::Index i = 0; i < n; ++i) sums[codes[i]] += col[i];
        double worst = 0.0;
        for (std::size_t g = 0; g < groups[f]; ++g) {
          sums[g] /= counts[f][g];
          worst = std::max(worst, std::abs(sums[g]));
        }
        for (Eigen::Index i = 0; i < n; ++i) col[i] -= sums[codes[i]];
        change = std::max(change, worst / scale[j]);
      }
    }
    ++d.iterations;
    d.trace.push_back(change);
    d.final_change = change;
    if (fes.size() == 1 || change < tol) return d;
    if (d.iterations >= max_iter)
      throw ConvergenceError("fixed-effect demeaning did not converge in " + std::to_string(max_iter) +
                                 " sweeps (last change " + std::to_string(change) + ")",
                             d.trace);
  }
}

/// Degrees of freedom absorbed by the fixed effects, intercept included. For
/// two coding schemes, levels minus connected components of the bipartite
/// level graph.
inline std::size_t absorbed_dof(const std::vector<Codes>& fes) {
  if (fes.empty()) return 1;
  if (fes.size() == 1) return count_groups(fes[0]);
  std::size_t total = 0;
  std::vector<std::size_t> offset;
  for (const auto& c : fes) {
    offset.push_back(total);
    total += count_groups(c);
  }
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < fes[0].size(); ++i)
    for (std::size_t f = 1; f < fes.size(); ++f) {
      auto a = find(offset[0] + fes[0][i]), b = find(offset[f] + fes[f][i]);
      if (a != b) parent[a] = b;
    }
  std::size_t components = 0;
  for (std::size_t x = 0; x < total; ++x) components += find(x) == x;
  // Exact for two schemes; with three or more it can overstate the rank.
  return total - components;
}

// ---------------------------------------------------------------------------
// Least squares

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  std::size_t df_resid = 0;
};

namespace detail {

inline constexpr double kRankThreshold = 1e-10;

// Column-pivoted QR on unit-norm columns. Returns the pivoted QR, the column
// norms and the rank.
struct ScaledQr {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  Eigen::VectorXd norms;
  Eigen::Index rank;
};

inline ScaledQr scaled_qr(const Eigen::MatrixXd& X) {
  ScaledQr s;
  s.norms = X.colwise().norm().transpose();
  Eigen::MatrixXd Xs = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    if (s.norms(j) > 0) Xs.col(j) /= s.norms(j);
  s.qr.setThreshold(kRankThreshold);
  s.qr.compute(Xs);
  s.rank = s.qr.rank();
  return s;
}

}  // namespace detail

/// Column indices that pivoted QR places beyond the numerical rank.
inline std::vector<Eigen::Index> dependent_columns(const Eigen::MatrixXd& X) {
  if (X.cols() == 0) return {};
  auto s = detail::scaled_qr(X);
  std::vector<Eigen::Index> dep;
  const auto& perm = s.qr.colsPermutation().indices();
  for (Eigen::Index p = s.rank; p < X.cols(); ++p) dep.push_back(perm(p));
  std::sort(dep.begin(), dep.end());
  return dep;
}

inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::string>& names = {}) {
  if (X.rows() != y.size()) throw StructuralError("ols: X and y have different row counts");
  if (!X.allFinite() || !y.allFinite()) throw DomainError("ols: non-finite input");
  auto s = detail::scaled_qr(X);
  if (s.rank < X.cols()) {
    std::vector<std::string> dep;
    const auto& perm = s.qr.colsPermutation().indices();
    for (Eigen::Index p = s.rank; p < X.cols(); ++p) {
      auto j = perm(p);
      dep.push_back(j < static_cast<Eigen::Index>(names.size()) ? names[j] : "column " + std::to_string(j));
    }
    std::sort(dep.begin(), dep.end());
    std::string list;
    for (const auto& d : dep) list += (list.empty() ? "" : ", ") + d;
    throw RankDeficientError("design matrix is rank deficient; dependent columns: " + list, dep);
  }
  if (X.rows() <= X.cols()) throw DomainError("ols needs more rows than columns");
  OlsFit fit;
  Eigen::VectorXd b = s.qr.solve(y);
  fit.beta = b.cwiseQuotient(s.norms);
  fit.residuals = y - X * fit.beta;
  fit.df_resid = static_cast<std::size_t>(X.rows() - X.cols());
  return fit;
}

// ---------------------------------------------------------------------------
// Clustered covariance

struct ClusterCov {
  Eigen::MatrixXd V;      ///< after PSD repair
  Eigen::MatrixXd V_raw;  ///< before repair
  bool psd_repaired = false;
  double min_eigenvalue = 0.0;
  std::size_t groups_a = 0, groups_b = 0, groups_ab = 0;
};

namespace detail {

inline Eigen::MatrixXd one_way_meat(const Eigen::MatrixXd& X, const Eigen::VectorXd& e, const Codes& c,
                                    std::size_t groups) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) S.row(c[i]) += e(i) * X.row(i);
  return S.transpose() * S;
}

inline double small_sample(std::size_t G, std::size_t n, std::size_t k) {
  return static_cast<double>(G) / static_cast<double>(G - 1) * static_cast<double>(n - 1) /
         static_cast<double>(n - k);
}

}  // namespace detail

/// Sandwich covariance clustered on `a`, or two-way on `a` and `b` when b is
/// non-empty: V = V_a + V_b - V_ab. Each term carries G/(G-1)*(N-1)/(N-K)
/// with K = `k_params` (defaults to the columns of X).
inline ClusterCov cluster_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& e, const Codes& a, const Codes& b = {},
                             std::optional<std::size_t> k_params = std::nullopt) {
  const std::size_t n = static_cast<std::size_t>(X.rows());
  const std::size_t k = k_params.value_or(static_cast<std::size_t>(X.cols()));
  if (a.size() != n || (!b.empty() && b.size() != n)) throw StructuralError("cluster codes length mismatch");
  if (n <= k) throw DomainError("cluster_se needs more rows than parameters");

  ClusterCov out;
  std::size_t ga = 0, gb = 0, gab = 0;
  Codes ca = recode(a, [&] {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }(), &ga);
  out.groups_a = ga;
  if (ga < 2) throw DomainError("cluster dimension has a single cluster; variance undefined");

  const Eigen::MatrixXd XtX = X.transpose() * X;
  const Eigen::MatrixXd bread = XtX.ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  auto term = [&](const Codes& c, std::size_t g) {
    return (detail::small_sample(g, n, k) * (bread * detail::one_way_meat(X, e, c, g) * bread)).eval();
  };

  Eigen::MatrixXd V = term(ca, ga);
  if (!b.empty()) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    Codes cb = recode(b, all, &gb);
    if (gb < 2) throw DomainError("cluster dimension has a single cluster; variance undefined");
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> ids;
    Codes cab(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, fresh] = ids.emplace(std::pair{ca[i], cb[i]}, static_cast<std::int64_t>(ids.size()));
      cab[i] = it->second;
    }
    gab = ids.size();
    V += term(cb, gb);
    if (gab >= 2) V -= term(cab, gab);
    out.groups_b = gb;
    out.groups_ab = gab;
  }
  V = 0.5 * (V + V.transpose());
  out.V_raw = V;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(V);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  const double tol = 1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (out.min_eigenvalue < -tol) {
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    V = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
    out.psd_repaired = true;
  }
  out.V = V;
  return out;
}

/// Two-sided p-value from Student's t.
inline double p_value(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  if (!(dof > 0)) return kNaN;
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

inline std::string stars(double p) {
  if (std::isnan(p)) return "";
  return p < 0.01 ? "***" : p < 0.05 ? "**" : p < 0.10 ? "*" : "";
}

}  // namespace vaguekit::econ
