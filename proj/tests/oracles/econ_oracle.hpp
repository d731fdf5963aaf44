#pragma once

// Brute-force references for the fixed-effects and clustering code.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "vaguekit/econometrics.hpp"
#include "vaguekit/regression.hpp"
#include "vaguekit/table.hpp"

namespace oracle {

using vaguekit::Table;
using vaguekit::econ::Codes;

// Dense least squares on [X | dummies(A) | dummies(B)] via complete
// orthogonal decomposition. Slopes on X are identified even when the dummy
// block is rank deficient.
inline Eigen::VectorXd dummy_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<Codes>& fes) {
  Eigen::Index cols = X.cols();
  auto levels = [](const Codes& c) { return static_cast<Eigen::Index>(std::set<std::int64_t>(c.begin(), c.end()).size()); };
  for (const auto& c : fes) cols += levels(c);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(X.rows(), cols);
  D.leftCols(X.cols()) = X;
  Eigen::Index off = X.cols();
  for (const auto& c : fes) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) D(i, off + c[i]) = 1.0;
    off += levels(c);
  }
  Eigen::VectorXd b = D.completeOrthogonalDecomposition().solve(y);
  return b.head(X.cols());
}

// Two-way cluster covariance as a sum over every pair of rows sharing a
// cluster, with each one-way piece carrying its own small-sample factor.
inline Eigen::MatrixXd two_way_cluster(const Eigen::MatrixXd& X, const Eigen::VectorXd& e, const Codes& a,
                                       const Codes& b) {
  const Eigen::Index n = X.rows(), k = X.cols();
  const double N = double(n), K = double(k);
  Eigen::MatrixXd B = (X.transpose() * X).fullPivLu().inverse();
  auto pairwise = [&](auto same, double G) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (same(i, j)) S += e(i) * e(j) * X.row(i).transpose() * X.row(j);
    return (G / (G - 1) * (N - 1) / (N - K) * B * S * B).eval();
  };
  std::set<std::int64_t> ga(a.begin(), a.end()), gb(b.begin(), b.end());
  std::set<std::pair<std::int64_t, std::int64_t>> cells;
  for (Eigen::Index i = 0; i < n; ++i) cells.insert({a[i], b[i]});
  return pairwise([&](auto i, auto j) { return a[i] == a[j]; }, double(ga.size())) +
         pairwise([&](auto i, auto j) { return b[i] == b[j]; }, double(gb.size())) -
         pairwise([&](auto i, auto j) { return a[i] == a[j] && b[i] == b[j]; }, double(cells.size()));
}

/// y = beta1 x1 + beta2 x2 + analyst effect + year effect + noise, with x1
/// correlated with the analyst effect.
inline Table random_panel(std::uint64_t seed, std::size_t n, int na, int ny, double beta1, double beta2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> ua(0, na - 1), uy(0, ny - 1);
  std::vector<double> a(n), yr(n), x1(n), x2(n), y(n);
  std::vector<double> fa(na), fy(ny);
  for (auto& v : fa) v = 2 * z(rng);
  for (auto& v : fy) v = z(rng);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = ua(rng);
    yr[i] = 2000 + uy(rng);
    x1[i] = z(rng) + 0.5 * fa[static_cast<int>(a[i])];
    x2[i] = z(rng);
    y[i] = beta1 * x1[i] + beta2 * x2[i] + fa[static_cast<int>(a[i])] + fy[static_cast<int>(yr[i]) - 2000] +
           0.3 * z(rng);
  }
  Table t;
  t.set("analyst_id", a);
  t.set("year", yr);
  t.set("x1", x1);
  t.set("x2", x2);
  t.set("y", y);
  return t;
}

inline vaguekit::econ::RegressionSpec two_way_spec() {
  vaguekit::econ::RegressionSpec s;
  s.name = "twfe";
  s.outcome = "y";
  s.regressors = {"x1", "x2"};
  s.fixed_effects = {"analyst_id", "year"};
  return s;
}

/// Slopes on x1, x2 from the dummy regression of a random_panel table.
inline Eigen::VectorXd panel_dummy_slopes(const Table& t) {
  const auto n = static_cast<Eigen::Index>(t.rows());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  Codes a(n), yr(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = t.num("x1")[i];
    X(i, 1) = t.num("x2")[i];
    y(i) = t.num("y")[i];
    a[i] = static_cast<std::int64_t>(t.num("analyst_id")[i]);
    yr[i] = static_cast<std::int64_t>(t.num("year")[i]) - 2000;
  }
  // dummy columns are indexed by code, so compact them first
  auto compact = [](Codes c) {
    std::set<std::int64_t> s(c.begin(), c.end());
    std::vector<std::int64_t> lv(s.begin(), s.end());
    for (auto& v : c) v = std::lower_bound(lv.begin(), lv.end(), v) - lv.begin();
    return c;
  };
  return dummy_ols(X, y, {compact(a), compact(yr)});
}

}  // namespace oracle
