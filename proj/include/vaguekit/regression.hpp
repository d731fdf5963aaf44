#pragma once

// Declarative regression specs and the estimation pipeline behind them.
//
// Spec files are JSON, either one object or an array of objects:
//
//   {"name": "ferror_af_year", "outcome": "FError", "regressors": ["Tone", "Horizon"],
//    "interactions": [["Tone", "Vagueness"]],
//    "fixed_effects": ["analyst_id*firm_id", "year"], "cluster": ["analyst_id", "year"],
//    "filter": [{"column": "period", "op": ">=", "value": 1}]}

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vaguekit/econometrics.hpp"
#include "vaguekit/table.hpp"

namespace vaguekit::econ {

struct Filter {
  std::string column;
  std::string op;  ///< == != < <= > >=
  double value = 0.0;

  bool accepts(double x) const {
    if (std::isnan(x)) return false;
    if (op == "==") return x == value;
    if (op == "!=") return x != value;
    if (op == "<") return x < value;
    if (op == "<=") return x <= value;
    if (op == ">") return x > value;
    if (op == ">=") return x >= value;
    throw DomainError("unknown filter operator \"" + op + "\"");
  }
};

struct RegressionSpec {
  std::string name;
  std::string outcome;
  std::vector<std::string> regressors;
  std::vector<std::pair<std::string, std::string>> interactions;
  std::vector<std::string> fixed_effects;  ///< key expressions, "a*b" for combinations
  std::vector<std::string> cluster = {"analyst_id", "year"};
  std::vector<Filter> filter;
};

inline std::string interaction_name(const std::string& a, const std::string& b) { return a + "×" + b; }

/// Regressors in estimation order: listed main effects, missing interaction
/// components, then the interaction terms.
inline std::vector<std::string> expanded_terms(const RegressionSpec& s) {
  std::vector<std::string> terms = s.regressors;
  auto add = [&](const std::string& t) {
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
  };
  for (const auto& [a, b] : s.interactions) add(a), add(b);
  for (const auto& [a, b] : s.interactions) add(interaction_name(a, b));
  return terms;
}

inline RegressionSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("a regression spec must be a JSON object", 0);
  static const std::set<std::string> known = {"name", "outcome", "regressors", "interactions",
                                              "fixed_effects", "cluster", "filter", "note"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ParseError("unknown spec field \"" + k + "\"", 0);
  RegressionSpec s;
  try {
    s.name = j.value("name", std::string{});
    s.outcome = j.at("outcome").get<std::string>();
    s.regressors = j.value("regressors", std::vector<std::string>{});
    for (const auto& pair : j.value("interactions", nlohmann::json::array())) {
      auto v = pair.get<std::vector<std::string>>();
      if (v.size() != 2) throw ParseError("each interaction must name exactly two columns", 0);
      s.interactions.emplace_back(v[0], v[1]);
    }
    s.fixed_effects = j.value("fixed_effects", std::vector<std::string>{});
    if (j.contains("cluster")) s.cluster = j["cluster"].get<std::vector<std::string>>();
    for (const auto& f : j.value("filter", nlohmann::json::array()))
      s.filter.push_back({f.at("column").get<std::string>(), f.at("op").get<std::string>(), f.at("value").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed spec: ") + e.what(), 0);
  }
  if (s.name.empty()) s.name = s.outcome;
  if (s.cluster.empty() || s.cluster.size() > 2) throw ParseError("\"cluster\" must list one or two keys", 0);
  for (const auto& f : s.filter)
    if (!std::set<std::string>{"==", "!=", "<", "<=", ">", ">="}.count(f.op))
      throw ParseError("unknown filter operator \"" + f.op + "\"", 0);
  return s;
}

inline std::vector<RegressionSpec> read_specs(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("spec file is not valid JSON: ") + e.what(), 0);
  }
  std::vector<RegressionSpec> out;
  if (j.is_array())
    for (const auto& s : j) out.push_back(spec_from_json(s));
  else
    out.push_back(spec_from_json(j));
  return out;
}

struct Coefficient {
  std::string term;
  double estimate = 0, se = 0, t = 0, p = 0;
  std::string stars;
};

struct RegressionResult {
  std::string name;
  std::string outcome;
  std::vector<std::string> fixed_effects, cluster;
  std::vector<Coefficient> coefficients;
  std::vector<std::pair<std::string, std::string>> dropped_terms;  ///< term, reason
  std::map<std::string, std::size_t> excluded;  ///< reason -> rows
  std::size_t n_input = 0, n_filtered = 0, n_obs = 0, singletons_dropped = 0;
  double r2_within = 0, adj_r2_within = 0, r2_full = 0, adj_r2_full = 0, absorbed_share = 0;
  std::size_t absorbed_dof = 0;
  std::size_t demean_iterations = 0;
  double demean_final_change = 0;
  std::size_t clusters_a = 0, clusters_b = 0;
  double dof = 0;  ///< t-distribution degrees of freedom
  bool psd_repaired = false;

  const Coefficient* find(const std::string& term) const {
    for (const auto& c : coefficients)
      if (c.term == term) return &c;
    return nullptr;
  }
};

inline RegressionResult run_spec(const RegressionSpec& spec, const Table& data) {
  RegressionResult res;
  res.name = spec.name;
  res.outcome = spec.outcome;
  res.fixed_effects = spec.fixed_effects;
  res.cluster = spec.cluster;
  res.n_input = data.rows();

  const auto terms = expanded_terms(spec);
  // Resolve every referenced column before touching data.
  const auto& y_all = data.num(spec.outcome);
  std::vector<std::vector<double>> x_all;
  for (const auto& t : terms) {
    auto it = std::find_if(spec.interactions.begin(), spec.interactions.end(),
                           [&](const auto& p) { return interaction_name(p.first, p.second) == t; });
    if (it == spec.interactions.end()) {
      x_all.push_back(data.num(t));
    } else {
      const auto& a = data.num(it->first);
      const auto& b = data.num(it->second);
      std::vector<double> ab(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) ab[i] = a[i] * b[i];
      x_all.push_back(std::move(ab));
    }
  }
  std::vector<GroupCodes> fe_all, cl_all;
  for (const auto& f : spec.fixed_effects) fe_all.push_back(group_codes(data, f));
  for (const auto& c : spec.cluster) cl_all.push_back(group_codes(data, c));
  std::vector<const std::vector<double>*> filter_cols;
  for (const auto& f : spec.filter) filter_cols.push_back(&data.num(f.column));

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < spec.filter.size() && ok; ++k) ok = spec.filter[k].accepts((*filter_cols[k])[i]);
    if (!ok) continue;
    ++res.n_filtered;
    std::string why;
    if (!std::isfinite(y_all[i])) why = "missing " + spec.outcome;
    for (std::size_t k = 0; k < terms.size() && why.empty(); ++k)
      if (!std::isfinite(x_all[k][i])) why = "missing " + terms[k];
    for (std::size_t k = 0; k < fe_all.size() && why.empty(); ++k)
      if (fe_all[k].code[i] < 0) why = "missing " + spec.fixed_effects[k];
    for (std::size_t k = 0; k < cl_all.size() && why.empty(); ++k)
      if (cl_all[k].code[i] < 0) why = "missing " + spec.cluster[k];
    if (why.empty()) rows.push_back(i);
    else ++res.excluded[why];
  }
  if (rows.empty()) throw DomainError("spec \"" + spec.name + "\": no observations after filtering");

  std::vector<Codes> fes;
  for (const auto& f : fe_all) fes.push_back(recode(f.code, rows));
  if (!fes.empty()) {
    auto drop = drop_singletons(fes, rows.size());
    res.singletons_dropped = drop.dropped;
    std::vector<std::size_t> kept;
    for (auto k : drop.kept) kept.push_back(rows[k]);
    rows = std::move(kept);
    fes.clear();
    for (const auto& f : fe_all) fes.push_back(recode(f.code, rows));
  }
  if (rows.empty()) throw DomainError("spec \"" + spec.name + "\": no observations left after dropping singletons");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  if (fes.empty()) fes.push_back(Codes(rows.size(), 0));  // intercept

  const Eigen::Index k_all = static_cast<Eigen::Index>(terms.size());
  Eigen::MatrixXd M(n, k_all + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    M(i, 0) = y_all[rows[i]];
    for (Eigen::Index j = 0; j < k_all; ++j) M(i, j + 1) = x_all[j][rows[i]];
  }
  Eigen::VectorXd y_raw = M.col(0);
  Eigen::MatrixXd M_raw = M;
  auto diag = demean_fe(M, fes);
  res.demean_iterations = diag.iterations;
  res.demean_final_change = diag.final_change;

  // Terms with no variation left after absorbing the fixed effects.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < k_all; ++j) {
    Eigen::VectorXd raw = M_raw.col(j + 1);
    const double spread = (raw.array() - raw.mean()).matrix().norm();
    const double left = M.col(j + 1).norm();
    if (spread == 0.0)
      res.dropped_terms.emplace_back(terms[j], "constant in sample");
    else if (left <= 1e-9 * spread)
      res.dropped_terms.emplace_back(terms[j], "absorbed by fixed effects");
    else
      keep.push_back(j);
  }
  // Terms linearly dependent on the remaining ones.
  while (true) {
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) X.col(c) = M.col(keep[c] + 1);
    auto dep = dependent_columns(X);
    if (dep.empty()) break;
    std::set<Eigen::Index> drop_idx(dep.begin(), dep.end());
    std::vector<Eigen::Index> next;
    for (std::size_t c = 0; c < keep.size(); ++c) {
      if (drop_idx.count(static_cast<Eigen::Index>(c)))
        res.dropped_terms.emplace_back(terms[keep[c]], "collinear with other regressors");
      else
        next.push_back(keep[c]);
    }
    keep = std::move(next);
  }
  if (keep.empty()) throw DomainError("spec \"" + spec.name + "\": every regressor was dropped");

  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(keep.size()));
  std::vector<std::string> names;
  for (std::size_t c = 0; c < keep.size(); ++c) {
    X.col(c) = M.col(keep[c] + 1);
    names.push_back(terms[keep[c]]);
  }
  const Eigen::VectorXd y = M.col(0);
  auto fit = ols(X, y, names);

  std::vector<Codes> cl;
  for (const auto& c : cl_all) cl.push_back(recode(c.code, rows));
  auto cov = cluster_se(X, fit.residuals, cl[0], cl.size() > 1 ? cl[1] : Codes{});
  res.clusters_a = cov.groups_a;
  res.clusters_b = cov.groups_b;
  res.psd_repaired = cov.psd_repaired;
  res.dof = static_cast<double>((cl.size() > 1 ? std::min(cov.groups_a, cov.groups_b) : cov.groups_a) - 1);

  for (std::size_t c = 0; c < names.size(); ++c) {
    Coefficient co;
    co.term = names[c];
    co.estimate = fit.beta(c);
    co.se = std::sqrt(std::max(0.0, cov.V(c, c)));
    co.t = co.se > 0 ? co.estimate / co.se : std::copysign(std::numeric_limits<double>::infinity(), co.estimate);
    co.p = p_value(co.t, res.dof);
    co.stars = stars(co.p);
    res.coefficients.push_back(co);
  }

  res.n_obs = rows.size();
  const double N = static_cast<double>(n), K = static_cast<double>(keep.size());
  const double ssr = fit.residuals.squaredNorm();
  const double tss_within = y.squaredNorm();
  const double tss_full = (y_raw.array() - y_raw.mean()).matrix().squaredNorm();
  res.absorbed_dof = absorbed_dof(fes);
  const double A = static_cast<double>(res.absorbed_dof);
  res.r2_within = tss_within > 0 ? 1.0 - ssr / tss_within : 0.0;
  res.adj_r2_within = 1.0 - (1.0 - res.r2_within) * (N - 1.0) / (N - K - 1.0);
  res.r2_full = tss_full > 0 ? 1.0 - ssr / tss_full : 0.0;
  res.adj_r2_full = 1.0 - (1.0 - res.r2_full) * (N - 1.0) / (N - K - A);
  res.absorbed_share = tss_full > 0 ? 1.0 - tss_within / tss_full : 0.0;
  return res;
}

// ---------------------------------------------------------------------------
// Output

inline std::string fmt(double x, int digits) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::string results_csv_header() {
  return "spec,outcome,term,estimate,se,t,p,stars,n_obs,singletons_dropped,adj_r2_within,adj_r2_full,"
         "absorbed_share,clusters_a,clusters_b,fixed_effects";
}

inline void write_results_csv(std::ostream& out, const RegressionResult& r) {
  std::string fe;
  for (const auto& f : r.fixed_effects) fe += (fe.empty() ? "" : "+") + f;
  for (const auto& c : r.coefficients)
    out << csv::quote(r.name) << ',' << r.outcome << ',' << csv::quote(c.term) << ',' << csv::format_real(c.estimate)
        << ',' << csv::format_real(c.se) << ',' << csv::format_real(c.t) << ',' << csv::format_real(c.p) << ','
        << c.stars << ',' << r.n_obs << ',' << r.singletons_dropped << ',' << csv::format_real(r.adj_r2_within) << ','
        << csv::format_real(r.adj_r2_full) << ',' << csv::format_real(r.absorbed_share) << ',' << r.clusters_a << ','
        << r.clusters_b << ',' << csv::quote(fe) << "\n";
}

/// Coefficient rows with t-statistics in parentheses beneath, one column per
/// result.
inline std::string markdown_table(const std::vector<RegressionResult>& results, int digits = 4) {
  std::vector<std::string> terms;
  for (const auto& r : results)
    for (const auto& c : r.coefficients)
      if (std::find(terms.begin(), terms.end(), c.term) == terms.end()) terms.push_back(c.term);
  std::ostringstream o;
  o << "| |";
  for (std::size_t i = 0; i < results.size(); ++i) o << " (" << i + 1 << ") " << results[i].outcome << " |";
  o << "\n|---|";
  for (std::size_t i = 0; i < results.size(); ++i) o << "---:|";
  o << "\n| Spec |";
  for (const auto& r : results) o << " " << r.name << " |";
  o << "\n";
  for (const auto& t : terms) {
    o << "| " << t << " |";
    for (const auto& r : results) {
      const auto* c = r.find(t);
      o << " " << (c ? fmt(c->estimate, digits) + c->stars : "") << " |";
    }
    o << "\n| |";
    for (const auto& r : results) {
      const auto* c = r.find(t);
      o << " " << (c ? "(" + fmt(c->t, 2) + ")" : "") << " |";
    }
    o << "\n";
  }
  auto row = [&](const std::string& label, auto value) {
    o << "| " << label << " |";
    for (const auto& r : results) o << " " << value(r) << " |";
    o << "\n";
  };
  row("Fixed effects", [](const RegressionResult& r) {
    std::string s;
    for (const auto& f : r.fixed_effects) s += (s.empty() ? "" : ", ") + f;
    return s.empty() ? std::string("none") : s;
  });
  row("Clusters", [](const RegressionResult& r) {
    std::string s = std::to_string(r.clusters_a);
    if (r.clusters_b) s += " × " + std::to_string(r.clusters_b);
    return s;
  });
  row("N", [](const RegressionResult& r) { return std::to_string(r.n_obs); });
  row("Singletons dropped", [](const RegressionResult& r) { return std::to_string(r.singletons_dropped); });
  row("Adj. R² (within)", [](const RegressionResult& r) { return fmt(r.adj_r2_within, 3); });
  row("Adj. R² (full)", [](const RegressionResult& r) { return fmt(r.adj_r2_full, 3); });
  o << "\nt-statistics in parentheses. *, **, *** denote significance at the 10%, 5% and 1% levels.\n";
  for (const auto& r : results)
    for (const auto& [term, why] : r.dropped_terms) o << "\n" << r.name << ": dropped " << term << " (" << why << ")";
  for (const auto& r : results)
    if (r.psd_repaired) o << "\n" << r.name << ": clustered covariance was not PSD; negative eigenvalues set to zero";
  o << "\n";
  return o.str();
}

}  // namespace vaguekit::econ
