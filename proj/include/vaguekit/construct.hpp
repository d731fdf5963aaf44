#pragma once

// From a forecast panel to regression-ready observations, and the Tone
// quintile table of mean forecast errors.
//
// Panel columns read: analyst_id, firm_id, period, year, date, ann_date,
// price_50, forecast, actual, tone; optional pos_pct, neg_pct, text_only_pct,
// hedge_pct, firm_vol. Every other numeric column is carried through as a
// control.

#include <array>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "vaguekit/econometrics.hpp"
#include "vaguekit/table.hpp"

namespace vaguekit::econ {

struct ConstructOptions {
  double winsor_lower = 0.01;
  double winsor_upper = 0.99;
  int consensus_window = 30;  ///< days before the forecast date, both ends exclusive
  double bold_sds = 2.0;
};

struct Constructed {
  Table obs;
  std::map<std::string, std::size_t> excluded;  ///< reason -> rows
  std::size_t bold_undefined = 0;               ///< fewer than 2 prior consensus forecasts
};

namespace detail {

using PathKey = std::tuple<std::string, std::string, double>;  // analyst, firm, period

inline const std::set<std::string>& structural_columns() {
  static const std::set<std::string> s = {"analyst_id", "firm_id", "period",   "year",    "date",
                                          "ann_date",   "price_50", "forecast", "actual",  "tone",
                                          "pos_pct",    "neg_pct",  "text_only_pct", "hedge_pct", "firm_vol"};
  return s;
}

inline std::vector<double> optional_col(const Table& t, const std::string& name) {
  return t.has(name) ? t.num(name) : std::vector<double>(t.rows(), kNaN);
}

}  // namespace detail

inline Constructed construct_variables(const Table& panel, const ConstructOptions& opt = {}) {
  const std::size_t n = panel.rows();
  const auto& period = panel.num("period");
  const auto& year = panel.num("year");
  const auto& date = panel.num("date");
  const auto& ann = panel.num("ann_date");
  const auto& price = panel.num("price_50");
  const auto& forecast = panel.num("forecast");
  const auto& actual = panel.num("actual");
  const auto& tone = panel.num("tone");
  panel.column("analyst_id");
  panel.column("firm_id");

  std::vector<std::string> analyst(n), firm(n);
  std::map<detail::PathKey, std::size_t> where;
  for (std::size_t i = 0; i < n; ++i) {
    analyst[i] = panel.cell("analyst_id", i);
    firm[i] = panel.cell("firm_id", i);
    if (!where.emplace(detail::PathKey{analyst[i], firm[i], period[i]}, i).second)
      throw StructuralError("duplicate analyst-firm-period row (" + analyst[i] + ", " + firm[i] + ", " +
                            csv::format_real(period[i]) + ")");
  }
  auto find = [&](std::size_t i, double dp) -> std::optional<std::size_t> {
    auto it = where.find({analyst[i], firm[i], period[i] + dp});
    if (it == where.end()) return std::nullopt;
    return it->second;
  };

  Constructed out;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(price[i] > 0.0)) ++out.excluded["missing price_50"];
    else if (std::isnan(actual[i])) ++out.excluded["missing actual"];
    else if (std::isnan(forecast[i])) ++out.excluded["missing forecast"];
    else keep.push_back(i);
  }
  if (keep.empty()) throw DomainError("no usable panel rows (price, actual and forecast all required)");

  const std::size_t m = keep.size();
  std::vector<double> ferror(m), frev_next(m, kNaN), frev_cur(m, kNaN), dtone(m, kNaN), horizon(m), bold(m, 0.0),
      bold_undef(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = keep[r];
    ferror[r] = (forecast[i] - actual[i]) / price[i];
    horizon[r] = ann[i] - date[i];
    if (auto j = find(i, 1); j && price[*j] > 0.0 && !std::isnan(forecast[*j]))
      frev_next[r] = (forecast[*j] - forecast[i]) / price[*j];
    if (auto j = find(i, -1); j) {
      if (!std::isnan(forecast[*j])) frev_cur[r] = (forecast[i] - forecast[*j]) / price[i];
      dtone[r] = tone[i] - tone[*j];
    }
  }

  // Consensus: other analysts' forecasts for the same firm and period dated
  // strictly inside (date - window, date).
  std::map<std::pair<std::string, double>, std::vector<std::size_t>> by_target;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isnan(forecast[i]) && !std::isnan(date[i])) by_target[{firm[i], period[i]}].push_back(i);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = keep[r];
    std::vector<double> prior;
    for (auto j : by_target[{firm[i], period[i]}])
      if (analyst[j] != analyst[i] && date[j] < date[i] && date[j] > date[i] - opt.consensus_window)
        prior.push_back(forecast[j]);
    if (prior.size() < 2) {
      bold_undef[r] = 1.0;
      ++out.bold_undefined;
      continue;
    }
    double mean = 0, ss = 0;
    for (double f : prior) mean += f;
    mean /= static_cast<double>(prior.size());
    for (double f : prior) ss += (f - mean) * (f - mean);
    const double sd = std::sqrt(ss / static_cast<double>(prior.size() - 1));
    bold[r] = std::abs(forecast[i] - mean) > opt.bold_sds * sd ? 1.0 : 0.0;
  }

  // Tone demeaned within analyst-firm.
  std::map<std::pair<std::string, std::string>, std::pair<double, double>> af_sum;
  for (auto i : keep) {
    auto& s = af_sum[{analyst[i], firm[i]}];
    s.first += tone[i];
    s.second += 1.0;
  }

  Table& t = out.obs;
  std::vector<std::string> ids_a, ids_f;
  std::vector<double> tone_k, tone_dm, yr, per, dt;
  for (auto i : keep) {
    ids_a.push_back(analyst[i]);
    ids_f.push_back(firm[i]);
    tone_k.push_back(tone[i]);
    const auto& s = af_sum[{analyst[i], firm[i]}];
    tone_dm.push_back(tone[i] - s.first / s.second);
    yr.push_back(year[i]);
    per.push_back(period[i]);
    dt.push_back(date[i]);
  }
  auto as_key = [&](const std::string& name, std::vector<std::string> v) {
    if (panel.column(name).text) {
      t.set_text(name, std::move(v));
    } else {
      std::vector<double> d;
      for (const auto& s : v) d.push_back(std::stod(s));
      t.set(name, std::move(d));
    }
  };
  as_key("analyst_id", ids_a);
  as_key("firm_id", ids_f);
  t.set("year", yr);
  t.set("period", per);
  t.set("date", dt);
  t.set("FError", winsorize(ferror, opt.winsor_lower, opt.winsor_upper));
  auto wins_or_nan = [&](const std::vector<double>& v) {
    bool any = std::any_of(v.begin(), v.end(), [](double x) { return !std::isnan(x); });
    return any ? winsorize(v, opt.winsor_lower, opt.winsor_upper) : v;
  };
  t.set("FRev_t1", wins_or_nan(frev_next));
  t.set("FRev_t", wins_or_nan(frev_cur));
  t.set("Tone", tone_k);
  auto pick = [&](const std::string& src) {
    auto col = detail::optional_col(panel, src);
    std::vector<double> v;
    for (auto i : keep) v.push_back(col[i]);
    return v;
  };
  t.set("PosPct", pick("pos_pct"));
  t.set("NegPct", pick("neg_pct"));
  t.set("TextOnlyPct", pick("text_only_pct"));
  t.set("HedgePct", pick("hedge_pct"));
  t.set("DeltaTone", dtone);
  t.set("ToneDemeaned", tone_dm);
  t.set("Horizon", winsorize(horizon, opt.winsor_lower, opt.winsor_upper));
  t.set("Bold", bold);
  t.set("BoldUndefined", bold_undef);
  for (const auto& c : panel.columns())
    if (!c.text && !detail::structural_columns().count(c.name)) t.set(c.name, pick(c.name));
  t.set("FirmVol", pick("firm_vol"));

  GroupCodes analyst_codes = group_codes(t, "analyst_id");
  auto split_if = [&](const std::string& name, const std::string& src, bool per_analyst) {
    const auto& v = t.num(src);
    if (std::all_of(v.begin(), v.end(), [](double x) { return std::isnan(x); })) return;
    t.set(name, median_split(v, per_analyst ? analyst_codes.code : Codes{}));
  };
  split_if("Vagueness_TextOnly", "TextOnlyPct", true);
  split_if("Vagueness_Hedge", "HedgePct", true);
  split_if("Uncertainty", "FirmVol", false);
  if (t.has("AnaNfirm")) split_if("Busyness", "AnaNfirm", false);
  return out;
}

// ---------------------------------------------------------------------------
// Quintile table

struct QuintileTable {
  std::size_t horizons = 0;
  std::array<std::vector<double>, 5> mean;        ///< [quintile][h]
  std::array<std::vector<std::size_t>, 5> count;  ///< [quintile][h]

  /// Mean falls strictly from Q1 to Q5 at horizon h.
  bool strictly_decreasing(std::size_t h) const {
    for (std::size_t q = 0; q + 1 < 5; ++q)
      if (!(mean[q][h] > mean[q + 1][h])) return false;
    return true;
  }
};

/// Quintiles of `by` (stable rank, ties by row order) and mean `value` of the
/// same analyst-firm path h periods later, h = 0..horizons.
inline QuintileTable quintile_table(const Table& obs, const std::string& by = "Tone",
                                    const std::string& value = "FError", std::size_t horizons = 4) {
  const auto& x = obs.num(by);
  const auto& v = obs.num(value);
  const auto& period = obs.num("period");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < obs.rows(); ++i)
    if (!std::isnan(x[i])) idx.push_back(i);
  std::set<double> distinct;
  for (auto i : idx) distinct.insert(x[i]);
  if (distinct.size() < 5)
    throw DomainError("quintile_table needs at least 5 distinct " + by + " values, got " +
                      std::to_string(distinct.size()));
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });

  const auto path = group_codes(obs, "analyst_id*firm_id");
  std::map<std::pair<std::int64_t, double>, std::size_t> where;
  for (std::size_t i = 0; i < obs.rows(); ++i) where[{path.code[i], period[i]}] = i;

  QuintileTable q;
  q.horizons = horizons;
  std::array<std::vector<double>, 5> sum;
  for (std::size_t k = 0; k < 5; ++k) {
    sum[k].assign(horizons + 1, 0.0);
    q.count[k].assign(horizons + 1, 0);
    q.mean[k].assign(horizons + 1, kNaN);
  }
  const std::size_t n = idx.size();
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = idx[r];
    const std::size_t k = 5 * r / n;
    for (std::size_t h = 0; h <= horizons; ++h) {
      std::size_t j = i;
      if (h > 0) {
        auto it = where.find({path.code[i], period[i] + static_cast<double>(h)});
        if (it == where.end()) continue;
        j = it->second;
      }
      if (std::isnan(v[j])) continue;
      sum[k][h] += v[j];
      ++q.count[k][h];
    }
  }
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t h = 0; h <= horizons; ++h)
      if (q.count[k][h]) q.mean[k][h] = sum[k][h] / static_cast<double>(q.count[k][h]);
  return q;
}

inline void write_quintile_csv(std::ostream& out, const QuintileTable& q) {
  out << "quintile";
  for (std::size_t h = 0; h <= q.horizons; ++h) out << ",mean_t" << (h ? "+" + std::to_string(h) : "");
  for (std::size_t h = 0; h <= q.horizons; ++h) out << ",n_t" << (h ? "+" + std::to_string(h) : "");
  out << "\n";
  for (std::size_t k = 0; k < 5; ++k) {
    out << "Q" << k + 1;
    for (std::size_t h = 0; h <= q.horizons; ++h) out << ',' << csv::format_real(q.mean[k][h]);
    for (std::size_t h = 0; h <= q.horizons; ++h) out << ',' << q.count[k][h];
    out << "\n";
  }
}

}  // namespace vaguekit::econ
