#pragma once

// End-to-end run on simulated data: simulate, construct variables, estimate
// the regression suite and the quintile table, then check each prediction.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vaguekit/construct.hpp"
#include "vaguekit/expectations.hpp"
#include "vaguekit/provenance.hpp"
#include "vaguekit/regression.hpp"

namespace vaguekit::replicate {

/// Error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

inline std::vector<std::string> controls() {
  std::vector<std::string> c = {"Horizon", "Bold"};
  for (auto n : sim::kCovariateNames) c.emplace_back(n);
  return c;
}

/// Regression designs run by `replicate`.
inline std::vector<econ::RegressionSpec> default_specs() {
  using econ::RegressionSpec;
  auto make = [](std::string name, std::string outcome, std::vector<std::string> lead,
                 std::vector<std::pair<std::string, std::string>> inter, std::vector<std::string> fe) {
    RegressionSpec s;
    s.name = std::move(name);
    s.outcome = std::move(outcome);
    s.regressors = std::move(lead);
    for (auto& c : controls()) s.regressors.push_back(c);
    s.interactions = std::move(inter);
    s.fixed_effects = std::move(fe);
    return s;
  };
  return {
      make("ferror_year", "FError", {"Tone"}, {}, {"year"}),
      make("ferror_analyst_year", "FError", {"Tone"}, {}, {"analyst_id*year"}),
      make("ferror_analyst_firm_year", "FError", {"Tone"}, {}, {"analyst_id*firm_id", "year"}),
      make("vagueness_textonly", "FError", {"Tone", "Vagueness_TextOnly"}, {{"Tone", "Vagueness_TextOnly"}}, {"year"}),
      make("vagueness_hedge", "FError", {"Tone", "Vagueness_Hedge"}, {{"Tone", "Vagueness_Hedge"}}, {"year"}),
      make("revision_tone", "FRev_t1", {"Tone", "FRev_t"}, {}, {"year"}),
      make("uncertainty_revision", "FRev_t1", {"Tone", "Uncertainty", "FRev_t"}, {{"Tone", "Uncertainty"}}, {"year"}),
      make("busyness_ferror", "FError", {"Tone", "Busyness"}, {{"Tone", "Busyness"}}, {"year"}),
      make("busyness_revision", "FRev_t1", {"Tone", "Busyness", "FRev_t"}, {{"Tone", "Busyness"}}, {"year"}),
  };
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Sign and |t| > 2 on one coefficient.
inline Check sign_check(const std::string& name, const econ::RegressionResult& r, const std::string& term, int sign) {
  Check c{name, false, ""};
  const auto* co = r.find(term);
  if (!co) {
    c.detail = r.name + ": " + term + " not estimated";
    return c;
  }
  c.pass = (sign < 0 ? co->estimate < 0 : co->estimate > 0) && std::abs(co->t) > 2.0;
  std::ostringstream s;
  s << r.name << ": " << term << " = " << econ::fmt(co->estimate, 6) << " (t = " << econ::fmt(co->t, 2)
    << "), expected " << (sign < 0 ? "negative" : "positive") << " with |t| > 2";
  c.detail = s.str();
  return c;
}

struct Options {
  sim::SimulationConfig config;
  bool null_mode = false;  ///< forces sigma_vague = 0 and runs only the forecast-error specs without interactions
  std::optional<std::string> panel_input;  ///< skip simulation and read this panel CSV
};

struct Result {
  std::vector<econ::RegressionResult> results;
  std::vector<std::pair<std::string, std::string>> failed_specs;  ///< name, error
  econ::QuintileTable figure1;
  std::vector<Check> checks;
  std::size_t panel_rows = 0, observations = 0;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return failed_specs.empty();
  }
  const econ::RegressionResult* find(const std::string& name) const {
    for (const auto& r : results)
      if (r.name == name) return &r;
    return nullptr;
  }
};

/// The panel as a table with the same columns as its CSV form.
inline Table panel_table(const sim::Panel& p) {
  const std::size_t n = p.rows.size();
  std::vector<std::vector<double>> c(15 + sim::kNumCovariates, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = p.rows[i];
    const double v[15] = {double(r.analyst), double(r.firm),    double(r.period),    double(r.year),
                          double(r.date),    double(r.ann_date), r.price_50,         r.forecast,
                          r.actual,          r.tone,             r.pos_pct,          r.neg_pct,
                          r.text_only_pct,   r.hedge_pct,        r.firm_vol};
    for (std::size_t j = 0; j < 15; ++j) c[j][i] = v[j];
    for (std::size_t j = 0; j < sim::kNumCovariates; ++j) c[15 + j][i] = r.covariates[j];
  }
  Table t;
  std::istringstream header(sim::panel_header());
  std::string name;
  for (std::size_t j = 0; std::getline(header, name, ','); ++j) t.set(name, std::move(c[j]));
  return t;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write \"" + p.string() + "\"");
  out << content;
  if (!out) throw Error("write failed for \"" + p.string() + "\"");
}

}  // namespace detail

/// Runs the pipeline. When `out_dir` is set every intermediate is written
/// there and the panel is re-read from disk before variable construction.
inline Result run(const Options& opt, const std::optional<std::filesystem::path>& out_dir = std::nullopt) {
  sim::SimulationConfig cfg = opt.config;
  if (opt.null_mode) cfg.sigma_vague = 0.0;
  Provenance prov;
  prov.seed(cfg.seed).add("config", sim::config_to_string(cfg)).add("mode", opt.null_mode ? "null" : "default");
  if (out_dir) stage("output", [&] { std::filesystem::create_directories(*out_dir); });

  Result res;
  Table table;
  std::optional<sim::Panel> panel;
  if (opt.panel_input) {
    table = stage("read panel", [&] {
      const std::string text = slurp(*opt.panel_input);
      prov.add("panel", text);
      std::istringstream in(text);
      return read_csv(in);
    });
  } else {
    panel = stage("simulate", [&] { return sim::gen_panel(cfg); });
    if (out_dir) {
      std::ostringstream p, a;
      sim::write_panel_csv(p, *panel);
      sim::write_audit_csv(a, *panel);
      stage("write panel", [&] {
        detail::write_file(*out_dir / "panel.csv", prov.csv_comment() + p.str());
        detail::write_file(*out_dir / "audit.csv", prov.csv_comment() + a.str());
      });
      table = stage("read panel", [&] {
        std::ifstream in(*out_dir / "panel.csv");
        return read_csv(in);
      });
    } else {
      table = panel_table(*panel);
    }
  }
  res.panel_rows = table.rows();

  auto cons = stage("construct", [&] { return econ::construct_variables(table); });
  res.observations = cons.obs.rows();
  if (out_dir)
    stage("write observations", [&] {
      std::ostringstream o;
      write_csv(o, cons.obs);
      detail::write_file(*out_dir / "observations.csv", prov.csv_comment() + o.str());
    });

  for (const auto& spec : default_specs()) {
    if (opt.null_mode && spec.outcome != "FError") continue;
    if (opt.null_mode && !spec.interactions.empty()) continue;
    try {
      res.results.push_back(econ::run_spec(spec, cons.obs));
    } catch (const std::exception& e) {
      res.failed_specs.emplace_back(spec.name, e.what());
    }
  }
  res.figure1 = stage("figure1", [&] { return econ::quintile_table(cons.obs); });

  // Checks
  auto need = [&](const std::string& name) -> const econ::RegressionResult* { return res.find(name); };
  auto check = [&](const std::string& label, const std::string& spec, const std::string& term, int sign) {
    if (const auto* r = need(spec)) res.checks.push_back(sign_check(label, *r, term, sign));
    else res.checks.push_back({label, false, spec + " failed to estimate"});
  };
  if (opt.null_mode) {
    if (const auto* r = need("ferror_year"); r && r->find("Tone")) {
      const auto* co = r->find("Tone");
      std::ostringstream s;
      s << "ferror_year: Tone t = " << econ::fmt(co->t, 2) << ", expected |t| < 2 with sigma_vague = 0";
      res.checks.push_back({"Prediction 1 (null)", std::abs(co->t) < 2.0, s.str()});
    } else {
      res.checks.push_back({"Prediction 1 (null)", false, "ferror_year failed to estimate"});
    }
  } else {
    check("Prediction 1 (year FE)", "ferror_year", "Tone", -1);
    check("Prediction 1 (analyst-year FE)", "ferror_analyst_year", "Tone", -1);
    check("Prediction 1 (analyst-firm and year FE)", "ferror_analyst_firm_year", "Tone", -1);
    check("Prediction 2 (TextOnly vagueness)", "vagueness_textonly", econ::interaction_name("Tone", "Vagueness_TextOnly"), -1);
    check("Prediction 2 (Hedge vagueness)", "vagueness_hedge", econ::interaction_name("Tone", "Vagueness_Hedge"), -1);
    check("Prediction 3", "revision_tone", "Tone", 1);
    check("Prediction 4", "uncertainty_revision", econ::interaction_name("Tone", "Uncertainty"), 1);
    check("Prediction 5 (forecast errors)", "busyness_ferror", econ::interaction_name("Tone", "Busyness"), -1);
    check("Prediction 5 (revisions)", "busyness_revision", econ::interaction_name("Tone", "Busyness"), 1);
    const auto& q = res.figure1;
    std::ostringstream s;
    s << "mean FError by Tone quintile at t:";
    for (std::size_t k = 0; k < 5; ++k) s << " " << econ::fmt(q.mean[k][0], 6);
    res.checks.push_back({"Figure 1 shape", q.strictly_decreasing(0) && q.mean[0][0] > 0 && q.mean[4][0] < 0, s.str()});
  }
  if (panel) {
    const double rev = sim::revision_identity_residual(*panel), dec = sim::decomposition_identity_residual(*panel);
    std::ostringstream s;
    s << "max residual: revision " << rev << ", decomposition " << dec << " (tolerance 1e-12)";
    res.checks.push_back({"Simulator identities", rev <= 1e-12 && dec <= 1e-12, s.str()});
  }

  if (out_dir) {
    stage("write report", [&] {
      std::ostringstream csv, md, fig, rep;
      csv << prov.csv_comment() << econ::results_csv_header() << "\n";
      for (const auto& r : res.results) econ::write_results_csv(csv, r);
      detail::write_file(*out_dir / "results.csv", csv.str());
      md << prov.md_comment() << econ::markdown_table(res.results);
      detail::write_file(*out_dir / "results.md", md.str());
      fig << prov.csv_comment();
      econ::write_quintile_csv(fig, res.figure1);
      detail::write_file(*out_dir / "figure1.csv", fig.str());

      rep << prov.md_comment() << "# Replication report\n\n";
      rep << "Mode: " << (opt.null_mode ? "null (sigma_vague = 0)" : "default") << "  \n";
      rep << "Seed: " << cfg.seed << "  \n";
      rep << "Panel rows: " << res.panel_rows << ", observations: " << res.observations
          << ", Bold undefined: " << cons.bold_undefined << "\n\n";
      if (!cons.excluded.empty()) {
        rep << "Excluded rows:\n\n";
        for (const auto& [why, k] : cons.excluded) rep << "- " << why << ": " << k << "\n";
        rep << "\n";
      }
      rep << "## Checks\n\n";
      for (const auto& c : res.checks) rep << "- " << (c.pass ? "PASS" : "FAIL") << " " << c.name << ": " << c.detail << "\n";
      for (const auto& [name, err] : res.failed_specs) rep << "- FAIL spec " << name << ": " << err << "\n";
      rep << "\n## Figure 1 data\n\n```\n";
      econ::write_quintile_csv(rep, res.figure1);
      rep << "```\n\n## Regressions\n\n" << econ::markdown_table(res.results);
      detail::write_file(*out_dir / "report.md", rep.str());
    });
  }
  return res;
}

}  // namespace vaguekit::replicate
