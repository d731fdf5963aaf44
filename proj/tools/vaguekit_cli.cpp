// vaguekit command-line entry point.
//
//   vaguekit analyze   --input corpus.jsonl [--lexicon lex.tsv] [--labels external|naive] [--output DIR]
//   vaguekit simulate  [--config FILE] [--set key=value]... [--seed N] --output DIR
//   vaguekit regress   --input data.csv --spec specs.json [--output DIR]
//   vaguekit replicate [--config FILE] [--set key=value]... [--seed N] [--null] [--input panel.csv] --output DIR
//   vaguekit roughset  (--input set.json | --states N) [--check describe|prop1|prop2|tone-table] [--cap N]
//   vaguekit lexicon   [--input lex.tsv] [--output FILE]
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 a replicate check failed.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vaguekit/construct.hpp"
#include "vaguekit/corpus.hpp"
#include "vaguekit/econometrics.hpp"
#include "vaguekit/expectations.hpp"
#include "vaguekit/lexicon.hpp"
#include "vaguekit/provenance.hpp"
#include "vaguekit/regression.hpp"
#include "vaguekit/replicate.hpp"
#include "vaguekit/roughset.hpp"
#include "vaguekit/roughset_json.hpp"
#include "vaguekit/table.hpp"
#include "vaguekit/textmetrics.hpp"

namespace fs = std::filesystem;
using namespace vaguekit;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kFail = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string input, output, config, spec, labels = "external", lexicon, check = "describe";
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::size_t states = 0, cap = rough::kDefaultEnumerationCap;
  bool verbose = false, null_mode = false;
};

void log(const Common& c, const std::string& msg) {
  if (c.verbose) std::cerr << msg << "\n";
}

void require_input(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("--input is required (") + what + ")");
  if (!fs::is_regular_file(path)) throw Error("input \"" + path + "\" does not exist or is not a file");
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << content)) throw Error("cannot write \"" + p.string() + "\"");
}

std::string fmt6(double x) { return econ::fmt(x, 6); }

// ---------------------------------------------------------------------------
// analyze

int cmd_analyze(const Common& c) {
  require_input(c.input, "a JSONL report corpus");
  const std::string corpus_text = slurp(c.input);
  Provenance prov;
  prov.add("corpus", corpus_text);

  text::Lexicon lex_storage;
  const text::Lexicon* lex = &text::default_lexicon();
  if (!c.lexicon.empty()) {
    const std::string lex_text = slurp(c.lexicon);
    prov.add("lexicon", lex_text);
    std::istringstream in(lex_text);
    auto loaded = text::load_lexicon(in);
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << c.lexicon << ": " << w << "\n";
    lex_storage = std::move(loaded.lexicon);
    lex = &lex_storage;
  }
  const auto mode = c.labels == "naive" ? text::LabelMode::Naive : text::LabelMode::External;
  prov.add("labels", c.labels);

  std::istringstream in(corpus_text);
  std::vector<text::Report> reports;
  try {
    reports = text::read_corpus(in);
  } catch (const ParseError& e) {
    throw Error(c.input + ": " + e.what());
  }
  if (reports.empty()) throw Error(c.input + ": no reports");

  std::vector<text::AnalyzedReport> analyzed;
  std::size_t fallback = 0;
  for (const auto& r : reports) {
    analyzed.push_back(text::analyze_report(r, *lex, mode));
    fallback += analyzed.back().naive_fallback;
  }

  std::ostringstream csv;
  csv << prov.csv_comment();
  if (fallback)
    csv << "# labels: naive_tone fallback used for " << fallback << " of " << reports.size() << " reports\n";
  csv << "report_id,analyst_id,firm_id,date,n_sentences,tone,pos_pct,neg_pct,text_only_pct,hedge_pct,label_source\n";
  std::vector<std::vector<double>> cols(5);
  for (const auto& a : analyzed) {
    const auto& m = a.metrics;
    csv << csv::quote(a.report->report_id) << ',' << csv::quote(a.report->analyst_id) << ','
        << csv::quote(a.report->firm_id) << ',' << csv::quote(a.report->date) << ',' << m.n_sentences << ','
        << csv::format_real(m.tone) << ',' << csv::format_real(m.pos_pct) << ',' << csv::format_real(m.neg_pct) << ','
        << csv::format_real(m.text_only_pct) << ',' << csv::format_real(m.hedge_pct) << ','
        << (a.naive_fallback ? "naive" : "external") << "\n";
    const double v[5] = {m.tone, m.pos_pct, m.neg_pct, m.text_only_pct, m.hedge_pct};
    for (int j = 0; j < 5; ++j) cols[j].push_back(v[j]);
  }

  std::ostringstream summary;
  summary << "variable,n,mean,sd,p25,p50,p75\n";
  const char* names[5] = {"Tone", "Pos%", "Neg%", "TextOnly%", "Hedge%"};
  for (int j = 0; j < 5; ++j) {
    auto s = econ::describe(cols[j]);
    summary << names[j] << ',' << s.n << ',' << fmt6(s.mean) << ',' << fmt6(s.sd) << ',' << fmt6(s.p25) << ','
            << fmt6(s.p50) << ',' << fmt6(s.p75) << "\n";
  }

  if (c.output.empty()) {
    std::cout << csv.str();
    std::istringstream lines(summary.str());
    std::string line;
    std::cout << "# summary\n";
    while (std::getline(lines, line)) std::cout << "# " << line << "\n";
  } else {
    write_file(fs::path(c.output) / "metrics.csv", csv.str());
    write_file(fs::path(c.output) / "summary.csv", prov.csv_comment() + summary.str());
    std::cout << reports.size() << " reports analyzed";
    if (fallback) std::cout << " (" << fallback << " with naive tone labels)";
    std::cout << "\n" << summary.str();
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate / replicate configuration

sim::SimulationConfig resolve_config(const Common& c, Provenance& prov) {
  sim::SimulationConfig cfg;
  std::string seed_source = "default";
  if (!c.config.empty()) {
    const std::string text = slurp(c.config);
    std::istringstream in(text);
    const auto before = cfg.seed;
    try {
      cfg = sim::read_config(in, cfg);
    } catch (const ParseError& e) {
      throw Error(c.config + ": " + e.what());
    }
    if (cfg.seed != before) seed_source = "config";
  }
  for (const auto& kv : c.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got \"" + kv + "\"");
    const std::string key = sim::detail::trim_copy(kv.substr(0, eq));
    if (!sim::apply_setting(cfg, key, sim::detail::trim_copy(kv.substr(eq + 1))))
      throw UsageError("--set: unknown config key \"" + key + "\"");
    if (key == "seed") seed_source = "--set";
  }
  if (c.seed) {
    cfg.seed = *c.seed;
    seed_source = "--seed";
  }
  cfg.validate();
  prov.seed(cfg.seed).add("config", sim::config_to_string(cfg));
  std::cerr << "vaguekit " << kVersion << ": seed=" << cfg.seed << " (" << seed_source << ")\n";
  if (c.verbose) std::cerr << sim::config_to_string(cfg);
  return cfg;
}

int cmd_simulate(const Common& c) {
  if (c.output.empty()) throw UsageError("--output DIR is required");
  Provenance prov;
  auto cfg = resolve_config(c, prov);
  auto panel = sim::gen_panel(cfg);
  for (const auto& w : panel.warnings) std::cerr << "warning: " << w << "\n";

  std::ostringstream p, a;
  sim::write_panel_csv(p, panel);
  sim::write_audit_csv(a, panel);
  write_file(fs::path(c.output) / "panel.csv", prov.csv_comment() + p.str());
  write_file(fs::path(c.output) / "audit.csv", prov.csv_comment() + a.str());
  write_file(fs::path(c.output) / "config.txt", sim::config_to_string(cfg));

  std::size_t vague = 0, uncertain = 0, busy = 0, assigned = 0, revisions = 0;
  for (const auto& r : panel.rows) {
    vague += r.latent_vagueness;
    uncertain += r.latent_uncertainty;
    busy += r.latent_busyness;
    assigned += r.vague_assigned;
    revisions += r.has_next();
  }
  const double n = static_cast<double>(panel.rows.size());
  std::cout << panel.rows.size() << " rows (" << cfg.n_analysts << " analysts x " << cfg.n_firms << " firms x "
            << cfg.n_periods << " periods), " << revisions << " with a next forecast\n"
            << "vague signal assigned: " << econ::fmt(assigned / n, 4) << "\n"
            << "regimes: vagueness " << econ::fmt(vague / n, 4) << ", uncertainty " << econ::fmt(uncertain / n, 4)
            << ", busyness " << econ::fmt(busy / n, 4) << "\n";
  return kOk;
}

int cmd_replicate(const Common& c) {
  if (c.output.empty()) throw UsageError("--output DIR is required");
  Provenance prov;
  replicate::Options opt;
  opt.config = resolve_config(c, prov);
  opt.null_mode = c.null_mode;
  if (!c.input.empty()) {
    require_input(c.input, "a panel CSV");
    opt.panel_input = c.input;
  }
  auto res = replicate::run(opt, fs::path(c.output));
  for (const auto& chk : res.checks) std::cout << (chk.pass ? "PASS " : "FAIL ") << chk.name << ": " << chk.detail << "\n";
  for (const auto& [name, err] : res.failed_specs) std::cout << "FAIL spec " << name << ": " << err << "\n";
  std::cout << "report: " << (fs::path(c.output) / "report.md").string() << "\n";
  return res.all_pass() ? kOk : kFail;
}

// ---------------------------------------------------------------------------
// regress

int cmd_regress(const Common& c) {
  require_input(c.input, "an observation CSV");
  if (c.spec.empty()) throw UsageError("--spec is required");
  const std::string data_text = slurp(c.input), spec_text = slurp(c.spec);
  Provenance prov;
  prov.add("data", data_text).add("spec", spec_text);

  Table data;
  {
    std::istringstream in(data_text);
    try {
      data = read_csv(in);
    } catch (const ParseError& e) {
      throw Error(c.input + ": " + e.what());
    }
  }
  std::vector<econ::RegressionSpec> specs;
  {
    std::istringstream in(spec_text);
    try {
      specs = econ::read_specs(in);
    } catch (const ParseError& e) {
      throw Error(c.spec + ": " + e.what());
    }
  }

  std::vector<econ::RegressionResult> results;
  int failures = 0;
  for (const auto& s : specs) {
    try {
      results.push_back(econ::run_spec(s, data));
      log(c, "spec " + s.name + ": N = " + std::to_string(results.back().n_obs) + ", " +
                 std::to_string(results.back().demean_iterations) + " demeaning sweeps");
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "error: spec " << s.name << ": " << e.what() << "\n";
    }
  }

  std::ostringstream csv;
  csv << prov.csv_comment() << econ::results_csv_header() << "\n";
  for (const auto& r : results) econ::write_results_csv(csv, r);
  const std::string md = results.empty() ? std::string() : econ::markdown_table(results);
  if (!c.output.empty()) {
    write_file(fs::path(c.output) / "results.csv", csv.str());
    write_file(fs::path(c.output) / "results.md", prov.md_comment() + md);
  }
  std::cout << md;
  return failures ? kData : kOk;
}

// ---------------------------------------------------------------------------
// roughset

std::string show(const rough::CrispSet& s) {
  std::string out = "{";
  auto labels = s.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? ", " : "") + labels[i];
  return out + "}";
}

std::string show(const rough::RoughSet& r) { return "<" + show(r.lower()) + ", " + show(r.upper()) + ">"; }

int cmd_roughset(const Common& c) {
  nlohmann::json j;
  rough::SpacePtr space;
  if (!c.input.empty()) {
    require_input(c.input, "a rough-set JSON file");
    try {
      j = nlohmann::json::parse(slurp(c.input));
      space = rough::space_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw Error(c.input + ": " + e.what());
    }
  } else if (c.states > 0) {
    if (c.states > c.cap)
      throw CapExceeded("exhaustive enumeration over " + std::to_string(c.states) + " states refused (cap " +
                        std::to_string(c.cap) + "); pass --cap to raise it");
    std::vector<double> payoffs;
    for (std::size_t i = 0; i < c.states; ++i) payoffs.push_back(static_cast<double>(i) - static_cast<double>(c.states / 2));
    space = rough::StateSpace::from_payoffs(payoffs);
  } else {
    throw UsageError("roughset needs --input FILE or --states N");
  }

  if (c.check == "describe") {
    if (!j.contains("lower") && !j.contains("partition"))
      throw UsageError("describe needs a JSON file with \"lower\"/\"upper\" or \"partition\"/\"target\"");
    rough::RoughSet rs = j.contains("partition")
                             ? rough::approximate(rough::partition_from_json(space, j["partition"]),
                                                  rough::mask_from_json(space, j.at("target"), "target"))
                             : rough::rough_from_json(j, space);
    std::cout << "rough set: " << show(rs) << "\n"
              << "boundary: " << show(rough::boundary(rs)) << "\n"
              << "definability: " << rough::to_string(rough::classify_definability(rs)) << "\n"
              << "informative: " << (rough::is_informative(rs) ? "yes" : "no") << "\n"
              << "tone: " << rough::to_string(rough::tone_classify(rs)) << "\n";
  } else if (c.check == "prop1") {
    auto r = rough::verify_prop1(space, c.cap);
    std::cout << "Proposition 1, |states| = " << r.space_size << ": " << (r.holds ? "holds" : "VIOLATED")
              << (r.vacuous ? " (vacuous)" : "") << "\n"
              << r.proper_sets << " proper rough sets, " << r.informative_proper << " informative\n";
    if (r.witness) std::cout << "witness: " << show(*r.witness) << "\n";
    if (!r.holds) return kFail;
  } else if (c.check == "prop2") {
    auto r = rough::verify_prop2(space, c.cap);
    std::cout << "Proposition 2, |states| = " << r.space_size << ": " << (r.holds ? "holds" : "VIOLATED") << "\n"
              << r.crisp_faithful << " crisp-faithful representations of proper rough sets ("
              << r.proper_sets << " proper sets x " << r.crisp_candidates << " crisp candidates)\n"
              << r.rough_faithful_pairs << " faithful rough representations, " << r.proper_without_rough_rep
              << " proper sets without one\n";
    if (!r.holds) return kFail;
  } else if (c.check == "tone-table") {
    std::cout << "lower,upper,definability,tone\n";
    for (const auto& row : rough::tone_table(space, c.cap))
      std::cout << csv::quote(show(row.set.lower())) << ',' << csv::quote(show(row.set.upper())) << ','
                << rough::to_string(row.definability) << ',' << rough::to_string(row.tone) << "\n";
  } else {
    throw UsageError("unknown check \"" + c.check + "\"");
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// lexicon

int cmd_lexicon(const Common& c) {
  std::string tsv;
  Provenance prov;
  if (!c.input.empty()) {
    require_input(c.input, "a lexicon TSV");
    const std::string text = slurp(c.input);
    prov.add("lexicon", text);
    std::istringstream in(text);
    text::LexiconLoad loaded;
    try {
      loaded = text::load_lexicon(in);
    } catch (const ParseError& e) {
      throw Error(c.input + ": " + e.what());
    }
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    tsv = loaded.lexicon.to_tsv();
  } else {
    tsv = text::default_lexicon().to_tsv();
  }
  const std::string out = prov.csv_comment() + tsv;
  if (c.output.empty()) std::cout << out;
  else write_file(c.output, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vaguekit: rough-set vagueness, text measures, simulation and panel regressions"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Common c;

  auto common = [&](CLI::App* s) {
    s->add_flag("-v,--verbose", c.verbose, "Progress details on stderr");
  };
  auto seeded = [&](CLI::App* s) {
    s->add_option("--config", c.config, "Simulation config file (key = value lines)");
    s->add_option("--set", c.sets, "Config override key=value, repeatable; wins over --config");
    s->add_option("--seed", c.seed, "Random seed; wins over --config and --set");
  };

  auto* analyze = app.add_subcommand("analyze", "Per-report Tone, TextOnly% and Hedge% for a JSONL corpus");
  analyze->add_option("-i,--input", c.input, "JSONL corpus")->required();
  analyze->add_option("-o,--output", c.output, "Directory for metrics.csv and summary.csv (default: stdout)");
  analyze->add_option("--lexicon", c.lexicon, "Hedge lexicon TSV (default: built-in list)");
  analyze->add_option("--labels", c.labels, "Sentence tone source")->check(CLI::IsMember({"external", "naive"}));
  common(analyze);

  auto* simulate = app.add_subcommand("simulate", "Simulate an analyst panel");
  simulate->add_option("-o,--output", c.output, "Directory for panel.csv, audit.csv, config.txt");
  seeded(simulate);
  common(simulate);

  auto* regress = app.add_subcommand("regress", "Run regression specs on an observation CSV");
  regress->add_option("-i,--input", c.input, "Observation CSV")->required();
  regress->add_option("--spec", c.spec, "JSON spec file (object or array)")->required();
  regress->add_option("-o,--output", c.output, "Directory for results.csv and results.md");
  common(regress);

  auto* repl = app.add_subcommand("replicate", "Simulate, estimate the prediction suite and check each prediction");
  repl->add_option("-o,--output", c.output, "Report directory");
  repl->add_option("-i,--input", c.input, "Use this panel CSV instead of simulating");
  repl->add_flag("--null", c.null_mode, "sigma_vague = 0; Prediction 1 is expected to be null");
  seeded(repl);
  common(repl);

  auto* rs = app.add_subcommand("roughset", "Rough-set checks and tone classification");
  rs->add_option("-i,--input", c.input, "Rough-set JSON file");
  rs->add_option("--states", c.states, "Use N states with integer payoffs instead of --input");
  rs->add_option("--check", c.check, "What to run")->check(CLI::IsMember({"describe", "prop1", "prop2", "tone-table"}));
  rs->add_option("--cap", c.cap, "Largest state space for exhaustive enumeration");
  common(rs);

  auto* lex = app.add_subcommand("lexicon", "Dump the hedge lexicon as category<TAB>pattern lines");
  lex->add_option("-i,--input", c.input, "Load and normalize this TSV instead of the built-in list");
  lex->add_option("-o,--output", c.output, "Output file (default: stdout)");
  common(lex);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(c);
    if (*simulate) return cmd_simulate(c);
    if (*regress) return cmd_regress(c);
    if (*repl) return cmd_replicate(c);
    if (*rs) return cmd_roughset(c);
    if (*lex) return cmd_lexicon(c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
