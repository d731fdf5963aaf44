// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/econ_oracle.hpp"
#include "vaguekit/provenance.hpp"
#include "vaguekit/replicate.hpp"
#include "vaguekit/roughset.hpp"
#include "vaguekit/textmetrics.hpp"

namespace fs = std::filesystem;
using namespace vaguekit;

namespace {

// Tolerances and budgets.
constexpr int kLawInstances = 10000;
constexpr int kLawMaxStates = 12;
constexpr double kLawBudget = 5.0;
constexpr double kPropBudget = 10.0;
constexpr int kToneMaxStates = 6;
constexpr int kOraclePanels = 50;
constexpr double kCoefRelTol = 1e-8;
constexpr double kClusterRelTol = 1e-10;
constexpr double kReplicateBudget = 60.0;
constexpr double kTCritical = 2.0;
constexpr int kNullSeeds = 20;
constexpr int kNullRequired = 18;
constexpr double kIdentityTol = 1e-12;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
}

template <class F>
void criterion(const std::string& name, F&& body) {
  try {
    auto [pass, detail] = body();
    report(pass, name, detail);
  } catch (const std::exception& e) {
    report(false, name, std::string("threw: ") + e.what());
  }
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

// ---------------------------------------------------------------------------
// Rough sets

using rough::CrispSet;
using rough::Mask;
using rough::RoughSet;

rough::SpacePtr numbered(int n) {
  std::vector<double> p;
  for (int i = 1; i <= n; ++i) p.push_back(i);
  return rough::StateSpace::from_payoffs(p);
}

// Approximations straight from the definitions: a state is in the lower
// approximation iff every state sharing its block is in the target, in the
// upper iff some state sharing its block is.
std::pair<std::set<int>, std::set<int>> approximate_by_definition(const std::vector<std::size_t>& block, Mask target,
                                                                  int n) {
  std::set<int> lower, upper;
  for (int x = 0; x < n; ++x) {
    bool all = true, any = false;
    for (int y = 0; y < n; ++y) {
      if (block[y] != block[x]) continue;
      const bool in = (target >> y) & 1u;
      all = all && in;
      any = any || in;
    }
    if (all) lower.insert(x);
    if (any) upper.insert(x);
  }
  return {lower, upper};
}

std::set<int> members(const CrispSet& c) {
  std::set<int> s;
  for (std::size_t i = 0; i < c.space()->size(); ++i)
    if (c.contains(i)) s.insert(static_cast<int>(i));
  return s;
}

bool subset(const std::set<int>& a, const std::set<int>& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

std::pair<bool, std::string> rough_set_laws() {
  std::mt19937_64 rng(7001);
  int violations = 0;
  auto t0 = Clock::now();
  for (int trial = 0; trial < kLawInstances; ++trial) {
    const int n = 1 + static_cast<int>(rng() % kLawMaxStates);
    auto s = numbered(n);
    std::vector<std::size_t> coarse(n), fine(n);
    const std::size_t k = 1 + rng() % n;
    for (auto& b : coarse) b = rng() % k;
    for (int i = 0; i < n; ++i) fine[i] = coarse[i] * 2 + (rng() & 1u);
    auto pc = rough::Partition::from_assignment(s, coarse);
    auto pf = rough::Partition::from_assignment(s, fine);
    const Mask t1 = rng() & s->full_mask();
    const Mask t2 = t1 | (rng() & s->full_mask());

    auto a1 = rough::approximate(pc, CrispSet(s, t1));
    auto a2 = rough::approximate(pc, CrispSet(s, t2));
    auto af = rough::approximate(pf, CrispSet(s, t1));
    auto [lo1, up1] = approximate_by_definition(coarse, t1, n);
    auto [lo2, up2] = approximate_by_definition(coarse, t2, n);
    auto [lof, upf] = approximate_by_definition(fine, t1, n);
    std::set<int> target;
    for (int i = 0; i < n; ++i)
      if ((t1 >> i) & 1u) target.insert(i);

    bool ok = members(a1.lower()) == lo1 && members(a1.upper()) == up1 && members(a2.lower()) == lo2 &&
              members(a2.upper()) == up2 && members(af.lower()) == lof && members(af.upper()) == upf;
    ok = ok && subset(lo1, target) && subset(target, up1);      // containment
    ok = ok && subset(lo1, lo2) && subset(up1, up2);            // monotonicity
    ok = ok && subset(lo1, lof) && subset(upf, up1);            // refinement
    ok = ok && pf.refines(pc);
    violations += !ok;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < kLawBudget,
          std::to_string(kLawInstances) + " instances, |states| <= " + std::to_string(kLawMaxStates) + ", " +
              std::to_string(violations) + " violations, " + fmt(secs, 3) + " s (budget " + fmt(kLawBudget) + " s)"};
}

std::pair<bool, std::string> propositions() {
  auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream d;
  for (int n = 2; n <= 8; ++n) {
    auto r = rough::verify_prop1(numbered(n));
    const auto& w = r.witness;
    const Mask full = (Mask(1) << n) - 1;
    // the witness must be proper and leave some state out of the upper approximation
    const bool witness_ok = w && w->lower().mask() != w->upper().mask() && w->upper().mask() != full &&
                            (w->lower().mask() & ~w->upper().mask()) == 0;
    ok = ok && r.holds && witness_ok;
  }
  std::size_t crisp_faithful = 0, brute = 0;
  for (int n = 2; n <= 6; ++n) {
    auto r = rough::verify_prop2(numbered(n));
    crisp_faithful += r.crisp_faithful;
    ok = ok && r.holds;
    // F faithfully represents <L, U> when U ⊆ F and the complement of L lies
    // inside the complement of F.
    const unsigned full = (1u << n) - 1;
    for (unsigned up = 0; up <= full; ++up)
      for (unsigned lo = 0; lo <= full; ++lo) {
        if ((lo & ~up) || lo == up) continue;
        for (unsigned f = 0; f <= full; ++f) {
          bool upper_in_f = true, outside_l_outside_f = true;
          for (int i = 0; i < n; ++i) {
            const bool inU = (up >> i) & 1u, inL = (lo >> i) & 1u, inF = (f >> i) & 1u;
            if (inU && !inF) upper_in_f = false;
            if (!inL && inF) outside_l_outside_f = false;
          }
          brute += upper_in_f && outside_l_outside_f;
        }
      }
  }
  const double secs = seconds_since(t0);
  d << "prop1 witnesses for |states| 2..8; prop2 crisp-faithful count " << crisp_faithful << " (brute force "
    << brute << ") for |states| 2..6; " << fmt(secs, 3) << " s (budget " << kPropBudget << " s)";
  return {ok && crisp_faithful == 0 && brute == 0 && secs < kPropBudget, d.str()};
}

// The classification table, row by row. Both sides of the table are read
// with the empty lower approximation deferring to the upper one.
int tone_by_table(unsigned lo, unsigned up, const std::vector<int>& payoff) {
  auto inside = [&](unsigned m, auto pred) {
    for (std::size_t i = 0; i < payoff.size(); ++i)
      if (((m >> i) & 1u) && !pred(payoff[i])) return false;
    return true;
  };
  auto pos = [](int p) { return p > 0; };
  auto neg = [](int p) { return p < 0; };
  const bool positive = (lo != 0 && inside(lo, pos)) || (lo == 0 && inside(up, pos));
  const bool negative = (lo != 0 && inside(lo, neg)) || (lo == 0 && inside(up, neg));
  if (positive && !negative) return 1;
  if (negative && !positive) return -1;
  return 0;
}

std::pair<bool, std::string> tone_conformance() {
  std::size_t checked = 0, mismatches = 0;
  for (int n = 1; n <= kToneMaxStates; ++n) {
    std::vector<int> payoff(n, -2);
    while (true) {
      std::vector<rough::State> states;
      for (int i = 0; i < n; ++i) states.push_back({"s" + std::to_string(i), double(payoff[i])});
      auto space = rough::StateSpace::make(states);
      const unsigned full = (1u << n) - 1;
      for (unsigned up = 1; up <= full; ++up)
        for (unsigned lo = up;; lo = (lo - 1) & up) {
          RoughSet rs(CrispSet(space, lo), CrispSet(space, up));
          const int got = static_cast<int>(rough::tone_classify(rs));
          mismatches += got != tone_by_table(lo, up, payoff);
          ++checked;
          if (lo == 0) break;
        }
      int i = 0;
      while (i < n && payoff[i] == 2) payoff[i++] = -2;
      if (i == n) break;
      ++payoff[i];
    }
  }
  return {mismatches == 0 && checked > 0, std::to_string(checked) + " rough sets over |states| <= " +
                                              std::to_string(kToneMaxStates) + " with payoffs in {-2..2}, " +
                                              std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------------------
// Lexicon

// The published wordlist, one string per bullet line.
const std::vector<std::string> kWordlist = {
    "think, believe, feel, sense, suppose, suggest, argue",
    "in my/our view, from my/our perspective, as far as I/we can tell, to the best of my/our knowledge",
    "seem, appear, apparent, sound, look like",
    "may, might, could, would, should",
    "maybe, perhaps, unlikely, improbable(ly), potentially, possible(ly), likely, probable(ly), conceivable(ly), "
    "presumably",
    "around, approximate(ly), roughly",
    "few, bit, little, less, minority, some, several, number of, couple of, numerous, portion of, lot, mass, many, "
    "plenty, much, more, majority, most of",
    "sometime, earlier, recent(ly), soon, later",
    "seldom, sometimes, occasionally, often",
    "sort of, kind of, more or less, slight(ly)",
    "fairly, pretty, relatively",
    "mostly, largely, principally, mainly, predominantly",
    "almost, nearly, practically, virtually, nominally, not entirely, close to",
    "as it were, so to say/speak, in a manner of speaking",
    "somewhat, to some degree/extent, to a certain degree/extent, to a large degree/extent",
    "typical(ly), usually, in essential, essentially, in general, generally, basically, as a rule, tend to, apt to, "
    "prone to",
    "something, someone, somebody, somewhere, someplace, somehow, someway",
    "in some/most cases, in a/one sense, in a/one way",
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

// "a/b" picks one word, "x(ly)" is x or its adverb.
std::vector<std::string> expand(const std::string& entry) {
  std::vector<std::string> phrases = {""};
  for (const auto& word : split(entry, ' ')) {
    std::vector<std::string> choices;
    if (auto p = word.find("(ly)"); p != std::string::npos) {
      std::string base = word.substr(0, p);
      choices = {base, base.size() > 2 && base.substr(base.size() - 2) == "le" ? base.substr(0, base.size() - 1) + "y"
                                                                              : base + "ly"};
    } else {
      choices = split(word, '/');
    }
    std::vector<std::string> next;
    for (const auto& ph : phrases)
      for (const auto& c : choices) next.push_back(ph.empty() ? c : ph + " " + c);
    phrases = std::move(next);
  }
  return phrases;
}

std::pair<bool, std::string> lexicon_coverage() {
  const auto& lex = text::default_lexicon();
  std::size_t entries = 0, phrases = 0, missing_entries = 0, misses = 0;
  for (const auto& line : kWordlist)
    for (const auto& raw : split(line, ',')) {
      const std::string entry = strip(raw);
      ++entries;
      missing_entries += lex.find(entry) == nullptr;
      for (const auto& ph : expand(entry)) {
        ++phrases;
        for (const std::string& carrier : {"We said " + ph + " about margins.", ph + ".", "(" + ph + ")"})
          misses += !text::has_hedge({carrier, 0}, lex);
      }
    }
  auto S = [](std::string t) { return text::Sentence{std::move(t), 0}; };
  const auto a = S("While still early, SBUX has a newfound willingness to take necessary measures to cut costs, "
                   "close stores and repair margins as it moves from growth to maturity.");
  const auto b = S("Recent investor meetings we hosted with management increased our confidence in SBUX's ability "
                   "to obtain $500M in cost savings in FY09 alone, but caution investors not to expect an overnight "
                   "revival in top-line results.");
  const auto c = S("Pfizer may not even be able to achieve $2.00 in 2012 because revenue will fall materially short "
                   "of management’s $70B target.");
  const auto d = S("Pfizer is not able to achieve $2.00 in 2012 because revenue will fall materially short of "
                   "management’s $70B target.");
  const auto tofa = S("we believe that tofacitinib’s profile sets it up to be a blockbuster");
  const bool quoted = text::is_text_only(a) && !text::is_text_only(b) && text::has_hedge(c, lex) &&
                      !text::has_hedge(d, lex) && text::has_hedge(tofa, lex);
  std::ostringstream s;
  s << entries << " listed entries (" << missing_entries << " absent from the lexicon), " << phrases
    << " expanded phrases, " << misses << " carrier misses; quoted sentences " << (quoted ? "as documented" : "WRONG");
  return {entries == lex.size() && missing_entries == 0 && misses == 0 && quoted, s.str()};
}

// ---------------------------------------------------------------------------
// Econometrics

std::pair<bool, std::string> econometrics_oracle() {
  double worst_coef = 0.0;
  std::size_t max_rows = 0;
  for (int rep = 0; rep < kOraclePanels; ++rep) {
    auto t = oracle::random_panel(9000 + rep, 40 + 9 * rep, 3 + rep % 8, 2 + rep % 5, 0.7, -1.3);
    max_rows = std::max(max_rows, t.rows());
    auto res = econ::run_spec(oracle::two_way_spec(), t);
    auto want = oracle::panel_dummy_slopes(t);
    for (int j = 0; j < 2; ++j) {
      const auto* co = res.find(j == 0 ? "x1" : "x2");
      if (!co) return {false, "coefficient missing in panel " + std::to_string(rep)};
      worst_coef = std::max(worst_coef, std::abs(co->estimate - want(j)) / std::abs(want(j)));
    }
  }

  std::ifstream in(std::string(VAGUEKIT_TEST_DATA) + "/cluster_fixture.csv");
  auto f = read_csv(in);
  const auto n = static_cast<Eigen::Index>(f.rows());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd e(n);
  econ::Codes a(n), b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = f.num("x1")[i];
    X(i, 1) = f.num("x2")[i];
    e(i) = f.num("e")[i];
    a[i] = static_cast<std::int64_t>(f.num("a")[i]);
    b[i] = static_cast<std::int64_t>(f.num("b")[i]);
  }
  auto want = oracle::two_way_cluster(X, e, a, b);
  auto cov = econ::cluster_se(X, e, a, b);
  double worst_se = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double se = std::sqrt(cov.V_raw(j, j)), se0 = std::sqrt(want(j, j));
    worst_se = std::max(worst_se, std::abs(se - se0) / se0);
  }
  std::ostringstream s;
  s << kOraclePanels << " panels (<= " << max_rows << " rows, 2 FE keys): max relative coefficient gap " << worst_coef
    << " (tol " << kCoefRelTol << "); " << n << "-row fixture: max relative SE gap " << worst_se << " (tol "
    << kClusterRelTol << ")";
  return {worst_coef <= kCoefRelTol && worst_se <= kClusterRelTol && max_rows <= 500 && n == 40, s.str()};
}

// ---------------------------------------------------------------------------
// Simulation-based recovery

struct DefaultRun {
  replicate::Result result;
  sim::Panel panel;
  double seconds = 0.0;
};

const DefaultRun& default_run() {
  static const DefaultRun run = [] {
    DefaultRun r;
    auto t0 = Clock::now();
    r.result = replicate::run(replicate::Options{});
    r.seconds = seconds_since(t0);
    r.panel = sim::gen_panel(sim::SimulationConfig{});
    return r;
  }();
  return run;
}

const econ::Coefficient* coef(const std::string& spec, const std::string& term) {
  const auto* r = default_run().result.find(spec);
  return r ? r->find(term) : nullptr;
}

std::string describe(const econ::Coefficient* c) {
  if (!c) return "missing";
  return fmt(c->estimate) + " (t " + fmt(c->t, 3) + ")";
}

bool signed_significant(const econ::Coefficient* c, int sign) {
  return c && (sign < 0 ? c->estimate < 0 : c->estimate > 0) && std::abs(c->t) > kTCritical;
}

std::pair<bool, std::string> prediction1() {
  const auto& run = default_run();
  const auto* tone = coef("ferror_year", "Tone");
  const bool main_ok = signed_significant(tone, -1) && run.seconds < kReplicateBudget;

  int quiet = 0;
  for (int k = 0; k < kNullSeeds; ++k) {
    replicate::Options o;
    o.null_mode = true;
    o.config.seed = 500 + k;
    auto r = replicate::run(o);
    const auto* res = r.find("ferror_year");
    const auto* c = res ? res->find("Tone") : nullptr;
    quiet += c && std::abs(c->t) < kTCritical;
  }
  std::ostringstream s;
  s << "Tone " << describe(tone) << " on " << run.result.observations << " observations in " << fmt(run.seconds, 3)
    << " s; null runs with |t| < 2: " << quiet << " of " << kNullSeeds << " (need " << kNullRequired << ")";
  return {main_ok && quiet >= kNullRequired, s.str()};
}

std::pair<bool, std::string> predictions245() {
  const auto& run = default_run();
  struct Want {
    const char* spec;
    const char* moderator;
    int sign;
  };
  const Want wants[] = {{"vagueness_textonly", "Vagueness_TextOnly", -1},
                        {"vagueness_hedge", "Vagueness_Hedge", -1},
                        {"uncertainty_revision", "Uncertainty", 1},
                        {"busyness_ferror", "Busyness", -1},
                        {"busyness_revision", "Busyness", 1}};
  bool ok = run.seconds < kReplicateBudget;
  std::ostringstream s;
  for (const auto& w : wants) {
    const auto* c = coef(w.spec, econ::interaction_name("Tone", w.moderator));
    ok = ok && signed_significant(c, w.sign);
    s << w.spec << " Tone x " << w.moderator << " " << describe(c) << "; ";
  }
  s << fmt(run.seconds, 3) << " s";
  return {ok, s.str()};
}

std::pair<bool, std::string> prediction3() {
  const auto& run = default_run();
  const auto* tone = coef("revision_tone", "Tone");
  // Revision identity recomputed row by row along each analyst-firm path.
  const double lam = run.panel.config.lambda;
  double worst = 0.0;
  std::size_t rows = 0;
  std::map<std::pair<std::size_t, std::size_t>, const sim::PanelRow*> prev;
  for (const auto& r : run.panel.rows) {
    auto key = std::make_pair(r.analyst, r.firm);
    auto it = prev.find(key);
    if (it != prev.end() && it->second->period + 1 == r.period && r.has_next()) {
      const auto& p = *it->second;
      const double dF_next = r.next_forecast - r.forecast;
      const double dF = r.forecast - p.forecast;
      worst = std::max(worst, std::abs(dF_next - (lam * r.vague_exp - lam * p.vague_exp + (1 - lam) * dF)));
      ++rows;
    }
    prev[key] = &r;
  }
  std::ostringstream s;
  s << "revision_tone Tone " << describe(tone) << "; revision identity max residual " << worst << " over " << rows
    << " rows (tol " << kIdentityTol << ")";
  return {signed_significant(tone, 1) && rows > 0 && worst <= kIdentityTol, s.str()};
}

std::pair<bool, std::string> figure1() {
  const auto& run = default_run();
  // Recompute the horizon-t quintile means from the observations.
  auto cons = econ::construct_variables(replicate::panel_table(run.panel));
  const auto& tone = cons.obs.num("Tone");
  const auto& ferr = cons.obs.num("FError");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < tone.size(); ++i)
    if (std::isfinite(tone[i]) && std::isfinite(ferr[i])) pts.push_back({tone[i], ferr[i]});
  std::vector<double> sorted;
  for (const auto& p : pts) sorted.push_back(p.first);
  std::sort(sorted.begin(), sorted.end());
  auto cut = [&](double q) { return sorted[static_cast<std::size_t>(std::ceil(q * sorted.size())) - 1]; };
  const double c1 = cut(0.2), c2 = cut(0.4), c3 = cut(0.6), c4 = cut(0.8);
  double sum[5] = {}, cnt[5] = {};
  for (const auto& [t, fe] : pts) {
    const int k = t <= c1 ? 0 : t <= c2 ? 1 : t <= c3 ? 2 : t <= c4 ? 3 : 4;
    sum[k] += fe;
    cnt[k] += 1;
  }
  double mean[5];
  for (int k = 0; k < 5; ++k) mean[k] = sum[k] / cnt[k];
  bool ok = mean[0] > 0 && mean[4] < 0;
  for (int k = 0; k + 1 < 5; ++k) ok = ok && mean[k] > mean[k + 1];

  const auto& q = run.result.figure1;
  const bool lib_ok = q.strictly_decreasing(0) && q.mean[0][0] > 0 && q.mean[4][0] < 0;
  std::ostringstream s;
  s << "mean FError by Tone quintile:";
  for (int k = 0; k < 5; ++k) s << " " << fmt(mean[k]);
  s << "; quintile_table " << (lib_ok ? "agrees" : "DISAGREES");
  return {ok && lib_ok, s.str()};
}

// ---------------------------------------------------------------------------
// CLI determinism

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout";
  const std::string cmd = std::string(VAGUEKIT_CLI) + " " + args + " >" + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out.string())};
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path().string());
  return files;
}

std::pair<bool, std::string> cli_determinism() {
  const std::string data = VAGUEKIT_DATA_DIR;
  const fs::path root = fs::temp_directory_path() / ("vaguekit_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "analyze -i " + data + "/corpus/sample_reports.jsonl -o {out}"},
      {"simulate", "simulate --config " + data + "/simulation.cfg -o {out}"},
      {"replicate", "replicate -o {out}"},
      {"regress", "regress -i {first}/replicate/observations.csv --spec " + data +
                      "/specs/prediction_suite.json -o {out}"},
      {"roughset", "roughset -i " + data + "/roughset/three_states.json --check tone-table"},
      {"lexicon", "lexicon -o {out}/lexicon.tsv"},
  };
  std::size_t differing = 0, failed = 0, files = 0;
  std::string bad;
  for (const auto& [name, pattern] : commands) {
    std::map<std::string, std::string> outputs[2];
    std::string stdout_text[2];
    for (int pass = 0; pass < 2; ++pass) {
      const fs::path scratch = root / ("run" + std::to_string(pass));
      const fs::path out = scratch / name;
      fs::create_directories(out);
      std::string args = pattern;
      for (auto [key, value] : {std::pair<std::string, std::string>{"{out}", out.string()},
                                {"{first}", (root / "run0").string()}})
        for (auto p = args.find(key); p != std::string::npos; p = args.find(key)) args.replace(p, key.size(), value);
      auto r = cli(args, out.parent_path());
      if (r.code != 0) {
        ++failed;
        bad += " " + name + "(exit " + std::to_string(r.code) + ")";
      }
      // replicate reports the output path on stdout
      std::string text = r.out;
      if (auto p = text.find(root.string()); p != std::string::npos) text = text.substr(0, p);
      stdout_text[pass] = text;
      outputs[pass] = tree(out);
      outputs[pass].erase("stdout");
    }
    files += outputs[0].size();
    if (stdout_text[0] != stdout_text[1] || outputs[0] != outputs[1]) {
      ++differing;
      bad += " " + name;
    }
  }
  fs::remove_all(root);
  std::ostringstream s;
  s << commands.size() << " subcommands run twice, " << files << " output files compared, " << differing
    << " differ, " << failed << " runs failed" << bad;
  return {differing == 0 && failed == 0, s.str()};
}

}  // namespace

int main() {
  criterion("Rough-set laws", rough_set_laws);
  criterion("Propositions 1 and 2", propositions);
  criterion("Tone classification table", tone_conformance);
  criterion("Lexicon coverage", lexicon_coverage);
  criterion("Econometrics oracle", econometrics_oracle);
  criterion("Prediction 1 recovery", prediction1);
  criterion("Predictions 2, 4, 5 recovery", predictions245);
  criterion("Prediction 3 recovery", prediction3);
  criterion("Figure 1 shape", figure1);
  criterion("CLI determinism", cli_determinism);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
