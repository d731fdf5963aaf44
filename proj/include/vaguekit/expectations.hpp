#pragma once

// Synthetic analyst panels. Each analyst-firm pair carries a forecast path:
//
//   pi_t    = precise_t + vague_t + eps_t
//   F_0     = precise_0 + b_0 + eta_0
//   F_{t+1} = lambda * vague_t + (1 - lambda) * F_t
//
// For t >= 1 the precise expectation is whatever makes F_t = precise_t + b_t +
// eta_t hold, so every row satisfies the error decomposition exactly and
// consecutive rows satisfy the revision identity exactly.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "vaguekit/error.hpp"

namespace vaguekit::sim {

inline constexpr std::array<std::string_view, 14> kCovariateNames = {
    "AnaGenExp", "AnaFirmExp", "AnaAllStar", "AnaLFR",   "AnaNfirm", "AnaNFore",  "BHSize",
    "BHIB",      "FirmSize",   "FirmBM",     "FirmIO",   "FirmNAna", "FirmNFore", "PriorCAR"};
inline constexpr std::size_t kNumCovariates = kCovariateNames.size();

inline std::vector<double> default_bias_coeffs() {
  std::vector<double> c(kNumCovariates, 0.0);
  c[2] = -0.10;   // AnaAllStar
  c[7] = 0.05;    // BHIB
  c[13] = -2.0;   // PriorCAR
  return c;
}

/// Each enabled regime flag multiplies the vague-signal sd on flagged rows.
struct RegimeFlags {
  bool vagueness = true;    ///< latent per report; proxied by TextOnly% and Hedge%
  bool uncertainty = true;  ///< latent per firm-year; proxied by firm_vol
  bool busyness = true;     ///< latent per analyst; proxied by AnaNfirm
  double vague_factor = 2.0;
  double uncertainty_factor = 2.0;
  double busy_factor = 2.0;
};

struct SimulationConfig {
  std::size_t n_firms = 100;
  std::size_t n_analysts = 50;
  std::size_t n_periods = 20;
  double sigma_precise = 1.0;
  double sigma_vague = 0.5;
  double sigma_eps = 0.5;
  double sigma_eta = 0.3;
  double lambda = 0.5;
  std::vector<double> bias_coeffs = default_bias_coeffs();
  double tone_noise = 0.2;
  double vague_share = 0.8;
  RegimeFlags regimes;
  std::uint64_t seed = 20240601;
  /// Admits lambda in [0, 1]. Not reachable from config files.
  bool allow_boundary_lambda = false;

  void validate() const {
    for (auto [name, v] : {std::pair{"sigma_precise", sigma_precise}, {"sigma_vague", sigma_vague},
                           {"sigma_eps", sigma_eps}, {"sigma_eta", sigma_eta}, {"tone_noise", tone_noise}})
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be a finite value >= 0");
    if (allow_boundary_lambda ? !(lambda >= 0.0 && lambda <= 1.0) : !(lambda > 0.0 && lambda < 1.0))
      throw DomainError("lambda must lie in (0, 1)");
    if (!(vague_share >= 0.0 && vague_share <= 1.0)) throw DomainError("vague_share must lie in [0, 1]");
    for (double f : {regimes.vague_factor, regimes.uncertainty_factor, regimes.busy_factor})
      if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("regime factors must be positive");
    if (bias_coeffs.size() != kNumCovariates)
      throw StructuralError("bias_coeffs has " + std::to_string(bias_coeffs.size()) + " entries, expected " +
                            std::to_string(kNumCovariates));
  }
};

struct ExpectationState {
  double precise_exp = 0.0;
  double vague_exp = 0.0;
  double forecast = 0.0;
  std::size_t period = 0;
};

struct PanelRow {
  std::size_t analyst = 0, firm = 0, period = 0;
  int year = 0;
  int date = 0;      ///< day index of the report
  int ann_date = 0;  ///< day index of the earnings announcement
  double price_50 = 0.0;
  double forecast = 0.0;
  double actual = 0.0;
  double next_forecast = std::numeric_limits<double>::quiet_NaN();
  double tone = 0.0, pos_pct = 0.0, neg_pct = 0.0, text_only_pct = 0.0, hedge_pct = 0.0;
  double firm_vol = 0.0;
  std::array<double, kNumCovariates> covariates{};

  // Latent draws, written only to the audit sidecar.
  double precise_exp = 0.0, vague_exp = 0.0, bias = 0.0, eta = 0.0, eps = 0.0;
  double sigma_vague_row = 0.0;
  bool vague_assigned = false, latent_vagueness = false, latent_uncertainty = false, latent_busyness = false;

  double forecast_error() const { return forecast - actual; }
  bool has_next() const { return !std::isnan(next_forecast); }
  double revision() const { return next_forecast - forecast; }
};

struct Panel {
  SimulationConfig config;
  std::vector<PanelRow> rows;  ///< ordered by analyst, firm, period
  std::vector<std::string> warnings;

  const PanelRow& at(std::size_t analyst, std::size_t firm, std::size_t period) const {
    return rows[(analyst * config.n_firms + firm) * config.n_periods + period];
  }
};

// ---------------------------------------------------------------------------
// Random streams

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Tag : std::uint64_t { Row = 1, Pair, Analyst, AnalystYear, Firm, FirmYear, Tone };

inline std::uint64_t stream_key(std::uint64_t seed, Tag tag, std::uint64_t a = 0, std::uint64_t b = 0,
                                std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t x : {static_cast<std::uint64_t>(tag), a, b, c}) h = splitmix64(h ^ x);
  return h;
}

class Stream {
 public:
  explicit Stream(std::uint64_t key) : rng_(key) {}
  double normal() { return normal_(rng_); }
  double uniform() { return uniform_(rng_); }
  bool bernoulli(double p) { return uniform() < p; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Draws consumed by one row, in a fixed order.
struct RowDraws {
  double z_precise, z_vague, z_eta, z_eps, z_tone, z_text_only, z_hedge, u_vagueness, u_day, z_prior_car,
      z_price, z_nfore;
};

inline RowDraws row_draws(std::uint64_t seed, std::size_t a, std::size_t f, std::size_t t) {
  Stream s(stream_key(seed, Tag::Row, a, f, t));
  RowDraws d{};
  d.z_precise = s.normal();
  d.z_vague = s.normal();
  d.z_eta = s.normal();
  d.z_eps = s.normal();
  d.z_tone = s.normal();
  d.z_text_only = s.normal();
  d.z_hedge = s.normal();
  d.u_vagueness = s.uniform();
  d.u_day = s.uniform();
  d.z_prior_car = s.normal();
  d.z_price = s.normal();
  d.z_nfore = s.normal();
  return d;
}

inline bool pair_vague_assigned(const SimulationConfig& cfg, std::size_t a, std::size_t f) {
  if (cfg.vague_share >= 1.0) return true;
  return Stream(stream_key(cfg.seed, Tag::Pair, a, f)).bernoulli(cfg.vague_share);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model equations

struct SignalKey {
  std::size_t analyst = 0, firm = 0, period = 0;
  double vague_scale = 1.0;  ///< regime multiplier on sigma_vague
};

struct Signals {
  double precise_exp = 0.0;
  double vague_exp = 0.0;
  bool vague_assigned = false;
};

inline Signals gen_signal(const SimulationConfig& cfg, const SignalKey& k) {
  auto d = detail::row_draws(cfg.seed, k.analyst, k.firm, k.period);
  Signals s;
  s.precise_exp = cfg.sigma_precise * d.z_precise;
  s.vague_assigned = detail::pair_vague_assigned(cfg, k.analyst, k.firm);
  s.vague_exp = s.vague_assigned ? cfg.sigma_vague * k.vague_scale * d.z_vague : 0.0;
  return s;
}

inline std::vector<Signals> gen_signals(const SimulationConfig& cfg, std::span<const SignalKey> keys) {
  cfg.validate();
  std::vector<Signals> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(gen_signal(cfg, k));
  return out;
}

inline double realize_state(double precise_exp, double vague_exp, double eps) {
  return precise_exp + vague_exp + eps;
}

/// b(P): linear in the covariates.
inline double predictable_bias(std::span<const double> covariates, std::span<const double> bias_coeffs) {
  if (covariates.size() != bias_coeffs.size())
    throw StructuralError("covariate vector has " + std::to_string(covariates.size()) + " entries but bias_coeffs has " +
                          std::to_string(bias_coeffs.size()));
  double b = 0.0;
  for (std::size_t i = 0; i < covariates.size(); ++i) b += bias_coeffs[i] * covariates[i];
  return b;
}

/// The vague expectation never enters the numerical forecast.
inline double make_forecast(double precise_exp, std::span<const double> covariates, const SimulationConfig& cfg,
                            double eta) {
  return precise_exp + predictable_bias(covariates, cfg.bias_coeffs) + eta;
}

inline double forecast_error(double forecast, double realized) { return forecast - realized; }

inline double update_forecast(double current_vague_exp, double forecast, double lambda,
                              bool allow_boundary = false) {
  if (allow_boundary ? !(lambda >= 0.0 && lambda <= 1.0) : !(lambda > 0.0 && lambda < 1.0))
    throw DomainError("lambda must lie in (0, 1), got " + std::to_string(lambda));
  return lambda * current_vague_exp + (1.0 - lambda) * forecast;
}

/// Tone from a standard normal draw z: clamp(tanh(vague_exp) + tone_noise * z).
inline double emit_tone(double vague_exp, double tone_noise, double z) {
  if (!(tone_noise >= 0.0)) throw DomainError("tone_noise must be >= 0");
  return std::clamp(std::tanh(vague_exp) + tone_noise * z, -1.0, 1.0);
}

inline double emit_tone(double vague_exp, double tone_noise, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return emit_tone(vague_exp, tone_noise, n(rng));
}

/// Splits tone into positive and negative sentence shares. The neutral share
/// shrinks as |tone| grows.
inline std::pair<double, double> tone_shares(double tone) {
  const double neutral = 0.5 * (1.0 - std::abs(tone));
  return {(1.0 - neutral + tone) / 2.0, (1.0 - neutral - tone) / 2.0};
}

/// F - pi + vague - b - eta + eps, zero up to rounding.
inline double decomposition_residual(const PanelRow& r) {
  return r.forecast - r.actual + r.vague_exp - r.bias - r.eta + r.eps;
}

// ---------------------------------------------------------------------------
// Panel generation

namespace detail {

struct AnalystDraws {
  bool busy;
  double gen_exp0, all_star, bh_size, bh_ib;
};

inline AnalystDraws analyst_draws(const SimulationConfig& cfg, std::size_t a) {
  Stream s(stream_key(cfg.seed, Tag::Analyst, a));
  AnalystDraws d{};
  d.busy = s.bernoulli(0.5) && cfg.regimes.busyness;
  d.gen_exp0 = 1.0 + std::floor(15.0 * s.uniform());
  d.all_star = s.bernoulli(0.2) ? 1.0 : 0.0;
  d.bh_size = std::round(std::exp(3.5 + 0.8 * s.normal()));
  d.bh_ib = s.bernoulli(0.5) ? 1.0 : 0.0;
  return d;
}

struct AnalystYearDraws {
  double nfirm, lfr;
};

inline AnalystYearDraws analyst_year_draws(const SimulationConfig& cfg, std::size_t a, std::size_t t, bool busy) {
  Stream s(stream_key(cfg.seed, Tag::AnalystYear, a, t));
  AnalystYearDraws d{};
  d.nfirm = std::max(1.0, std::round(12.0 + (busy ? 8.0 : 0.0) + 3.0 * s.normal()));
  d.lfr = std::exp(0.5 * s.normal());
  return d;
}

struct FirmDraws {
  double log_price, size0, bm0, io0, nana0;
};

inline FirmDraws firm_draws(const SimulationConfig& cfg, std::size_t f) {
  Stream s(stream_key(cfg.seed, Tag::Firm, f));
  FirmDraws d{};
  d.log_price = std::log(40.0) + 0.4 * s.normal();
  d.size0 = 9.0 + 1.2 * s.normal();
  d.bm0 = 0.5 + 0.2 * s.normal();
  d.io0 = 0.4 + 0.5 * s.uniform();
  d.nana0 = 8.0 + 8.0 * s.uniform();
  return d;
}

struct FirmYearDraws {
  bool uncertain;
  double firm_vol, price_drift, size, bm, io, nana, nfore;
};

inline FirmYearDraws firm_year_draws(const SimulationConfig& cfg, std::size_t f, std::size_t t, const FirmDraws& fd) {
  Stream s(stream_key(cfg.seed, Tag::FirmYear, f, t));
  FirmYearDraws d{};
  d.uncertain = s.bernoulli(0.5) && cfg.regimes.uncertainty;
  d.firm_vol = std::exp(std::log(0.3) + (d.uncertain ? 0.5 : 0.0) + 0.25 * s.normal());
  d.price_drift = 0.03 * static_cast<double>(t) + 0.15 * s.normal();
  d.size = fd.size0 + 0.05 * static_cast<double>(t) + 0.1 * s.normal();
  d.bm = fd.bm0 + 0.05 * s.normal();
  d.io = std::clamp(fd.io0 + 0.03 * s.normal(), 0.0, 1.0);
  d.nana = std::max(1.0, std::round(fd.nana0 + 1.5 * s.normal()));
  d.nfore = std::max(1.0, std::round(3.0 * d.nana + 4.0 * s.normal()));
  return d;
}

inline constexpr int kDaysPerPeriod = 365;
inline constexpr int kAnnouncementLag = 410;  // fiscal-year start to announcement
inline constexpr int kBaseYear = 1995;

}  // namespace detail

inline Panel gen_panel(const SimulationConfig& cfg) {
  cfg.validate();
  if (cfg.n_firms == 0 || cfg.n_analysts == 0 || cfg.n_periods == 0)
    throw DomainError("n_firms, n_analysts and n_periods must all be positive");

  Panel panel;
  panel.config = cfg;
  if (cfg.n_periods == 1)
    panel.warnings.push_back("n_periods = 1: no analyst-firm pair has a next forecast, so there are no revision rows");

  std::vector<detail::FirmDraws> firms;
  std::vector<std::vector<detail::FirmYearDraws>> firm_years(cfg.n_firms);
  for (std::size_t f = 0; f < cfg.n_firms; ++f) {
    firms.push_back(detail::firm_draws(cfg, f));
    for (std::size_t t = 0; t < cfg.n_periods; ++t) firm_years[f].push_back(detail::firm_year_draws(cfg, f, t, firms[f]));
  }

  const auto& rg = cfg.regimes;
  const bool allow = cfg.allow_boundary_lambda;
  panel.rows.reserve(cfg.n_analysts * cfg.n_firms * cfg.n_periods);

  for (std::size_t a = 0; a < cfg.n_analysts; ++a) {
    const auto ad = detail::analyst_draws(cfg, a);
    std::vector<detail::AnalystYearDraws> ays;
    for (std::size_t t = 0; t < cfg.n_periods; ++t) ays.push_back(detail::analyst_year_draws(cfg, a, t, ad.busy));

    for (std::size_t f = 0; f < cfg.n_firms; ++f) {
      const bool assigned = detail::pair_vague_assigned(cfg, a, f);
      const double firm_exp0 = std::floor(ad.gen_exp0 * detail::Stream(detail::stream_key(cfg.seed, detail::Tag::Pair, a, f, 1)).uniform());
      const std::size_t first = panel.rows.size();

      for (std::size_t t = 0; t < cfg.n_periods; ++t) {
        const auto d = detail::row_draws(cfg.seed, a, f, t);
        const auto& fy = firm_years[f][t];
        PanelRow r;
        r.analyst = a;
        r.firm = f;
        r.period = t;
        r.year = detail::kBaseYear + static_cast<int>(t);
        const int start = static_cast<int>(t) * detail::kDaysPerPeriod;
        r.date = start + 35 + static_cast<int>(std::floor(d.u_day * 346.0));
        r.ann_date = start + detail::kAnnouncementLag;
        r.price_50 = std::exp(firms[f].log_price + fy.price_drift + 0.03 * d.z_price);

        r.latent_vagueness = rg.vagueness && d.u_vagueness < 0.5;
        r.latent_uncertainty = fy.uncertain;
        r.latent_busyness = ad.busy;
        double scale = 1.0;
        if (r.latent_vagueness) scale *= rg.vague_factor;
        if (r.latent_uncertainty) scale *= rg.uncertainty_factor;
        if (r.latent_busyness) scale *= rg.busy_factor;
        r.vague_assigned = assigned;
        r.sigma_vague_row = assigned ? cfg.sigma_vague * scale : 0.0;
        r.vague_exp = r.sigma_vague_row * d.z_vague;

        const double tt = static_cast<double>(t);
        auto& x = r.covariates;
        x[0] = ad.gen_exp0 + tt;
        x[1] = firm_exp0 + tt;
        x[2] = ad.all_star;
        x[3] = ays[t].lfr;
        x[4] = ays[t].nfirm;
        x[5] = std::max(1.0, std::round(4.0 + 1.5 * d.z_nfore));
        x[6] = ad.bh_size;
        x[7] = ad.bh_ib;
        x[8] = fy.size;
        x[9] = fy.bm;
        x[10] = fy.io;
        x[11] = fy.nana;
        x[12] = fy.nfore;
        x[13] = 0.05 * d.z_prior_car;
        r.firm_vol = fy.firm_vol;

        r.bias = predictable_bias(r.covariates, cfg.bias_coeffs);
        r.eta = cfg.sigma_eta * d.z_eta;
        r.eps = cfg.sigma_eps * d.z_eps;
        if (t == 0) {
          r.precise_exp = cfg.sigma_precise * d.z_precise;
          r.forecast = make_forecast(r.precise_exp, r.covariates, cfg, r.eta);
        } else {
          const PanelRow& prev = panel.rows.back();
          r.forecast = update_forecast(prev.vague_exp, prev.forecast, cfg.lambda, allow);
          r.precise_exp = r.forecast - r.bias - r.eta;
        }
        r.actual = realize_state(r.precise_exp, r.vague_exp, r.eps);

        r.tone = emit_tone(r.vague_exp, cfg.tone_noise, d.z_tone);
        std::tie(r.pos_pct, r.neg_pct) = tone_shares(r.tone);
        const double v = r.latent_vagueness ? 1.0 : 0.0;
        r.text_only_pct = std::clamp(0.52 + 0.12 * v + 0.06 * d.z_text_only, 0.0, 1.0);
        r.hedge_pct = std::clamp(0.33 + 0.10 * v + 0.06 * d.z_hedge, 0.0, 1.0);
        panel.rows.push_back(r);
      }
      for (std::size_t i = first; i + 1 < panel.rows.size(); ++i)
        panel.rows[i].next_forecast = panel.rows[i + 1].forecast;
    }
  }
  return panel;
}

/// Largest |dF_{t+1} - [lambda v_t - lambda v_{t-1} + (1 - lambda) dF_t]| over
/// rows that have both a previous and a next forecast.
inline double revision_identity_residual(const Panel& p) {
  const double lam = p.config.lambda;
  double worst = 0.0;
  for (std::size_t i = 1; i < p.rows.size(); ++i) {
    const auto& prev = p.rows[i - 1];
    const auto& r = p.rows[i];
    if (r.period == 0 || !r.has_next()) continue;
    const double lhs = r.next_forecast - r.forecast;
    const double rhs = lam * r.vague_exp - lam * prev.vague_exp + (1.0 - lam) * (r.forecast - prev.forecast);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

inline double decomposition_identity_residual(const Panel& p) {
  double worst = 0.0;
  for (const auto& r : p.rows) worst = std::max(worst, std::abs(decomposition_residual(r)));
  return worst;
}

// ---------------------------------------------------------------------------
// Config files: "key = value" lines, '#' starts a comment.

namespace detail {

inline std::string trim_copy(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw DomainError(key + ": expected a number, got \"" + v + "\"");
  return x;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw DomainError(key + ": expected a non-negative integer, got \"" + v + "\"");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw DomainError(key + ": integer out of range: " + v);
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw DomainError(key + ": expected true/false, got \"" + v + "\"");
}

}  // namespace detail

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "n_firms",    "n_analysts",   "n_periods",  "sigma_precise",        "sigma_vague",
      "sigma_eps",  "sigma_eta",    "lambda",     "bias_coeffs",          "tone_noise",
      "vague_share", "seed",        "regime_vagueness", "regime_uncertainty", "regime_busyness",
      "vague_factor", "uncertainty_factor", "busy_factor"};
  return keys;
}

/// Applies one setting. Returns false for an unknown key.
inline bool apply_setting(SimulationConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "n_firms") cfg.n_firms = parse_count(key, value);
  else if (key == "n_analysts") cfg.n_analysts = parse_count(key, value);
  else if (key == "n_periods") cfg.n_periods = parse_count(key, value);
  else if (key == "sigma_precise") cfg.sigma_precise = parse_real(key, value);
  else if (key == "sigma_vague") cfg.sigma_vague = parse_real(key, value);
  else if (key == "sigma_eps") cfg.sigma_eps = parse_real(key, value);
  else if (key == "sigma_eta") cfg.sigma_eta = parse_real(key, value);
  else if (key == "lambda") cfg.lambda = parse_real(key, value);
  else if (key == "tone_noise") cfg.tone_noise = parse_real(key, value);
  else if (key == "vague_share") cfg.vague_share = parse_real(key, value);
  else if (key == "seed") cfg.seed = parse_count(key, value);
  else if (key == "regime_vagueness") cfg.regimes.vagueness = parse_bool(key, value);
  else if (key == "regime_uncertainty") cfg.regimes.uncertainty = parse_bool(key, value);
  else if (key == "regime_busyness") cfg.regimes.busyness = parse_bool(key, value);
  else if (key == "vague_factor") cfg.regimes.vague_factor = parse_real(key, value);
  else if (key == "uncertainty_factor") cfg.regimes.uncertainty_factor = parse_real(key, value);
  else if (key == "busy_factor") cfg.regimes.busy_factor = parse_real(key, value);
  else if (key == "bias_coeffs") {
    std::vector<double> c;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) c.push_back(parse_real(key, trim_copy(item)));
    cfg.bias_coeffs = std::move(c);
  } else {
    return false;
  }
  return true;
}

/// Reads a config file on top of `base`. Every unknown key is reported in a
/// single ParseError.
inline SimulationConfig read_config(std::istream& in, SimulationConfig base = {}) {
  std::string line, unknown;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim_copy(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    std::string key = detail::trim_copy(line.substr(0, eq));
    std::string value = detail::trim_copy(line.substr(eq + 1));
    try {
      if (!apply_setting(base, key, value))
        unknown += (unknown.empty() ? "" : ", ") + key + " (line " + std::to_string(lineno) + ")";
    } catch (const DomainError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!unknown.empty()) throw ParseError("unknown config keys: " + unknown, 0);
  base.validate();
  return base;
}

namespace detail {

/// Shortest text that reads back to the same double.
inline std::string fmt_real(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace detail

inline std::string config_to_string(const SimulationConfig& cfg) {
  using detail::fmt_real;
  std::ostringstream o;
  std::string coeffs;
  for (std::size_t i = 0; i < cfg.bias_coeffs.size(); ++i) coeffs += (i ? "," : "") + fmt_real(cfg.bias_coeffs[i]);
  o << "n_firms = " << cfg.n_firms << "\n"
    << "n_analysts = " << cfg.n_analysts << "\n"
    << "n_periods = " << cfg.n_periods << "\n"
    << "sigma_precise = " << fmt_real(cfg.sigma_precise) << "\n"
    << "sigma_vague = " << fmt_real(cfg.sigma_vague) << "\n"
    << "sigma_eps = " << fmt_real(cfg.sigma_eps) << "\n"
    << "sigma_eta = " << fmt_real(cfg.sigma_eta) << "\n"
    << "lambda = " << fmt_real(cfg.lambda) << "\n"
    << "bias_coeffs = " << coeffs << "\n"
    << "tone_noise = " << fmt_real(cfg.tone_noise) << "\n"
    << "vague_share = " << fmt_real(cfg.vague_share) << "\n"
    << "seed = " << cfg.seed << "\n"
    << "regime_vagueness = " << (cfg.regimes.vagueness ? "true" : "false") << "\n"
    << "regime_uncertainty = " << (cfg.regimes.uncertainty ? "true" : "false") << "\n"
    << "regime_busyness = " << (cfg.regimes.busyness ? "true" : "false") << "\n"
    << "vague_factor = " << fmt_real(cfg.regimes.vague_factor) << "\n"
    << "uncertainty_factor = " << fmt_real(cfg.regimes.uncertainty_factor) << "\n"
    << "busy_factor = " << fmt_real(cfg.regimes.busy_factor) << "\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// CSV output. Reals are printed in shortest round-trip form.

inline std::string panel_header() {
  std::string h =
      "analyst_id,firm_id,period,year,date,ann_date,price_50,forecast,actual,tone,pos_pct,neg_pct,"
      "text_only_pct,hedge_pct,firm_vol";
  for (auto n : kCovariateNames) h += "," + std::string(n);
  return h;
}

inline void write_panel_csv(std::ostream& out, const Panel& p) {
  using detail::fmt_real;
  out << panel_header() << "\n";
  for (const auto& r : p.rows) {
    out << r.analyst << ',' << r.firm << ',' << r.period << ',' << r.year << ',' << r.date << ',' << r.ann_date << ','
        << fmt_real(r.price_50) << ',' << fmt_real(r.forecast) << ',' << fmt_real(r.actual) << ',' << fmt_real(r.tone)
        << ',' << fmt_real(r.pos_pct) << ',' << fmt_real(r.neg_pct) << ',' << fmt_real(r.text_only_pct) << ','
        << fmt_real(r.hedge_pct) << ',' << fmt_real(r.firm_vol);
    for (double x : r.covariates) out << ',' << fmt_real(x);
    out << "\n";
  }
}

inline std::string audit_header() {
  return "analyst_id,firm_id,period,precise_exp,vague_exp,bias,eta,eps,sigma_vague_row,vague_assigned,"
         "latent_vagueness,latent_uncertainty,latent_busyness";
}

inline void write_audit_csv(std::ostream& out, const Panel& p) {
  using detail::fmt_real;
  out << audit_header() << "\n";
  for (const auto& r : p.rows)
    out << r.analyst << ',' << r.firm << ',' << r.period << ',' << fmt_real(r.precise_exp) << ','
        << fmt_real(r.vague_exp) << ',' << fmt_real(r.bias) << ',' << fmt_real(r.eta) << ',' << fmt_real(r.eps) << ','
        << fmt_real(r.sigma_vague_row) << ',' << r.vague_assigned << ',' << r.latent_vagueness << ','
        << r.latent_uncertainty << ',' << r.latent_busyness << "\n";
}

}  // namespace vaguekit::sim
