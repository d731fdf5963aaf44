#pragma once

// Report-level text measures: Tone, TextOnly%, Hedge%, Pos%, Neg%.

#include <algorithm>
#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "vaguekit/error.hpp"
#include "vaguekit/lexicon.hpp"
#include "vaguekit/roughset.hpp"

namespace vaguekit::text {

using rough::ToneClass;

struct Sentence {
  std::string text;
  std::size_t index = 0;
};

struct ReportMetrics {
  std::size_t n_sentences = 0;
  double tone = 0.0;  ///< pos_pct - neg_pct
  double pos_pct = 0.0;
  double neg_pct = 0.0;
  double text_only_pct = 0.0;
  double hedge_pct = 0.0;
};

namespace detail {

inline const std::unordered_set<std::string>& abbreviations() {
  // Compared against the word immediately before a '.', case-sensitively.
  static const std::unordered_set<std::string> set = {
      "Inc", "Corp", "Co", "Ltd", "LLC", "Bros", "vs", "Mr", "Mrs", "Ms", "Dr", "Prof", "St", "Jr", "Sr",
      "No", "e.g", "i.e", "U.S", "U.K", "Q1", "Q2", "Q3", "Q4", "Jan", "Feb", "Mar", "Apr", "Jun", "Jul",
      "Aug", "Sep", "Sept", "Oct", "Nov", "Dec", "approx", "est", "Fig", "cf"};
  return set;
}

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

// The word ending right before position `dot`, without leading brackets/quotes.
inline std::string word_before(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(text[b - 1])) --b;
  std::string w(text.substr(b, dot - b));
  std::size_t lead = 0;
  while (lead < w.size() && (w[lead] == '(' || w[lead] == '"' || w[lead] == '\'' || w[lead] == '[')) ++lead;
  return w.substr(lead);
}

}  // namespace detail

/// Splits on '.', '!' and '?' followed by whitespace or end of text. A period
/// after a listed abbreviation ("Inc.", "U.S.", "Q1.") is not a boundary;
/// decimals never are, since the period is followed by a digit.
inline std::vector<Sentence> segment_sentences(std::string_view text) {
  if (detail::trim(text).empty()) throw EmptyReport("report text is empty");
  std::vector<Sentence> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string s = detail::trim(text.substr(start, end - start));
    if (!s.empty()) out.push_back({std::move(s), out.size()});
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?' || text[j] == '"' ||
                               text[j] == '\'' || text[j] == ')'))
      ++j;
    if (j < text.size() && !detail::is_space(text[j])) {
      i = j - 1;
      continue;
    }
    if (c == '.' && detail::abbreviations().count(detail::word_before(text, i))) {
      i = j - 1;
      continue;
    }
    emit(j);
    i = j - 1;
  }
  emit(text.size());
  return out;
}

/// Contains a '$' or '%' sign. Bare digits do not count.
inline bool has_numeric(const Sentence& s) {
  return s.text.find_first_of("$%") != std::string::npos;
}

inline bool is_text_only(const Sentence& s) { return !has_numeric(s); }

inline bool has_hedge(const Sentence& s, const Lexicon& lex) { return lex.match(tokenize_words(s.text)) != nullptr; }

inline const LexiconEntry* first_hedge(const Sentence& s, const Lexicon& lex) {
  return lex.match(tokenize_words(s.text));
}

namespace detail {

inline const std::unordered_set<std::string>& positive_words() {
  static const std::unordered_set<std::string> words = {
      "strong", "stronger", "strength", "growth", "grow", "grows", "grew", "growing", "improve", "improved",
      "improves", "improving", "improvement", "gain", "gains", "beat", "beats", "exceed", "exceeded", "exceeds",
      "upside", "outperform", "outperformed", "positive", "robust", "solid", "accelerate", "accelerating",
      "accelerated", "rise", "rises", "rose", "increase", "increased", "increases", "higher", "record",
      "opportunity", "opportunities", "favorable", "upgrade", "upgraded", "profitable", "benefit", "benefits",
      "momentum", "confidence", "confident", "success", "successful", "attractive", "raise", "raised",
      "healthy", "expand", "expanded", "expansion", "recovery", "rebound", "win", "wins", "innovation"};
  return words;
}

inline const std::unordered_set<std::string>& negative_words() {
  static const std::unordered_set<std::string> words = {
      "weak", "weaker", "weakness", "decline", "declined", "declines", "declining", "fall", "falls", "fell",
      "falling", "short", "shortfall", "miss", "missed", "misses", "loss", "losses", "lower", "lowered",
      "downside", "risk", "risks", "pressure", "pressures", "headwind", "headwinds", "concern", "concerns",
      "negative", "underperform", "downgrade", "downgraded", "slow", "slower", "slowdown", "slowing",
      "deteriorate", "deteriorating", "deterioration", "challenging", "difficult", "disappointing",
      "disappointed", "caution", "cautious", "drop", "dropped", "worse", "worsening", "impairment",
      "litigation", "layoffs", "contraction", "erosion"};
  return words;
}

}  // namespace detail

/// Word-count polarity: sign of (positive hits - negative hits). Fallback for
/// reports that arrive without external sentence labels.
inline ToneClass naive_tone(const Sentence& s) {
  int score = 0;
  for (const auto& w : tokenize_words(s.text)) {
    if (detail::positive_words().count(w)) ++score;
    if (detail::negative_words().count(w)) --score;
  }
  return score > 0 ? ToneClass::Positive : score < 0 ? ToneClass::Negative : ToneClass::Neutral;
}

inline ReportMetrics report_metrics(std::span<const Sentence> sentences, std::span<const ToneClass> labels,
                                    const Lexicon& lex) {
  if (sentences.size() != labels.size())
    throw StructuralError("got " + std::to_string(labels.size()) + " tone labels for " +
                          std::to_string(sentences.size()) + " sentences");
  if (sentences.empty()) throw EmptyReport("report has no sentences");

  std::size_t pos = 0, neg = 0, text_only = 0, hedged = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    pos += labels[i] == ToneClass::Positive;
    neg += labels[i] == ToneClass::Negative;
    text_only += is_text_only(sentences[i]);
    hedged += has_hedge(sentences[i], lex);
  }
  const double n = static_cast<double>(sentences.size());
  ReportMetrics m;
  m.n_sentences = sentences.size();
  m.pos_pct = static_cast<double>(pos) / n;
  m.neg_pct = static_cast<double>(neg) / n;
  m.tone = m.pos_pct - m.neg_pct;
  m.text_only_pct = static_cast<double>(text_only) / n;
  m.hedge_pct = static_cast<double>(hedged) / n;
  return m;
}

/// Naive-labelled metrics straight from raw text.
inline ReportMetrics report_metrics(std::string_view text, const Lexicon& lex) {
  auto sentences = segment_sentences(text);
  std::vector<ToneClass> labels;
  labels.reserve(sentences.size());
  for (const auto& s : sentences) labels.push_back(naive_tone(s));
  return report_metrics(sentences, labels, lex);
}

}  // namespace vaguekit::text
