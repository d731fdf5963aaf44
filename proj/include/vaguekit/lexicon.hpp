#pragma once

// Hedging-word lexicon.
//
// Entries are written in lemmatized form with two shorthand notations:
//   "approximate(ly)"   -> approximate, approximately   (probable(ly) -> probably)
//   "in my/our view"    -> in my view, in our view       (alternatives per token)
// At build time every entry is also expanded to an explicit inflection set
// (think -> thinks, thinking, thought). Matching is then a plain, case-folded
// token-sequence lookup with no stemming at run time.

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vaguekit/error.hpp"

namespace vaguekit::text {

enum class HedgeCategory { SubjectiveBelief, VagueProbability, VagueQuantity, VagueExtent, VagueManner };

inline constexpr std::array<HedgeCategory, 5> kHedgeCategories = {
    HedgeCategory::SubjectiveBelief, HedgeCategory::VagueProbability, HedgeCategory::VagueQuantity,
    HedgeCategory::VagueExtent, HedgeCategory::VagueManner};

inline std::string_view to_string(HedgeCategory c) {
  switch (c) {
    case HedgeCategory::SubjectiveBelief: return "subjective_belief";
    case HedgeCategory::VagueProbability: return "vague_probability";
    case HedgeCategory::VagueQuantity: return "vague_quantity";
    case HedgeCategory::VagueExtent: return "vague_extent";
    case HedgeCategory::VagueManner: return "vague_manner";
  }
  return "?";
}

inline std::optional<HedgeCategory> parse_category(std::string_view s) {
  for (auto c : kHedgeCategories)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

using TokenSeq = std::vector<std::string>;

// Lower-cased word tokens. Letters, digits and in-word apostrophes form a token;
// everything else separates. The UTF-8 right single quote is read as '.
inline TokenSeq tokenize_words(std::string_view s) {
  TokenSeq out;
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && cur.back() == '\'') cur.pop_back();
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == 0xE2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(s[i + 2]) == 0x99 || static_cast<unsigned char>(s[i + 2]) == 0x98)) {
      c = '\'';
      i += 2;
    }
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '\'' && !cur.empty()) {
      cur.push_back('\'');
    } else {
      flush();
    }
  }
  flush();
  return out;
}

namespace detail {

// Inflected forms for the lemmas of the default list. Keys are lemmas, values
// exclude the lemma itself.
inline const std::map<std::string, std::vector<std::string>>& inflections() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"think", {"thinks", "thinking", "thought"}},
      {"believe", {"believes", "believed", "believing"}},
      {"feel", {"feels", "felt", "feeling"}},
      {"sense", {"senses", "sensed", "sensing"}},
      {"suppose", {"supposes", "supposed", "supposing"}},
      {"suggest", {"suggests", "suggested", "suggesting"}},
      {"argue", {"argues", "argued", "arguing"}},
      {"seem", {"seems", "seemed", "seeming"}},
      {"appear", {"appears", "appeared", "appearing"}},
      {"sound", {"sounds", "sounded", "sounding"}},
      {"look", {"looks", "looked", "looking"}},
      {"tend", {"tends", "tended", "tending"}},
      {"few", {"fewer", "fewest"}},
      {"bit", {"bits"}},
      {"lot", {"lots"}},
      {"mass", {"masses"}},
      {"number", {"numbers"}},
      {"couple", {"couples"}},
      {"portion", {"portions"}},
      {"minority", {"minorities"}},
      {"majority", {"majorities"}},
  };
  return table;
}

inline std::string adverb_of(const std::string& base) {
  // probable -> probably, possible -> possibly; otherwise append "ly".
  if (base.size() > 2 && base.ends_with("le")) return base.substr(0, base.size() - 1) + "y";
  return base + "ly";
}

inline std::string normalize_pattern(std::string_view p) {
  std::string out;
  bool space = false;
  for (char c : p) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Alternatives for one written token of a pattern.
inline std::vector<std::string> token_alternatives(const std::string& tok) {
  std::vector<std::string> alts;
  std::stringstream ss(tok);
  std::string part;
  while (std::getline(ss, part, '/')) {
    if (part.empty()) continue;
    auto paren = part.find('(');
    if (paren != std::string::npos && part.ends_with(")")) {
      std::string base = part.substr(0, paren);
      std::string suffix = part.substr(paren + 1, part.size() - paren - 2);
      alts.push_back(base);
      alts.push_back(suffix == "ly" ? adverb_of(base) : base + suffix);
    } else {
      alts.push_back(part);
    }
  }
  return alts;
}

}  // namespace detail

/// Every concrete token sequence a written pattern stands for.
inline std::vector<TokenSeq> expand_pattern(std::string_view pattern) {
  std::vector<std::vector<std::string>> slots;
  std::stringstream ss{detail::normalize_pattern(pattern)};
  std::string tok;
  while (ss >> tok) slots.push_back(detail::token_alternatives(tok));
  if (slots.empty()) return {};

  std::vector<TokenSeq> out{{}};
  for (const auto& alts : slots) {
    std::vector<TokenSeq> next;
    for (const auto& prefix : out)
      for (const auto& a : alts) {
        // Alternatives may themselves hold several words ("as far as I/we").
        TokenSeq seq = prefix;
        for (auto& w : tokenize_words(a)) seq.push_back(w);
        next.push_back(std::move(seq));
      }
    out = std::move(next);
  }
  // Inflect the head word.
  std::vector<TokenSeq> inflected;
  for (const auto& seq : out) {
    inflected.push_back(seq);
    auto it = detail::inflections().find(seq.front());
    if (it != detail::inflections().end())
      for (const auto& form : it->second) {
        TokenSeq v = seq;
        v.front() = form;
        inflected.push_back(std::move(v));
      }
  }
  std::sort(inflected.begin(), inflected.end());
  inflected.erase(std::unique(inflected.begin(), inflected.end()), inflected.end());
  return inflected;
}

struct LexiconEntry {
  HedgeCategory category;
  std::string pattern;             ///< as written, normalized
  std::vector<TokenSeq> variants;  ///< expanded token sequences
};

class Lexicon {
 public:
  /// Adds an entry; returns false (and changes nothing) if the normalized
  /// pattern is already present.
  bool add(HedgeCategory category, std::string_view pattern) {
    std::string norm = detail::normalize_pattern(pattern);
    if (norm.empty()) throw DomainError("empty lexicon pattern");
    if (index_.count(norm)) return false;
    LexiconEntry e{category, norm, expand_pattern(norm)};
    index_.emplace(norm, entries_.size());
    for (std::size_t v = 0; v < e.variants.size(); ++v)
      by_head_[e.variants[v].front()].push_back({entries_.size(), v});
    entries_.push_back(std::move(e));
    return true;
  }

  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool contains(std::string_view pattern) const { return index_.count(detail::normalize_pattern(pattern)) > 0; }
  const LexiconEntry* find(std::string_view pattern) const {
    auto it = index_.find(detail::normalize_pattern(pattern));
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  /// First entry with a variant occurring as a contiguous token run, if any.
  const LexiconEntry* match(const TokenSeq& tokens) const {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto it = by_head_.find(tokens[i]);
      if (it == by_head_.end()) continue;
      for (auto [entry, variant] : it->second) {
        const TokenSeq& v = entries_[entry].variants[variant];
        if (i + v.size() <= tokens.size() && std::equal(v.begin(), v.end(), tokens.begin() + i))
          return &entries_[entry];
      }
    }
    return nullptr;
  }

  /// `category<TAB>pattern` lines, in insertion order.
  std::string to_tsv() const {
    std::string out;
    for (const auto& e : entries_) {
      out += to_string(e.category);
      out += '\t';
      out += e.pattern;
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> by_head_;
};

struct LexiconLoad {
  Lexicon lexicon;
  std::vector<std::string> warnings;
};

/// Parses `category<TAB>pattern` lines; '#' starts a comment line, blank
/// lines are skipped. Duplicates are dropped with a warning.
inline LexiconLoad load_lexicon(std::istream& in) {
  LexiconLoad out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected category<TAB>pattern", lineno);
    std::string cat = line.substr(0, tab);
    while (!cat.empty() && std::isspace(static_cast<unsigned char>(cat.back()))) cat.pop_back();
    cat.erase(0, cat.find_first_not_of(" \t"));
    auto category = parse_category(cat);
    if (!category) throw ParseError("unknown hedge category '" + cat + "'", lineno);
    std::string pattern = line.substr(tab + 1);
    if (detail::normalize_pattern(pattern).empty()) throw ParseError("empty pattern", lineno);
    if (!out.lexicon.add(*category, pattern))
      out.warnings.push_back("line " + std::to_string(lineno) + ": duplicate entry '" +
                             detail::normalize_pattern(pattern) + "' ignored");
  }
  return out;
}

/// The analyst-report hedging wordlist, in lemmatized notation.
inline const std::vector<std::pair<HedgeCategory, std::string_view>>& default_lexicon_entries() {
  using C = HedgeCategory;
  static const std::vector<std::pair<HedgeCategory, std::string_view>> entries = {
      // subjective beliefs
      {C::SubjectiveBelief, "think"}, {C::SubjectiveBelief, "believe"}, {C::SubjectiveBelief, "feel"},
      {C::SubjectiveBelief, "sense"}, {C::SubjectiveBelief, "suppose"}, {C::SubjectiveBelief, "suggest"},
      {C::SubjectiveBelief, "argue"}, {C::SubjectiveBelief, "in my/our view"},
      {C::SubjectiveBelief, "from my/our perspective"}, {C::SubjectiveBelief, "as far as I/we can tell"},
      {C::SubjectiveBelief, "to the best of my/our knowledge"},
      // vague probability
      {C::VagueProbability, "seem"}, {C::VagueProbability, "appear"}, {C::VagueProbability, "apparent"},
      {C::VagueProbability, "sound"}, {C::VagueProbability, "look like"}, {C::VagueProbability, "may"},
      {C::VagueProbability, "might"}, {C::VagueProbability, "could"}, {C::VagueProbability, "would"},
      {C::VagueProbability, "should"}, {C::VagueProbability, "maybe"}, {C::VagueProbability, "perhaps"},
      {C::VagueProbability, "unlikely"}, {C::VagueProbability, "improbable(ly)"},
      {C::VagueProbability, "potentially"}, {C::VagueProbability, "possible(ly)"},
      {C::VagueProbability, "likely"}, {C::VagueProbability, "probable(ly)"},
      {C::VagueProbability, "conceivable(ly)"}, {C::VagueProbability, "presumably"},
      // vague quantity, time and frequency
      {C::VagueQuantity, "around"}, {C::VagueQuantity, "approximate(ly)"}, {C::VagueQuantity, "roughly"},
      {C::VagueQuantity, "few"}, {C::VagueQuantity, "bit"}, {C::VagueQuantity, "little"},
      {C::VagueQuantity, "less"}, {C::VagueQuantity, "minority"}, {C::VagueQuantity, "some"},
      {C::VagueQuantity, "several"}, {C::VagueQuantity, "number of"}, {C::VagueQuantity, "couple of"},
      {C::VagueQuantity, "numerous"}, {C::VagueQuantity, "portion of"}, {C::VagueQuantity, "lot"},
      {C::VagueQuantity, "mass"}, {C::VagueQuantity, "many"}, {C::VagueQuantity, "plenty"},
      {C::VagueQuantity, "much"}, {C::VagueQuantity, "more"}, {C::VagueQuantity, "majority"},
      {C::VagueQuantity, "most of"}, {C::VagueQuantity, "sometime"}, {C::VagueQuantity, "earlier"},
      {C::VagueQuantity, "recent(ly)"}, {C::VagueQuantity, "soon"}, {C::VagueQuantity, "later"},
      {C::VagueQuantity, "seldom"}, {C::VagueQuantity, "sometimes"}, {C::VagueQuantity, "occasionally"},
      {C::VagueQuantity, "often"},
      // vague extent
      {C::VagueExtent, "sort of"}, {C::VagueExtent, "kind of"}, {C::VagueExtent, "more or less"},
      {C::VagueExtent, "slight(ly)"}, {C::VagueExtent, "fairly"}, {C::VagueExtent, "pretty"},
      {C::VagueExtent, "relatively"}, {C::VagueExtent, "mostly"}, {C::VagueExtent, "largely"},
      {C::VagueExtent, "principally"}, {C::VagueExtent, "mainly"}, {C::VagueExtent, "predominantly"},
      {C::VagueExtent, "almost"}, {C::VagueExtent, "nearly"}, {C::VagueExtent, "practically"},
      {C::VagueExtent, "virtually"}, {C::VagueExtent, "nominally"}, {C::VagueExtent, "not entirely"},
      {C::VagueExtent, "close to"}, {C::VagueExtent, "as it were"}, {C::VagueExtent, "so to say/speak"},
      {C::VagueExtent, "in a manner of speaking"}, {C::VagueExtent, "somewhat"},
      {C::VagueExtent, "to some degree/extent"}, {C::VagueExtent, "to a certain degree/extent"},
      {C::VagueExtent, "to a large degree/extent"},
      // vague manner
      {C::VagueManner, "typical(ly)"}, {C::VagueManner, "usually"}, {C::VagueManner, "in essential"},
      {C::VagueManner, "essentially"}, {C::VagueManner, "in general"}, {C::VagueManner, "generally"},
      {C::VagueManner, "basically"}, {C::VagueManner, "as a rule"}, {C::VagueManner, "tend to"},
      {C::VagueManner, "apt to"}, {C::VagueManner, "prone to"}, {C::VagueManner, "something"},
      {C::VagueManner, "someone"}, {C::VagueManner, "somebody"}, {C::VagueManner, "somewhere"},
      {C::VagueManner, "someplace"}, {C::VagueManner, "somehow"}, {C::VagueManner, "someway"},
      {C::VagueManner, "in some/most cases"}, {C::VagueManner, "in a/one sense"},
      {C::VagueManner, "in a/one way"},
  };
  return entries;
}

inline const Lexicon& default_lexicon() {
  static const Lexicon lex = [] {
    Lexicon l;
    for (const auto& [cat, pattern] : default_lexicon_entries()) l.add(cat, pattern);
    return l;
  }();
  return lex;
}

}  // namespace vaguekit::text
