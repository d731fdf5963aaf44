#pragma once

// JSONL report corpus, one report per line:
//   {"report_id": "r1", "analyst_id": "a1", "firm_id": "f1", "date": "2012-01-20",
//    "sentences": [{"text": "...", "tone_label": 1}, ...]}
// or raw mode with {"report_id": ..., "text": "..."}. Tone labels may be -1/0/1
// or "negative"/"neutral"/"positive". Brokerage disclosures are expected to be
// stripped before the text gets here.

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vaguekit/textmetrics.hpp"

namespace vaguekit::text {

struct Report {
  std::string report_id;
  std::string analyst_id;
  std::string firm_id;
  std::string date;
  std::vector<Sentence> sentences;
  std::vector<std::optional<ToneClass>> labels;  ///< parallel to sentences
  bool raw = false;                              ///< segmented from "text"

  bool fully_labelled() const {
    return !labels.empty() && std::all_of(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); });
  }
};

enum class LabelMode { External, Naive };

inline std::optional<ToneClass> parse_tone_label(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_number_integer()) {
    int v = j.get<int>();
    if (v < -1 || v > 1) throw DomainError("tone_label must be -1, 0 or 1");
    return static_cast<ToneClass>(v);
  }
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "positive") return ToneClass::Positive;
    if (s == "neutral") return ToneClass::Neutral;
    if (s == "negative") return ToneClass::Negative;
  }
  throw DomainError("unrecognized tone_label " + j.dump());
}

inline std::string json_id(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return {};
  return j[key].is_string() ? j[key].get<std::string>() : j[key].dump();
}

inline Report parse_report(const std::string& line, std::size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
  }
  if (!j.is_object()) throw ParseError("report must be a JSON object", lineno);
  Report r;
  r.report_id = json_id(j, "report_id");
  if (r.report_id.empty()) throw ParseError("missing report_id", lineno);
  r.analyst_id = json_id(j, "analyst_id");
  r.firm_id = json_id(j, "firm_id");
  r.date = json_id(j, "date");
  try {
    if (j.contains("sentences")) {
      if (!j["sentences"].is_array()) throw ParseError("\"sentences\" must be an array", lineno);
      for (const auto& s : j["sentences"]) {
        std::string text = s.is_string() ? s.get<std::string>() : s.value("text", std::string{});
        if (detail::trim(text).empty()) throw ParseError("empty sentence in report " + r.report_id, lineno);
        r.sentences.push_back({detail::trim(text), r.sentences.size()});
        r.labels.push_back(s.is_object() && s.contains("tone_label") ? parse_tone_label(s["tone_label"])
                                                                     : std::nullopt);
      }
    } else if (j.contains("text")) {
      r.raw = true;
      r.sentences = segment_sentences(j["text"].get<std::string>());
      r.labels.assign(r.sentences.size(), std::nullopt);
    } else {
      throw ParseError("report " + r.report_id + " has neither \"sentences\" nor \"text\"", lineno);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), lineno);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), lineno);
  }
  if (r.sentences.empty()) throw ParseError("report " + r.report_id + " has no sentences", lineno);
  return r;
}

/// Reads every non-blank line. Throws ParseError carrying the line number of
/// the first malformed report.
inline std::vector<Report> read_corpus(std::istream& in) {
  std::vector<Report> reports;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    reports.push_back(parse_report(line, lineno));
  }
  return reports;
}

struct AnalyzedReport {
  const Report* report;
  ReportMetrics metrics;
  bool naive_fallback;  ///< labels came from naive_tone
};

inline AnalyzedReport analyze_report(const Report& r, const Lexicon& lex, LabelMode mode) {
  std::vector<ToneClass> labels;
  const bool use_external = mode == LabelMode::External && r.fully_labelled();
  for (std::size_t i = 0; i < r.sentences.size(); ++i)
    labels.push_back(use_external ? *r.labels[i] : naive_tone(r.sentences[i]));
  return {&r, report_metrics(r.sentences, labels, lex), !use_external};
}

}  // namespace vaguekit::text
