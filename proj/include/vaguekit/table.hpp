#pragma once

// Column-oriented table with CSV I/O. A column is numeric when every
// non-empty cell parses as a number; empty cells read as NaN. Anything else
// is a text column, usable as a grouping key but not as a regressor.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <deque>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vaguekit/error.hpp"

namespace vaguekit {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Column {
  std::string name;
  bool text = false;
  std::vector<double> num;
  std::vector<std::string> str;

  std::size_t size() const { return text ? str.size() : num.size(); }
};

namespace csv {

inline std::vector<std::string> split_line(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += '"', ++i;
      else if (c == '"') quoted = false;
      else cur += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote", lineno);
  out.push_back(std::move(cur));
  return out;
}

inline bool parse_number(std::string_view s, double& out) {
  if (s.empty()) {
    out = kNaN;
    return true;
  }
  if (s == "NA" || s == "nan" || s == "NaN") {
    out = kNaN;
    return true;
  }
  const char* first = s.data();
  const char* last = first + s.size();
  if (first != last && *first == '+') ++first;
  auto r = std::from_chars(first, last, out);
  return r.ec == std::errc() && r.ptr == last;
}

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string format_real(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace csv

class Table {
 public:
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }

  bool has(const std::string& name) const { return index_.count(name) > 0; }

  const Column& column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw StructuralError("unknown column \"" + name + "\"");
    return columns_[it->second];
  }

  const std::vector<double>& num(const std::string& name) const {
    const Column& c = column(name);
    if (c.text) throw StructuralError("column \"" + name + "\" is not numeric");
    return c.num;
  }

  /// Adds or replaces a numeric column.
  void set(const std::string& name, std::vector<double> values) {
    check_length(name, values.size());
    Column c{name, false, std::move(values), {}};
    put(std::move(c));
  }

  void set_text(const std::string& name, std::vector<std::string> values) {
    check_length(name, values.size());
    Column c{name, true, {}, std::move(values)};
    put(std::move(c));
  }

  /// Cell as text, for keys and output.
  std::string cell(const std::string& name, std::size_t row) const {
    const Column& c = column(name);
    return c.text ? c.str[row] : csv::format_real(c.num[row]);
  }

  Table select(const std::vector<std::size_t>& keep) const {
    Table t;
    t.rows_ = keep.size();
    for (const auto& c : columns_) {
      Column n{c.name, c.text, {}, {}};
      if (c.text)
        for (auto i : keep) n.str.push_back(c.str[i]);
      else
        for (auto i : keep) n.num.push_back(c.num[i]);
      t.put(std::move(n));
    }
    return t;
  }

 private:
  void check_length(const std::string& name, std::size_t n) {
    if (columns_.empty() || (columns_.size() == 1 && columns_[0].name == name)) {
      rows_ = n;
      return;
    }
    if (n != rows_)
      throw StructuralError("column \"" + name + "\" has " + std::to_string(n) + " rows, table has " +
                            std::to_string(rows_));
  }

  void put(Column c) {
    auto it = index_.find(c.name);
    if (it != index_.end()) {
      columns_[it->second] = std::move(c);
    } else {
      index_[c.name] = columns_.size();
      columns_.push_back(std::move(c));
    }
  }

  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t rows_ = 0;
};

/// Lines starting with '#' are comments. The first other line is the header.
inline Table read_csv(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> nums;
  std::vector<char> numeric;
  std::vector<std::vector<std::string_view>> views;  // cell text, into `text` or `unquoted`
  std::deque<std::string> unquoted;
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;
    if (line.find('"') == std::string_view::npos) {
      fields.clear();
      std::size_t a = 0;
      while (true) {
        std::size_t c = line.find(',', a);
        fields.emplace_back(line.substr(a, c == std::string_view::npos ? std::string_view::npos : c - a));
        if (c == std::string_view::npos) break;
        a = c + 1;
      }
    } else {
      fields.clear();
      for (auto& f : csv::split_line(std::string(line), lineno)) fields.emplace_back(unquoted.emplace_back(std::move(f)));
    }
    if (header.empty()) {
      header.assign(fields.begin(), fields.end());
      std::map<std::string, int> seen;
      for (const auto& h : header)
        if (seen[h]++) throw ParseError("duplicate column \"" + h + "\"", lineno);
      nums.resize(header.size());
      numeric.assign(header.size(), 1);
      views.resize(header.size());
      continue;
    }
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()),
                       lineno);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v;
      if (numeric[j] && !csv::parse_number(fields[j], v)) numeric[j] = 0;
      if (numeric[j]) nums[j].push_back(v);
      views[j].push_back(fields[j]);
    }
  }
  if (header.empty()) throw ParseError("no header line", lineno);
  Table t;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (numeric[j]) t.set(header[j], std::move(nums[j]));
    else t.set_text(header[j], std::vector<std::string>(views[j].begin(), views[j].end()));
  }
  return t;
}

inline void write_csv(std::ostream& out, const Table& t) {
  const auto& cols = t.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << csv::quote(cols[j].name);
  out << "\n";
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) out << ',';
      out << (cols[j].text ? csv::quote(cols[j].str[i]) : csv::format_real(cols[j].num[i]));
    }
    out << "\n";
  }
}

/// Dense group codes 0..G-1 in order of first appearance. A key expression
/// "a*b" groups by the combination of columns a and b. Rows with a missing
/// key get code -1.
struct GroupCodes {
  std::vector<std::int64_t> code;
  std::size_t groups = 0;
};

inline GroupCodes group_codes(const Table& t, const std::string& expr) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto star = expr.find('*', start);
    parts.push_back(expr.substr(start, star == std::string::npos ? std::string::npos : star - start));
    if (star == std::string::npos) break;
    start = star + 1;
  }
  GroupCodes g;
  g.code.assign(t.rows(), 0);
  std::vector<const Column*> cols;
  for (const auto& p : parts) cols.push_back(&t.column(p));
  std::map<std::vector<std::string>, std::int64_t> text_ids;
  std::map<std::vector<double>, std::int64_t> num_ids;
  const bool all_numeric = std::all_of(cols.begin(), cols.end(), [](const Column* c) { return !c->text; });
  for (std::size_t i = 0; i < t.rows(); ++i) {
    bool missing = false;
    if (all_numeric) {
      std::vector<double> key;
      for (const Column* c : cols) {
        missing |= std::isnan(c->num[i]);
        key.push_back(c->num[i]);
      }
      if (missing) {
        g.code[i] = -1;
        continue;
      }
      auto [it, fresh] = num_ids.emplace(std::move(key), static_cast<std::int64_t>(g.groups));
      g.groups += fresh;
      g.code[i] = it->second;
    } else {
      std::vector<std::string> key;
      for (const Column* c : cols) {
        std::string v = c->text ? c->str[i] : csv::format_real(c->num[i]);
        missing |= v.empty();
        key.push_back(std::move(v));
      }
      if (missing) {
        g.code[i] = -1;
        continue;
      }
      auto [it, fresh] = text_ids.emplace(std::move(key), static_cast<std::int64_t>(g.groups));
      g.groups += fresh;
      g.code[i] = it->second;
    }
  }
  return g;
}

}  // namespace vaguekit
