#pragma once

// Header comments stamped on every output file.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "vaguekit/error.hpp"

#ifndef VAGUEKIT_VERSION
#define VAGUEKIT_VERSION "0.0.0"
#endif

namespace vaguekit {

inline constexpr std::string_view kVersion = VAGUEKIT_VERSION;

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Accumulates the digest of everything a run read.
class Provenance {
 public:
  Provenance& seed(std::uint64_t s) {
    seed_ = std::to_string(s);
    return *this;
  }
  Provenance& add(std::string_view label, std::string_view content) {
    digest_ = fnv1a(content, fnv1a(label, digest_));
    return *this;
  }
  std::string digest() const { return hex64(digest_); }

  /// "vaguekit <version> seed=<seed> inputs=<digest>", seed omitted when unset.
  std::string line() const {
    std::string s = "vaguekit " + std::string(kVersion);
    if (!seed_.empty()) s += " seed=" + seed_;
    return s + " inputs=" + digest();
  }
  std::string csv_comment() const { return "# " + line() + "\n"; }
  std::string md_comment() const { return "<!-- " + line() + " -->\n"; }

 private:
  std::uint64_t digest_ = 14695981039346656037ull;
  std::string seed_;
};

}  // namespace vaguekit
