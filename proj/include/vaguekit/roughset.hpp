#pragma once

// Finite-state rough-set algebra.
//
// A StateSpace is an ordered list of labelled states with payoffs. Subsets are
// 64-bit membership masks tied to a shared, immutable StateSpace, so every set
// operation is a couple of bit instructions and exhaustive enumeration over
// small spaces is cheap.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "vaguekit/error.hpp"

namespace vaguekit::rough {

using Mask = std::uint64_t;
inline constexpr std::size_t kMaxStates = 64;
inline constexpr std::size_t kDefaultEnumerationCap = 8;

struct State {
  std::string label;
  double payoff = 0.0;
  bool operator==(const State&) const = default;
};

class StateSpace;
using SpacePtr = std::shared_ptr<const StateSpace>;

class StateSpace {
 public:
  static SpacePtr make(std::vector<State> states) {
    if (states.empty()) throw DomainError("state space must contain at least one state");
    if (states.size() > kMaxStates)
      throw DomainError("state space is limited to " + std::to_string(kMaxStates) + " states");
    std::unordered_set<std::string> seen;
    for (const auto& s : states) {
      if (!std::isfinite(s.payoff)) throw DomainError("payoff of state '" + s.label + "' is not finite");
      if (!seen.insert(s.label).second) throw DomainError("duplicate state label '" + s.label + "'");
    }
    return SpacePtr(new StateSpace(std::move(states)));
  }

  /// States labelled by their payoff as written by `std::to_string`-free formatting
  /// ("-2", "0.5", ...).
  static SpacePtr from_payoffs(const std::vector<double>& payoffs) {
    std::vector<State> states;
    states.reserve(payoffs.size());
    for (double p : payoffs) states.push_back({format_payoff(p), p});
    return make(std::move(states));
  }

  std::size_t size() const noexcept { return states_.size(); }
  const State& state(std::size_t i) const { return states_.at(i); }
  const std::vector<State>& states() const noexcept { return states_; }

  std::optional<std::size_t> index_of(std::string_view label) const {
    for (std::size_t i = 0; i < states_.size(); ++i)
      if (states_[i].label == label) return i;
    return std::nullopt;
  }

  Mask full_mask() const noexcept {
    return size() == kMaxStates ? ~Mask{0} : (Mask{1} << size()) - 1;
  }
  /// States with strictly positive payoff.
  Mask positive_mask() const noexcept { return where([](double p) { return p > 0.0; }); }
  /// States with strictly negative payoff.
  Mask negative_mask() const noexcept { return where([](double p) { return p < 0.0; }); }

  template <class Pred>
  Mask where(Pred pred) const {
    Mask m = 0;
    for (std::size_t i = 0; i < states_.size(); ++i)
      if (pred(states_[i].payoff)) m |= Mask{1} << i;
    return m;
  }

  bool operator==(const StateSpace& other) const { return states_ == other.states_; }

  static std::string format_payoff(double p) {
    if (p == std::floor(p) && std::fabs(p) < 1e15) return std::to_string(static_cast<long long>(p));
    std::string s = std::to_string(p);
    while (!s.empty() && s.back() == '0') s.pop_back();
    return s;
  }

 private:
  explicit StateSpace(std::vector<State> states) : states_(std::move(states)) {}
  std::vector<State> states_;
};

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && *a == *b);
}

inline void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where) {
  if (!same_space(a, b)) throw StructuralError(std::string(where) + ": operands live on different state spaces");
}

class CrispSet {
 public:
  CrispSet(SpacePtr space, Mask mask) : space_(std::move(space)), mask_(mask) {
    if (!space_) throw StructuralError("crisp set needs a state space");
    if (mask_ & ~space_->full_mask()) throw StructuralError("membership mask references states outside the space");
  }

  static CrispSet empty(SpacePtr space) { return CrispSet(std::move(space), 0); }
  static CrispSet full(SpacePtr space) {
    Mask m = space->full_mask();
    return CrispSet(std::move(space), m);
  }
  static CrispSet of_labels(SpacePtr space, const std::vector<std::string>& labels) {
    Mask m = 0;
    for (const auto& l : labels) {
      auto i = space->index_of(l);
      if (!i) throw StructuralError("unknown state label '" + l + "'");
      m |= Mask{1} << *i;
    }
    return CrispSet(std::move(space), m);
  }
  template <class Pred>
  static CrispSet where(SpacePtr space, Pred pred) {
    Mask m = space->where(pred);
    return CrispSet(std::move(space), m);
  }

  const SpacePtr& space() const noexcept { return space_; }
  Mask mask() const noexcept { return mask_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }
  bool is_empty() const noexcept { return mask_ == 0; }
  bool is_full() const noexcept { return mask_ == space_->full_mask(); }
  bool contains(std::size_t i) const noexcept { return i < 64 && ((mask_ >> i) & 1U); }

  bool subset_of(const CrispSet& other) const {
    require_same_space(space_, other.space_, "subset_of");
    return (mask_ & ~other.mask_) == 0;
  }

  CrispSet operator|(const CrispSet& o) const { return combine(o, mask_ | o.mask_); }
  CrispSet operator&(const CrispSet& o) const { return combine(o, mask_ & o.mask_); }
  CrispSet operator-(const CrispSet& o) const { return combine(o, mask_ & ~o.mask_); }
  CrispSet complement() const { return CrispSet(space_, space_->full_mask() & ~mask_); }

  bool operator==(const CrispSet& o) const { return same_space(space_, o.space_) && mask_ == o.mask_; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < space_->size(); ++i)
      if (contains(i)) out.push_back(space_->state(i).label);
    return out;
  }

 private:
  CrispSet combine(const CrispSet& o, Mask m) const {
    require_same_space(space_, o.space_, "set operation");
    return CrispSet(space_, m);
  }

  SpacePtr space_;
  Mask mask_;
};

/// Indiscernibility classes: non-empty, pairwise disjoint blocks covering the space.
class Partition {
 public:
  Partition(SpacePtr space, std::vector<Mask> blocks) : space_(std::move(space)), blocks_(std::move(blocks)) {
    if (!space_) throw StructuralError("partition needs a state space");
    Mask seen = 0;
    for (Mask b : blocks_) {
      if (b == 0) throw StructuralError("partition blocks must be non-empty");
      if (b & ~space_->full_mask()) throw StructuralError("partition block references states outside the space");
      if (b & seen) throw StructuralError("partition blocks overlap");
      seen |= b;
    }
    if (seen != space_->full_mask()) throw StructuralError("partition blocks do not cover the state space");
    std::sort(blocks_.begin(), blocks_.end(), [](Mask a, Mask b) { return std::countr_zero(a) < std::countr_zero(b); });
  }

  static Partition of_labels(SpacePtr space, const std::vector<std::vector<std::string>>& blocks) {
    std::vector<Mask> masks;
    for (const auto& b : blocks) masks.push_back(CrispSet::of_labels(space, b).mask());
    return Partition(std::move(space), std::move(masks));
  }
  /// Every state in its own block; every subset is then definable.
  static Partition discrete(SpacePtr space) {
    std::vector<Mask> masks;
    for (std::size_t i = 0; i < space->size(); ++i) masks.push_back(Mask{1} << i);
    return Partition(std::move(space), std::move(masks));
  }
  /// One block holding the whole space.
  static Partition indiscrete(SpacePtr space) {
    Mask m = space->full_mask();
    return Partition(std::move(space), {m});
  }
  /// Block index per state, e.g. {0,0,1,1} for {{1,2},{3,4}}.
  static Partition from_assignment(SpacePtr space, const std::vector<std::size_t>& block_of) {
    if (block_of.size() != space->size()) throw StructuralError("block assignment length differs from state space size");
    std::size_t n_blocks = 0;
    for (auto b : block_of) n_blocks = std::max(n_blocks, b + 1);
    std::vector<Mask> masks(n_blocks, 0);
    for (std::size_t i = 0; i < block_of.size(); ++i) masks[block_of[i]] |= Mask{1} << i;
    std::erase(masks, Mask{0});
    return Partition(std::move(space), std::move(masks));
  }

  const SpacePtr& space() const noexcept { return space_; }
  const std::vector<Mask>& blocks() const noexcept { return blocks_; }

  /// True when every block of `this` lies inside some block of `coarser`.
  bool refines(const Partition& coarser) const {
    require_same_space(space_, coarser.space_, "refines");
    return std::all_of(blocks_.begin(), blocks_.end(), [&](Mask b) {
      return std::any_of(coarser.blocks_.begin(), coarser.blocks_.end(), [b](Mask c) { return (b & ~c) == 0; });
    });
  }

 private:
  SpacePtr space_;
  std::vector<Mask> blocks_;
};

class RoughSet {
 public:
  /// Requires lower ⊆ upper. Equal approximations are accepted and flagged by
  /// is_crisp_embedding().
  RoughSet(CrispSet lower, CrispSet upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (!lower_.subset_of(upper_)) throw StructuralError("lower approximation must be a subset of the upper approximation");
  }

  static RoughSet crisp(const CrispSet& s) { return RoughSet(s, s); }

  const CrispSet& lower() const noexcept { return lower_; }
  const CrispSet& upper() const noexcept { return upper_; }
  const SpacePtr& space() const noexcept { return lower_.space(); }

  bool is_proper() const noexcept { return lower_.mask() != upper_.mask(); }
  bool is_crisp_embedding() const noexcept { return !is_proper(); }

  bool operator==(const RoughSet&) const = default;

 private:
  CrispSet lower_;
  CrispSet upper_;
};

enum class DefinabilityClass { RoughlyDefinable, ExternallyUndefinable, InternallyUndefinable, TotallyUndefinable };

enum class ToneClass : int { Negative = -1, Neutral = 0, Positive = 1 };

inline std::string_view to_string(DefinabilityClass c) {
  switch (c) {
    case DefinabilityClass::RoughlyDefinable: return "roughly definable";
    case DefinabilityClass::ExternallyUndefinable: return "externally undefinable";
    case DefinabilityClass::InternallyUndefinable: return "internally undefinable";
    case DefinabilityClass::TotallyUndefinable: return "totally undefinable";
  }
  return "?";
}

inline std::string_view to_string(ToneClass t) {
  switch (t) {
    case ToneClass::Positive: return "positive";
    case ToneClass::Neutral: return "neutral";
    case ToneClass::Negative: return "negative";
  }
  return "?";
}

inline RoughSet approximate(const Partition& partition, const CrispSet& target) {
  require_same_space(partition.space(), target.space(), "approximate");
  Mask lower = 0, upper = 0;
  for (Mask b : partition.blocks()) {
    if ((b & ~target.mask()) == 0) lower |= b;
    if (b & target.mask()) upper |= b;
  }
  return RoughSet(CrispSet(target.space(), lower), CrispSet(target.space(), upper));
}

inline CrispSet boundary(const RoughSet& rs) { return rs.upper() - rs.lower(); }

inline DefinabilityClass classify_definability(const RoughSet& rs) {
  const bool lower_empty = rs.lower().is_empty();
  const bool upper_full = rs.upper().is_full();
  if (!lower_empty) return upper_full ? DefinabilityClass::ExternallyUndefinable : DefinabilityClass::RoughlyDefinable;
  return upper_full ? DefinabilityClass::TotallyUndefinable : DefinabilityClass::InternallyUndefinable;
}

/// Informative iff the set does not contain the whole space, read against the
/// upper approximation: some state is excluded. ⟨{s}, Π⟩ is therefore not
/// informative even though its lower approximation carries content.
inline bool is_informative(const RoughSet& rs) { return !rs.upper().is_full(); }

/// Compares the approximations with the zero payoff line. Zero-payoff states
/// belong to neither side. Sets with an empty upper approximation are neutral.
inline ToneClass tone_classify(const RoughSet& rs) {
  const Mask pos = rs.space()->positive_mask();
  const Mask neg = rs.space()->negative_mask();
  const Mask lo = rs.lower().mask(), up = rs.upper().mask();
  auto side = [&](Mask region) {
    if (lo != 0) return (lo & ~region) == 0;
    return up != 0 && (up & ~region) == 0;
  };
  const bool positive = side(pos), negative = side(neg);
  if (positive && !negative) return ToneClass::Positive;
  if (negative && !positive) return ToneClass::Negative;
  return ToneClass::Neutral;
}

/// A crisp candidate is faithful when it includes every possibly-true state
/// and excludes every state not certainly true: upper ⊆ candidate ⊆ lower.
inline bool faithful_crisp(const CrispSet& candidate, const RoughSet& rs) {
  return rs.upper().subset_of(candidate) && candidate.subset_of(rs.lower());
}

inline bool faithful_rough(const RoughSet& candidate, const RoughSet& rs) {
  return rs.upper().subset_of(candidate.upper()) && candidate.lower().subset_of(rs.lower());
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration.

/// Calls fn(lower_mask, upper_mask) for every pair lower ⊆ upper ⊆ Π with a
/// non-empty upper approximation.
template <class Fn>
void for_each_rough_pair(const StateSpace& space, Fn&& fn) {
  const Mask full = space.full_mask();
  for (Mask up = 1;; ++up) {
    for (Mask lo = up;; lo = (lo - 1) & up) {
      fn(lo, up);
      if (lo == 0) break;
    }
    if (up == full) break;
  }
}

struct WitnessReport {
  int proposition = 0;
  std::size_t space_size = 0;
  /// Only the totally undefinable ⟨∅, Π⟩ is proper (|Π| = 1), and that set is
  /// excluded as uninformative, so there is nothing to witness.
  bool vacuous = false;
  bool holds = false;

  std::size_t rough_pairs = 0;    ///< all lower ⊆ upper pairs with upper ≠ ∅
  std::size_t proper_sets = 0;    ///< pairs with lower ⊊ upper
  std::size_t informative_proper = 0;
  std::size_t informative_with_full_lower = 0;  ///< must be zero
  /// Proper sets with lower ≠ ∅ and upper = Π: not informative by the set-level
  /// definition, yet their lower approximation still pins down some states.
  std::size_t external_with_content = 0;
  std::optional<RoughSet> witness;

  std::size_t crisp_candidates = 0;
  std::size_t crisp_faithful = 0;           ///< must be zero
  std::size_t rough_faithful_pairs = 0;
  std::size_t self_faithful = 0;
  std::size_t proper_without_rough_rep = 0;  ///< must be zero
};

inline void check_cap(const StateSpace& space, std::size_t cap) {
  if (space.size() > cap)
    throw CapExceeded("exhaustive enumeration over " + std::to_string(space.size()) +
                      " states refused (cap " + std::to_string(cap) +
                      "); the search grows like 3^n, raise the cap explicitly if you mean it");
}

/// A set without a well-defined boundary can still be informative: finds
/// proper rough sets that exclude some state.
inline WitnessReport verify_prop1(const SpacePtr& space, std::size_t cap = kDefaultEnumerationCap) {
  check_cap(*space, cap);
  WitnessReport r;
  r.proposition = 1;
  r.space_size = space->size();
  const Mask full = space->full_mask();
  for_each_rough_pair(*space, [&](Mask lo, Mask up) {
    ++r.rough_pairs;
    if (lo == up) return;
    ++r.proper_sets;
    RoughSet rs(CrispSet(space, lo), CrispSet(space, up));
    if (is_informative(rs)) {
      ++r.informative_proper;
      if (lo == full) ++r.informative_with_full_lower;
      // Prefer the smallest witness: first hit in enumeration order has the
      // lowest upper mask.
      if (!r.witness) r.witness = rs;
    } else if (lo != 0) {
      ++r.external_with_content;
    }
  });
  r.vacuous = r.proper_sets <= 1;
  if (r.vacuous) r.witness.reset();
  r.holds = r.vacuous || (r.informative_proper > 0 && r.informative_with_full_lower == 0);
  return r;
}

/// No crisp set faithfully represents a proper rough set, while some other
/// proper rough set always does.
inline WitnessReport verify_prop2(const SpacePtr& space, std::size_t cap = kDefaultEnumerationCap) {
  check_cap(*space, cap);
  WitnessReport r;
  r.proposition = 2;
  r.space_size = space->size();
  const Mask full = space->full_mask();

  std::vector<std::pair<Mask, Mask>> proper;
  for_each_rough_pair(*space, [&](Mask lo, Mask up) {
    ++r.rough_pairs;
    if (lo != up) proper.emplace_back(lo, up);
  });
  r.proper_sets = proper.size();
  r.crisp_candidates = static_cast<std::size_t>(full) + 1;

  // Bit-level forms of faithful_crisp / faithful_rough; the object-level
  // predicates are exercised against these in the tests.
  for (auto [lo, up] : proper) {
    for (Mask c = 0;; ++c) {
      if ((up & ~c) == 0 && (c & ~lo) == 0) ++r.crisp_faithful;
      if (c == full) break;
    }
    std::size_t reps = 0;
    for (auto [clo, cup] : proper) {
      if ((up & ~cup) == 0 && (clo & ~lo) == 0) ++reps;
      if (clo == lo && cup == up) ++r.self_faithful;
    }
    r.rough_faithful_pairs += reps;
    if (reps == 0) ++r.proper_without_rough_rep;
    if (!r.witness) r.witness = RoughSet(CrispSet(space, lo), CrispSet(space, up));
  }
  r.vacuous = proper.size() <= 1;
  r.holds = r.crisp_faithful == 0 && r.proper_without_rough_rep == 0;
  return r;
}

/// One row of the tone table: every non-empty rough set over the space with
/// its tone and definability class.
struct ToneTableRow {
  RoughSet set;
  ToneClass tone;
  DefinabilityClass definability;
};

inline std::vector<ToneTableRow> tone_table(const SpacePtr& space, std::size_t cap = kDefaultEnumerationCap) {
  check_cap(*space, cap);
  std::vector<ToneTableRow> rows;
  for_each_rough_pair(*space, [&](Mask lo, Mask up) {
    RoughSet rs(CrispSet(space, lo), CrispSet(space, up));
    rows.push_back({rs, tone_classify(rs), classify_definability(rs)});
  });
  return rows;
}

}  // namespace vaguekit::rough
