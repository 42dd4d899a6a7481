#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "pfilt/pcgroup.hpp"

namespace pfilt {

/// Index into N^d under the lexicographic order; addition is coordinatewise.
struct MonoidIndex {
  std::vector<std::uint64_t> coords;

  std::size_t rank() const { return coords.size(); }
  MonoidIndex operator+(const MonoidIndex& o) const;
  bool operator==(const MonoidIndex&) const = default;
  std::string str() const;
};

/// Total, translation-invariant order; throws on rank mismatch.
std::strong_ordering lex_cmp(const MonoidIndex& s, const MonoidIndex& t);

inline bool lex_less(const MonoidIndex& s, const MonoidIndex& t) {
  return lex_cmp(s, t) == std::strong_ordering::less;
}
inline bool lex_leq(const MonoidIndex& s, const MonoidIndex& t) {
  return lex_cmp(s, t) != std::strong_ordering::greater;
}

struct FilterEntry {
  MonoidIndex index;
  Subgroup subgroup;
};

/// Signed set of (index, subgroup) pairs: with sign +1 the stored indices are
/// the maxima of the intervals I_H, with sign -1 the minima. Entries are
/// sorted by strictly ascending index and strictly descending subgroup.
struct Filter {
  PcGroupPtr group;
  std::size_t d = 1;
  int sign = 1;
  std::vector<FilterEntry> entries;

  std::size_t length() const { return entries.size(); }
};

/// A prefilter is stored exactly like a filter; its sign is always +1 and no
/// commutator condition is assumed.
using Prefilter = Filter;

/// The subgroup whose interval contains s. Beyond the last stored index this
/// is the trivial group (sign +1) or the last stored entry (sign -1).
Subgroup evaluate(const Filter& f, const MonoidIndex& s);

/// The boundary filter s -> <f_{s+t} : t > 0>, stored with sign -1.
Filter boundary(const Filter& f);

/// Every nontrivial image subgroup attains a maximal index.
bool is_full(const Filter& f);

/// A full filter with the same image; intervals that already had maxima keep
/// them. Returns sign +1 storage.
Filter fill(const Filter& f);

/// Refine a full filter by a descending chain of new normal subgroups
/// strictly between f_s and its boundary, indexed (s,1), (s,2), ... over
/// N^{d+1}; the old entries move to (m, 0).
Prefilter insert_subgroup(const Filter& f, const std::vector<Subgroup>& chain,
                          const MonoidIndex& s);
Prefilter insert_subgroup(const Filter& f, const Subgroup& h, const MonoidIndex& s);

struct GenerateStats {
  std::size_t commutator_calls = 0;
  std::size_t pairs_processed = 0;
};

/// Closure of a prefilter into a full filter by transitive closure over
/// commutator pairs, smallest index sum first.
Filter generate(const Prefilter& pi, GenerateStats* stats = nullptr);

/// Literal evaluation of the closure as a product of iterated commutators
/// over all partitions (exponential; test oracle only). length_bound must be
/// at least the nilpotency class; shortfalls are detected and reported.
Filter closure_oracle(const Prefilter& pi, unsigned length_bound);

struct VerifyReport {
  bool ok = true;
  std::string message;
};

/// Structural checks plus the commutator condition on all stored index pairs.
VerifyReport verify_filter(const Filter& f);

// --- standard series as filters over N --------------------------------------

Filter lower_central_series(PcGroupPtr g);
Filter exponent_p_central_series(PcGroupPtr g);
/// Number of nontrivial terms of the exponent-p central series.
unsigned p_class(PcGroupPtr g);

// --- JSON export / import ----------------------------------------------------

std::string filter_to_json(const Filter& f);
Filter filter_from_json(PcGroupPtr g, const std::string& json_text);

}  // namespace pfilt
