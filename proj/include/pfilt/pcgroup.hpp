#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pfilt/gfp.hpp"

namespace pfilt {

/// Exponent vector of a group element in normal form, length n, entries in [0, p).
using Element = std::vector<fp_t>;

class PcPresentation;
using PcGroupPtr = std::shared_ptr<const PcPresentation>;

/// Consistent power-conjugate presentation of a finite p-group, with every
/// relation word supported on generators of strictly larger index:
///   g_i^p        = pow_rel[i]   (word over indices > i)
///   [g_j, g_i]   = comm_rel[j][i] for j > i   (word over indices > j)
/// Multiplication is by collection; elements are exponent vectors.
class PcPresentation {
 public:
  PcPresentation(fp_t p, unsigned n);

  fp_t p() const { return p_; }
  unsigned ngens() const { return n_; }

  /// Relation setters reject words that use indices <= the relation's own.
  void set_power(unsigned i, Element w);
  void set_comm(unsigned j, unsigned i, Element w);

  const Element& power(unsigned i) const { return pow_rel_[i]; }
  const Element& comm(unsigned j, unsigned i) const { return comm_rel_[j][i]; }
  bool gens_commute(unsigned i, unsigned j) const;

  Element id() const { return Element(n_, 0); }
  bool is_id(const Element& x) const;
  Element gen(unsigned i, fp_t e = 1) const;
  /// First index with nonzero exponent; n for the identity.
  unsigned lead(const Element& x) const;

  Element mul(const Element& x, const Element& y) const;
  Element inv(const Element& x) const;
  Element pow(const Element& x, std::uint64_t e) const;
  /// [x, y] = x^-1 y^-1 x y
  Element commutator(const Element& x, const Element& y) const;
  Element conj(const Element& x, const Element& y) const;

  /// Normal form of a word of signed 1-based generator indices.
  Element collect_word(const std::vector<int>& word) const;

  /// Runs the standard associativity / power overlap tests; returns a
  /// description of the first failing instance, if any.
  std::optional<std::string> consistency_error() const;

  /// a <- a * g_i^e
  void mul_gen(Element& a, unsigned i, fp_t e) const;

  bool same_presentation(const PcPresentation& o) const;

 private:
  fp_t p_;
  unsigned n_;
  std::vector<Element> pow_rel_;
  std::vector<std::vector<Element>> comm_rel_;
  std::vector<std::vector<bool>> commute_;  // commute_[j][i], j > i: comm word trivial

  void check_word(const Element& w, unsigned above, const char* what) const;
};

/// Subgroup in canonical form: an induced generating sequence with strictly
/// increasing leading indices, leading exponents 1, and zero exponents at
/// the leading positions of all later members. Order is p^igs.size().
class Subgroup {
 public:
  Subgroup() = default;

  static Subgroup trivial(PcGroupPtr g);
  static Subgroup whole(PcGroupPtr g);
  static Subgroup generated(PcGroupPtr g, const std::vector<Element>& gens);

  const PcGroupPtr& group() const { return g_; }
  const std::vector<Element>& igs() const { return igs_; }
  std::size_t length() const { return igs_.size(); }
  /// Decimal string for p^length().
  std::string order_string() const;

  bool contains(const Element& x) const;
  bool contains(const Subgroup& other) const;
  bool is_normal() const;

  bool operator==(const Subgroup& o) const;
  bool operator!=(const Subgroup& o) const { return !(*this == o); }
  /// Canonical serialization usable as a hash/map key.
  std::string key() const;

 private:
  PcGroupPtr g_;
  std::vector<Element> igs_;
  friend Subgroup subgroup_from_canonical_igs(PcGroupPtr g, std::vector<Element> igs);
};

/// Trusts that igs is already canonical (internal use by algorithms).
Subgroup subgroup_from_canonical_igs(PcGroupPtr g, std::vector<Element> igs);

Subgroup join(const Subgroup& x, const Subgroup& y);
Subgroup normal_closure(const Subgroup& s);
/// Closure of s under conjugation by the members of ambient (s <= ambient).
Subgroup normal_closure_in(const Subgroup& ambient, const Subgroup& s);
/// <[x, y]> closed under normal closure; equals [X, Y] for normal X, Y.
Subgroup commutator_subgroup(const Subgroup& x, const Subgroup& y);

std::string pow_decimal_string(fp_t p, std::size_t e);

// --- constructors ---------------------------------------------------------

/// Upper unitriangular n x n matrices over GF(p), with one pc generator per
/// superdiagonal entry, ordered by superdiagonal level.
PcGroupPtr ut_group(unsigned n, fp_t p);

/// Exponent map <-> matrix translation for ut_group, the cross-validation
/// oracle for collection.
struct UtOracle {
  fp_t p;
  unsigned n;

  UtOracle(unsigned n_, fp_t p_) : p(p_), n(n_) {}
  unsigned count() const { return n * (n - 1) / 2; }
  unsigned index_of(unsigned level, unsigned i) const;
  FpMatrix gen_matrix(unsigned idx) const;
  FpMatrix matrix_of(const Element& e) const;
  Element element_of(FpMatrix m) const;
};

/// Sylow p-subgroup of Sym(p^k): the k-fold iterated wreath power of Z_p,
/// presented on one generator per internal node of the p-ary tree.
PcGroupPtr sylow_symmetric(fp_t p, unsigned k);

/// Permutation images of the sylow_symmetric pc generators on p^k points,
/// for cross-validation.
std::vector<std::vector<unsigned>> sylow_symmetric_perms(fp_t p, unsigned k);

/// Sylow p-subgroup of Sym(m): direct product over the base-p digits of m.
PcGroupPtr sylow_symmetric_sym(fp_t p, unsigned m);

PcGroupPtr direct_product(const PcGroupPtr& a, const PcGroupPtr& b);

/// The 13-generator class-2 example group of exponent p (p odd):
/// [g10,g6]=g11, [g10,g7]=g12, [g2,g1]=[g4,g3]=[g6,g5]=[g8,g7]=[g10,g9]=g13.
PcGroupPtr elgo_group(fp_t p);

// --- presentation files ----------------------------------------------------

struct ParseError : std::runtime_error {
  unsigned line;
  unsigned column;
  ParseError(const std::string& msg, unsigned line_, unsigned col_);
};

/// Text format: "pcgroup p=<prime> n=<count>" followed by lines
/// "pow i = g<a>^<e> ..." and "comm j i = ...". Omitted relations are
/// trivial; '#' starts a comment.
PcGroupPtr parse_presentation(const std::string& text, bool check_consistency = true);
std::string print_presentation(const PcPresentation& g);

// --- sections ---------------------------------------------------------------

/// Presentation of s / nrm on the igs members of s outside nrm.
PcGroupPtr quotient_presentation(const Subgroup& s, const Subgroup& nrm);

/// Random section (quotient of a subgroup) used to build benchmark corpora.
PcGroupPtr random_section(const PcGroupPtr& g, std::mt19937_64& rng);

}  // namespace pfilt
