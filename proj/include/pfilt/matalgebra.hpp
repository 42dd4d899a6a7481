#pragma once

#include <optional>
#include <vector>

#include "pfilt/gfp.hpp"

namespace pfilt {

/// A GF(p)-algebra of k x k matrices, spanned by a linearly independent
/// basis that is closed under the matrix product.
struct MatAlgebra {
  fp_t p = 2;
  std::size_t deg = 0;
  std::vector<FpMatrix> basis;
  bool unital = false;

  std::size_t dim() const { return basis.size(); }

  /// Coordinates of m with respect to basis; empty if m is not in the span.
  std::optional<std::vector<fp_t>> coords(const FpMatrix& m) const;
  bool in_span(const FpMatrix& m) const { return coords(m).has_value(); }

  /// Linear combination of the basis.
  FpMatrix realize(const std::vector<fp_t>& c) const;

  /// Every pairwise basis product lies back in the span.
  bool product_closed() const;

 private:
  friend MatAlgebra make_algebra(fp_t, std::size_t, std::vector<FpMatrix>, bool);
  // RREF of flattened basis plus the change of spans: ech = T * flattened(basis).
  FpMatrix ech_;
  FpMatrix t_;
};

/// Wraps an independent, product-closed basis as a MatAlgebra.
MatAlgebra make_algebra(fp_t p, std::size_t deg, std::vector<FpMatrix> basis, bool unital);

/// Smallest product-closed span containing the generators
/// (and the identity when unital is set).
MatAlgebra algebra_close(const std::vector<FpMatrix>& gens, bool unital);

/// Jacobson radical as a subspace of the algebra, in basis coordinates.
FpSubspace jacobson_radical(const MatAlgebra& a);

/// Descending chain act >= act*J >= act*J^2 >= ... >= 0 inside the natural
/// row-vector module GF(p)^deg; the final zero term is included whenever j
/// is nonzero. Throws if act is not invariant under the algebra.
std::vector<FpSubspace> ideal_power_flag(const MatAlgebra& a, const FpSubspace& j,
                                         const FpSubspace& act);

/// span{ x*y : x in s1, y in s2 } in basis coordinates.
FpSubspace coord_product(const MatAlgebra& a, const FpSubspace& s1, const FpSubspace& s2);

/// The quotient algebra a / ideal presented by matrices (via the regular
/// representation on the unitalized quotient). Faithful for any ideal.
MatAlgebra quotient_algebra(const MatAlgebra& a, const FpSubspace& ideal);

}  // namespace pfilt
