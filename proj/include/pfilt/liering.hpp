#pragma once

#include <vector>

#include "pfilt/filter.hpp"
#include "pfilt/gfp.hpp"

namespace pfilt {

/// Homogeneous layer f_s / boundary(f)_s of a full filter, with lift and
/// project maps between the quotient GF(p)-space and the group.
class GradedLayer {
 public:
  GradedLayer(const Filter& f, std::size_t entry_pos);

  const MonoidIndex& index() const { return index_; }
  const Subgroup& numerator() const { return num_; }
  const Subgroup& denominator() const { return den_; }
  std::size_t dim() const { return lift_slots_.size(); }

  /// Coordinates of x modulo the denominator; x must lie in the numerator.
  std::vector<fp_t> project(const Element& x) const;
  Element lift(const std::vector<fp_t>& coords) const;
  const Element& basis_lift(std::size_t t) const;

 private:
  MonoidIndex index_;
  Subgroup num_;
  Subgroup den_;
  struct Ent {
    Element elt;
    Element inv;
    unsigned lead;
    int slot;  // >= 0 for lift basis members
  };
  std::vector<Ent> ech_;
  std::vector<std::size_t> lift_slots_;  // positions into ech_
};

/// One layer per stored entry of a full filter. Throws when a layer is not
/// elementary abelian, naming the offending index and witness.
std::vector<GradedLayer> graded_layers(const Filter& f);

/// Structure constants of a biadditive map on dims (a, b, c):
/// e_i o e_j = sum_k tensor[i][j][k] f_k.
struct BilinearMap {
  fp_t p = 2;
  std::size_t a = 0, b = 0, c = 0;
  std::vector<fp_t> tensor;

  fp_t at(std::size_t i, std::size_t j, std::size_t k) const {
    return tensor[(i * b + j) * c + k];
  }
  fp_t& at(std::size_t i, std::size_t j, std::size_t k) { return tensor[(i * b + j) * c + k]; }
  bool is_zero() const;
};

/// The graded bracket L_s x L_t -> L_{s+t}; the target is the layer whose
/// interval contains s + t (a zero-dimensional target when s + t falls past
/// the last stored entry).
BilinearMap graded_bracket(const Filter& f, const std::vector<GradedLayer>& layers,
                           const MonoidIndex& s, const MonoidIndex& t);
BilinearMap graded_bracket(const Filter& f, const MonoidIndex& s, const MonoidIndex& t);

std::string tensor_to_json(const BilinearMap& b);

}  // namespace pfilt
