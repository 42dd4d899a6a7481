#include "pfilt/liering.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace pfilt {

GradedLayer::GradedLayer(const Filter& f, std::size_t entry_pos) {
  if (f.sign < 0) throw std::invalid_argument("GradedLayer: filter must be stored with sign +1");
  const PcPresentation& g = *f.group;
  index_ = f.entries[entry_pos].index;
  num_ = f.entries[entry_pos].subgroup;
  den_ = (entry_pos + 1 < f.entries.size()) ? f.entries[entry_pos + 1].subgroup
                                            : Subgroup::trivial(f.group);
  std::vector<bool> den_lead(g.ngens() + 1, false);
  for (const Element& m : den_.igs()) den_lead[g.lead(m)] = true;

  // echelon sequence for the numerator with the non-denominator leads marked
  // as the lift basis
  int slot = 0;
  for (const Element& m : num_.igs()) {
    Ent ent{m, g.inv(m), g.lead(m), -1};
    if (!den_lead[ent.lead]) ent.slot = slot++;
    ech_.push_back(std::move(ent));
  }
  // replace denominator-lead members by the denominator's own igs so that
  // recorded exponents at lift positions are exact modulo the denominator
  for (auto& ent : ech_) {
    if (ent.slot >= 0) continue;
    for (const Element& m : den_.igs())
      if (g.lead(m) == ent.lead) {
        ent.elt = m;
        ent.inv = g.inv(m);
        break;
      }
  }
  for (std::size_t i = 0; i < ech_.size(); ++i)
    if (ech_[i].slot >= 0) lift_slots_.push_back(i);
}

std::vector<fp_t> GradedLayer::project(const Element& x) const {
  const PcPresentation& g = *num_.group();
  std::vector<fp_t> coords(dim(), 0);
  Element cur = x;
  for (const auto& ent : ech_) {
    unsigned l = g.lead(cur);
    if (l == g.ngens()) break;
    if (l < ent.lead)
      throw std::invalid_argument("project: element is not in the layer's numerator");
    if (l > ent.lead) continue;
    fp_t e = cur[l];
    if (ent.slot >= 0) coords[ent.slot] = e;
    for (fp_t r = 0; r < e; ++r) cur = g.mul(ent.inv, cur);
  }
  if (!g.is_id(cur)) throw std::invalid_argument("project: element is not in the layer's numerator");
  return coords;
}

Element GradedLayer::lift(const std::vector<fp_t>& coords) const {
  if (coords.size() != dim()) throw std::invalid_argument("lift: coordinate length mismatch");
  const PcPresentation& g = *num_.group();
  Element out = g.id();
  for (std::size_t t = 0; t < dim(); ++t) {
    if (!coords[t]) continue;
    out = g.mul(out, g.pow(ech_[lift_slots_[t]].elt, coords[t]));
  }
  return out;
}

const Element& GradedLayer::basis_lift(std::size_t t) const { return ech_[lift_slots_[t]].elt; }

std::vector<GradedLayer> graded_layers(const Filter& f) {
  if (!is_full(f)) throw std::invalid_argument("graded_layers: filter must be full");
  const PcPresentation& g = *f.group;
  std::vector<GradedLayer> layers;
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    GradedLayer layer(f, i);
    for (const Element& x : layer.numerator().igs()) {
      if (!layer.denominator().contains(g.pow(x, g.p())))
        throw std::invalid_argument("graded_layers: layer at " + layer.index().str() +
                                    " is not elementary abelian (witness has order > p in the layer)");
      for (const Element& y : layer.numerator().igs())
        if (!layer.denominator().contains(g.commutator(x, y)))
          throw std::invalid_argument("graded_layers: layer at " + layer.index().str() +
                                      " is not abelian");
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

bool BilinearMap::is_zero() const {
  return std::all_of(tensor.begin(), tensor.end(), [](fp_t x) { return x == 0; });
}

BilinearMap graded_bracket(const Filter& f, const std::vector<GradedLayer>& layers,
                           const MonoidIndex& s, const MonoidIndex& t) {
  const PcPresentation& g = *f.group;
  auto find_layer = [&](const MonoidIndex& idx) -> const GradedLayer* {
    for (const auto& l : layers)
      if (l.index() == idx) return &l;
    return nullptr;
  };
  const GradedLayer* ls = find_layer(s);
  const GradedLayer* lt = find_layer(t);
  if (!ls || !lt) throw std::invalid_argument("graded_bracket: s and t must be stored layer indices");

  // target layer: smallest stored index covering s + t
  MonoidIndex u = s + t;
  const GradedLayer* lu = nullptr;
  for (const auto& ent : f.entries)
    if (lex_leq(u, ent.index)) {
      lu = find_layer(ent.index);
      break;
    }

  BilinearMap out;
  out.p = g.p();
  out.a = ls->dim();
  out.b = lt->dim();
  out.c = lu ? lu->dim() : 0;
  out.tensor.assign(out.a * out.b * out.c, 0);
  for (std::size_t i = 0; i < out.a; ++i)
    for (std::size_t j = 0; j < out.b; ++j) {
      Element c = g.commutator(ls->basis_lift(i), lt->basis_lift(j));
      if (!lu) {
        if (!g.is_id(c))
          throw std::logic_error("graded_bracket: nontrivial commutator past the last stored layer");
        continue;
      }
      std::vector<fp_t> coords = lu->project(c);
      for (std::size_t k = 0; k < out.c; ++k) out.at(i, j, k) = coords[k];
    }
  return out;
}

BilinearMap graded_bracket(const Filter& f, const MonoidIndex& s, const MonoidIndex& t) {
  return graded_bracket(f, graded_layers(f), s, t);
}

std::string tensor_to_json(const BilinearMap& b) {
  nlohmann::json j;
  j["p"] = b.p;
  j["dims"] = {b.a, b.b, b.c};
  j["entries"] = nlohmann::json::array();
  for (std::size_t i = 0; i < b.a; ++i)
    for (std::size_t jj = 0; jj < b.b; ++jj)
      for (std::size_t k = 0; k < b.c; ++k)
        if (b.at(i, jj, k)) j["entries"].push_back({i, jj, k, b.at(i, jj, k)});
  return j.dump();
}

}  // namespace pfilt
