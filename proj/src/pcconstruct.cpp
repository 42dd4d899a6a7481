#include <cmath>
#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "pfilt/pcgroup.hpp"

namespace pfilt {

// --- upper unitriangular groups ---------------------------------------------

unsigned UtOracle::index_of(unsigned level, unsigned i) const {
  assert(level >= 1 && level < n && i < n - level);
  unsigned off = 0;
  for (unsigned v = 1; v < level; ++v) off += n - v;
  return off + i;
}

FpMatrix UtOracle::gen_matrix(unsigned idx) const {
  unsigned level = 1, rest = idx;
  while (rest >= n - level) {
    rest -= n - level;
    ++level;
  }
  FpMatrix m = FpMatrix::identity(p, n);
  m.at(rest, rest + level) = 1;
  return m;
}

FpMatrix UtOracle::matrix_of(const Element& e) const {
  assert(e.size() == count());
  FpMatrix m = FpMatrix::identity(p, n);
  for (unsigned idx = 0; idx < count(); ++idx) {
    if (!e[idx]) continue;
    FpMatrix g = gen_matrix(idx);
    for (fp_t r = 0; r < e[idx]; ++r) m = m * g;
  }
  return m;
}

namespace {

FpMatrix inv_unitriangular(const FpMatrix& m) {
  FpMatrix nil = m - FpMatrix::identity(m.p, m.rows);
  FpMatrix acc = FpMatrix::identity(m.p, m.rows);
  FpMatrix term = FpMatrix::identity(m.p, m.rows);
  for (std::size_t k = 1; k < m.rows; ++k) {
    term = term * nil;
    if (term.is_zero()) break;
    acc = (k % 2) ? acc - term : acc + term;
  }
  return acc;
}

}  // namespace

Element UtOracle::element_of(FpMatrix m) const {
  Element e(count(), 0);
  for (unsigned level = 1; level < n; ++level) {
    // the level part is the product of the level's generator powers, in the
    // same order matrix_of uses; its cross terms fall into higher levels
    FpMatrix part = FpMatrix::identity(p, n);
    for (unsigned i = 0; i + level < n; ++i) {
      fp_t a = m.at(i, i + level);
      e[index_of(level, i)] = a;
      FpMatrix gen = FpMatrix::identity(p, n);
      gen.at(i, i + level) = a;
      part = part * gen;
    }
    m = inv_unitriangular(part) * m;
  }
  if (!(m == FpMatrix::identity(p, n)))
    throw std::invalid_argument("element_of: matrix is not upper unitriangular over GF(p)");
  return e;
}

PcGroupPtr ut_group(unsigned n, fp_t p) {
  if (n < 2 || n > 128) throw std::invalid_argument("ut_group: need 2 <= n <= 128");
  UtOracle oracle(n, p);
  unsigned count = oracle.count();
  auto g = std::make_shared<PcPresentation>(p, count);
  std::vector<FpMatrix> gm;
  for (unsigned idx = 0; idx < count; ++idx) gm.push_back(oracle.gen_matrix(idx));
  for (unsigned j = 1; j < count; ++j)
    for (unsigned i = 0; i < j; ++i) {
      FpMatrix c = inv_unitriangular(gm[j]) * inv_unitriangular(gm[i]) * gm[j] * gm[i];
      Element w = oracle.element_of(std::move(c));
      if (std::any_of(w.begin(), w.end(), [](fp_t x) { return x != 0; })) g->set_comm(j, i, w);
    }
  // single-entry nilpotent generators have order p: all power relations trivial
  return g;
}

// --- iterated wreath products -----------------------------------------------

namespace {

using Perm = std::vector<unsigned>;

unsigned upow(unsigned b, unsigned e) {
  unsigned r = 1;
  while (e--) r *= b;
  return r;
}

// Rotation of the p children subtrees under node (depth, pos), as a
// permutation of the p^k leaves.
Perm node_rotation(fp_t p, unsigned k, unsigned depth, unsigned pos) {
  unsigned leaves = upow(p, k);
  unsigned sub = upow(p, k - depth);
  unsigned child = sub / p;
  Perm r(leaves);
  for (unsigned x = 0; x < leaves; ++x) {
    if (x / sub == pos) {
      unsigned rel = x % sub;
      unsigned digit = rel / child;
      r[x] = (x / sub) * sub + ((digit + 1) % p) * child + rel % child;
    } else {
      r[x] = x;
    }
  }
  return r;
}

Perm perm_compose(const Perm& a, const Perm& b) {  // apply a, then b
  Perm r(a.size());
  for (unsigned x = 0; x < a.size(); ++x) r[x] = b[a[x]];
  return r;
}

struct WreathGen {
  unsigned depth;
  std::vector<fp_t> node_vec;  // coefficients over the depth's node rotations
  Perm leaf_perm;
};

struct WreathBuild {
  PcGroupPtr group;
  std::vector<WreathGen> gens;
};

WreathBuild build_sylow_symmetric(fp_t p, unsigned k) {
  if (k < 1) throw std::invalid_argument("sylow_symmetric: need k >= 1");
  if (!is_prime(p)) throw std::invalid_argument("sylow_symmetric: p must be prime");
  if (k >= 20 || std::pow(double(p), double(k)) > double(1 << 20))
    throw std::invalid_argument("sylow_symmetric: p^k too large");
  const unsigned leaves = upow(p, k);

  std::vector<WreathGen> gens;
  std::vector<unsigned> block_start;   // pc index of the first generator per depth
  std::vector<FpMatrix> block_binv;    // node coords -> pc coords per depth

  for (unsigned d = 0; d < k; ++d) {
    const unsigned dim = upow(p, d);
    block_start.push_back(static_cast<unsigned>(gens.size()));

    FpMatrix basis(p, dim, dim);
    if (d == 0) {
      basis.at(0, 0) = 1;
    } else {
      // prefix actions of the shallower pc generators on the depth-d nodes
      const unsigned stride = leaves / dim;
      std::vector<FpMatrix> ms;
      for (const auto& g : gens) {
        FpMatrix m(p, dim, dim);
        for (unsigned q = 0; q < dim; ++q) {
          unsigned img = g.leaf_perm[q * stride] / stride;
          m.at(q, img) = 1;
          m.at(q, q) = fp_sub(m.at(q, q), 1, p);
        }
        if (!m.is_zero()) ms.push_back(std::move(m));
      }
      // ascending flag of iterated fixed spaces
      std::vector<FpSubspace> flag;
      FpSubspace cur = FpSubspace::zero(p, dim);
      while (cur.dim() < dim) {
        FpMatrix proj(p, dim, dim);
        for (unsigned i = 0; i < dim; ++i) {
          std::vector<fp_t> e(dim, 0);
          e[i] = 1;
          proj.set_row(i, cur.reduce(e));
        }
        FpMatrix stacked(p, dim, dim * ms.size());
        for (std::size_t mi = 0; mi < ms.size(); ++mi) {
          FpMatrix mr = ms[mi] * proj;
          for (unsigned r = 0; r < dim; ++r)
            for (unsigned c = 0; c < dim; ++c) stacked.at(r, mi * dim + c) = mr.at(r, c);
        }
        FpSubspace next = ms.empty() ? FpSubspace::full(p, dim) : nullspace(stacked.transposed());
        if (next.dim() <= cur.dim())
          throw std::runtime_error("sylow_symmetric: fixed-point flag failed to grow");
        flag.push_back(next);
        cur = std::move(next);
      }
      // basis ordered along the descending flag: top layer first
      unsigned out = 0;
      for (std::size_t t = flag.size(); t-- > 0;) {
        FpSubspace lower = (t == 0) ? FpSubspace::zero(p, dim) : flag[t - 1];
        FpMatrix raw(p, flag[t].dim(), dim);
        for (unsigned i = 0; i < flag[t].dim(); ++i)
          raw.set_row(i, lower.reduce(flag[t].basis.row(i)));
        FpSubspace comp = FpSubspace::span_of(raw);
        for (unsigned i = 0; i < comp.dim(); ++i) basis.set_row(out++, comp.basis.row(i));
      }
      assert(out == dim);
    }

    // invert the basis for node -> pc coordinate conversion
    FpMatrix aug(p, dim, 2 * dim);
    for (unsigned r = 0; r < dim; ++r) {
      for (unsigned c = 0; c < dim; ++c) aug.at(r, c) = basis.at(r, c);
      aug.at(r, dim + r) = 1;
    }
    auto [red, piv] = rref(aug);
    if (piv.size() != dim || piv.back() != dim - 1)
      throw std::runtime_error("sylow_symmetric: block basis is singular");
    FpMatrix binv(p, dim, dim);
    for (unsigned r = 0; r < dim; ++r)
      for (unsigned c = 0; c < dim; ++c) binv.at(r, c) = red.at(r, dim + c);
    block_binv.push_back(std::move(binv));  // lambda = v * binv solves lambda * basis = v

    for (unsigned t = 0; t < dim; ++t) {
      WreathGen g;
      g.depth = d;
      g.node_vec = basis.row(t);
      Perm acc;
      for (unsigned pos = 0; pos < dim; ++pos) {
        fp_t e = g.node_vec[pos];
        if (!e) continue;
        Perm rot = node_rotation(p, k, d, pos);
        for (fp_t r = 0; r < e; ++r) acc = acc.empty() ? rot : perm_compose(acc, rot);
      }
      if (acc.empty()) throw std::runtime_error("sylow_symmetric: zero basis vector");
      g.leaf_perm = std::move(acc);
      gens.push_back(std::move(g));
    }
  }

  const unsigned count = static_cast<unsigned>(gens.size());
  auto group = std::make_shared<PcPresentation>(p, count);
  for (unsigned ia = 0; ia < count; ++ia) {
    for (unsigned ib = 0; ib < ia; ++ib) {
      const auto& a = gens[ia];
      const auto& b = gens[ib];
      if (a.depth == b.depth) continue;  // same-depth rotations commute
      const unsigned dim = upow(p, a.depth);
      const unsigned stride = leaves / dim;
      std::vector<fp_t> conj_vec(dim, 0);
      for (unsigned pos = 0; pos < dim; ++pos) {
        if (!a.node_vec[pos]) continue;
        unsigned img = b.leaf_perm[pos * stride] / stride;
        conj_vec[img] = a.node_vec[pos];
      }
      std::vector<fp_t> diff(dim, 0);
      for (unsigned q = 0; q < dim; ++q) diff[q] = fp_sub(conj_vec[q], a.node_vec[q], p);
      std::vector<fp_t> coords = row_times(diff, block_binv[a.depth]);
      Element w(count, 0);
      bool nontrivial = false;
      const unsigned start = block_start[a.depth];
      for (unsigned t = 0; t < dim; ++t) {
        if (!coords[t]) continue;
        if (start + t <= ia)
          throw std::runtime_error("sylow_symmetric: block basis is not triangular");
        w[start + t] = coords[t];
        nontrivial = true;
      }
      if (nontrivial) group->set_comm(ia, ib, w);
    }
  }
  return WreathBuild{std::move(group), std::move(gens)};
}

}  // namespace

PcGroupPtr sylow_symmetric(fp_t p, unsigned k) { return build_sylow_symmetric(p, k).group; }

std::vector<std::vector<unsigned>> sylow_symmetric_perms(fp_t p, unsigned k) {
  auto build = build_sylow_symmetric(p, k);
  std::vector<Perm> out;
  out.reserve(build.gens.size());
  for (auto& g : build.gens) out.push_back(std::move(g.leaf_perm));
  return out;
}

PcGroupPtr direct_product(const PcGroupPtr& a, const PcGroupPtr& b) {
  if (a->p() != b->p()) throw std::invalid_argument("direct_product: different primes");
  const unsigned na = a->ngens(), nb = b->ngens();
  auto g = std::make_shared<PcPresentation>(a->p(), na + nb);
  auto lift = [&](const Element& w, unsigned off) {
    Element out(na + nb, 0);
    for (unsigned t = 0; t < w.size(); ++t) out[off + t] = w[t];
    return out;
  };
  for (unsigned i = 0; i < na; ++i) g->set_power(i, lift(a->power(i), 0));
  for (unsigned i = 0; i < nb; ++i) g->set_power(na + i, lift(b->power(i), na));
  for (unsigned j = 0; j < na; ++j)
    for (unsigned i = 0; i < j; ++i) g->set_comm(j, i, lift(a->comm(j, i), 0));
  for (unsigned j = 0; j < nb; ++j)
    for (unsigned i = 0; i < j; ++i) g->set_comm(na + j, na + i, lift(b->comm(j, i), na));
  return g;
}

PcGroupPtr sylow_symmetric_sym(fp_t p, unsigned m) {
  if (m < p) throw std::invalid_argument("sylow_symmetric_sym: Sylow subgroup is trivial");
  PcGroupPtr acc;
  std::vector<unsigned> digits;
  for (unsigned v = m; v; v /= p) digits.push_back(v % p);
  for (std::size_t d = digits.size(); d-- > 1;) {
    for (unsigned rep = 0; rep < digits[d]; ++rep) {
      PcGroupPtr w = sylow_symmetric(p, static_cast<unsigned>(d));
      acc = acc ? direct_product(acc, w) : w;
    }
  }
  if (!acc) throw std::invalid_argument("sylow_symmetric_sym: Sylow subgroup is trivial");
  return acc;
}

PcGroupPtr elgo_group(fp_t p) {
  if (p < 3 || !is_prime(p)) throw std::invalid_argument("elgo_group: need an odd prime");
  auto g = std::make_shared<PcPresentation>(p, 13);
  auto one = [&](unsigned i) {
    Element w(13, 0);
    w[i] = 1;
    return w;
  };
  g->set_comm(9, 5, one(10));   // [g10, g6]  = g11
  g->set_comm(9, 6, one(11));   // [g10, g7]  = g12
  g->set_comm(1, 0, one(12));   // [g2, g1]   = g13
  g->set_comm(3, 2, one(12));   // [g4, g3]   = g13
  g->set_comm(5, 4, one(12));   // [g6, g5]   = g13
  g->set_comm(7, 6, one(12));   // [g8, g7]   = g13
  g->set_comm(9, 8, one(12));   // [g10, g9]  = g13
  return g;
}

// --- sections ----------------------------------------------------------------

namespace {

struct CompatEntry {
  Element elt;
  Element inv;
  unsigned lead;
  bool in_normal;
};

struct CompatList {
  const PcPresentation* g;
  std::vector<CompatEntry> entries;  // lead ascending

  std::size_t find(unsigned l) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].lead == l) return i;
    return entries.size();
  }

  // x = prod entries^{e}; records the exponents; throws if x is outside the span
  std::vector<fp_t> express(Element x) const {
    std::vector<fp_t> e(entries.size(), 0);
    for (;;) {
      unsigned l = g->lead(x);
      if (l == g->ngens()) return e;
      std::size_t idx = find(l);
      if (idx == entries.size()) throw std::runtime_error("express: element outside the subgroup");
      fp_t c = x[l];
      e[idx] = c;
      for (fp_t r = 0; r < c; ++r) x = g->mul(entries[idx].inv, x);
    }
  }

  void insert(Element x, bool in_normal) {
    unsigned l = g->lead(x);
    fp_t c = x[l];
    if (c != 1) x = g->pow(x, fp_inv(c, g->p()));
    CompatEntry ent{x, g->inv(x), l, in_normal};
    auto it = std::lower_bound(entries.begin(), entries.end(), l,
                               [](const CompatEntry& a, unsigned v) { return a.lead < v; });
    entries.insert(it, std::move(ent));
  }

  Element reduce(Element x) const {
    for (;;) {
      unsigned l = g->lead(x);
      if (l == g->ngens()) return x;
      std::size_t idx = find(l);
      if (idx == entries.size()) return x;
      fp_t c = x[l];
      for (fp_t r = 0; r < c; ++r) x = g->mul(entries[idx].inv, x);
    }
  }
};

}  // namespace

PcGroupPtr quotient_presentation(const Subgroup& s, const Subgroup& nrm) {
  if (s.group().get() != nrm.group().get())
    throw std::invalid_argument("quotient_presentation: mixed groups");
  if (!s.contains(nrm)) throw std::invalid_argument("quotient_presentation: nrm is not inside s");
  const PcPresentation& g = *s.group();
  CompatList list{&g, {}};
  for (const Element& x : nrm.igs()) list.insert(x, true);
  for (const Element& x : s.igs()) {
    Element r = list.reduce(x);
    if (!g.is_id(r)) list.insert(std::move(r), false);
  }
  std::vector<std::size_t> qpos;  // positions of the quotient generators
  for (std::size_t i = 0; i < list.entries.size(); ++i)
    if (!list.entries[i].in_normal) qpos.push_back(i);
  const unsigned r = static_cast<unsigned>(qpos.size());
  auto quo = std::make_shared<PcPresentation>(g.p(), r);

  auto project = [&](const std::vector<fp_t>& full) {
    Element w(r, 0);
    for (unsigned t = 0; t < r; ++t) w[t] = full[qpos[t]];
    return w;
  };
  for (unsigned a = 0; a < r; ++a) {
    Element pw = project(list.express(g.pow(list.entries[qpos[a]].elt, g.p())));
    bool nontrivial = false;
    for (unsigned t = 0; t < r; ++t) {
      if (!pw[t]) continue;
      if (t <= a) throw std::runtime_error("quotient_presentation: power word not above its generator");
      nontrivial = true;
    }
    if (nontrivial) quo->set_power(a, pw);
  }
  for (unsigned b = 0; b < r; ++b)
    for (unsigned a = 0; a < b; ++a) {
      Element c = g.commutator(list.entries[qpos[b]].elt, list.entries[qpos[a]].elt);
      Element cw = project(list.express(std::move(c)));
      bool nontrivial = false;
      for (unsigned t = 0; t < r; ++t) {
        if (!cw[t]) continue;
        if (t <= b) throw std::runtime_error("quotient_presentation: commutator word not above its generators");
        nontrivial = true;
      }
      if (nontrivial) quo->set_comm(b, a, cw);
    }
  return quo;
}

PcGroupPtr random_section(const PcGroupPtr& g, std::mt19937_64& rng) {
  const unsigned n = g->ngens();
  auto sparse_element = [&]() {
    Element x = g->id();
    unsigned hits = 2 + static_cast<unsigned>(rng() % 4);
    for (unsigned t = 0; t < hits; ++t) {
      unsigned i = static_cast<unsigned>(rng() % n);
      fp_t e = 1 + static_cast<fp_t>(rng() % (g->p() - 1));
      g->mul_gen(x, i, e);
    }
    return x;
  };
  for (unsigned attempt = 0; attempt < 32; ++attempt) {
    std::vector<Element> sgens;
    unsigned cnt = 3 + static_cast<unsigned>(rng() % 3);
    for (unsigned t = 0; t < cnt; ++t) sgens.push_back(sparse_element());
    Subgroup s = Subgroup::generated(g, sgens);
    if (s.length() < 3) continue;
    // a random normal subgroup of s, kept small so the section stays large
    std::vector<Element> ngens;
    {
      Element x = g->id();
      const Element& m = s.igs()[rng() % s.igs().size()];
      x = g->pow(m, 1 + rng() % (g->p() - 1));
      if (!g->is_id(x)) ngens.push_back(std::move(x));
    }
    Subgroup nrm = ngens.empty() ? Subgroup::trivial(g)
                                 : normal_closure_in(s, Subgroup::generated(g, ngens));
    if (nrm.length() >= s.length()) continue;
    return quotient_presentation(s, nrm);
  }
  // fall back to the full group when sampling keeps degenerating
  return quotient_presentation(Subgroup::whole(g), Subgroup::trivial(g));
}

}  // namespace pfilt
