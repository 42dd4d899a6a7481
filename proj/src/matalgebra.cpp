#include "pfilt/matalgebra.hpp"

#include <cassert>
#include <stdexcept>

namespace pfilt {

namespace {

FpMatrix unflatten(fp_t p, std::size_t deg, const std::vector<fp_t>& v) {
  FpMatrix m(p, deg, deg);
  m.a = v;
  return m;
}

}  // namespace

MatAlgebra make_algebra(fp_t p, std::size_t deg, std::vector<FpMatrix> basis, bool unital) {
  MatAlgebra a;
  a.p = p;
  a.deg = deg;
  a.basis = std::move(basis);
  a.unital = unital;
  const std::size_t n = a.basis.size();
  // Row-reduce the flattened basis, recording the row operations so that
  // arbitrary matrices can be expressed in basis coordinates later.
  FpMatrix aug(p, n, deg * deg + n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = a.basis[i].flat();
    for (std::size_t c = 0; c < f.size(); ++c) aug.at(i, c) = f[c];
    aug.at(i, deg * deg + i) = 1 % p;
  }
  auto [r, piv] = rref(aug);
  // pivots must all land in the matrix part, else the basis was dependent
  for (std::size_t c : piv)
    if (c >= deg * deg) throw std::invalid_argument("make_algebra: dependent basis");
  if (piv.size() != n) throw std::invalid_argument("make_algebra: dependent basis");
  a.ech_ = FpMatrix(p, n, deg * deg);
  a.t_ = FpMatrix(p, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < deg * deg + n; ++c) {
      if (c < deg * deg)
        a.ech_.at(i, c) = r.at(i, c);
      else
        a.t_.at(i, c - deg * deg) = r.at(i, c);
    }
  return a;
}

std::optional<std::vector<fp_t>> MatAlgebra::coords(const FpMatrix& m) const {
  if (m.rows != deg || m.cols != deg) throw std::invalid_argument("coords: degree mismatch");
  std::vector<fp_t> v = m.flat();
  std::vector<fp_t> lam(dim(), 0);
  std::size_t col = 0;
  for (std::size_t i = 0; i < ech_.rows; ++i) {
    while (col < ech_.cols && ech_.at(i, col) == 0) ++col;
    if (col == ech_.cols) break;
    fp_t f = v[col];
    if (f) {
      lam[i] = f;
      for (std::size_t c = col; c < ech_.cols; ++c)
        v[c] = fp_sub(v[c], fp_mul(f, ech_.at(i, c), p), p);
    }
  }
  for (fp_t x : v)
    if (x) return std::nullopt;
  // m = sum lam_i ech_i = sum_i lam_i sum_j T[i][j] basis_j
  std::vector<fp_t> out(dim(), 0);
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!lam[i]) continue;
    for (std::size_t j = 0; j < dim(); ++j)
      out[j] = fp_add(out[j], fp_mul(lam[i], t_.at(i, j), p), p);
  }
  return out;
}

FpMatrix MatAlgebra::realize(const std::vector<fp_t>& c) const {
  if (c.size() != dim()) throw std::invalid_argument("realize: coordinate length mismatch");
  FpMatrix m(p, deg, deg);
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!c[i]) continue;
    for (std::size_t e = 0; e < m.a.size(); ++e)
      m.a[e] = fp_add(m.a[e], fp_mul(c[i], basis[i].a[e], p), p);
  }
  return m;
}

bool MatAlgebra::product_closed() const {
  for (const auto& x : basis)
    for (const auto& y : basis)
      if (!in_span(x * y)) return false;
  return true;
}

namespace {

// Incremental echelon of flattened matrices; insert returns true when the
// matrix enlarged the span.
struct EchelonSpan {
  fp_t p;
  std::size_t width;
  std::vector<std::pair<std::size_t, std::vector<fp_t>>> rows;  // (pivot, row)

  bool insert(std::vector<fp_t> v) {
    for (auto& [pc, row] : rows) {
      if (v[pc]) {
        fp_t f = v[pc];
        for (std::size_t c = pc; c < width; ++c) v[c] = fp_sub(v[c], fp_mul(f, row[c], p), p);
      }
    }
    std::size_t pc = 0;
    while (pc < width && v[pc] == 0) ++pc;
    if (pc == width) return false;
    fp_t iv = fp_inv(v[pc], p);
    for (std::size_t c = pc; c < width; ++c) v[c] = fp_mul(v[c], iv, p);
    rows.emplace_back(pc, std::move(v));
    return true;
  }
};

}  // namespace

MatAlgebra algebra_close(const std::vector<FpMatrix>& gens, bool unital) {
  if (gens.empty() && !unital) throw std::invalid_argument("algebra_close: no generators");
  fp_t p = gens.empty() ? 2 : gens[0].p;
  std::size_t deg = gens.empty() ? 1 : gens[0].rows;
  for (const auto& g : gens)
    if (g.p != p || g.rows != deg || g.cols != deg)
      throw std::invalid_argument("algebra_close: generator degree or modulus mismatch");

  EchelonSpan span{p, deg * deg, {}};
  std::vector<FpMatrix> members;
  auto add = [&](const FpMatrix& m) {
    if (span.insert(m.flat())) {
      members.push_back(m);
      return true;
    }
    return false;
  };
  if (unital) add(FpMatrix::identity(p, deg));
  for (const auto& g : gens) add(g);

  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      add(members[i] * members[j]);
      if (i != j) add(members[j] * members[i]);
    }
  }
  // canonical basis: the echelon rows themselves
  std::vector<FpMatrix> basis;
  basis.reserve(span.rows.size());
  // echelon rows sorted by pivot for determinism
  std::vector<std::size_t> order(span.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return span.rows[x].first < span.rows[y].first;
  });
  FpMatrix stack(p, span.rows.size(), deg * deg);
  for (std::size_t i = 0; i < order.size(); ++i) stack.set_row(i, span.rows[order[i]].second);
  auto [r, piv] = rref(stack);
  for (std::size_t i = 0; i < piv.size(); ++i) basis.push_back(unflatten(p, deg, r.row(i)));
  bool has_id = false;
  {
    auto alg = make_algebra(p, deg, basis, false);
    has_id = alg.in_span(FpMatrix::identity(p, deg));
    alg.unital = has_id;
    return alg;
  }
}

namespace {

// One level of the radical chain: kernel of the bilinear form
// (x, y) -> coeff_{X^(k - q)} of charpoly(xy) restricted to the span of cur.
FpMatrix form_kernel(const MatAlgebra& a, const FpMatrix& cur, std::size_t q) {
  const fp_t p = a.p;
  const std::size_t r = cur.rows;
  const std::size_t k = a.deg;
  std::vector<FpMatrix> mats;
  mats.reserve(r);
  for (std::size_t i = 0; i < r; ++i) mats.push_back(a.realize(cur.row(i)));
  FpMatrix gram(p, r, r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i; j < r; ++j) {
      auto cp = charpoly(mats[i] * mats[j]);
      fp_t v = cp[k - q];
      gram.at(i, j) = v;
      gram.at(j, i) = v;  // charpoly(xy) = charpoly(yx)
    }
  }
  FpSubspace ker = nullspace(gram);
  // combinations back to algebra coordinates
  FpMatrix next(p, ker.dim(), a.dim());
  for (std::size_t i = 0; i < ker.dim(); ++i) {
    std::vector<fp_t> acc(a.dim(), 0);
    for (std::size_t t = 0; t < r; ++t) {
      fp_t c = ker.basis.at(i, t);
      if (!c) continue;
      for (std::size_t j = 0; j < a.dim(); ++j)
        acc[j] = fp_add(acc[j], fp_mul(c, cur.at(t, j), p), p);
    }
    next.set_row(i, acc);
  }
  return FpSubspace::span_of(next).basis;
}

}  // namespace

FpSubspace jacobson_radical(const MatAlgebra& a) {
  // Iterated kernels of the characteristic-polynomial coefficient forms
  // c_{p^i}(xy), i = 0 .. floor(log_p deg). Plain p-power traces are not
  // enough over GF(p): they vanish identically on scalars in M_{p*m}.
  const fp_t p = a.p;
  FpMatrix cur = FpSubspace::full(p, a.dim()).basis;
  std::size_t q = 1;  // p^i
  while (q <= a.deg) {
    if (cur.rows == 0) break;
    cur = form_kernel(a, cur, q);
    q *= p;
  }
  return FpSubspace{p, a.dim(), std::move(cur)};
}

std::vector<FpSubspace> ideal_power_flag(const MatAlgebra& a, const FpSubspace& j,
                                         const FpSubspace& act) {
  if (j.ambient_dim != a.dim()) throw std::invalid_argument("ideal_power_flag: j not in algebra coordinates");
  if (act.ambient_dim != a.deg) throw std::invalid_argument("ideal_power_flag: act not in module coordinates");
  for (const auto& b : a.basis)
    for (std::size_t r = 0; r < act.dim(); ++r)
      if (!act.contains(row_times(act.basis.row(r), b)))
        throw std::invalid_argument("ideal_power_flag: act is not invariant under the algebra");

  std::vector<FpMatrix> jm;
  for (std::size_t i = 0; i < j.dim(); ++i) jm.push_back(a.realize(j.basis.row(i)));

  std::vector<FpSubspace> chain{act};
  while (j.dim() > 0 && chain.back().dim() > 0) {
    const FpSubspace& cur = chain.back();
    FpMatrix prods(a.p, cur.dim() * jm.size(), a.deg);
    std::size_t out = 0;
    for (std::size_t r = 0; r < cur.dim(); ++r)
      for (const auto& m : jm) prods.set_row(out++, row_times(cur.basis.row(r), m));
    FpSubspace next = FpSubspace::span_of(prods);
    if (next.dim() >= cur.dim())
      throw std::runtime_error("ideal_power_flag: chain failed to descend (ideal not nilpotent?)");
    chain.push_back(std::move(next));
  }
  return chain;
}

FpSubspace coord_product(const MatAlgebra& a, const FpSubspace& s1, const FpSubspace& s2) {
  assert(s1.ambient_dim == a.dim() && s2.ambient_dim == a.dim());
  FpMatrix rows(a.p, s1.dim() * s2.dim(), a.dim());
  std::size_t out = 0;
  for (std::size_t i = 0; i < s1.dim(); ++i) {
    FpMatrix x = a.realize(s1.basis.row(i));
    for (std::size_t j = 0; j < s2.dim(); ++j) {
      FpMatrix prod = x * a.realize(s2.basis.row(j));
      auto c = a.coords(prod);
      if (!c) throw std::runtime_error("coord_product: product left the algebra span");
      rows.set_row(out++, *c);
    }
  }
  return FpSubspace::span_of(rows);
}

MatAlgebra quotient_algebra(const MatAlgebra& a, const FpSubspace& ideal) {
  const fp_t p = a.p;
  if (ideal.ambient_dim != a.dim()) throw std::invalid_argument("quotient_algebra: coordinate mismatch");
  // complement coordinates: unit vectors at the non-pivot columns of the ideal basis
  std::vector<bool> is_piv(a.dim(), false);
  {
    std::size_t col = 0;
    for (std::size_t i = 0; i < ideal.basis.rows; ++i) {
      while (col < a.dim() && ideal.basis.at(i, col) == 0) ++col;
      if (col < a.dim()) is_piv[col] = true;
    }
  }
  std::vector<std::size_t> comp;
  for (std::size_t c = 0; c < a.dim(); ++c)
    if (!is_piv[c]) comp.push_back(c);
  const std::size_t q = comp.size();

  // quotient coordinates of a product of two complement representatives
  auto qcoords = [&](std::size_t ci, std::size_t cj) {
    FpMatrix prod = a.basis[comp[ci]] * a.basis[comp[cj]];
    auto c = a.coords(prod);
    if (!c) throw std::runtime_error("quotient_algebra: algebra is not product-closed");
    std::vector<fp_t> red = ideal.reduce(*c);
    std::vector<fp_t> out(q, 0);
    for (std::size_t t = 0; t < q; ++t) out[t] = red[comp[t]];
    return out;
  };

  // anti-regular representation on the unitalized quotient: the row span of
  // M_x encodes left multiplication by x, acting on row vectors.
  std::vector<FpMatrix> reps;
  for (std::size_t i = 0; i < q; ++i) {
    FpMatrix m(p, q + 1, q + 1);
    for (std::size_t b = 0; b < q; ++b) m.set_row(b, [&] {
      auto v = qcoords(i, b);
      v.push_back(0);
      return v;
    }());
    // action on the adjoined unit: x * 1 = x
    std::vector<fp_t> unit_row(q + 1, 0);
    unit_row[i] = 1;
    m.set_row(q, unit_row);
    reps.push_back(std::move(m));
  }
  if (reps.empty()) return make_algebra(p, 1, {}, false);
  return algebra_close(reps, false);
}

}  // namespace pfilt
