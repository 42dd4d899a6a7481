#include <random>

#include "doctest.h"
#include "pfilt/gfp.hpp"

using namespace pfilt;

namespace {

FpMatrix random_matrix(fp_t p, std::size_t r, std::size_t c, std::mt19937_64& rng) {
  FpMatrix m(p, r, c);
  for (auto& x : m.a) x = static_cast<fp_t>(rng() % p);
  return m;
}

// determinant of x*I - m by Leibniz expansion over polynomial coefficients;
// oracle for small degrees only
std::vector<fp_t> charpoly_leibniz(const FpMatrix& m) {
  const fp_t p = m.p;
  const std::size_t k = m.rows;
  std::vector<std::size_t> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = i;
  std::vector<fp_t> out(k + 1, 0);
  do {
    // sign of the permutation
    unsigned inversions = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) ++inversions;
    // product over i of entry (i, perm[i]) of x*I - m, as a polynomial
    std::vector<fp_t> poly{1};
    for (std::size_t i = 0; i < k; ++i) {
      fp_t cst = fp_sub(0, m.at(i, perm[i]), p);
      std::vector<fp_t> next(poly.size() + (perm[i] == i ? 1 : 0), 0);
      for (std::size_t d = 0; d < poly.size(); ++d) {
        next[d] = fp_add(next[d], fp_mul(poly[d], cst, p), p);
        if (perm[i] == i) next[d + 1] = fp_add(next[d + 1], poly[d], p);
      }
      poly = std::move(next);
    }
    for (std::size_t d = 0; d < poly.size(); ++d) {
      fp_t v = (inversions % 2) ? fp_sub(0, poly[d], p) : poly[d];
      out[d] = fp_add(out[d], v, p);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

TEST_CASE("rref identity and zero") {
  auto id = FpMatrix::identity(7, 4);
  auto [r, piv] = rref(id);
  CHECK(r == id);
  CHECK(piv == std::vector<std::size_t>{0, 1, 2, 3});

  FpMatrix z(5, 3, 3);
  auto [rz, pivz] = rref(z);
  CHECK(rz.is_zero());
  CHECK(pivz.empty());
}

TEST_CASE("rref hand-reduced case mod 5") {
  FpMatrix m = FpMatrix::from_rows(5, {{2, 4}, {1, 2}});
  auto [r, piv] = rref(m);
  CHECK(r == FpMatrix::from_rows(5, {{1, 2}, {0, 0}}));
  CHECK(piv == std::vector<std::size_t>{0});
}

TEST_CASE("rref preserves the row space") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    FpMatrix m = random_matrix(3, 5, 7, rng);
    auto sp1 = FpSubspace::span_of(m);
    auto [r, piv] = rref(m);
    auto sp2 = FpSubspace::span_of(r);
    CHECK(sp1 == sp2);
  }
}

TEST_CASE("nullspace basics") {
  CHECK(nullspace(FpMatrix::identity(3, 4)).dim() == 0);
  FpMatrix z(3, 4, 4);
  auto ns = nullspace(z);
  CHECK(ns.dim() == 4);
}

TEST_CASE("nullspace residual check on random matrices") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    FpMatrix m = random_matrix(3, 10, 20, rng);
    FpSubspace ns = nullspace(m);
    CHECK(ns.dim() >= 10);
    CHECK(rank(m) + ns.dim() == 20);  // rank-nullity
    for (std::size_t i = 0; i < ns.dim(); ++i) {
      auto v = ns.basis.row(i);
      // m * v^T = 0
      for (std::size_t r = 0; r < m.rows; ++r) {
        std::uint64_t acc = 0;
        for (std::size_t c = 0; c < m.cols; ++c) acc += std::uint64_t(m.at(r, c)) * v[c];
        CHECK(acc % 3 == 0);
      }
    }
  }
}

TEST_CASE("charpoly matches Leibniz expansion") {
  std::mt19937_64 rng(17);
  for (fp_t p : {2u, 3u, 5u}) {
    for (std::size_t k = 1; k <= 5; ++k) {
      for (int rep = 0; rep < 10; ++rep) {
        FpMatrix m = random_matrix(p, k, k, rng);
        CHECK(charpoly(m) == charpoly_leibniz(m));
      }
    }
  }
}

TEST_CASE("charpoly of companion matrix") {
  // companion of x^4 + 2x^2 + 1 over GF(3)
  FpMatrix m(3, 4, 4);
  m.at(0, 1) = 1;
  m.at(1, 2) = 1;
  m.at(2, 3) = 1;
  m.at(3, 0) = fp_sub(0, 1, 3);
  m.at(3, 2) = fp_sub(0, 2, 3);
  CHECK(charpoly(m) == std::vector<fp_t>{1, 0, 2, 0, 1});
}

TEST_CASE("charpoly similarity invariance on larger matrices") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    FpMatrix m = random_matrix(5, 12, 12, rng);
    auto cp = charpoly(m);
    CHECK(cp.size() == 13);
    CHECK(cp[12] == 1);
    // trace and the degree-11 coefficient agree up to sign
    fp_t tr = 0;
    for (std::size_t i = 0; i < 12; ++i) tr = fp_add(tr, m.at(i, i), 5);
    CHECK(cp[11] == fp_sub(0, tr, 5));
  }
}

TEST_CASE("subspace reduce and contains") {
  FpMatrix rows = FpMatrix::from_rows(3, {{1, 0, 2}, {0, 1, 1}});
  auto sp = FpSubspace::span_of(rows);
  CHECK(sp.dim() == 2);
  CHECK(sp.contains({1, 1, 0}));
  CHECK(!sp.contains({0, 0, 1}));
  auto sum = sp.sum(FpSubspace::span_of(FpMatrix::from_rows(3, {{0, 0, 1}})));
  CHECK(sum.dim() == 3);
}

TEST_CASE("row_times matches matrix product") {
  std::mt19937_64 rng(3);
  FpMatrix m = random_matrix(7, 4, 6, rng);
  std::vector<fp_t> v{1, 2, 3, 4};
  auto r = row_times(v, m);
  FpMatrix vm(7, 1, 4);
  vm.set_row(0, v);
  CHECK((vm * m).row(0) == r);
}
