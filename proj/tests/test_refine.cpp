#include <random>
#include <stdexcept>

#include "doctest.h"
#include "pfilt/refine.hpp"

using namespace pfilt;

namespace {

MonoidIndex idx(std::vector<std::uint64_t> v) { return MonoidIndex{std::move(v)}; }

// check the defining identity of a ring on every basis element and all unit
// vectors of U, V
void check_ring_identity(const BilinearMap& bm, RingChoice which, const MatAlgebra& alg) {
  const fp_t p = bm.p;
  auto pair_mul = [&](const std::vector<fp_t>& u, const std::vector<fp_t>& v) {
    std::vector<fp_t> w(bm.c, 0);
    for (std::size_t i = 0; i < bm.a; ++i)
      for (std::size_t j = 0; j < bm.b; ++j) {
        fp_t uv = fp_mul(u[i], v[j], p);
        if (!uv) continue;
        for (std::size_t k = 0; k < bm.c; ++k)
          w[k] = fp_add(w[k], fp_mul(uv, bm.at(i, j, k), p), p);
      }
    return w;
  };
  for (const FpMatrix& m : alg.basis) {
    for (std::size_t i = 0; i < bm.a; ++i)
      for (std::size_t j = 0; j < bm.b; ++j) {
        std::vector<fp_t> u(bm.a, 0), v(bm.b, 0);
        u[i] = 1;
        v[j] = 1;
        switch (which) {
          case RingChoice::adjoint: {
            // (u f) o v == u o (g v)
            std::vector<fp_t> uf(bm.a, 0), gv(bm.b, 0);
            for (std::size_t t = 0; t < bm.a; ++t) uf[t] = m.at(i, t);
            for (std::size_t t = 0; t < bm.b; ++t) gv[t] = m.at(bm.a + t, bm.a + j);
            CHECK(pair_mul(uf, v) == pair_mul(u, gv));
            break;
          }
          case RingChoice::centroid:
          case RingChoice::derivation: {
            std::vector<fp_t> uf(bm.a, 0), vg(bm.b, 0), w = pair_mul(u, v), wh(bm.c, 0);
            for (std::size_t t = 0; t < bm.a; ++t) uf[t] = m.at(i, t);
            for (std::size_t t = 0; t < bm.b; ++t) vg[t] = m.at(bm.a + j, bm.a + t);
            for (std::size_t k = 0; k < bm.c; ++k)
              for (std::size_t t = 0; t < bm.c; ++t)
                wh[t] = fp_add(wh[t], fp_mul(w[k], m.at(bm.a + bm.b + k, bm.a + bm.b + t), p), p);
            auto lhs1 = pair_mul(uf, v);
            auto lhs2 = pair_mul(u, vg);
            if (which == RingChoice::centroid) {
              CHECK(lhs1 == lhs2);
              CHECK(lhs1 == wh);
            } else {
              std::vector<fp_t> sum(bm.c, 0);
              for (std::size_t k = 0; k < bm.c; ++k) sum[k] = fp_add(lhs1[k], lhs2[k], p);
              CHECK(sum == wh);
            }
            break;
          }
          case RingChoice::left_scalar: {
            // (f u) o v == g (u o v); both act on columns
            std::vector<fp_t> fu(bm.a, 0);
            for (std::size_t t = 0; t < bm.a; ++t) fu[t] = m.at(t, i);
            auto lhs = pair_mul(fu, v);
            auto w = pair_mul(u, v);
            std::vector<fp_t> gw(bm.c, 0);
            for (std::size_t k = 0; k < bm.c; ++k)
              for (std::size_t t = 0; t < bm.c; ++t)
                gw[k] = fp_add(gw[k], fp_mul(m.at(bm.a + k, bm.a + t), w[t], p), p);
            CHECK(lhs == gw);
            break;
          }
          case RingChoice::right_scalar: {
            std::vector<fp_t> vf(bm.b, 0);
            for (std::size_t t = 0; t < bm.b; ++t) vf[t] = m.at(j, t);
            auto lhs = pair_mul(u, vf);
            auto w = pair_mul(u, v);
            std::vector<fp_t> wg(bm.c, 0);
            for (std::size_t k = 0; k < bm.c; ++k)
              for (std::size_t t = 0; t < bm.c; ++t)
                wg[t] = fp_add(wg[t], fp_mul(w[k], m.at(bm.b + k, bm.b + t), p), p);
            CHECK(lhs == wg);
            break;
          }
        }
      }
  }
}

}  // namespace

TEST_CASE("adjoint ring of the zero tensor is everything") {
  BilinearMap b;
  b.p = 3;
  b.a = 2;
  b.b = 3;
  b.c = 1;
  b.tensor.assign(b.a * b.b * b.c, 0);
  MatAlgebra adj = compute_ring(b, RingChoice::adjoint);
  CHECK(adj.dim() == 4 + 9);
  CHECK(adj.unital);
  CHECK(adj.product_closed());
}

TEST_CASE("centroid of the nondegenerate alternating form is the scalars") {
  auto g = ut_group(3, 3);
  Filter lcs = lower_central_series(g);
  BilinearMap b = graded_bracket(lcs, idx({1}), idx({1}));
  MatAlgebra cent = compute_ring(b, RingChoice::centroid);
  CHECK(cent.dim() == 1);
  CHECK(cent.unital);
  check_ring_identity(b, RingChoice::centroid, cent);
}

TEST_CASE("ring identities hold for every choice on a nontrivial bracket") {
  auto g = ut_group(4, 3);
  Filter lcs = lower_central_series(g);
  auto layers = graded_layers(lcs);
  BilinearMap b = graded_bracket(lcs, layers, idx({1}), idx({2}));
  REQUIRE(!b.is_zero());
  for (RingChoice which : {RingChoice::adjoint, RingChoice::centroid, RingChoice::derivation,
                           RingChoice::left_scalar, RingChoice::right_scalar}) {
    MatAlgebra alg = compute_ring(b, which);
    check_ring_identity(b, which, alg);
    if (which != RingChoice::derivation) CHECK(alg.product_closed());
  }
}

TEST_CASE("13-generator example: adjoint algebra, radical, chain, final filter") {
  for (fp_t p : {3u, 5u}) {
    auto g = elgo_group(p);
    Filter lcs = lower_central_series(g);
    REQUIRE(lcs.entries.size() == 2);
    auto layers = graded_layers(lcs);
    BilinearMap b = graded_bracket(lcs, layers, idx({1}), idx({1}));
    REQUIRE(!b.is_zero());

    MatAlgebra adj = compute_ring(b, RingChoice::adjoint);
    CHECK(adj.dim() == 53);
    CHECK(adj.product_closed());
    check_ring_identity(b, RingChoice::adjoint, adj);

    FpSubspace rad = jacobson_radical(adj);
    CHECK(rad.dim() == 35);

    // radical power dimensions 35, 17, 5, 1, 0
    std::vector<std::size_t> jdims;
    FpSubspace power = rad;
    while (power.dim() > 0) {
      jdims.push_back(power.dim());
      power = coord_product(adj, power, rad);
    }
    jdims.push_back(0);
    CHECK(jdims == std::vector<std::size_t>{35, 17, 5, 1, 0});

    auto chain = radical_refinement(lcs, idx({1}), idx({1}), RingChoice::adjoint);
    REQUIRE(chain.size() == 4);
    CHECK(chain[0].length() == 12);
    CHECK(chain[1].length() == 10);
    CHECK(chain[2].length() == 6);
    CHECK(chain[3].length() == 4);

    // generator sets of the radical chain
    auto sub = [&](std::initializer_list<unsigned> gens1) {
      std::vector<Element> gens;
      for (unsigned i : gens1) gens.push_back(g->gen(i - 1));
      return Subgroup::generated(g, gens);
    };
    CHECK(chain[0] == sub({1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 12, 13}));
    CHECK(chain[1] == sub({1, 2, 3, 4, 5, 8, 9, 11, 12, 13}));
    CHECK(chain[2] == sub({5, 8, 9, 11, 12, 13}));
    CHECK(chain[3] == sub({9, 11, 12, 13}));

    // one adjoint refinement pass yields the length-7 filter
    std::mt19937_64 rng(1);
    auto [refined, changed] = refine_once(lcs, Policy::adjoint, rng);
    REQUIRE(changed);
    REQUIRE(refined.entries.size() == 7);
    std::vector<std::vector<std::uint64_t>> indices;
    std::vector<std::size_t> lengths;
    for (const auto& e : refined.entries) {
      indices.push_back(e.index.coords);
      lengths.push_back(e.subgroup.length());
    }
    CHECK(indices == std::vector<std::vector<std::uint64_t>>{
                         {1, 0}, {1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 1}, {2, 4}});
    CHECK(lengths == std::vector<std::size_t>{13, 12, 10, 6, 4, 3, 1});
    CHECK(refined.entries.back().subgroup == sub({13}));
    CHECK(verify_filter(refined).ok);
    CHECK(is_full(refined));
  }
}

TEST_CASE("semisimple rings yield no refinement") {
  auto g = ut_group(3, 3);
  Filter lcs = lower_central_series(g);
  std::mt19937_64 rng(5);
  for (Policy p : {Policy::adjoint, Policy::derivation, Policy::sweep, Policy::first}) {
    auto [out, changed] = refine_once(lcs, p, rng);
    CHECK(!changed);
    CHECK(out.entries.size() == lcs.entries.size());
  }
  // the adjoint ring here is visibly semisimple
  BilinearMap b = graded_bracket(lcs, idx({1}), idx({1}));
  MatAlgebra adj = compute_ring(b, RingChoice::adjoint);
  CHECK(jacobson_radical(adj).dim() == 0);
  auto chain = radical_refinement(lcs, idx({1}), idx({1}), RingChoice::adjoint);
  CHECK(chain.empty());
}

TEST_CASE("abelian groups have no nontrivial bracket") {
  auto g = parse_presentation("pcgroup p=3 n=3\n", true);
  Filter lcs = lower_central_series(g);
  std::mt19937_64 rng(5);
  auto [out, changed] = refine_once(lcs, Policy::sweep, rng);
  CHECK(!changed);
  CHECK_THROWS_AS(radical_refinement(lcs, idx({1}), idx({1}), RingChoice::adjoint),
                  std::invalid_argument);
}

TEST_CASE("refine_loop terminates, is monotone, and never breaks the axioms") {
  auto g = sylow_symmetric(2, 4);
  Filter start = exponent_p_central_series(g);
  auto [fin, report] = refine_loop(start, Policy::first, 11, 64);
  CHECK(!report.hit_cap);
  CHECK(report.initial_length == start.entries.size());
  CHECK(report.final_length == fin.entries.size());
  CHECK(report.final_length >= report.initial_length);
  CHECK(report.subgroups_added == report.final_length - report.initial_length);
  CHECK(verify_filter(fin).ok);
  CHECK(is_full(fin));
  // at the fixpoint, adjoint and derivation rings are semisimple at every bracket
  auto layers = graded_layers(fin);
  for (std::size_t i = 0; i < fin.entries.size(); ++i)
    for (std::size_t j = i; j < fin.entries.size(); ++j) {
      BilinearMap b = graded_bracket(fin, layers, fin.entries[i].index, fin.entries[j].index);
      if (b.is_zero()) continue;
      for (RingChoice which : {RingChoice::adjoint, RingChoice::derivation}) {
        auto chain = radical_refinement(fin, fin.entries[i].index, fin.entries[j].index, which);
        // chains may re-emit stored subgroups only
        for (const Subgroup& k : chain) {
          bool known = false;
          for (const auto& ent : fin.entries) known = known || ent.subgroup == k;
          CHECK(known);
        }
      }
    }
}

TEST_CASE("refinement reports are deterministic for a fixed seed") {
  auto g = elgo_group(3);
  Filter start = lower_central_series(g);
  auto [f1, r1] = refine_loop(start, Policy::random, 7, 64);
  auto [f2, r2] = refine_loop(start, Policy::random, 7, 64);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.final_length == r2.final_length);
  REQUIRE(f1.entries.size() == f2.entries.size());
  for (std::size_t i = 0; i < f1.entries.size(); ++i) {
    CHECK(f1.entries[i].index == f2.entries[i].index);
    CHECK(f1.entries[i].subgroup == f2.entries[i].subgroup);
  }
  // the CSV row carries the documented header fields
  std::string row = report_csv_row("elgo_3", g, p_class(g), r1);
  CHECK(std::string(kReportCsvHeader) ==
        "group,order_log_p,p,p_class,len_initial,len_final,growth,iterations,seconds");
  CHECK(row.substr(0, 7) == "elgo_3,");
  CHECK(report_to_json(r1).find("\"iterations\"") != std::string::npos);
}

TEST_CASE("insertions during refinement add one coordinate per pass") {
  auto g = elgo_group(3);
  Filter start = lower_central_series(g);
  auto [fin, report] = refine_loop(start, Policy::adjoint, 3, 64);
  CHECK(fin.d == start.d + report.iterations);
}

TEST_CASE("filter length is monotone along the refinement iterations") {
  auto g = sylow_symmetric(2, 5);
  Filter cur = exponent_p_central_series(g);
  std::mt19937_64 rng(2);
  std::size_t len = cur.length();
  for (int it = 0; it < 64; ++it) {
    auto [next, changed] = refine_once(cur, Policy::first, rng);
    if (!changed) break;
    CHECK(next.length() >= len);
    len = next.length();
    cur = std::move(next);
  }
  CHECK(verify_filter(cur).ok);
}
