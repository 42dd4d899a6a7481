#include "pfilt/refine.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pfilt {

const char* ring_name(RingChoice r) {
  switch (r) {
    case RingChoice::adjoint: return "adjoint";
    case RingChoice::centroid: return "centroid";
    case RingChoice::derivation: return "derivation";
    case RingChoice::left_scalar: return "left-scalar";
    case RingChoice::right_scalar: return "right-scalar";
  }
  return "?";
}

Policy policy_from_string(const std::string& s) {
  if (s == "first") return Policy::first;
  if (s == "random") return Policy::random;
  if (s == "adjoint") return Policy::adjoint;
  if (s == "derivation") return Policy::derivation;
  if (s == "sweep") return Policy::sweep;
  throw std::invalid_argument("unknown policy: " + s);
}

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::first: return "first";
    case Policy::random: return "random";
    case Policy::adjoint: return "adjoint";
    case Policy::derivation: return "derivation";
    case Policy::sweep: return "sweep";
  }
  return "?";
}

namespace {

// Equation rows are indexed by (i, j, k); unknowns are the entries of the
// block maps, flattened row-major per block.
struct SystemBuilder {
  fp_t p;
  std::size_t unknowns;
  std::vector<std::vector<fp_t>> rows;
  std::vector<fp_t>* cur = nullptr;

  explicit SystemBuilder(fp_t p_, std::size_t unknowns_) : p(p_), unknowns(unknowns_) {}
  void new_row() {
    rows.emplace_back(unknowns, 0);
    cur = &rows.back();
  }
  void add(std::size_t col, fp_t v) { (*cur)[col] = fp_add((*cur)[col], v % p, p); }
  void sub(std::size_t col, fp_t v) { (*cur)[col] = fp_sub((*cur)[col], v % p, p); }

  FpSubspace solve() const {
    FpMatrix m(p, rows.size(), unknowns);
    for (std::size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
    return nullspace(m);
  }
};

FpMatrix block_diag(fp_t p, const std::vector<fp_t>& sol,
                    const std::vector<std::pair<std::size_t, std::size_t>>& blocks) {
  std::size_t deg = 0;
  for (auto [dim, off] : blocks) deg += dim;
  FpMatrix m(p, deg, deg);
  std::size_t base = 0;
  for (auto [dim, off] : blocks) {
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) m.at(base + r, base + c) = sol[off + r * dim + c];
    base += dim;
  }
  return m;
}

}  // namespace

MatAlgebra compute_ring(const BilinearMap& bm, RingChoice which) {
  const fp_t p = bm.p;
  const std::size_t a = bm.a, b = bm.b, c = bm.c;
  const std::size_t a2 = a * a, b2 = b * b, c2 = c * c;
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // (dim, unknown offset)
  SystemBuilder sys(p, 0);

  switch (which) {
    case RingChoice::adjoint: {
      // (u f) o v = u o (g v): f acts on rows of U, g on columns of V
      sys = SystemBuilder(p, a2 + b2);
      blocks = {{a, 0}, {b, a2}};
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
          for (std::size_t k = 0; k < c; ++k) {
            sys.new_row();
            for (std::size_t al = 0; al < a; ++al) sys.add(i * a + al, bm.at(al, j, k));
            for (std::size_t be = 0; be < b; ++be) sys.sub(a2 + be * b + j, bm.at(i, be, k));
          }
      break;
    }
    case RingChoice::centroid: {
      // (u f) o v = u o (v g) = (u o v) h
      sys = SystemBuilder(p, a2 + b2 + c2);
      blocks = {{a, 0}, {b, a2}, {c, a2 + b2}};
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
          for (std::size_t k = 0; k < c; ++k) {
            sys.new_row();
            for (std::size_t al = 0; al < a; ++al) sys.add(i * a + al, bm.at(al, j, k));
            for (std::size_t be = 0; be < b; ++be) sys.sub(a2 + j * b + be, bm.at(i, be, k));
            sys.new_row();
            for (std::size_t be = 0; be < b; ++be) sys.add(a2 + j * b + be, bm.at(i, be, k));
            for (std::size_t m = 0; m < c; ++m) sys.sub(a2 + b2 + m * c + k, bm.at(i, j, m));
          }
      break;
    }
    case RingChoice::derivation: {
      // (u f) o v + u o (v g) = (u o v) h
      sys = SystemBuilder(p, a2 + b2 + c2);
      blocks = {{a, 0}, {b, a2}, {c, a2 + b2}};
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
          for (std::size_t k = 0; k < c; ++k) {
            sys.new_row();
            for (std::size_t al = 0; al < a; ++al) sys.add(i * a + al, bm.at(al, j, k));
            for (std::size_t be = 0; be < b; ++be) sys.add(a2 + j * b + be, bm.at(i, be, k));
            for (std::size_t m = 0; m < c; ++m) sys.sub(a2 + b2 + m * c + k, bm.at(i, j, m));
          }
      break;
    }
    case RingChoice::left_scalar: {
      // (f u) o v = g (u o v): both act on columns
      sys = SystemBuilder(p, a2 + c2);
      blocks = {{a, 0}, {c, a2}};
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
          for (std::size_t k = 0; k < c; ++k) {
            sys.new_row();
            for (std::size_t al = 0; al < a; ++al) sys.add(al * a + i, bm.at(al, j, k));
            for (std::size_t m = 0; m < c; ++m) sys.sub(a2 + k * c + m, bm.at(i, j, m));
          }
      break;
    }
    case RingChoice::right_scalar: {
      // u o (v f) = (u o v) g: both act on rows
      sys = SystemBuilder(p, b2 + c2);
      blocks = {{b, 0}, {c, b2}};
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
          for (std::size_t k = 0; k < c; ++k) {
            sys.new_row();
            for (std::size_t be = 0; be < b; ++be) sys.add(j * b + be, bm.at(i, be, k));
            for (std::size_t m = 0; m < c; ++m) sys.sub(b2 + m * c + k, bm.at(i, j, m));
          }
      break;
    }
  }

  FpSubspace sol = sys.solve();
  std::size_t deg = 0;
  for (auto [dim, off] : blocks) deg += dim;
  std::vector<FpMatrix> basis;
  for (std::size_t r = 0; r < sol.dim(); ++r)
    basis.push_back(block_diag(p, sol.basis.row(r), blocks));
  MatAlgebra alg = make_algebra(p, deg ? deg : 1, std::move(basis), false);
  alg.unital = alg.dim() > 0 && alg.in_span(FpMatrix::identity(p, alg.deg));
  return alg;
}

namespace {

struct ChainResult {
  std::vector<Subgroup> chain;
  std::size_t ring_dim = 0;
  std::size_t radical_dim = 0;
};

ChainResult radical_chain(const Filter& f, const std::vector<GradedLayer>& layers,
                          const BilinearMap& bm, const MonoidIndex& s, RingChoice which);

}  // namespace

std::vector<Subgroup> radical_refinement(const Filter& f, const MonoidIndex& s,
                                         const MonoidIndex& t, RingChoice which) {
  auto layers = graded_layers(f);
  BilinearMap bm = graded_bracket(f, layers, s, t);
  if (bm.is_zero()) throw std::invalid_argument("radical_refinement: graded bracket is trivial");
  return radical_chain(f, layers, bm, s, which).chain;
}

namespace {

ChainResult radical_chain(const Filter& f, const std::vector<GradedLayer>& layers,
                          const BilinearMap& bm, const MonoidIndex& s, RingChoice which) {
  ChainResult result;
  MatAlgebra ring = compute_ring(bm, which);
  result.ring_dim = ring.dim();
  if (ring.dim() == 0) return result;
  MatAlgebra acting = (which == RingChoice::derivation)
                          ? algebra_close(ring.basis, false)
                          : ring;
  FpSubspace rad = jacobson_radical(acting);
  result.radical_dim = rad.dim();
  if (rad.dim() == 0) return result;

  // the U block of the module carries L_s
  FpMatrix ublock(bm.p, bm.a, acting.deg);
  for (std::size_t i = 0; i < bm.a; ++i) ublock.at(i, i) = 1;
  FpSubspace act = FpSubspace::span_of(ublock);
  std::vector<FpSubspace> chain = ideal_power_flag(acting, rad, act);

  const GradedLayer* ls = nullptr;
  for (const auto& l : layers)
    if (l.index() == s) ls = &l;
  if (!ls) throw std::logic_error("radical_refinement: missing layer");

  const Subgroup& bot = ls->denominator();
  const Subgroup& top = ls->numerator();
  const Subgroup* prev = &top;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (chain[i].dim() == 0) break;
    std::vector<Element> gens = bot.igs();
    for (std::size_t r = 0; r < chain[i].dim(); ++r) {
      std::vector<fp_t> row = chain[i].basis.row(r);
      std::vector<fp_t> coords(row.begin(), row.begin() + bm.a);
      gens.push_back(ls->lift(coords));
    }
    Subgroup k = Subgroup::generated(f.group, gens);
    if (!k.is_normal())
      throw std::logic_error("radical_refinement: pullback of the radical chain is not normal");
    if (!(prev->contains(k)) || *prev == k || !(k.contains(bot)) || k == bot)
      throw std::logic_error("radical_refinement: radical chain is not strictly descending");
    result.chain.push_back(k);
    prev = &result.chain.back();
  }
  return result;
}

}  // namespace

namespace {

std::vector<RingChoice> rings_for(Policy policy, std::mt19937_64& rng) {
  switch (policy) {
    case Policy::adjoint: return {RingChoice::adjoint};
    case Policy::derivation: return {RingChoice::derivation};
    case Policy::first: return {RingChoice::adjoint, RingChoice::derivation};
    case Policy::random:
      return (rng() & 1) ? std::vector<RingChoice>{RingChoice::derivation, RingChoice::adjoint}
                         : std::vector<RingChoice>{RingChoice::adjoint, RingChoice::derivation};
    case Policy::sweep:
      return {RingChoice::adjoint, RingChoice::centroid, RingChoice::derivation,
              RingChoice::left_scalar, RingChoice::right_scalar};
  }
  return {};
}

}  // namespace

std::pair<Filter, bool> refine_once(const Filter& f, Policy policy, std::mt19937_64& rng,
                                    IterationStat* stat) {
  if (!is_full(f)) throw std::invalid_argument("refine_once: filter must be full");
  auto layers = graded_layers(f);
  std::vector<RingChoice> rings = rings_for(policy, rng);

  // candidate brackets in lexicographic (s, t) order
  for (std::size_t i = 0; i < f.entries.size(); ++i)
    for (std::size_t j = i; j < f.entries.size(); ++j) {
      const MonoidIndex& s = f.entries[i].index;
      const MonoidIndex& t = f.entries[j].index;
      BilinearMap bm = graded_bracket(f, layers, s, t);
      if (bm.is_zero()) continue;
      for (RingChoice ring : rings) {
        ChainResult cr = radical_chain(f, layers, bm, s, ring);
        // skip subgroups the filter already stores
        std::vector<Subgroup> fresh;
        for (const Subgroup& k : cr.chain) {
          bool known = false;
          for (const auto& ent : f.entries) known = known || ent.subgroup == k;
          if (!known) fresh.push_back(k);
        }
        if (fresh.empty()) continue;
        Prefilter pi = insert_subgroup(f, fresh, s);
        Filter out = generate(pi);
        if (!is_full(out)) out = fill(out);
        if (stat) {
          stat->ring = ring_name(ring);
          stat->bracket_s = s.str();
          stat->bracket_t = t.str();
          stat->ring_dim = cr.ring_dim;
          stat->radical_dim = cr.radical_dim;
          stat->subgroups_added = fresh.size();
          stat->inserted = fresh;
        }
        return {std::move(out), true};
      }
    }
  return {f, false};
}

std::pair<Filter, RefinementReport> refine_loop(const Filter& f, Policy policy,
                                                std::uint64_t seed, unsigned max_iter) {
  std::mt19937_64 rng(seed);
  RefinementReport report;
  report.initial_length = f.length();
  Filter cur = f;
  auto t0 = std::chrono::steady_clock::now();
  for (;;) {
    if (report.iterations >= max_iter) {
      report.hit_cap = true;
      break;
    }
    IterationStat stat;
    auto it0 = std::chrono::steady_clock::now();
    auto [next, changed] = refine_once(cur, policy, rng, &stat);
    stat.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - it0).count();
    if (!changed) break;
    ++report.iterations;
    report.per_iteration.push_back(std::move(stat));
    cur = std::move(next);
  }
  report.final_length = cur.length();
  report.subgroups_added = report.final_length - report.initial_length;
  report.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(cur), std::move(report)};
}

std::string report_to_json(const RefinementReport& r) {
  nlohmann::json j;
  j["iterations"] = r.iterations;
  j["subgroups_added"] = r.subgroups_added;
  j["len_initial"] = r.initial_length;
  j["len_final"] = r.final_length;
  j["growth"] = r.growth();
  j["hit_cap"] = r.hit_cap;
  j["seconds"] = r.total_seconds;
  j["per_iteration"] = nlohmann::json::array();
  for (const auto& it : r.per_iteration) {
    nlohmann::json e;
    e["ring"] = it.ring;
    e["s"] = it.bracket_s;
    e["t"] = it.bracket_t;
    e["ring_dim"] = it.ring_dim;
    e["radical_dim"] = it.radical_dim;
    e["subgroups_added"] = it.subgroups_added;
    e["seconds"] = it.seconds;
    j["per_iteration"].push_back(std::move(e));
  }
  return j.dump(2);
}

const char* kReportCsvHeader = "group,order_log_p,p,p_class,len_initial,len_final,growth,iterations,seconds";

std::string report_csv_row(const std::string& group_name, const PcGroupPtr& g,
                           unsigned group_p_class, const RefinementReport& r) {
  std::ostringstream os;
  os << group_name << ',' << g->ngens() << ',' << g->p() << ',' << group_p_class << ','
     << r.initial_length << ',' << r.final_length << ',' << r.growth() << ',' << r.iterations
     << ',' << r.total_seconds;
  return os.str();
}

}  // namespace pfilt
