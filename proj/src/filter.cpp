#include "pfilt/filter.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pfilt {

MonoidIndex MonoidIndex::operator+(const MonoidIndex& o) const {
  if (coords.size() != o.coords.size()) throw std::invalid_argument("MonoidIndex: rank mismatch");
  MonoidIndex r;
  r.coords.resize(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] = coords[i] + o.coords[i];
  return r;
}

std::string MonoidIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) os << ',';
    os << coords[i];
  }
  os << ')';
  return os.str();
}

std::strong_ordering lex_cmp(const MonoidIndex& s, const MonoidIndex& t) {
  if (s.coords.size() != t.coords.size()) throw std::invalid_argument("lex_cmp: rank mismatch");
  for (std::size_t i = 0; i < s.coords.size(); ++i) {
    if (s.coords[i] != t.coords[i])
      return s.coords[i] < t.coords[i] ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

namespace {

MonoidIndex unit_last(std::size_t d) {
  MonoidIndex e;
  e.coords.assign(d, 0);
  e.coords[d - 1] = 1;
  return e;
}

// position of the first entry with index >= s, or entries.size()
std::size_t lower_entry(const Filter& f, const MonoidIndex& s) {
  std::size_t lo = 0, hi = f.entries.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (lex_less(f.entries[mid].index, s))
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

Subgroup evaluate(const Filter& f, const MonoidIndex& s) {
  if (s.rank() != f.d) throw std::invalid_argument("evaluate: rank mismatch");
  if (f.entries.empty()) return Subgroup::trivial(f.group);
  if (f.sign >= 0) {
    std::size_t pos = lower_entry(f, s);
    if (pos == f.entries.size()) return Subgroup::trivial(f.group);
    return f.entries[pos].subgroup;
  }
  // sign -1: last stored index <= s
  std::size_t pos = lower_entry(f, s);
  if (pos < f.entries.size() && f.entries[pos].index == s) return f.entries[pos].subgroup;
  if (pos == 0) return f.entries[0].subgroup;  // the 0-side boundary
  return f.entries[pos - 1].subgroup;
}

Filter boundary(const Filter& f) {
  if (f.entries.empty()) throw std::invalid_argument("boundary: empty filter");
  Filter out;
  out.group = f.group;
  out.d = f.d;
  out.sign = -1;

  MonoidIndex zero;
  zero.coords.assign(f.d, 0);
  out.entries.push_back({zero, f.entries[0].subgroup});
  if (f.sign >= 0) {
    for (std::size_t i = 0; i < f.entries.size(); ++i) {
      Subgroup next = (i + 1 < f.entries.size()) ? f.entries[i + 1].subgroup
                                                 : Subgroup::trivial(f.group);
      out.entries.push_back({f.entries[i].index, std::move(next)});
    }
  } else {
    for (std::size_t i = 1; i < f.entries.size(); ++i) {
      // the interval of the previous subgroup is [m_{i-1}, m_i)
      const MonoidIndex& m = f.entries[i].index;
      MonoidIndex n = m;
      if (m.coords[f.d - 1] > 0)
        n.coords[f.d - 1] -= 1;  // its maximum exists
      out.entries.push_back({std::move(n), f.entries[i].subgroup});
    }
  }
  // duplicate indices can arise at degenerate 0-side intervals; the later
  // (smaller) subgroup wins under min-index semantics
  std::vector<FilterEntry> dedup;
  for (auto& e : out.entries) {
    if (!dedup.empty() && dedup.back().index == e.index)
      dedup.back().subgroup = e.subgroup;
    else
      dedup.push_back(std::move(e));
  }
  out.entries = std::move(dedup);
  return out;
}

bool is_full(const Filter& f) {
  if (f.sign >= 0) return true;  // maxima are stored by definition
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    if (f.entries[i].subgroup.length() == 0) continue;
    if (i + 1 == f.entries.size()) return false;  // unbounded nontrivial tail
    if (f.entries[i + 1].index.coords[f.d - 1] == 0) return false;
  }
  return true;
}

namespace {

// min-index representation; a sign -1 filter is already stored this way
std::vector<FilterEntry> to_min_rep(const Filter& f) {
  if (f.sign < 0) return f.entries;
  const MonoidIndex ed = unit_last(f.d);
  std::vector<FilterEntry> min_rep;
  MonoidIndex zero;
  zero.coords.assign(f.d, 0);
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    MonoidIndex mn = (i == 0) ? zero : f.entries[i - 1].index + ed;
    min_rep.push_back({std::move(mn), f.entries[i].subgroup});
  }
  if (!f.entries.empty())
    min_rep.push_back({f.entries.back().index + ed, Subgroup::trivial(f.group)});
  return min_rep;
}

}  // namespace

Filter fill(const Filter& f) {
  if (f.sign >= 0) return f;  // stored maxima: already full
  const MonoidIndex ed = unit_last(f.d);
  std::vector<FilterEntry> rep = to_min_rep(f);

  for (;;) {
    // the largest subgroup whose interval has no maximum
    std::size_t defect = rep.size();
    for (std::size_t i = 0; i < rep.size(); ++i) {
      if (rep[i].subgroup.length() == 0) continue;
      bool maxless = (i + 1 == rep.size()) || (rep[i + 1].index.coords[f.d - 1] == 0);
      if (maxless) {
        defect = i;
        break;
      }
    }
    if (defect == rep.size()) break;

    // candidate maxima from sums of maxima of strictly larger subgroups
    const MonoidIndex lo = rep[defect].index;
    bool have_e = false;
    MonoidIndex e;
    for (std::size_t x = 0; x < defect; ++x) {
      MonoidIndex mx = rep[x + 1].index;
      mx.coords[f.d - 1] -= 1;  // entries above the defect have maxima
      for (std::size_t y = 0; y < defect; ++y) {
        MonoidIndex my = rep[y + 1].index;
        my.coords[f.d - 1] -= 1;
        MonoidIndex cand = mx + my;
        if (lex_leq(lo, cand) &&
            (defect + 1 == rep.size() || lex_less(cand, rep[defect + 1].index))) {
          if (!have_e || lex_less(e, cand)) {
            e = cand;
            have_e = true;
          }
        }
      }
    }
    if (!have_e) e = lo;

    MonoidIndex succ = e + ed;
    if (defect + 1 == rep.size())
      rep.push_back({std::move(succ), Subgroup::trivial(f.group)});
    else
      rep[defect + 1].index = std::move(succ);
  }

  // convert to max-index storage, dropping the trivial tail
  Filter out;
  out.group = f.group;
  out.d = f.d;
  out.sign = 1;
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (rep[i].subgroup.length() == 0) continue;
    assert(i + 1 < rep.size());
    MonoidIndex mx = rep[i + 1].index;
    assert(mx.coords[f.d - 1] > 0);
    mx.coords[f.d - 1] -= 1;
    out.entries.push_back({std::move(mx), rep[i].subgroup});
  }
  return out;
}

Prefilter insert_subgroup(const Filter& f, const std::vector<Subgroup>& chain,
                          const MonoidIndex& s) {
  if (f.sign < 0 || !is_full(f)) throw std::invalid_argument("insert_subgroup: filter must be full");
  if (chain.empty()) throw std::invalid_argument("insert_subgroup: empty chain");
  Subgroup top = evaluate(f, s);
  Subgroup bot = evaluate(boundary(f), s);
  const Subgroup* prev = &top;
  for (const Subgroup& h : chain) {
    if (!h.is_normal()) throw std::invalid_argument("insert_subgroup: subgroup is not normal");
    if (!(prev->contains(h)) || *prev == h)
      throw std::invalid_argument("insert_subgroup: chain must descend strictly from f_s");
    prev = &h;
  }
  if (!(prev->contains(bot)) || *prev == bot)
    throw std::invalid_argument("insert_subgroup: chain must stay strictly above the boundary");

  Prefilter out;
  out.group = f.group;
  out.d = f.d + 1;
  out.sign = 1;
  for (const auto& ent : f.entries) {
    MonoidIndex m = ent.index;
    m.coords.push_back(0);
    out.entries.push_back({std::move(m), ent.subgroup});
  }
  for (std::size_t t = 0; t < chain.size(); ++t) {
    MonoidIndex m = s;
    m.coords.push_back(t + 1);
    out.entries.push_back({std::move(m), chain[t]});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const FilterEntry& a, const FilterEntry& b) { return lex_less(a.index, b.index); });
  return out;
}

Prefilter insert_subgroup(const Filter& f, const Subgroup& h, const MonoidIndex& s) {
  return insert_subgroup(f, std::vector<Subgroup>{h}, s);
}

Filter generate(const Prefilter& pi, GenerateStats* stats) {
  if (pi.sign < 0) throw std::invalid_argument("generate: prefilter must have sign +1");
  if (pi.entries.empty()) throw std::invalid_argument("generate: empty prefilter");
  Filter cur = pi;
  cur.sign = 1;
  GenerateStats local;

  // subgroup identities interned as small ids so the pair bookkeeping stays cheap
  std::map<std::string, int> ids;
  auto sid = [&](const Subgroup& s) {
    auto [it, fresh] = ids.emplace(s.key(), static_cast<int>(ids.size()));
    (void)fresh;
    return it->second;
  };
  std::vector<int> eid;
  for (const auto& ent : cur.entries) eid.push_back(sid(ent.subgroup));
  std::set<std::pair<int, int>> computed;
  auto pair_of = [](int a, int b) { return a <= b ? std::make_pair(a, b) : std::make_pair(b, a); };

  for (;;) {
    // uncomputed pair with the smallest index sum, ties by (x, y)
    std::size_t bi = cur.entries.size(), bj = cur.entries.size();
    MonoidIndex bsum;
    for (std::size_t i = 0; i < cur.entries.size(); ++i)
      for (std::size_t j = i; j < cur.entries.size(); ++j) {
        if (computed.count(pair_of(eid[i], eid[j]))) continue;
        MonoidIndex sum = cur.entries[i].index + cur.entries[j].index;
        if (bi == cur.entries.size() || lex_less(sum, bsum) ||
            (sum == bsum && lex_less(cur.entries[i].index, cur.entries[bi].index))) {
          bi = i;
          bj = j;
          bsum = std::move(sum);
        }
      }
    if (bi == cur.entries.size()) break;

    const Subgroup H = cur.entries[bi].subgroup;
    const Subgroup K = cur.entries[bj].subgroup;
    computed.insert(pair_of(eid[bi], eid[bj]));
    ++local.pairs_processed;
    Subgroup c = commutator_subgroup(H, K);
    ++local.commutator_calls;

    MonoidIndex s = std::move(bsum);
    std::size_t tpos = lower_entry(cur, s);
    Subgroup ell = (tpos < cur.entries.size()) ? cur.entries[tpos].subgroup
                                               : Subgroup::trivial(cur.group);
    if (ell.contains(c)) continue;  // [H,K]L = L: nothing changes

    Subgroup merged = join(c, ell);
    if (tpos < cur.entries.size() && cur.entries[tpos].index == s) {
      cur.entries[tpos].subgroup = merged;
      eid[tpos] = sid(cur.entries[tpos].subgroup);
    } else {
      cur.entries.insert(cur.entries.begin() + tpos, {s, merged});
      eid.insert(eid.begin() + tpos, sid(merged));
    }
    // earlier terms absorb the new subgroup
    for (std::size_t u = 0; u < cur.entries.size() && lex_less(cur.entries[u].index, s); ++u)
      if (!cur.entries[u].subgroup.contains(merged)) {
        cur.entries[u].subgroup = join(cur.entries[u].subgroup, merged);
        eid[u] = sid(cur.entries[u].subgroup);
      }
    // merge duplicates, keeping the largest index (duplicates are consecutive)
    std::vector<FilterEntry> dedup;
    std::vector<int> dedup_id;
    for (std::size_t t = 0; t < cur.entries.size(); ++t) {
      if (!dedup.empty() && dedup_id.back() == eid[t])
        dedup.back().index = cur.entries[t].index;
      else {
        dedup.push_back(std::move(cur.entries[t]));
        dedup_id.push_back(eid[t]);
      }
    }
    cur.entries = std::move(dedup);
    eid = std::move(dedup_id);
  }
  if (stats) *stats = local;
  return cur;
}

VerifyReport verify_filter(const Filter& f) {
  auto fail = [](std::string msg) { return VerifyReport{false, std::move(msg)}; };
  if (f.sign != 1 && f.sign != -1) return fail("sign must be +1 or -1");
  for (const auto& ent : f.entries) {
    if (ent.index.rank() != f.d) return fail("entry rank differs from filter rank");
    if (ent.subgroup.group().get() != f.group.get()) return fail("entry subgroup from a different group");
  }
  for (std::size_t i = 0; i + 1 < f.entries.size(); ++i) {
    if (!lex_less(f.entries[i].index, f.entries[i + 1].index))
      return fail("indices not strictly ascending at position " + std::to_string(i));
    if (!(f.entries[i].subgroup.contains(f.entries[i + 1].subgroup)) ||
        f.entries[i].subgroup == f.entries[i + 1].subgroup)
      return fail("subgroups not strictly descending at position " + std::to_string(i));
  }
  if (f.sign > 0)
    for (const auto& ent : f.entries)
      if (ent.subgroup.length() == 0) return fail("trivial subgroup stored in a sign +1 filter");
  for (const auto& ent : f.entries)
    if (!ent.subgroup.is_normal())
      return fail("subgroup at " + ent.index.str() + " is not normal");
  for (std::size_t i = 0; i < f.entries.size(); ++i)
    for (std::size_t j = i; j < f.entries.size(); ++j) {
      Subgroup c = commutator_subgroup(f.entries[i].subgroup, f.entries[j].subgroup);
      Subgroup target = evaluate(f, f.entries[i].index + f.entries[j].index);
      if (!target.contains(c))
        return fail("commutator condition fails for stored pair " + f.entries[i].index.str() +
                    ", " + f.entries[j].index.str());
    }
  return {};
}

// --- closure oracle -----------------------------------------------------------

namespace {

struct OracleCtx {
  const Prefilter& pi;
  unsigned length_bound;
  bool depth_exhausted = false;

  Subgroup value_at(const MonoidIndex& x) const { return evaluate(pi, x); }

  // all nonzero parts <= rem coordinatewise that lie in the prefilter domain
  std::vector<MonoidIndex> parts(const MonoidIndex& rem) const {
    const MonoidIndex& last = pi.entries.back().index;
    std::vector<MonoidIndex> out;
    MonoidIndex cur;
    cur.coords.assign(rem.rank(), 0);
    for (;;) {
      // advance odometer
      std::size_t c = rem.rank();
      while (c-- > 0) {
        if (cur.coords[c] < rem.coords[c]) {
          ++cur.coords[c];
          for (std::size_t k = c + 1; k < rem.rank(); ++k) cur.coords[k] = 0;
          break;
        }
        if (c == 0) return out;
      }
      if (lex_leq(cur, last)) out.push_back(cur);
    }
  }

  void dfs(const MonoidIndex& rem, const Subgroup* c, unsigned depth, Subgroup& acc) {
    bool zero = true;
    for (auto v : rem.coords) zero = zero && (v == 0);
    if (zero) {
      if (c && !acc.contains(*c)) acc = join(acc, *c);
      return;
    }
    if (depth == length_bound) {
      if (c && c->length() != 0) depth_exhausted = true;
      return;
    }
    if (c && acc.contains(*c)) return;  // every completion only shrinks c
    if (c && c->length() == 0) return;
    for (const MonoidIndex& x : parts(rem)) {
      Subgroup v = value_at(x);
      MonoidIndex next;
      next.coords.resize(rem.rank());
      for (std::size_t k = 0; k < rem.rank(); ++k) next.coords[k] = rem.coords[k] - x.coords[k];
      if (!c) {
        dfs(next, &v, depth + 1, acc);
      } else {
        Subgroup nc = commutator_subgroup(*c, v);
        dfs(next, &nc, depth + 1, acc);
      }
    }
  }

  Subgroup closure_value(const MonoidIndex& s) {
    Subgroup acc = Subgroup::trivial(pi.group);
    dfs(s, nullptr, 0, acc);
    return acc;
  }
};

}  // namespace

Filter closure_oracle(const Prefilter& pi, unsigned length_bound) {
  if (pi.sign < 0) throw std::invalid_argument("closure_oracle: prefilter must have sign +1");
  if (pi.entries.empty()) throw std::invalid_argument("closure_oracle: empty prefilter");
  OracleCtx ctx{pi, length_bound};

  // candidate indices: sums of at most length_bound stored indices
  std::set<std::vector<std::uint64_t>> seen;
  std::vector<MonoidIndex> frontier;
  for (const auto& e : pi.entries)
    if (seen.insert(e.index.coords).second) frontier.push_back(e.index);
  std::vector<MonoidIndex> all = frontier;
  for (unsigned round = 1; round < length_bound; ++round) {
    std::vector<MonoidIndex> next;
    for (const auto& s : frontier)
      for (const auto& e : pi.entries) {
        MonoidIndex t = s + e.index;
        if (seen.insert(t.coords).second) next.push_back(t);
      }
    all.insert(all.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(all.begin(), all.end(), [](const MonoidIndex& a, const MonoidIndex& b) {
    return lex_less(a, b);
  });

  // closure values at every candidate, then maxima per distinct subgroup
  std::vector<std::pair<MonoidIndex, Subgroup>> vals;
  for (const auto& s : all) vals.emplace_back(s, ctx.closure_value(s));
  if (ctx.depth_exhausted)
    throw std::invalid_argument("closure_oracle: length_bound too small for this group");

  Filter out;
  out.group = pi.group;
  out.d = pi.d;
  out.sign = 1;
  const MonoidIndex ed = unit_last(pi.d);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].second.length() == 0) continue;
    bool last_of_group = (i + 1 == vals.size()) || !(vals[i + 1].second == vals[i].second);
    if (!last_of_group) continue;
    // confirm maximality against the lexicographic successor
    Subgroup above = ctx.closure_value(vals[i].first + ed);
    if (ctx.depth_exhausted)
      throw std::invalid_argument("closure_oracle: length_bound too small for this group");
    if (above == vals[i].second)
      throw std::invalid_argument("closure_oracle: candidate index set too small");
    out.entries.push_back({vals[i].first, vals[i].second});
  }
  return out;
}

// --- standard series ------------------------------------------------------------

namespace {

Filter series_filter(PcGroupPtr g, std::vector<Subgroup> terms) {
  Filter f;
  f.group = std::move(g);
  f.d = 1;
  f.sign = 1;
  for (std::size_t i = 0; i < terms.size(); ++i)
    f.entries.push_back({MonoidIndex{{i + 1}}, std::move(terms[i])});
  return f;
}

}  // namespace

Filter lower_central_series(PcGroupPtr g) {
  std::vector<Subgroup> terms;
  Subgroup whole = Subgroup::whole(g);
  Subgroup cur = whole;
  while (cur.length() != 0) {
    terms.push_back(cur);
    cur = commutator_subgroup(cur, whole);
  }
  return series_filter(std::move(g), std::move(terms));
}

Filter exponent_p_central_series(PcGroupPtr g) {
  std::vector<Subgroup> terms;
  Subgroup whole = Subgroup::whole(g);
  Subgroup cur = whole;
  while (cur.length() != 0) {
    terms.push_back(cur);
    Subgroup comm = commutator_subgroup(cur, whole);
    std::vector<Element> pth;
    for (const Element& y : cur.igs()) pth.push_back(g->pow(y, g->p()));
    Subgroup powers = Subgroup::generated(g, pth);
    cur = join(comm, powers);
  }
  return series_filter(std::move(g), std::move(terms));
}

unsigned p_class(PcGroupPtr g) {
  return static_cast<unsigned>(exponent_p_central_series(std::move(g)).entries.size());
}

// --- JSON ------------------------------------------------------------------------

std::string filter_to_json(const Filter& f) {
  nlohmann::json j;
  j["p"] = f.group->p();
  j["n"] = f.group->ngens();
  j["sign"] = f.sign;
  j["d"] = f.d;
  j["entries"] = nlohmann::json::array();
  for (const auto& ent : f.entries) {
    nlohmann::json e;
    e["index"] = ent.index.coords;
    e["igs"] = nlohmann::json::array();
    for (const Element& m : ent.subgroup.igs()) e["igs"].push_back(m);
    e["order"] = ent.subgroup.order_string();
    j["entries"].push_back(std::move(e));
  }
  return j.dump(2);
}

Filter filter_from_json(PcGroupPtr g, const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.at("p").get<fp_t>() != g->p() || j.at("n").get<unsigned>() != g->ngens())
    throw std::invalid_argument("filter_from_json: filter does not match the presentation");
  Filter f;
  f.group = g;
  f.sign = j.at("sign").get<int>();
  f.d = j.at("d").get<std::size_t>();
  for (const auto& e : j.at("entries")) {
    MonoidIndex idx;
    idx.coords = e.at("index").get<std::vector<std::uint64_t>>();
    std::vector<Element> igs;
    for (const auto& row : e.at("igs")) {
      Element m = row.get<Element>();
      if (m.size() != g->ngens()) throw std::invalid_argument("filter_from_json: bad igs row length");
      for (fp_t x : m)
        if (x >= g->p()) throw std::invalid_argument("filter_from_json: exponent out of range");
      igs.push_back(std::move(m));
    }
    Subgroup s = Subgroup::generated(g, igs);
    if (s.igs() != igs)
      throw std::invalid_argument("filter_from_json: igs rows are not in canonical form");
    if (e.at("order").get<std::string>() != s.order_string())
      throw std::invalid_argument("filter_from_json: stored order disagrees with the igs");
    f.entries.push_back({std::move(idx), std::move(s)});
  }
  return f;
}

}  // namespace pfilt
