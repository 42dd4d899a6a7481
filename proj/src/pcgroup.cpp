#include "pfilt/pcgroup.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace pfilt {

PcPresentation::PcPresentation(fp_t p, unsigned n) : p_(p), n_(n) {
  if (!is_prime(p)) throw std::invalid_argument("PcPresentation: p must be prime");
  pow_rel_.assign(n, Element(n, 0));
  comm_rel_.resize(n);
  commute_.resize(n);
  for (unsigned j = 0; j < n; ++j) {
    comm_rel_[j].assign(j, Element(n, 0));
    commute_[j].assign(j, true);
  }
}

void PcPresentation::check_word(const Element& w, unsigned above, const char* what) const {
  if (w.size() != n_) throw std::invalid_argument(std::string(what) + ": word length mismatch");
  for (unsigned k = 0; k < n_; ++k) {
    if (w[k] >= p_) throw std::invalid_argument(std::string(what) + ": exponent out of range");
    if (w[k] && k <= above)
      throw std::invalid_argument(std::string(what) + ": word must use only higher generators");
  }
}

void PcPresentation::set_power(unsigned i, Element w) {
  if (i >= n_) throw std::invalid_argument("set_power: index out of range");
  check_word(w, i, "set_power");
  pow_rel_[i] = std::move(w);
}

void PcPresentation::set_comm(unsigned j, unsigned i, Element w) {
  if (j >= n_ || i >= j) throw std::invalid_argument("set_comm: need j > i");
  check_word(w, j, "set_comm");
  commute_[j][i] = is_id(w);
  comm_rel_[j][i] = std::move(w);
}

bool PcPresentation::gens_commute(unsigned i, unsigned j) const {
  if (i == j) return true;
  if (i > j) std::swap(i, j);
  return commute_[j][i];
}

bool PcPresentation::is_id(const Element& x) const {
  for (fp_t e : x)
    if (e) return false;
  return true;
}

Element PcPresentation::gen(unsigned i, fp_t e) const {
  if (i >= n_) throw std::invalid_argument("gen: index out of range");
  Element x(n_, 0);
  x[i] = e % p_;
  return x;
}

unsigned PcPresentation::lead(const Element& x) const {
  for (unsigned i = 0; i < n_; ++i)
    if (x[i]) return i;
  return n_;
}

void PcPresentation::mul_gen(Element& a, unsigned i, fp_t e) const {
  e %= p_;
  if (!e) return;
  unsigned t = i + 1;
  while (t < n_ && a[t] == 0) ++t;
  if (t == n_) {
    fp_t s = a[i] + e;
    if (s < p_) {
      a[i] = s;
      return;
    }
    a[i] = s - p_;
    const Element& pw = pow_rel_[i];
    for (unsigned k = i + 1; k < n_; ++k) a[k] = pw[k];
    return;
  }
  // commuting tail without exponent overflow: nothing moves
  if (a[i] + e < p_) {
    bool clean = true;
    for (unsigned k = t; k < n_ && clean; ++k)
      if (a[k] && !gens_commute(i, k)) clean = false;
    if (clean) {
      a[i] += e;
      return;
    }
  }
  for (fp_t step = 0; step < e; ++step) {
    // a = b * g_i^(a_i) * T; push one g_i through the tail T
    std::vector<std::pair<unsigned, fp_t>> tail;
    for (unsigned k = i + 1; k < n_; ++k)
      if (a[k]) {
        tail.emplace_back(k, a[k]);
        a[k] = 0;
      }
    mul_gen(a, i, 1);  // no-tail case now
    for (auto [j, ej] : tail) {
      if (gens_commute(i, j)) {
        mul_gen(a, j, ej);
        continue;
      }
      // O(e) conjugation steps per tail letter; large primes would want a
      // cache of the power conjugates g_j^(g_i^e)
      const Element& cw = comm_rel_[j][i];
      for (fp_t r = 0; r < ej; ++r) {
        mul_gen(a, j, 1);
        for (unsigned k = j + 1; k < n_; ++k)
          if (cw[k]) mul_gen(a, k, cw[k]);
      }
    }
  }
}

Element PcPresentation::mul(const Element& x, const Element& y) const {
  assert(x.size() == n_ && y.size() == n_);
  Element a = x;
  for (unsigned j = 0; j < n_; ++j)
    if (y[j]) mul_gen(a, j, y[j]);
  return a;
}

Element PcPresentation::inv(const Element& x) const {
  Element y = id();
  Element w = x;
  for (unsigned i = 0; i < n_; ++i) {
    fp_t e = w[i];
    if (!e) continue;
    fp_t c = p_ - e;
    mul_gen(y, i, c);
    mul_gen(w, i, c);
  }
  return y;
}

Element PcPresentation::pow(const Element& x, std::uint64_t e) const {
  Element r = id();
  for (std::uint64_t k = 0; k < e; ++k) r = mul(r, x);
  return r;
}

Element PcPresentation::commutator(const Element& x, const Element& y) const {
  return mul(inv(mul(y, x)), mul(x, y));
}

Element PcPresentation::conj(const Element& x, const Element& y) const {
  return mul(inv(y), mul(x, y));
}

Element PcPresentation::collect_word(const std::vector<int>& word) const {
  Element a = id();
  for (int s : word) {
    if (s == 0 || static_cast<unsigned>(s > 0 ? s : -s) > n_)
      throw std::invalid_argument("collect_word: generator index out of range");
    if (s > 0)
      mul_gen(a, static_cast<unsigned>(s - 1), 1);
    else
      a = mul(a, inv(gen(static_cast<unsigned>(-s - 1))));
  }
  return a;
}

std::optional<std::string> PcPresentation::consistency_error() const {
  auto word_str = [&](unsigned k, unsigned j, int i) {
    std::ostringstream os;
    os << "g" << k + 1 << ",g" << j + 1;
    if (i >= 0) os << ",g" << i + 1;
    return os.str();
  };
  // g_k (g_j g_i) = (g_k g_j) g_i for k > j > i
  for (unsigned k = 0; k < n_; ++k)
    for (unsigned j = 0; j < k; ++j)
      for (unsigned i = 0; i < j; ++i) {
        Element lhs = mul(gen(k), mul(gen(j), gen(i)));
        Element rhs = mul(mul(gen(k), gen(j)), gen(i));
        if (lhs != rhs) return "associativity fails at " + word_str(k, j, int(i));
      }
  // (g_j^p) g_i = g_j^{p-1} (g_j g_i) and g_j (g_i^p) = (g_j g_i) g_i^{p-1}
  for (unsigned j = 0; j < n_; ++j)
    for (unsigned i = 0; i < j; ++i) {
      Element lhs = mul(pow(gen(j), p_), gen(i));
      Element rhs = mul(pow(gen(j), p_ - 1), mul(gen(j), gen(i)));
      if (lhs != rhs) return "power overlap fails at g" + std::to_string(j + 1) + "^p,g" + std::to_string(i + 1);
      lhs = mul(gen(j), pow(gen(i), p_));
      rhs = mul(mul(gen(j), gen(i)), pow(gen(i), p_ - 1));
      if (lhs != rhs) return "power overlap fails at g" + std::to_string(j + 1) + ",g" + std::to_string(i + 1) + "^p";
    }
  // (g_i^p) g_i = g_i (g_i^p)
  for (unsigned i = 0; i < n_; ++i) {
    Element lhs = mul(pow(gen(i), p_), gen(i));
    Element rhs = mul(gen(i), pow(gen(i), p_));
    if (lhs != rhs) return "power overlap fails at g" + std::to_string(i + 1) + "^(p+1)";
  }
  return std::nullopt;
}

bool PcPresentation::same_presentation(const PcPresentation& o) const {
  return p_ == o.p_ && n_ == o.n_ && pow_rel_ == o.pow_rel_ && comm_rel_ == o.comm_rel_;
}

// --- subgroups --------------------------------------------------------------

namespace {

struct IgsWork {
  const PcPresentation* g;
  // sorted by lead ascending; lead exponents 1
  std::vector<Element> members;
  std::vector<Element> inverses;
  std::vector<unsigned> leads;

  std::size_t find(unsigned l) const {
    auto it = std::lower_bound(leads.begin(), leads.end(), l);
    if (it != leads.end() && *it == l) return static_cast<std::size_t>(it - leads.begin());
    return leads.size();
  }

  // reduce x;  returns the residual (identity iff x was in the span)
  Element reduce(Element x) const {
    for (;;) {
      unsigned l = g->lead(x);
      if (l == g->ngens()) return x;
      std::size_t idx = find(l);
      if (idx == leads.size()) return x;
      fp_t e = x[l];
      for (fp_t r = 0; r < e; ++r) x = g->mul(inverses[idx], x);
    }
  }

  // insert a residual with fresh lead; returns its position
  std::size_t insert(Element x) {
    unsigned l = g->lead(x);
    assert(l < g->ngens());
    fp_t e = x[l];
    if (e != 1) x = g->pow(x, fp_inv(e, g->p()));
    assert(x[l] == 1);
    auto it = std::lower_bound(leads.begin(), leads.end(), l);
    std::size_t pos = static_cast<std::size_t>(it - leads.begin());
    leads.insert(it, l);
    members.insert(members.begin() + pos, x);
    inverses.insert(inverses.begin() + pos, g->inv(members[pos]));
    return pos;
  }
};

// Closure of gens under powers and mutual commutators (subgroup span), plus
// conjugation by the given conjugators when provided (normal closure).
std::vector<Element> span_closure(const PcPresentation& g, const std::vector<Element>& gens,
                                  const std::vector<Element>* conjugators) {
  IgsWork work{&g, {}, {}, {}};
  std::deque<Element> queue(gens.begin(), gens.end());
  while (!queue.empty()) {
    Element x = work.reduce(std::move(queue.front()));
    queue.pop_front();
    if (g.is_id(x)) continue;
    std::size_t pos = work.insert(std::move(x));
    const Element z = work.members[pos];
    queue.push_back(g.pow(z, g.p()));
    for (const Element& y : work.members) {
      if (y == z) continue;
      queue.push_back(g.commutator(z, y));
      queue.push_back(g.commutator(y, z));
    }
    if (conjugators)
      for (const Element& c : *conjugators) queue.push_back(g.commutator(z, c));
  }
  // full reduction for the canonical form
  for (std::size_t i = work.members.size(); i-- > 0;) {
    Element& y = work.members[i];
    for (std::size_t t = i + 1; t < work.members.size(); ++t) {
      fp_t e = y[work.leads[t]];
      if (!e)
        continue;
      for (fp_t r = 0; r < e; ++r) y = g.mul(y, work.inverses[t]);
    }
    work.inverses[i] = g.inv(y);
  }
  return work.members;
}

}  // namespace

Subgroup subgroup_from_canonical_igs(PcGroupPtr g, std::vector<Element> igs) {
  Subgroup s;
  s.g_ = std::move(g);
  s.igs_ = std::move(igs);
  return s;
}

Subgroup Subgroup::trivial(PcGroupPtr g) { return subgroup_from_canonical_igs(std::move(g), {}); }

Subgroup Subgroup::whole(PcGroupPtr g) {
  std::vector<Element> igs;
  for (unsigned i = 0; i < g->ngens(); ++i) igs.push_back(g->gen(i));
  return generated(std::move(g), igs);
}

Subgroup Subgroup::generated(PcGroupPtr g, const std::vector<Element>& gens) {
  auto igs = span_closure(*g, gens, nullptr);
  return subgroup_from_canonical_igs(std::move(g), std::move(igs));
}

std::string Subgroup::order_string() const { return pow_decimal_string(g_->p(), igs_.size()); }

bool Subgroup::contains(const Element& x) const {
  IgsWork work{g_.get(), igs_, {}, {}};
  for (const Element& m : igs_) {
    work.inverses.push_back(g_->inv(m));
    work.leads.push_back(g_->lead(m));
  }
  return g_->is_id(work.reduce(x));
}

bool Subgroup::contains(const Subgroup& other) const {
  if (other.igs_.empty()) return true;
  IgsWork work{g_.get(), igs_, {}, {}};
  for (const Element& m : igs_) {
    work.inverses.push_back(g_->inv(m));
    work.leads.push_back(g_->lead(m));
  }
  for (const Element& m : other.igs_)
    if (!g_->is_id(work.reduce(m))) return false;
  return true;
}

bool Subgroup::is_normal() const {
  const PcPresentation& g = *g_;
  for (const Element& y : igs_)
    for (unsigned j = 0; j < g.ngens(); ++j) {
      bool clean = true;
      for (unsigned k = g.lead(y); k < g.ngens() && clean; ++k)
        if (y[k] && !g.gens_commute(j, k)) clean = false;
      if (clean) continue;
      if (!contains(g.commutator(y, g.gen(j)))) return false;
    }
  return true;
}

bool Subgroup::operator==(const Subgroup& o) const {
  return g_.get() == o.g_.get() && igs_ == o.igs_;
}

std::string Subgroup::key() const {
  std::string k;
  k.reserve(igs_.size() * (g_->ngens() + 1));
  for (const Element& m : igs_) {
    for (fp_t e : m) {
      k += static_cast<char>('0' + (e % 64));
      if (e >= 64) k += std::to_string(e);
    }
    k += '|';
  }
  return k;
}

Subgroup join(const Subgroup& x, const Subgroup& y) {
  if (x.group().get() != y.group().get()) throw std::invalid_argument("join: mixed groups");
  std::vector<Element> gens = x.igs();
  gens.insert(gens.end(), y.igs().begin(), y.igs().end());
  return Subgroup::generated(x.group(), gens);
}

Subgroup normal_closure(const Subgroup& s) {
  const PcGroupPtr& gp = s.group();
  std::vector<Element> conj;
  for (unsigned i = 0; i < gp->ngens(); ++i) conj.push_back(gp->gen(i));
  auto igs = span_closure(*gp, s.igs(), &conj);
  return subgroup_from_canonical_igs(gp, std::move(igs));
}

Subgroup normal_closure_in(const Subgroup& ambient, const Subgroup& s) {
  const PcGroupPtr& gp = s.group();
  if (ambient.group().get() != gp.get()) throw std::invalid_argument("normal_closure_in: mixed groups");
  auto igs = span_closure(*gp, s.igs(), &ambient.igs());
  return subgroup_from_canonical_igs(gp, std::move(igs));
}

Subgroup commutator_subgroup(const Subgroup& x, const Subgroup& y) {
  if (x.group().get() != y.group().get())
    throw std::invalid_argument("commutator_subgroup: mixed groups");
  const PcPresentation& g = *x.group();
  std::vector<Element> gens;
  for (const Element& a : x.igs())
    for (const Element& b : y.igs()) {
      bool clean = true;
      for (unsigned ka = g.lead(a); ka < g.ngens() && clean; ++ka) {
        if (!a[ka]) continue;
        for (unsigned kb = g.lead(b); kb < g.ngens() && clean; ++kb)
          if (b[kb] && !g.gens_commute(ka, kb)) clean = false;
      }
      if (clean) continue;
      Element c = g.commutator(a, b);
      if (!g.is_id(c)) gens.push_back(std::move(c));
    }
  if (gens.empty()) return Subgroup::trivial(x.group());
  return normal_closure(Subgroup::generated(x.group(), gens));
}

std::string pow_decimal_string(fp_t p, std::size_t e) {
  std::vector<unsigned> digits{1};
  for (std::size_t k = 0; k < e; ++k) {
    unsigned carry = 0;
    for (auto& d : digits) {
      unsigned v = d * p + carry;
      d = v % 10;
      carry = v / 10;
    }
    while (carry) {
      digits.push_back(carry % 10);
      carry /= 10;
    }
  }
  std::string s;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) s += static_cast<char>('0' + *it);
  return s;
}

}  // namespace pfilt
