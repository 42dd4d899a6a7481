#include <cctype>
#include <sstream>

#include "pfilt/pcgroup.hpp"

namespace pfilt {

ParseError::ParseError(const std::string& msg, unsigned line_, unsigned col_)
    : std::runtime_error("line " + std::to_string(line_) + ", column " + std::to_string(col_) +
                         ": " + msg),
      line(line_),
      column(col_) {}

namespace {

struct Cursor {
  const std::string& s;
  unsigned line;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_space();
    return pos >= s.size() || s[pos] == '#';
  }
  unsigned col() const { return static_cast<unsigned>(pos + 1); }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line, col()); }

  bool eat(char c) {
    skip_space();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  bool eat_word(const char* w) {
    skip_space();
    std::size_t len = std::string(w).size();
    if (s.compare(pos, len, w) == 0 &&
        (pos + len >= s.size() || !std::isalnum(static_cast<unsigned char>(s[pos + len])))) {
      pos += len;
      return true;
    }
    return false;
  }

  std::uint64_t number() {
    skip_space();
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected a number");
    std::uint64_t v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + (s[pos] - '0');
      if (v > (std::uint64_t(1) << 40)) fail("number too large");
      ++pos;
    }
    return v;
  }
};

Element parse_relation_word(Cursor& cur, fp_t p, unsigned n) {
  Element w(n, 0);
  while (!cur.done()) {
    if (!cur.eat('g')) cur.fail("expected a generator letter 'g'");
    std::uint64_t idx = cur.number();
    if (idx < 1 || idx > n) cur.fail("generator index out of range");
    std::uint64_t e = 1;
    if (cur.eat('^')) e = cur.number();
    w[idx - 1] = static_cast<fp_t>((w[idx - 1] + e) % p);
  }
  return w;
}

}  // namespace

PcGroupPtr parse_presentation(const std::string& text, bool check_consistency) {
  std::istringstream in(text);
  std::string lstr;
  unsigned lineno = 0;
  std::shared_ptr<PcPresentation> g;
  while (std::getline(in, lstr)) {
    ++lineno;
    Cursor cur{lstr, lineno};
    if (cur.done()) continue;
    if (!g) {
      if (!cur.eat_word("pcgroup")) cur.fail("presentation must start with a 'pcgroup' header");
      if (!cur.eat_word("p")) cur.fail("expected p=<prime>");
      cur.expect('=');
      std::uint64_t p = cur.number();
      if (p >= (std::uint64_t(1) << 31)) cur.fail("p too large");
      if (!is_prime(p)) cur.fail("p must be a prime");
      if (!cur.eat_word("n")) cur.fail("expected n=<count>");
      cur.expect('=');
      std::uint64_t n = cur.number();
      if (n > 4096) cur.fail("generator count too large");
      if (!cur.done()) cur.fail("trailing input after header");
      g = std::make_shared<PcPresentation>(static_cast<fp_t>(p), static_cast<unsigned>(n));
      continue;
    }
    if (cur.eat_word("pow")) {
      std::uint64_t i = cur.number();
      if (i < 1 || i > g->ngens()) cur.fail("pow: generator index out of range");
      cur.expect('=');
      Element w = parse_relation_word(cur, g->p(), g->ngens());
      try {
        g->set_power(static_cast<unsigned>(i - 1), std::move(w));
      } catch (const std::invalid_argument& e) {
        cur.fail(e.what());
      }
    } else if (cur.eat_word("comm")) {
      std::uint64_t j = cur.number();
      std::uint64_t i = cur.number();
      if (j < 1 || j > g->ngens() || i < 1 || i > g->ngens()) cur.fail("comm: index out of range");
      if (j <= i) cur.fail("comm: need j > i");
      cur.expect('=');
      Element w = parse_relation_word(cur, g->p(), g->ngens());
      try {
        g->set_comm(static_cast<unsigned>(j - 1), static_cast<unsigned>(i - 1), std::move(w));
      } catch (const std::invalid_argument& e) {
        cur.fail(e.what());
      }
    } else {
      cur.fail("expected 'pow' or 'comm'");
    }
  }
  if (!g) throw ParseError("empty presentation", lineno ? lineno : 1, 1);
  if (check_consistency) {
    if (auto err = g->consistency_error())
      throw std::invalid_argument("inconsistent presentation: " + *err);
  }
  return g;
}

namespace {

void print_word(std::ostream& os, const Element& w) {
  bool first = true;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!w[i]) continue;
    if (!first) os << ' ';
    os << 'g' << (i + 1) << '^' << w[i];
    first = false;
  }
}

}  // namespace

std::string print_presentation(const PcPresentation& g) {
  std::ostringstream os;
  os << "pcgroup p=" << g.p() << " n=" << g.ngens() << "\n";
  for (unsigned i = 0; i < g.ngens(); ++i) {
    if (g.is_id(g.power(i))) continue;
    os << "pow " << (i + 1) << " = ";
    print_word(os, g.power(i));
    os << "\n";
  }
  for (unsigned j = 0; j < g.ngens(); ++j)
    for (unsigned i = 0; i < j; ++i) {
      if (g.gens_commute(i, j)) continue;
      os << "comm " << (j + 1) << " " << (i + 1) << " = ";
      print_word(os, g.comm(j, i));
      os << "\n";
    }
  return os.str();
}

}  // namespace pfilt
