#include "pfilt/gfp.hpp"

#include <cassert>
#include <stdexcept>

namespace pfilt {

bool is_prime(std::uint64_t m) {
  if (m < 2) return false;
  for (std::uint64_t d = 2; d * d <= m; ++d)
    if (m % d == 0) return false;
  return true;
}

fp_t fp_add(fp_t x, fp_t y, fp_t p) {
  fp_t s = x + y;
  return s >= p ? s - p : s;
}

fp_t fp_sub(fp_t x, fp_t y, fp_t p) { return x >= y ? x - y : x + p - y; }

fp_t fp_mul(fp_t x, fp_t y, fp_t p) {
  return static_cast<fp_t>((static_cast<std::uint64_t>(x) * y) % p);
}

fp_t fp_pow(fp_t x, std::uint64_t e, fp_t p) {
  fp_t r = 1 % p;
  fp_t b = x % p;
  while (e) {
    if (e & 1) r = fp_mul(r, b, p);
    b = fp_mul(b, b, p);
    e >>= 1;
  }
  return r;
}

fp_t fp_inv(fp_t x, fp_t p) {
  if (x % p == 0) throw std::domain_error("fp_inv: zero is not invertible");
  return fp_pow(x, p - 2, p);
}

FpMatrix::FpMatrix(fp_t p_, std::size_t rows_, std::size_t cols_)
    : p(p_), rows(rows_), cols(cols_), a(rows_ * cols_, 0) {
  if (!is_prime(p_)) throw std::invalid_argument("FpMatrix: modulus must be prime");
}

FpMatrix FpMatrix::identity(fp_t p, std::size_t k) {
  FpMatrix m(p, k, k);
  for (std::size_t i = 0; i < k; ++i) m.at(i, i) = 1 % p;
  return m;
}

FpMatrix FpMatrix::from_rows(fp_t p, const std::vector<std::vector<fp_t>>& rows) {
  std::size_t nc = rows.empty() ? 0 : rows[0].size();
  FpMatrix m(p, rows.size(), nc);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != nc) throw std::invalid_argument("from_rows: ragged rows");
    for (std::size_t c = 0; c < nc; ++c) m.at(r, c) = rows[r][c] % p;
  }
  return m;
}

bool FpMatrix::is_zero() const {
  for (fp_t x : a)
    if (x) return false;
  return true;
}

FpMatrix FpMatrix::operator+(const FpMatrix& o) const {
  assert(p == o.p && rows == o.rows && cols == o.cols);
  FpMatrix r(p, rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = fp_add(a[i], o.a[i], p);
  return r;
}

FpMatrix FpMatrix::operator-(const FpMatrix& o) const {
  assert(p == o.p && rows == o.rows && cols == o.cols);
  FpMatrix r(p, rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = fp_sub(a[i], o.a[i], p);
  return r;
}

FpMatrix FpMatrix::operator*(const FpMatrix& o) const {
  assert(p == o.p);
  if (cols != o.rows) throw std::invalid_argument("matrix product: shape mismatch");
  FpMatrix r(p, rows, o.cols);
  // deferred reduction: safe while cols * (p-1)^2 fits in 64 bits
  const bool defer = p < (fp_t(1) << 16);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      fp_t x = at(i, k);
      if (!x) continue;
      const fp_t* orow = &o.a[k * o.cols];
      fp_t* rrow = &r.a[i * o.cols];
      if (defer) {
        for (std::size_t j = 0; j < o.cols; ++j)
          rrow[j] = static_cast<fp_t>((rrow[j] + static_cast<std::uint64_t>(x) * orow[j]) % p);
      } else {
        for (std::size_t j = 0; j < o.cols; ++j)
          rrow[j] = fp_add(rrow[j], fp_mul(x, orow[j], p), p);
      }
    }
  }
  return r;
}

FpMatrix FpMatrix::scaled(fp_t c) const {
  FpMatrix r(p, rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = fp_mul(a[i], c, p);
  return r;
}

FpMatrix FpMatrix::transposed() const {
  FpMatrix r(p, cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
  return r;
}

std::vector<fp_t> FpMatrix::row(std::size_t r) const {
  return std::vector<fp_t>(a.begin() + r * cols, a.begin() + (r + 1) * cols);
}

void FpMatrix::set_row(std::size_t r, const std::vector<fp_t>& v) {
  assert(v.size() == cols);
  for (std::size_t c = 0; c < cols; ++c) at(r, c) = v[c] % p;
}

std::vector<fp_t> row_times(const std::vector<fp_t>& v, const FpMatrix& m) {
  if (v.size() != m.rows) throw std::invalid_argument("row_times: shape mismatch");
  std::vector<fp_t> r(m.cols, 0);
  for (std::size_t k = 0; k < m.rows; ++k) {
    fp_t x = v[k];
    if (!x) continue;
    for (std::size_t j = 0; j < m.cols; ++j)
      r[j] = static_cast<fp_t>((r[j] + static_cast<std::uint64_t>(x) * m.at(k, j)) % m.p);
  }
  return r;
}

std::pair<FpMatrix, std::vector<std::size_t>> rref(const FpMatrix& m) {
  FpMatrix r = m;
  const fp_t p = m.p;
  std::vector<std::size_t> pivots;
  std::size_t lead = 0;
  for (std::size_t col = 0; col < r.cols && lead < r.rows; ++col) {
    std::size_t sel = lead;
    while (sel < r.rows && r.at(sel, col) == 0) ++sel;
    if (sel == r.rows) continue;
    if (sel != lead)
      for (std::size_t c = 0; c < r.cols; ++c) std::swap(r.at(sel, c), r.at(lead, c));
    fp_t iv = fp_inv(r.at(lead, col), p);
    for (std::size_t c = col; c < r.cols; ++c) r.at(lead, c) = fp_mul(r.at(lead, c), iv, p);
    for (std::size_t i = 0; i < r.rows; ++i) {
      if (i == lead) continue;
      fp_t f = r.at(i, col);
      if (!f) continue;
      for (std::size_t c = col; c < r.cols; ++c)
        r.at(i, c) = fp_sub(r.at(i, c), fp_mul(f, r.at(lead, c), p), p);
    }
    pivots.push_back(col);
    ++lead;
  }
  return {std::move(r), std::move(pivots)};
}

std::size_t rank(const FpMatrix& m) { return rref(m).second.size(); }

FpSubspace FpSubspace::zero(fp_t p, std::size_t ambient) {
  return FpSubspace{p, ambient, FpMatrix(p, 0, ambient)};
}

FpSubspace FpSubspace::full(fp_t p, std::size_t ambient) {
  return FpSubspace{p, ambient, FpMatrix::identity(p, ambient)};
}

FpSubspace FpSubspace::span_of(const FpMatrix& rows) {
  auto [r, piv] = rref(rows);
  FpMatrix basis(rows.p, piv.size(), rows.cols);
  for (std::size_t i = 0; i < piv.size(); ++i) basis.set_row(i, r.row(i));
  return FpSubspace{rows.p, rows.cols, std::move(basis)};
}

std::vector<fp_t> FpSubspace::reduce(std::vector<fp_t> v) const {
  if (v.size() != ambient_dim) throw std::invalid_argument("reduce: ambient mismatch");
  std::size_t col = 0;
  for (std::size_t i = 0; i < basis.rows; ++i) {
    while (col < ambient_dim && basis.at(i, col) == 0) ++col;
    if (col == ambient_dim) break;
    fp_t f = v[col];
    if (f)
      for (std::size_t c = col; c < ambient_dim; ++c)
        v[c] = fp_sub(v[c], fp_mul(f, basis.at(i, c), p), p);
  }
  return v;
}

bool FpSubspace::contains(const std::vector<fp_t>& v) const {
  for (fp_t x : reduce(v))
    if (x) return false;
  return true;
}

bool FpSubspace::contains(const FpSubspace& other) const {
  for (std::size_t i = 0; i < other.basis.rows; ++i)
    if (!contains(other.basis.row(i))) return false;
  return true;
}

FpSubspace FpSubspace::sum(const FpSubspace& other) const {
  assert(p == other.p && ambient_dim == other.ambient_dim);
  FpMatrix stack(p, basis.rows + other.basis.rows, ambient_dim);
  for (std::size_t i = 0; i < basis.rows; ++i) stack.set_row(i, basis.row(i));
  for (std::size_t i = 0; i < other.basis.rows; ++i)
    stack.set_row(basis.rows + i, other.basis.row(i));
  return span_of(stack);
}

FpSubspace nullspace(const FpMatrix& m) {
  auto [r, piv] = rref(m);
  std::vector<bool> is_piv(m.cols, false);
  for (std::size_t c : piv) is_piv[c] = true;
  FpMatrix rows(m.p, m.cols - piv.size(), m.cols);
  std::size_t out = 0;
  for (std::size_t j = 0; j < m.cols; ++j) {
    if (is_piv[j]) continue;
    rows.at(out, j) = 1;
    for (std::size_t i = 0; i < piv.size(); ++i)
      rows.at(out, piv[i]) = fp_sub(0, r.at(i, j), m.p);
    ++out;
  }
  return FpSubspace::span_of(rows);
}

namespace {

// Similarity reduction to upper Hessenberg form, in place.
void hessenberg(FpMatrix& h) {
  const std::size_t k = h.rows;
  const fp_t p = h.p;
  if (k < 3) return;
  for (std::size_t c = 0; c + 2 < k; ++c) {
    std::size_t piv = c + 1;
    while (piv < k && h.at(piv, c) == 0) ++piv;
    if (piv == k) continue;
    if (piv != c + 1) {
      for (std::size_t j = 0; j < k; ++j) std::swap(h.at(piv, j), h.at(c + 1, j));
      for (std::size_t i = 0; i < k; ++i) std::swap(h.at(i, piv), h.at(i, c + 1));
    }
    fp_t iv = fp_inv(h.at(c + 1, c), p);
    for (std::size_t i = c + 2; i < k; ++i) {
      fp_t f = fp_mul(h.at(i, c), iv, p);
      if (!f) continue;
      for (std::size_t j = 0; j < k; ++j)
        h.at(i, j) = fp_sub(h.at(i, j), fp_mul(f, h.at(c + 1, j), p), p);
      for (std::size_t i2 = 0; i2 < k; ++i2)
        h.at(i2, c + 1) = fp_add(h.at(i2, c + 1), fp_mul(f, h.at(i2, i), p), p);
    }
  }
}

}  // namespace

std::vector<fp_t> charpoly(const FpMatrix& m) {
  if (m.rows != m.cols) throw std::invalid_argument("charpoly: square matrix required");
  const std::size_t k = m.rows;
  const fp_t p = m.p;
  FpMatrix h = m;
  hessenberg(h);
  // P_0 = 1; P_i = charpoly of leading i x i block, expanded along its last column.
  std::vector<std::vector<fp_t>> ps(k + 1);
  ps[0] = {1 % p};
  for (std::size_t i = 1; i <= k; ++i) {
    std::vector<fp_t> cur(i + 1, 0);
    // (x - h[i-1,i-1]) * P_{i-1}
    const auto& prev = ps[i - 1];
    for (std::size_t d = 0; d < prev.size(); ++d) {
      cur[d + 1] = fp_add(cur[d + 1], prev[d], p);
      cur[d] = fp_sub(cur[d], fp_mul(h.at(i - 1, i - 1), prev[d], p), p);
    }
    fp_t subprod = 1 % p;  // product of subdiagonal entries h[j][j-1], j = t..i-1
    for (std::size_t t = i - 1; t >= 1; --t) {
      subprod = fp_mul(subprod, h.at(t, t - 1), p);
      if (!subprod) break;
      fp_t coef = fp_mul(h.at(t - 1, i - 1), subprod, p);
      if (!coef) continue;
      const auto& pt = ps[t - 1];
      for (std::size_t d = 0; d < pt.size(); ++d)
        cur[d] = fp_sub(cur[d], fp_mul(coef, pt[d], p), p);
    }
    ps[i] = std::move(cur);
  }
  return ps[k];
}

}  // namespace pfilt
