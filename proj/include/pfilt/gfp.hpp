#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace pfilt {

/// Residue mod a word-size prime.
using fp_t = std::uint32_t;

bool is_prime(std::uint64_t m);

fp_t fp_add(fp_t x, fp_t y, fp_t p);
fp_t fp_sub(fp_t x, fp_t y, fp_t p);
fp_t fp_mul(fp_t x, fp_t y, fp_t p);
fp_t fp_inv(fp_t x, fp_t p);
fp_t fp_pow(fp_t x, std::uint64_t e, fp_t p);

/// Dense matrix over GF(p), row-major. Entries are kept in [0, p).
struct FpMatrix {
  fp_t p = 2;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<fp_t> a;

  FpMatrix() = default;
  FpMatrix(fp_t p_, std::size_t rows_, std::size_t cols_);

  static FpMatrix identity(fp_t p, std::size_t k);
  static FpMatrix from_rows(fp_t p, const std::vector<std::vector<fp_t>>& rows);

  fp_t& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  fp_t at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

  bool operator==(const FpMatrix&) const = default;
  bool is_zero() const;

  FpMatrix operator+(const FpMatrix& o) const;
  FpMatrix operator-(const FpMatrix& o) const;
  FpMatrix operator*(const FpMatrix& o) const;
  FpMatrix scaled(fp_t c) const;
  FpMatrix transposed() const;

  std::vector<fp_t> row(std::size_t r) const;
  void set_row(std::size_t r, const std::vector<fp_t>& v);
  std::vector<fp_t> flat() const { return a; }
};

/// v * m for a row vector v.
std::vector<fp_t> row_times(const std::vector<fp_t>& v, const FpMatrix& m);

/// Reduced row echelon form together with the pivot columns.
std::pair<FpMatrix, std::vector<std::size_t>> rref(const FpMatrix& m);

std::size_t rank(const FpMatrix& m);

/// Subspace of GF(p)^ambient_dim given by an RREF row basis.
struct FpSubspace {
  fp_t p = 2;
  std::size_t ambient_dim = 0;
  FpMatrix basis;

  static FpSubspace zero(fp_t p, std::size_t ambient);
  static FpSubspace full(fp_t p, std::size_t ambient);
  static FpSubspace span_of(const FpMatrix& rows);

  std::size_t dim() const { return basis.rows; }
  bool operator==(const FpSubspace&) const = default;

  /// Residual of v after reduction against the basis rows.
  std::vector<fp_t> reduce(std::vector<fp_t> v) const;
  bool contains(const std::vector<fp_t>& v) const;
  bool contains(const FpSubspace& other) const;
  FpSubspace sum(const FpSubspace& other) const;
};

/// Basis of the right kernel {v : m v^T = 0}, as an RREF subspace.
FpSubspace nullspace(const FpMatrix& m);

/// Coefficients of det(X*I - m), ascending degree (length rows+1, monic).
std::vector<fp_t> charpoly(const FpMatrix& m);

}  // namespace pfilt
