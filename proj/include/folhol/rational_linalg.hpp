/// Dense exact linear algebra over the rationals: reduced row echelon form
/// and the usual consumers (rank, kernel, solve, inverse). Everything here is
/// small and dense; fraction growth is handled by GMP.
#pragma once

#include <optional>
#include <vector>

#include "folhol/rational.hpp"

namespace folhol {

using RatMatrix = std::vector<std::vector<Rational>>;
using RatVector = std::vector<Rational>;

struct RrefResult {
  RatMatrix mat;
  std::vector<unsigned> pivot_cols;
};

/// Gauss-Jordan elimination with leftmost-pivot selection; pivots are chosen
/// as the first row (lowest index) with a nonzero entry in the current column.
inline RrefResult rref(RatMatrix m) {
  RrefResult out;
  const size_t rows = m.size();
  const size_t cols = rows == 0 ? 0 : m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = rows;
    for (size_t i = r; i < rows; ++i) {
      if (!m[i][c].is_zero()) { piv = i; break; }
    }
    if (piv == rows) continue;
    std::swap(m[r], m[piv]);
    Rational inv = m[r][c].inverse();
    for (size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      Rational f = m[i][c];
      for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    out.pivot_cols.push_back(static_cast<unsigned>(c));
    ++r;
  }
  out.mat = std::move(m);
  return out;
}

inline unsigned rank(const RatMatrix& m) {
  return static_cast<unsigned>(rref(m).pivot_cols.size());
}

/// Basis of the (right) null space {x : M x = 0}, one vector per free column.
inline std::vector<RatVector> kernel_basis(const RatMatrix& m) {
  const size_t cols = m.empty() ? 0 : m[0].size();
  RrefResult rr = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (unsigned c : rr.pivot_cols) is_pivot[c] = true;
  std::vector<RatVector> basis;
  for (size_t free_c = 0; free_c < cols; ++free_c) {
    if (is_pivot[free_c]) continue;
    RatVector v(cols, Rational(0));
    v[free_c] = Rational(1);
    for (size_t pr = 0; pr < rr.pivot_cols.size(); ++pr) {
      v[rr.pivot_cols[pr]] = -rr.mat[pr][free_c];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves M x = b exactly; nullopt when inconsistent. With multiple solutions
/// the free variables are set to zero.
inline std::optional<RatVector> solve(const RatMatrix& m, const RatVector& b) {
  const size_t rows = m.size();
  const size_t cols = rows == 0 ? 0 : m[0].size();
  RatMatrix aug = m;
  for (size_t i = 0; i < rows; ++i) aug[i].push_back(b[i]);
  RrefResult rr = rref(std::move(aug));
  for (size_t i = 0; i < rows; ++i) {
    bool all_zero = true;
    for (size_t j = 0; j < cols; ++j)
      if (!rr.mat[i][j].is_zero()) { all_zero = false; break; }
    if (all_zero && !rr.mat[i][cols].is_zero()) return std::nullopt;
  }
  RatVector x(cols, Rational(0));
  for (size_t pr = 0; pr < rr.pivot_cols.size(); ++pr) {
    if (rr.pivot_cols[pr] < cols) x[rr.pivot_cols[pr]] = rr.mat[pr][cols];
  }
  return x;
}

inline std::optional<RatMatrix> inverse(const RatMatrix& m) {
  const size_t n = m.size();
  RatMatrix aug = m;
  for (size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw dimension_error("inverse: matrix not square");
    for (size_t j = 0; j < n; ++j) aug[i].push_back(Rational(i == j ? 1 : 0));
  }
  RrefResult rr = rref(std::move(aug));
  if (rr.pivot_cols.size() != n) return std::nullopt;
  RatMatrix inv(n, RatVector(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv[i][j] = rr.mat[i][n + j];
  return inv;
}

inline RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b) {
  const size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  RatMatrix r(n, RatVector(m, Rational(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (a[i][l].is_zero()) continue;
      for (size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
    }
  return r;
}

inline RatMatrix identity_matrix(size_t n) {
  RatMatrix m(n, RatVector(n, Rational(0)));
  for (size_t i = 0; i < n; ++i) m[i][i] = Rational(1);
  return m;
}

} // namespace folhol
