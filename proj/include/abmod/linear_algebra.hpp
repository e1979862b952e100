#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "abmod/rational.hpp"

namespace abmod {

using Matrix = std::vector<std::vector<Rational>>;  // row-major

struct LinearSolution {
  bool consistent = false;
  std::vector<Rational> x;   // free variables set to zero
  std::vector<int> pivots;   // pivot columns, in elimination order
};

// Solves M x = rhs by Gauss-Jordan elimination. Pivot columns are chosen
// following `column_order` (default 0..n-1); non-pivot columns are free and
// set to zero, so columns late in the order absorb the freedom.
inline LinearSolution solve_linear(Matrix m, std::vector<Rational> rhs, std::size_t cols,
                                   const std::vector<int>& column_order = {}) {
  std::size_t rows = m.size();
  std::vector<int> order = column_order;
  if (order.empty())
    for (std::size_t c = 0; c < cols; ++c) order.push_back(static_cast<int>(c));
  LinearSolution out;
  std::vector<int> pivot_row_of(cols, -1);
  std::size_t r = 0;
  for (int c : order) {
    if (r == rows) break;
    std::size_t p = r;
    while (p < rows && m[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    std::swap(rhs[p], rhs[r]);
    Rational inv = Rational(1) / m[r][c];
    for (auto& v : m[r]) v *= inv;
    rhs[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      Rational f = m[i][c];
      for (std::size_t j = 0; j < cols; ++j)
        if (!m[r][j].is_zero()) m[i][j] -= f * m[r][j];
      rhs[i] -= f * rhs[r];
    }
    pivot_row_of[c] = static_cast<int>(r);
    out.pivots.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (!rhs[i].is_zero()) return out;
  out.consistent = true;
  out.x.assign(cols, Rational(0));
  for (std::size_t c = 0; c < cols; ++c)
    if (pivot_row_of[c] >= 0) out.x[c] = rhs[pivot_row_of[c]];
  return out;
}

inline std::size_t matrix_rank(const Matrix& m, std::size_t cols) {
  return solve_linear(m, std::vector<Rational>(m.size()), cols).pivots.size();
}

// Basis of {x : M x = 0}.
inline std::vector<std::vector<Rational>> nullspace(const Matrix& m, std::size_t cols) {
  auto sol = solve_linear(m, std::vector<Rational>(m.size()), cols);
  std::vector<bool> is_pivot(cols, false);
  for (int c : sol.pivots) is_pivot[c] = true;
  // Reduced rows are needed to read off the kernel; redo elimination on M.
  Matrix red = m;
  std::size_t rows = red.size(), r = 0;
  std::vector<int> pivcol;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && red[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(red[p], red[r]);
    Rational inv = Rational(1) / red[r][c];
    for (auto& v : red[r]) v *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || red[i][c].is_zero()) continue;
      Rational f = red[i][c];
      for (std::size_t j = 0; j < cols; ++j) red[i][j] -= f * red[r][j];
    }
    pivcol.push_back(static_cast<int>(c));
    ++r;
  }
  std::vector<bool> piv(cols, false);
  for (int c : pivcol) piv[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (piv[f]) continue;
    std::vector<Rational> v(cols);
    v[f] = Rational(1);
    for (std::size_t i = 0; i < pivcol.size(); ++i) v[pivcol[i]] = -red[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class Key>
using SparseVector = std::map<Key, Rational>;

// v += c w
template <class Key>
void axpy(SparseVector<Key>& v, const Rational& c, const SparseVector<Key>& w) {
  if (c.is_zero()) return;
  for (const auto& [k, x] : w) {
    auto [it, fresh] = v.emplace(k, c * x);
    if (fresh) continue;
    it->second += c * x;
    if (it->second.is_zero()) v.erase(it);
  }
}

// Row echelon form over an ordered key set: each row is monic with a distinct
// leading (largest) key. reduce() removes every pivot key, largest first, so
// its result is the canonical representative modulo the row span.
template <class Key>
class SparseEchelon {
 public:
  using Vector = SparseVector<Key>;

  // Returns false when v already lies in the span.
  bool insert(Vector v) {
    while (!v.empty()) {
      auto lead = std::prev(v.end());
      auto p = rows_.find(lead->first);
      if (p == rows_.end()) break;
      axpy(v, -lead->second, p->second);
    }
    if (v.empty()) return false;
    Rational inv = Rational(1) / std::prev(v.end())->second;
    for (auto& [k, x] : v) x *= inv;
    Key lead = std::prev(v.end())->first;
    rows_.emplace(std::move(lead), std::move(v));
    return true;
  }

  Vector reduce(Vector v) const {
    auto bound = v.end();
    while (bound != v.begin()) {
      auto it = std::prev(bound);
      auto p = rows_.find(it->first);
      if (p == rows_.end()) {
        bound = it;
        continue;
      }
      Key k = it->first;
      axpy(v, -it->second, p->second);
      bound = v.lower_bound(k);
    }
    return v;
  }

  bool contains(const Vector& v) const { return reduce(v).empty(); }

  // Reduced row echelon form: no row carries another row's pivot key.
  void interreduce() {
    for (auto& [lead, row] : rows_) {
      Vector tail = row;
      tail.erase(lead);
      tail = reduce(std::move(tail));
      tail.emplace(lead, Rational(1));
      row = std::move(tail);
    }
  }

  std::size_t rank() const noexcept { return rows_.size(); }
  const std::map<Key, Vector>& rows() const noexcept { return rows_; }

 private:
  std::map<Key, Vector> rows_;
};

}  // namespace abmod
