#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "exact.hpp"

namespace protorus {

using IntVector = std::vector<Integer>;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), e_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    r_ = rows.size();
    c_ = r_ ? rows.begin()->size() : 0;
    for (auto& row : rows) {
      if (row.size() != c_) throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
      for (long v : row) e_.emplace_back(v);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static IntMatrix diagonal(const IntVector& d) {
    IntMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  Integer& operator()(std::size_t i, std::size_t j) { return e_[i * c_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return e_[i * c_ + j]; }
  const std::vector<Integer>& entries() const { return e_; }

  bool is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](const Integer& x) { return x == 0; });
  }
  bool is_square() const { return r_ == c_; }

  IntVector column(std::size_t j) const {
    IntVector v(r_);
    for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  IntMatrix transpose() const {
    IntMatrix t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  IntMatrix scaled(const Integer& s) const {
    IntMatrix m = *this;
    for (auto& x : m.e_) x *= s;
    return m;
  }

  IntVector apply(const IntVector& v) const {
    if (v.size() != c_) throw Error(ErrorCode::DimensionMismatch, "vector length " + std::to_string(v.size()) + " vs " + std::to_string(c_) + " columns");
    IntVector out(r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j)
        if ((*this)(i, j) != 0 && v[j] != 0) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.c_ != b.r_) throw Error(ErrorCode::DimensionMismatch, "matrix product shapes");
    IntMatrix p(a.r_, b.c_);
    for (std::size_t i = 0; i < a.r_; ++i)
      for (std::size_t k = 0; k < a.c_; ++k) {
        const Integer& x = a(i, k);
        if (x == 0) continue;
        for (std::size_t j = 0; j < b.c_; ++j)
          if (b(k, j) != 0) p(i, j) += x * b(k, j);
      }
    return p;
  }
  friend IntMatrix operator+(IntMatrix a, const IntMatrix& b) {
    if (a.r_ != b.r_ || a.c_ != b.c_) throw Error(ErrorCode::DimensionMismatch, "matrix sum shapes");
    for (std::size_t i = 0; i < a.e_.size(); ++i) a.e_[i] += b.e_[i];
    return a;
  }
  friend IntMatrix operator-(IntMatrix a, const IntMatrix& b) { return a + b.scaled(-1); }
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.e_ == b.e_;
  }
  friend bool operator!=(const IntMatrix& a, const IntMatrix& b) { return !(a == b); }

  std::string str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < r_; ++i) {
      s += i ? ",[" : "[";
      for (std::size_t j = 0; j < c_; ++j) s += (j ? "," : "") + (*this)(i, j).str();
      s += "]";
    }
    return s + "]";
  }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<Integer> e_;
};

// ---------------------------------------------------------------------------
// Subset bases

enum class Parity { Even, Odd, Full };

using Subset = std::vector<unsigned>;  // 0-based, strictly increasing

inline std::string subset_label(const Subset& s) {
  if (s.empty()) return "{}";
  std::string r = "{";
  for (std::size_t i = 0; i < s.size(); ++i) r += (i ? "," : "") + std::to_string(s[i] + 1);
  return r + "}";
}

inline std::vector<Subset> subsets_of_size(unsigned m, unsigned k) {
  std::vector<Subset> out;
  if (k > m) return out;
  Subset s(k);
  std::iota(s.begin(), s.end(), 0u);
  for (;;) {
    out.push_back(s);
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && s[i] == m - k + static_cast<unsigned>(i)) --i;
    if (i < 0) break;
    ++s[i];
    for (unsigned j = static_cast<unsigned>(i) + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

inline bool degree_has_parity(unsigned k, Parity p) {
  return p == Parity::Full || (p == Parity::Even) == (k % 2 == 0);
}

struct SubsetBasis {
  unsigned m = 0;
  Parity parity = Parity::Even;
  std::vector<Subset> subsets;

  std::size_t size() const { return subsets.size(); }
  std::size_t index_of(const Subset& s) const {
    auto it = std::find(subsets.begin(), subsets.end(), s);
    if (it == subsets.end()) throw Error(ErrorCode::InvalidParameter, "subset " + subset_label(s) + " not in basis");
    return static_cast<std::size_t>(it - subsets.begin());
  }
};

inline SubsetBasis subset_basis(unsigned m, Parity p) {
  SubsetBasis b{m, p, {}};
  for (unsigned k = 0; k <= m; ++k)
    if (degree_has_parity(k, p))
      for (auto& s : subsets_of_size(m, k)) b.subsets.push_back(std::move(s));
  return b;
}

inline std::size_t parity_rank(unsigned m, Parity p) {
  if (p == Parity::Full) return std::size_t(1) << m;
  if (m == 0) return p == Parity::Even ? 1 : 0;
  return std::size_t(1) << (m - 1);
}

// ---------------------------------------------------------------------------
// Determinants and exterior powers

inline Integer bareiss_det(IntMatrix a) {
  if (!a.is_square()) throw Error(ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  std::size_t n = a.rows();
  if (n == 0) return 1;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

inline IntMatrix submatrix(const IntMatrix& m, const Subset& rows, const Subset& cols) {
  IntMatrix s(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = m(rows[i], cols[j]);
  return s;
}

namespace detail {

// each row and each column has at most one nonzero entry
inline bool is_monomial_pattern(const IntMatrix& m) {
  std::vector<int> rc(m.rows()), cc(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0 && (++rc[i] > 1 || ++cc[j] > 1)) return false;
  return true;
}

inline Integer minor_det(const IntMatrix& m, const Subset& rows, const Subset& cols) {
  for (unsigned r : rows) {
    bool any = false;
    for (unsigned c : cols) any = any || m(r, c) != 0;
    if (!any) return 0;
  }
  for (unsigned c : cols) {
    bool any = false;
    for (unsigned r : rows) any = any || m(r, c) != 0;
    if (!any) return 0;
  }
  return bareiss_det(submatrix(m, rows, cols));
}

inline void fill_block(const IntMatrix& m, unsigned k, const std::vector<Subset>& rs, const std::vector<Subset>& cs,
                       std::size_t r0, std::size_t c0, IntMatrix& out) {
  if (k == 0) {
    out(r0, c0) = 1;
    return;
  }
  if (is_monomial_pattern(m)) {
    // image subset of J and the sign of the induced permutation
    bool small = m.rows() <= 20;
    std::vector<std::size_t> row_index(small ? std::size_t(1) << m.rows() : 0, 0);
    std::map<Subset, std::size_t> pos;
    if (!small)
      for (std::size_t i = 0; i < rs.size(); ++i) pos.emplace(rs[i], i);
    else
      for (std::size_t i = 0; i < rs.size(); ++i) {
        std::size_t mask = 0;
        for (unsigned x : rs[i]) mask |= std::size_t(1) << x;
        row_index[mask] = i;
      }
    std::vector<long> col_row(m.cols(), -1);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0) col_row[j] = static_cast<long>(i);
    for (std::size_t cj = 0; cj < cs.size(); ++cj) {
      const Subset& J = cs[cj];
      std::vector<unsigned> img;
      Integer prod = 1;
      bool ok = true;
      for (unsigned c : J) {
        if (col_row[c] < 0) {
          ok = false;
          break;
        }
        img.push_back(static_cast<unsigned>(col_row[c]));
        prod *= m(col_row[c], c);
      }
      if (!ok) continue;
      int inv = 0;
      for (std::size_t a = 0; a < img.size(); ++a)
        for (std::size_t b = a + 1; b < img.size(); ++b)
          if (img[a] > img[b]) ++inv;
      Subset I = img;
      std::sort(I.begin(), I.end());
      std::size_t ri;
      if (small) {
        std::size_t mask = 0;
        for (unsigned x : I) mask |= std::size_t(1) << x;
        ri = row_index[mask];
      } else {
        ri = pos.at(I);
      }
      out(r0 + ri, c0 + cj) = inv % 2 ? Integer(-prod) : prod;
    }
    return;
  }
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = 0; j < cs.size(); ++j) out(r0 + i, c0 + j) = minor_det(m, rs[i], cs[j]);
}

}  // namespace detail

inline IntMatrix exterior_power(const IntMatrix& m, unsigned k) {
  auto rs = subsets_of_size(static_cast<unsigned>(m.rows()), k);
  auto cs = subsets_of_size(static_cast<unsigned>(m.cols()), k);
  IntMatrix out(rs.size(), cs.size());
  if (!rs.empty() && !cs.empty()) detail::fill_block(m, k, rs, cs, 0, 0, out);
  return out;
}

inline IntMatrix exterior_parity(const IntMatrix& m, Parity p) {
  unsigned nr = static_cast<unsigned>(m.rows()), nc = static_cast<unsigned>(m.cols());
  IntMatrix out(parity_rank(nr, p), parity_rank(nc, p));
  std::size_t r0 = 0, c0 = 0;
  for (unsigned k = 0; k <= std::max(nr, nc); ++k) {
    if (!degree_has_parity(k, p)) continue;
    auto rs = subsets_of_size(nr, k);
    auto cs = subsets_of_size(nc, k);
    if (!rs.empty() && !cs.empty()) detail::fill_block(m, k, rs, cs, r0, c0, out);
    r0 += rs.size();
    c0 += cs.size();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smith normal form

struct SmithForm {
  IntMatrix U, D, V;
  IntMatrix U_inv;  // inverse of U, kept for coset bookkeeping
  std::size_t rank = 0;
  IntVector invariant_factors() const {
    IntVector d;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
    return d;
  }
};

inline SmithForm smith_normal_form(const IntMatrix& m) {
  std::size_t R = m.rows(), C = m.cols();
  IntMatrix A = m, U = IntMatrix::identity(R), Ui = IntMatrix::identity(R), V = IntMatrix::identity(C);

  auto swap_rows = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < C; ++j) std::swap(A(a, j), A(b, j));
    for (std::size_t j = 0; j < R; ++j) std::swap(U(a, j), U(b, j));
    for (std::size_t i = 0; i < R; ++i) std::swap(Ui(i, a), Ui(i, b));
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < R; ++i) std::swap(A(i, a), A(i, b));
    for (std::size_t i = 0; i < C; ++i) std::swap(V(i, a), V(i, b));
  };
  // row_dst += q * row_src
  auto add_row = [&](std::size_t dst, std::size_t src, const Integer& q) {
    if (q == 0) return;
    for (std::size_t j = 0; j < C; ++j) A(dst, j) += q * A(src, j);
    for (std::size_t j = 0; j < R; ++j) U(dst, j) += q * U(src, j);
    for (std::size_t i = 0; i < R; ++i) Ui(i, src) -= q * Ui(i, dst);
  };
  auto add_col = [&](std::size_t dst, std::size_t src, const Integer& q) {
    if (q == 0) return;
    for (std::size_t i = 0; i < R; ++i) A(i, dst) += q * A(i, src);
    for (std::size_t i = 0; i < C; ++i) V(i, dst) += q * V(i, src);
  };
  auto negate_row = [&](std::size_t r) {
    for (std::size_t j = 0; j < C; ++j) A(r, j) = -A(r, j);
    for (std::size_t j = 0; j < R; ++j) U(r, j) = -U(r, j);
    for (std::size_t i = 0; i < R; ++i) Ui(i, r) = -Ui(i, r);
  };

  std::size_t t = 0;
  for (; t < std::min(R, C); ++t) {
    // smallest nonzero entry of the trailing block becomes the pivot
    std::size_t pi = R, pj = C;
    for (std::size_t i = t; i < R; ++i)
      for (std::size_t j = t; j < C; ++j)
        if (A(i, j) != 0 && (pi == R || abs(A(i, j)) < abs(A(pi, pj)))) pi = i, pj = j;
    if (pi == R) break;
    swap_rows(t, pi);
    swap_cols(t, pj);
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < R; ++i) {
        if (A(i, t) == 0) continue;
        add_row(i, t, -(A(i, t) / A(t, t)));
        if (A(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (A(t, j) == 0) continue;
        add_col(j, t, -(A(t, j) / A(t, t)));
        if (A(t, j) != 0) clean = false;
      }
      if (!clean) {
        std::size_t bi = t, bj = t;
        for (std::size_t i = t + 1; i < R; ++i)
          if (A(i, t) != 0 && abs(A(i, t)) < abs(A(bi, bj))) bi = i, bj = t;
        for (std::size_t j = t + 1; j < C; ++j)
          if (A(t, j) != 0 && abs(A(t, j)) < abs(A(bi, bj))) bi = t, bj = j;
        swap_rows(t, bi);
        swap_cols(t, bj);
        continue;
      }
      std::size_t bad = R;
      for (std::size_t i = t + 1; i < R && bad == R; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (A(i, j) % A(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad == R) break;
      add_row(t, bad, 1);
    }
    if (A(t, t) < 0) negate_row(t);
  }
  SmithForm s{U, A, V, Ui, t};
  return s;
}

// ---------------------------------------------------------------------------
// Hermite form, kernels, cosets

// Row-style Hermite normal form of the lattice spanned by the given vectors.
inline std::vector<IntVector> row_hermite(std::vector<IntVector> rows) {
  if (rows.empty()) return rows;
  std::size_t n = rows[0].size();
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < rows.size(); ++col) {
    for (;;) {
      std::size_t p = rows.size();
      for (std::size_t i = r; i < rows.size(); ++i)
        if (rows[i][col] != 0 && (p == rows.size() || abs(rows[i][col]) < abs(rows[p][col]))) p = i;
      if (p == rows.size()) break;
      std::swap(rows[r], rows[p]);
      bool done = true;
      for (std::size_t i = r + 1; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        Integer q = rows[i][col] / rows[r][col];
        for (std::size_t j = 0; j < n; ++j) rows[i][j] -= q * rows[r][j];
        if (rows[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (r < rows.size() && rows[r][col] != 0) {
      if (rows[r][col] < 0)
        for (auto& x : rows[r]) x = -x;
      for (std::size_t i = 0; i < r; ++i) {
        Integer q = floor_div(rows[i][col], rows[r][col]);
        if (q != 0)
          for (std::size_t j = 0; j < n; ++j) rows[i][j] -= q * rows[r][j];
      }
      ++r;
    }
  }
  rows.resize(r);
  return rows;
}

struct KernelRank {
  std::size_t rank = 0;
  std::vector<IntVector> basis;
};

inline KernelRank integer_kernel_rank(const IntMatrix& m) {
  SmithForm s = smith_normal_form(m);
  KernelRank k;
  k.rank = s.rank;
  std::vector<IntVector> b;
  for (std::size_t j = s.rank; j < m.cols(); ++j) b.push_back(s.V.column(j));
  k.basis = row_hermite(std::move(b));
  return k;
}

// Lower-triangular column Hermite form of a square nonsingular matrix.
inline IntMatrix column_hermite_lower(const IntMatrix& m) {
  IntMatrix H = m;
  std::size_t n = H.rows();
  auto col_op = [&](std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t i = 0; i < n; ++i) H(i, dst) += q * H(i, src);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (;;) {
      std::size_t p = n;
      for (std::size_t j = i; j < H.cols(); ++j)
        if (H(i, j) != 0 && (p == n || abs(H(i, j)) < abs(H(i, p)))) p = j;
      if (p == n) throw Error(ErrorCode::NotFullColumnRank, "singular matrix in Hermite reduction");
      if (p != i)
        for (std::size_t r = 0; r < n; ++r) std::swap(H(r, i), H(r, p));
      bool done = true;
      for (std::size_t j = i + 1; j < H.cols(); ++j) {
        if (H(i, j) == 0) continue;
        col_op(j, i, -(H(i, j) / H(i, i)));
        if (H(i, j) != 0) done = false;
      }
      if (done) break;
    }
    if (H(i, i) < 0)
      for (std::size_t r = 0; r < n; ++r) H(r, i) = -H(r, i);
    for (std::size_t j = 0; j < i; ++j) col_op(j, i, -floor_div(H(i, j), H(i, i)));
  }
  return H;
}

struct CosetDescription {
  bool finite = true;
  Integer index = 0;                    // |det M| when finite
  IntVector invariant_factors;          // Smith diagonal
  std::vector<IntVector> representatives;
  IntMatrix free_complement;            // n x (n - m) basis of a complement when index is infinite
};

inline IntVector reduce_mod_lattice(IntVector y, const IntMatrix& H) {
  for (std::size_t i = 0; i < H.rows(); ++i) {
    Integer q = floor_div(y[i], H(i, i));
    if (q != 0)
      for (std::size_t r = i; r < H.rows(); ++r) y[r] -= q * H(r, i);
  }
  return y;
}

inline CosetDescription coset_representatives(const IntMatrix& m) {
  std::size_t n = m.rows(), k = m.cols();
  SmithForm s = smith_normal_form(m);
  if (s.rank != k) throw Error(ErrorCode::NotFullColumnRank, "rank " + std::to_string(s.rank) + " < " + std::to_string(k) + " columns");
  CosetDescription out;
  out.invariant_factors = s.invariant_factors();

  // torsion part: Z^k / D, pulled back through U^{-1}
  std::vector<IntVector> z{IntVector(n, 0)};
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<IntVector> next;
    for (auto& v : z)
      for (Integer a = 0; a < s.D(i, i); ++a) {
        IntVector w = v;
        w[i] = a;
        next.push_back(w);
      }
    z = std::move(next);
  }

  if (k == n) {
    IntMatrix H = column_hermite_lower(m);
    out.finite = true;
    out.index = 1;
    for (std::size_t i = 0; i < n; ++i) out.index *= H(i, i);
    // the box of reduced vectors is a complete irredundant system
    std::vector<IntVector> reps{IntVector()};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<IntVector> next;
      for (auto& v : reps)
        for (Integer a = 0; a < H(i, i); ++a) {
          IntVector w = v;
          w.push_back(a);
          next.push_back(w);
        }
      reps = std::move(next);
    }
    out.representatives = std::move(reps);
    return out;
  }

  out.finite = false;
  for (auto& v : z) out.representatives.push_back(s.U_inv.apply(v));
  std::sort(out.representatives.begin(), out.representatives.end());
  out.free_complement = IntMatrix(n, n - k);
  for (std::size_t j = k; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out.free_complement(i, j - k) = s.U_inv(i, j);
  return out;
}

}  // namespace protorus
