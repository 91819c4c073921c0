#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "exact.hpp"
#include "intlat.hpp"

namespace protorus {

// Skew-symmetric matrix with symbolic entries; only the strict upper triangle is stored.
class SkewForm {
 public:
  SkewForm() = default;
  explicit SkewForm(unsigned m) : m_(m) {}

  // J(theta) = [[0, theta], [-theta, 0]]
  static SkewForm J(const SymbolicScalar& theta) {
    SkewForm f(2);
    f.set(0, 1, theta);
    return f;
  }

  static SkewForm direct_sum(const SkewForm& a, const SkewForm& b) {
    SkewForm f(a.m_ + b.m_);
    for (auto& [jk, v] : a.upper_) f.upper_.emplace(jk, v);
    for (auto& [jk, v] : b.upper_) f.upper_.emplace(std::make_pair(jk.first + a.m_, jk.second + a.m_), v);
    return f;
  }

  static SkewForm block_diagonal(const std::vector<SymbolicScalar>& thetas) {
    SkewForm f(0);
    for (auto& t : thetas) f = direct_sum(f, J(t));
    return f;
  }

  unsigned size() const { return m_; }

  void set(unsigned j, unsigned k, const SymbolicScalar& v) {
    if (j >= m_ || k >= m_) throw Error(ErrorCode::DimensionMismatch, "skew entry index out of range");
    if (j == k) {
      if (!v.is_zero()) throw Error(ErrorCode::InvalidParameter, "diagonal of a skew form must vanish");
      return;
    }
    if (j > k) return set(k, j, -v);
    if (v.is_zero()) upper_.erase({j, k});
    else upper_[{j, k}] = v;
  }

  SymbolicScalar at(unsigned j, unsigned k) const {
    if (j == k) return {};
    bool flip = j > k;
    auto it = upper_.find(flip ? std::make_pair(k, j) : std::make_pair(j, k));
    if (it == upper_.end()) return {};
    return flip ? -it->second : it->second;
  }

  const std::map<std::pair<unsigned, unsigned>, SymbolicScalar>& upper() const { return upper_; }

  SkewForm restrict(const Subset& I) const {
    SkewForm f(static_cast<unsigned>(I.size()));
    for (unsigned a = 0; a < I.size(); ++a)
      for (unsigned b = a + 1; b < I.size(); ++b) f.set(a, b, at(I[a], I[b]));
    return f;
  }

  std::set<std::string> variables() const {
    std::set<std::string> v;
    for (auto& [jk, s] : upper_) {
      auto w = s.variables();
      v.insert(w.begin(), w.end());
    }
    return v;
  }

  friend bool operator==(const SkewForm& a, const SkewForm& b) {
    if (a.m_ != b.m_ || a.upper_.size() != b.upper_.size()) return false;
    for (auto& [jk, v] : a.upper_) {
      auto it = b.upper_.find(jk);
      if (it == b.upper_.end() || it->second != v) return false;
    }
    return true;
  }
  friend bool operator!=(const SkewForm& a, const SkewForm& b) { return !(a == b); }

 private:
  unsigned m_ = 0;
  std::map<std::pair<unsigned, unsigned>, SymbolicScalar> upper_;
};

struct TorusDescriptor {
  SkewForm form;
  Integer amplification = 1;  // r in M_r(A_Theta)

  unsigned size() const { return form.size(); }
  std::size_t k0_rank() const { return parity_rank(form.size(), Parity::Even); }
  std::size_t k1_rank() const { return parity_rank(form.size(), Parity::Odd); }
};

// ---------------------------------------------------------------------------
// Pfaffians

class PfaffianTable {
 public:
  explicit PfaffianTable(const SkewForm& f) : f_(f) {
    if (f.size() > 63) throw Error(ErrorCode::InvalidParameter, "skew form too large");
  }

  SymbolicScalar operator()(const Subset& I) {
    if (I.size() % 2) throw Error(ErrorCode::OddSubset, "subset " + subset_label(I) + " has odd size");
    std::uint64_t mask = 0;
    for (unsigned x : I) mask |= std::uint64_t(1) << x;
    return eval(mask);
  }

 private:
  SymbolicScalar eval(std::uint64_t mask) {
    if (mask == 0) return SymbolicScalar(1);
    if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
    std::vector<unsigned> idx;
    for (unsigned i = 0; i < 64; ++i)
      if (mask >> i & 1) idx.push_back(i);
    SymbolicScalar sum;
    std::uint64_t rest0 = mask & ~(std::uint64_t(1) << idx[0]);
    for (std::size_t k = 1; k < idx.size(); ++k) {
      SymbolicScalar a = f_.at(idx[0], idx[k]);
      if (a.is_zero()) continue;
      SymbolicScalar sub = eval(rest0 & ~(std::uint64_t(1) << idx[k]));
      if (sub.is_zero()) continue;
      if (k % 2 == 1) sum += a * sub;
      else sum -= a * sub;
    }
    memo_.emplace(mask, sum);
    return sum;
  }

  SkewForm f_;
  std::unordered_map<std::uint64_t, SymbolicScalar> memo_;
};

inline SymbolicScalar pfaffian(const SkewForm& f, const Subset& I) { return PfaffianTable(f)(I); }

inline SymbolicScalar pfaffian(const SkewForm& f) {
  Subset all(f.size());
  for (unsigned i = 0; i < f.size(); ++i) all[i] = i;
  return pfaffian(f, all);
}

// Laplace expansion over column subsets, memoised.
inline SymbolicScalar determinant(const std::vector<std::vector<SymbolicScalar>>& a) {
  std::size_t n = a.size();
  if (n == 0) return SymbolicScalar(1);
  if (n > 24) throw Error(ErrorCode::InvalidParameter, "symbolic determinant too large");
  std::unordered_map<std::uint32_t, SymbolicScalar> memo;
  // det of rows [row, n) against the columns in `cols`
  auto rec = [&](auto&& self, std::size_t row, std::uint32_t cols) -> SymbolicScalar {
    if (row == n) return SymbolicScalar(1);
    if (auto it = memo.find(cols); it != memo.end()) return it->second;
    SymbolicScalar s;
    int pos = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(cols >> c & 1)) continue;
      if (!a[row][c].is_zero()) {
        SymbolicScalar sub = self(self, row + 1, cols & ~(std::uint32_t(1) << c));
        if (pos % 2 == 0) s += a[row][c] * sub;
        else s -= a[row][c] * sub;
      }
      ++pos;
    }
    memo.emplace(cols, s);
    return s;
  };
  return rec(rec, 0, (std::uint32_t(1) << n) - 1);
}

inline SymbolicScalar determinant(const SkewForm& f, const Subset& I) {
  std::vector<std::vector<SymbolicScalar>> a(I.size(), std::vector<SymbolicScalar>(I.size()));
  for (std::size_t i = 0; i < I.size(); ++i)
    for (std::size_t j = 0; j < I.size(); ++j) a[i][j] = f.at(I[i], I[j]);
  return determinant(a);
}

// ---------------------------------------------------------------------------
// Trace pairing

// Normalized pairing over the even basis: pf(Theta_I) / r.
inline std::vector<SymbolicScalar> trace_pairing_vector(const TorusDescriptor& t) {
  SubsetBasis b = subset_basis(t.size(), Parity::Even);
  PfaffianTable pf(t.form);
  SymbolicScalar inv_r = SymbolicScalar(Rational(1)) / SymbolicScalar(Rational(t.amplification));
  std::vector<SymbolicScalar> v;
  v.reserve(b.size());
  for (auto& I : b.subsets) v.push_back(pf(I) * inv_r);
  return v;
}

inline SymbolicScalar dot(const IntVector& v, const std::vector<SymbolicScalar>& w) {
  if (v.size() != w.size()) throw Error(ErrorCode::DimensionMismatch, "class has " + std::to_string(v.size()) + " coordinates, basis has " + std::to_string(w.size()));
  SymbolicScalar s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0 && !w[i].is_zero()) s += SymbolicScalar(Rational(v[i])) * w[i];
  return s;
}

inline SymbolicScalar trace_of_class(const TorusDescriptor& t, const IntVector& v) {
  return dot(v, trace_pairing_vector(t));
}

inline IntVector unit_class(const TorusDescriptor& t) {
  IntVector v(t.k0_rank(), 0);
  v[0] = t.amplification;
  return v;
}

// ---------------------------------------------------------------------------
// Nondegeneracy

struct NondegeneracyResult {
  enum Kind { Nondegenerate, DegenerateWitness, UndecidedAtBound } kind = Nondegenerate;
  IntVector witness;
  std::string note;
};

inline const char* nondegeneracy_name(NondegeneracyResult::Kind k) {
  switch (k) {
    case NondegeneracyResult::Nondegenerate: return "Nondegenerate";
    case NondegeneracyResult::DegenerateWitness: return "DegenerateWitness";
    default: return "UndecidedAtBound";
  }
}

namespace detail {

inline Integer lcm_int(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return a == 0 ? b : a;
  return abs(a / boost::multiprecision::gcd(a, b) * b);
}

}  // namespace detail

// Theta x integral for some nonzero integer x? Entries are cleared to a common
// denominator; each monomial gives one integer linear condition on (x, n).
inline NondegeneracyResult is_nondegenerate(const SkewForm& f, const GeneratorEnv& env, long box_bound = 16) {
  NondegeneracyResult res;
  unsigned m = f.size();
  if (m == 0) return res;
  if (!env.independence_assertion() && !f.variables().empty()) {
    res.kind = NondegeneracyResult::UndecidedAtBound;
    res.note = "independence of generator monomials not asserted";
    return res;
  }

  std::vector<Polynomial> dens;
  for (auto& [jk, v] : f.upper())
    if (std::find(dens.begin(), dens.end(), v.den()) == dens.end()) dens.push_back(v.den());
  Polynomial common(Rational(1));
  for (auto& d : dens) common = common * d;

  auto cleared = [&](const SymbolicScalar& v) {
    Polynomial p = v.num();
    for (auto& d : dens)
      if (d != v.den()) p = p * d;
    return p;
  };
  std::vector<std::vector<Polynomial>> P(m, std::vector<Polynomial>(m));
  std::vector<Monomial> monos;
  auto note_monos = [&](const Polynomial& p) {
    for (auto& [mono, c] : p.terms())
      if (std::find(monos.begin(), monos.end(), mono) == monos.end()) monos.push_back(mono);
  };
  note_monos(common);
  for (unsigned j = 0; j < m; ++j)
    for (unsigned k = 0; k < m; ++k) {
      SymbolicScalar e = f.at(j, k);
      if (!e.is_zero()) {
        P[j][k] = cleared(e);
        note_monos(P[j][k]);
      }
    }

  // unknowns: x_0..x_{m-1}, n_0..n_{m-1}
  IntMatrix A(m * monos.size(), 2 * m);
  std::size_t row = 0;
  for (unsigned j = 0; j < m; ++j)
    for (auto& mono : monos) {
      std::vector<Rational> coef(2 * m);
      for (unsigned k = 0; k < m; ++k) coef[k] = P[j][k].coefficient(mono);
      coef[m + j] = -common.coefficient(mono);
      Integer l = 1;
      for (auto& c : coef) l = detail::lcm_int(l, den_of(c));
      for (unsigned k = 0; k < 2 * m; ++k) A(row, k) = num_of(coef[k] * l);
      ++row;
    }
  KernelRank ker = integer_kernel_rank(A);
  if (ker.basis.empty()) return res;

  // short witness by bounded combination of the kernel basis
  std::size_t kb = ker.basis.size();
  long span = 1;
  while (span < 6 && std::pow(2.0 * (span + 1) + 1, static_cast<double>(kb)) <= 200000.0) ++span;
  std::vector<long> c(kb, -span);
  std::optional<IntVector> best;
  Integer best_norm;
  for (;;) {
    IntVector x(m, 0);
    for (std::size_t b = 0; b < kb; ++b)
      if (c[b] != 0)
        for (unsigned i = 0; i < m; ++i) x[i] += c[b] * ker.basis[b][i];
    auto nz = std::find_if(x.begin(), x.end(), [](const Integer& z) { return z != 0; });
    if (nz != x.end() && *nz > 0) {
      bool inside = std::all_of(x.begin(), x.end(), [&](const Integer& z) { return abs(z) <= box_bound; });
      if (inside) {
        Integer n2 = 0;
        for (auto& z : x) n2 += z * z;
        if (!best || n2 < best_norm || (n2 == best_norm && x > *best)) {
          best = x;
          best_norm = n2;
        }
      }
    }
    std::size_t b = 0;
    while (b < kb && c[b] == span) c[b++] = -span;
    if (b == kb) break;
    ++c[b];
  }
  if (best) {
    res.kind = NondegeneracyResult::DegenerateWitness;
    res.witness = *best;
  } else {
    res.kind = NondegeneracyResult::UndecidedAtBound;
    res.note = "integral kernel is nonzero but no witness within the box bound";
  }
  return res;
}

}  // namespace protorus
