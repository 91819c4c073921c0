#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "exact.hpp"
#include "intlat.hpp"

namespace protorus {

using Complex = std::complex<double>;

struct Tolerances {
  double symmetrize = 1e-12;
  double assertion = 1e-9;
  double exact = 1e-10;
  double isometry = 1e-12;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// ---------------------------------------------------------------------------
// Dense complex matrices

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t r, std::size_t c) : r_(r), c_(c), e_(r * c) {}
  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static CMatrix diagonal(const std::vector<double>& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  Complex& operator()(std::size_t i, std::size_t j) { return e_[i * c_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return e_[i * c_ + j]; }

  CMatrix adjoint() const {
    CMatrix a(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) a(j, i) = std::conj((*this)(i, j));
    return a;
  }
  CMatrix operator*(const CMatrix& o) const {
    if (c_ != o.r_) throw Error(ErrorCode::DimensionMismatch, "complex product");
    CMatrix p(r_, o.c_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t k = 0; k < c_; ++k) {
        Complex a = (*this)(i, k);
        if (a == Complex{}) continue;
        for (std::size_t j = 0; j < o.c_; ++j) p(i, j) += a * o(k, j);
      }
    return p;
  }
  CMatrix operator+(const CMatrix& o) const { return zip(o, 1.0); }
  CMatrix operator-(const CMatrix& o) const { return zip(o, -1.0); }
  CMatrix scaled(Complex s) const {
    CMatrix m = *this;
    for (auto& x : m.e_) x *= s;
    return m;
  }
  double frobenius() const {
    double s = 0;
    for (auto& x : e_) s += std::norm(x);
    return std::sqrt(s);
  }
  double max_abs() const {
    double s = 0;
    for (auto& x : e_) s = std::max(s, std::abs(x));
    return s;
  }
  CMatrix block(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
    CMatrix b(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) b(i, j) = (*this)(rows[i], cols[j]);
    return b;
  }

 private:
  CMatrix zip(const CMatrix& o, double s) const {
    if (r_ != o.r_ || c_ != o.c_) throw Error(ErrorCode::DimensionMismatch, "complex sum");
    CMatrix m = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) m.e_[i] += s * o.e_[i];
    return m;
  }
  std::size_t r_ = 0, c_ = 0;
  std::vector<Complex> e_;
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return k;
}

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t n) : m_(n, n) {}
  // symmetrizes (M + M*)/2; rejects inputs further than tol from Hermitian
  explicit HermitianMatrix(const CMatrix& m, double tol = Tolerances{}.symmetrize) : m_(m.rows(), m.cols()) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "Hermitian matrix must be square");
    double scale = std::max(1.0, m.max_abs());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (std::abs(m(i, j) - std::conj(m(j, i))) > tol * scale)
          throw Error(ErrorCode::InvalidParameter, "matrix is not Hermitian");
        m_(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
      }
  }
  static HermitianMatrix scalar(double v, std::size_t n = 1) { return HermitianMatrix(CMatrix::identity(n).scaled(v)); }

  std::size_t dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  HermitianMatrix operator+(const HermitianMatrix& o) const { return HermitianMatrix(m_ + o.m_); }
  HermitianMatrix operator-(const HermitianMatrix& o) const { return HermitianMatrix(m_ - o.m_); }
  HermitianMatrix scaled(double s) const { return HermitianMatrix(m_.scaled(s)); }

 private:
  CMatrix m_;
};

struct EigenSystem {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns
  int sweeps = 0;
};

inline constexpr int kJacobiSweepCap = 100;

// cyclic complex Jacobi
inline EigenSystem hermitian_eigensystem(const HermitianMatrix& H, double tol = 1e-14) {
  const std::size_t n = H.dim();
  CMatrix A = H.matrix();
  CMatrix V = CMatrix::identity(n);
  auto off = [&] {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(A(i, j));
    return std::sqrt(s);
  };
  const double scale = std::max(A.frobenius(), 1e-300);
  EigenSystem es;
  while (off() > tol * scale) {
    if (es.sweeps++ >= kJacobiSweepCap) throw Error(ErrorCode::NoConvergence, "Jacobi sweep cap reached");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        Complex apq = A(p, q);
        double b = std::abs(apq);
        if (b < 1e-300) continue;
        Complex ph = apq / b;  // e^{i phi}
        double th = 0.5 * std::atan2(2 * b, A(q, q).real() - A(p, p).real());
        double c = std::cos(th), s = std::sin(th);
        Complex jpp = c, jpq = s, jqp = -s * std::conj(ph), jqq = c * std::conj(ph);
        for (std::size_t k = 0; k < n; ++k) {
          Complex akp = A(k, p), akq = A(k, q);
          A(k, p) = akp * jpp + akq * jqp;
          A(k, q) = akp * jpq + akq * jqq;
          Complex vkp = V(k, p), vkq = V(k, q);
          V(k, p) = vkp * jpp + vkq * jqp;
          V(k, q) = vkp * jpq + vkq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          Complex apk = A(p, k), aqk = A(q, k);
          A(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          A(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        A(p, q) = A(q, p) = 0;
      }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return A(a, a).real() < A(b, b).real(); });
  es.vectors = CMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    es.values.push_back(A(order[j], order[j]).real());
    for (std::size_t i = 0; i < n; ++i) es.vectors(i, j) = V(i, order[j]);
  }
  return es;
}

inline std::vector<double> hermitian_eigs(const HermitianMatrix& H, double tol = 1e-14) {
  return hermitian_eigensystem(H, tol).values;
}

inline double operator_norm(const HermitianMatrix& H) {
  auto e = hermitian_eigs(H);
  return e.empty() ? 0.0 : std::max(std::abs(e.front()), std::abs(e.back()));
}

inline double operator_norm(const CMatrix& X) {
  if (X.rows() == 0 || X.cols() == 0) return 0.0;
  auto e = hermitian_eigs(HermitianMatrix(X.adjoint() * X, 1e-9));
  return std::sqrt(std::max(0.0, e.back()));
}

// ---------------------------------------------------------------------------
// Clifford modules

inline std::vector<HermitianMatrix> clifford_generators(unsigned d) {
  if (d < 1 || d > 10) throw Error(ErrorCode::InvalidParameter, "Clifford rank must be in [1,10]");
  const Complex I(0, 1);
  CMatrix s1(2, 2), s2(2, 2), s3(2, 2);
  s1(0, 1) = s1(1, 0) = 1;
  s2(0, 1) = -I;
  s2(1, 0) = I;
  s3(0, 0) = 1;
  s3(1, 1) = -1;
  std::vector<CMatrix> g;
  std::size_t dim = 1;
  for (unsigned k = 2; k <= d; k += 2) {
    for (auto& x : g) x = kron(x, s3);
    g.push_back(kron(CMatrix::identity(dim), s1));
    g.push_back(kron(CMatrix::identity(dim), s2));
    dim *= 2;
  }
  if (d % 2 == 1) {
    CMatrix chi = CMatrix::identity(dim);
    for (auto& x : g) chi = chi * x;
    Complex ph = 1;
    for (unsigned k = 0; k < d / 2; ++k) ph *= I;
    g.push_back(chi.scaled(ph));
  }
  std::vector<HermitianMatrix> out;
  for (auto& x : g) out.emplace_back(x);
  return out;
}

inline std::size_t clifford_dim(unsigned d) { return std::size_t(1) << (d / 2); }

inline HermitianMatrix clifford_multiply(const std::vector<HermitianMatrix>& gens, const std::vector<double>& v) {
  if (gens.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "Clifford vector length");
  CMatrix m(gens.front().dim(), gens.front().dim());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) m = m + gens[i].matrix().scaled(v[i]);
  return HermitianMatrix(m);
}

// ---------------------------------------------------------------------------
// Labels

struct Label {
  std::vector<Rational> x;  // lattice / Gamma_N / finitely supported coordinates
  std::vector<long> tags;   // omega: {beta} or {alpha, beta}; square model: {j}

  static Label lattice(const std::vector<long>& v) {
    Label l;
    for (long a : v) l.x.emplace_back(a);
    return l;
  }
  std::vector<double> coords() const {
    std::vector<double> d;
    for (auto& q : x) d.push_back(to_double(q));
    return d;
  }
  double norm() const {
    double s = 0;
    for (auto& q : x) s += to_double(q) * to_double(q);
    return std::sqrt(s);
  }
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < tags.size(); ++i) s += (i ? "," : "") + std::to_string(tags[i]);
    if (!tags.empty()) s += ";";
    s += "(";
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + to_string(x[i]);
    return s + ")";
  }
  bool operator==(const Label&) const = default;
};

inline Label operator+(const Label& a, const Label& b) {
  Label s = a;
  if (s.x.size() < b.x.size()) s.x.resize(b.x.size());
  for (std::size_t i = 0; i < b.x.size(); ++i) s.x[i] += b.x[i];
  return s;
}

// minimal k with N^k g integral
inline long denominator_depth(const std::vector<Rational>& g, long N) {
  auto primes = prime_divisors(Integer(N));
  long k = 0;
  for (auto& q : g) {
    Integer d = den_of(q);
    if (strip_primes(d, primes) != 1) throw Error(ErrorCode::InvalidParameter, "label " + to_string(q) + " is not in Z[1/N]");
    Integer p = 1;
    long kk = 0;
    while (p % d != 0) {
      p *= N;
      ++kk;
    }
    k = std::max(k, kk);
  }
  return k;
}

struct SolenoidLabel {
  Rational a, b;
  long N = 2;
  long depth = 0;
  static SolenoidLabel make(Rational a, Rational b, long N) {
    SolenoidLabel s{a, b, N, 0};
    s.depth = denominator_depth({a, b}, N);
    return s;
  }
  bool valid() const { return depth == denominator_depth({a, b}, N); }
  Label label() const { return Label{{a, b}, {}}; }
};

// canonical order: tags, depth, norm, coordinates
inline void canonical_sort(std::vector<Label>& ls, long N = 0) {
  auto key_depth = [N](const Label& l) { return N >= 2 ? denominator_depth(l.x, N) : 0; };
  std::sort(ls.begin(), ls.end(), [&](const Label& a, const Label& b) {
    if (a.tags != b.tags) return a.tags < b.tags;
    long da = key_depth(a), db = key_depth(b);
    if (da != db) return da < db;
    double na = a.norm(), nb = b.norm();
    if (std::abs(na - nb) > 1e-12) return na < nb;
    return a.x < b.x;
  });
}

// ---------------------------------------------------------------------------
// Fourier multipliers

struct Ball {
  enum Kind { Certified, SampledOnly } kind = Certified;
  std::vector<Label> labels;
  std::string region;
};

struct IncrementBound {
  enum Kind { Exact, BallSup } kind = Exact;
  double value = 0;
  double radius = 0;
  std::optional<double> achieved;  // sup over a sample ball, when computed
};

struct FourierMultiplier {
  enum class Domain { Lattice, SolenoidLabels, OmegaLattice, TripleLabels };
  enum class Family { Flat, FlatLimit, Length, LengthN, WeightedOmega, StableCornerSquare, Perturbed, Zero };

  Domain domain = Domain::Lattice;
  Family family = Family::Flat;
  std::size_t fiber_dim = 1;
  std::size_t rank = 2;  // coordinate count of lattice labels
  long N = 0;            // Gamma_N labels
  std::string description;
  std::function<HermitianMatrix(const Label&)> symbol;
  std::function<Ball(double)> ball;
  std::function<IncrementBound(const Label&)> increment;
  bool increment_is_exact_sup = false;  // increment value equals the commutator norm
};

inline const char* family_name(FourierMultiplier::Family f) {
  using F = FourierMultiplier::Family;
  switch (f) {
    case F::Flat: return "flat";
    case F::FlatLimit: return "flat-limit";
    case F::Length: return "length";
    case F::LengthN: return "length-N";
    case F::WeightedOmega: return "weighted-omega";
    case F::StableCornerSquare: return "stable-corner-square";
    case F::Perturbed: return "perturbed";
    default: return "zero";
  }
}

namespace detail {

inline void box_points(std::size_t m, long bound, const std::function<void(const std::vector<long>&)>& visit) {
  std::vector<long> v(m, -bound);
  if (m == 0) {
    visit(v);
    return;
  }
  while (true) {
    visit(v);
    std::size_t i = 0;
    while (i < m && v[i] == bound) v[i++] = -bound;
    if (i == m) return;
    ++v[i];
  }
}

inline std::vector<double> mat_vec(const std::vector<std::vector<double>>& L, const std::vector<double>& x) {
  std::vector<double> y(L.size(), 0.0);
  for (std::size_t i = 0; i < L.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += L[i][j] * x[j];
  return y;
}

inline double euclid(const std::vector<double>& v) {
  double s = 0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

inline double sigma_min(const std::vector<std::vector<double>>& L, double& sigma_max) {
  std::size_t m = L.front().size();
  CMatrix G(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (auto& row : L) G(i, j) += row[i] * row[j];
  auto e = hermitian_eigs(HermitianMatrix(G));
  sigma_max = std::sqrt(std::max(0.0, e.back()));
  return std::sqrt(std::max(0.0, e.front()));
}

inline std::vector<Label> lattice_box_filter(std::size_t m, long bound, const std::function<bool(const Label&)>& keep) {
  std::vector<Label> out;
  box_points(m, bound, [&](const std::vector<long>& v) {
    Label l = Label::lattice(v);
    if (keep(l)) out.push_back(std::move(l));
  });
  return out;
}

// all g in N^{-k} Z^2 with depth exactly k and |g| <= r
inline std::vector<Label> solenoid_shell(long N, long k, double r) {
  Integer Nk = pow_int(Integer(N), static_cast<unsigned>(k));
  long B = static_cast<long>(std::floor(r * Nk.convert_to<double>() + 1e-9));
  std::vector<Label> out;
  box_points(2, B, [&](const std::vector<long>& v) {
    Label l{{Rational(v[0]) / Rational(Nk), Rational(v[1]) / Rational(Nk)}, {}};
    if (denominator_depth(l.x, N) == k && l.norm() <= r + 1e-12) out.push_back(std::move(l));
  });
  return out;
}

}  // namespace detail

// x -> 2 pi gamma(L x), L is d x m
inline FourierMultiplier make_flat(const std::vector<std::vector<double>>& L, Tolerances tol = {}) {
  if (L.empty() || L.front().empty()) throw Error(ErrorCode::SingularL, "empty L");
  double smax = 0, smin = detail::sigma_min(L, smax);
  if (smin <= 0 || smax / smin > 1e8) throw Error(ErrorCode::SingularL, "L is singular or too ill-conditioned");
  unsigned d = static_cast<unsigned>(L.size());
  auto gens = std::make_shared<std::vector<HermitianMatrix>>(clifford_generators(d));
  FourierMultiplier F;
  F.family = FourierMultiplier::Family::Flat;
  F.fiber_dim = clifford_dim(d);
  F.rank = L.front().size();
  F.description = "flat Dirac symbol 2*pi*gamma(Lx)";
  F.symbol = [L, gens](const Label& x) {
    auto y = detail::mat_vec(L, x.coords());
    for (auto& a : y) a *= kTwoPi;
    return clifford_multiply(*gens, y);
  };
  std::size_t m = F.rank;
  F.ball = [L, smin, m, tol](double R) {
    long B = static_cast<long>(std::floor(R / (kTwoPi * smin) + 1e-9));
    Ball b;
    b.labels = detail::lattice_box_filter(m, B, [&](const Label& x) {
      return kTwoPi * detail::euclid(detail::mat_vec(L, x.coords())) <= R + tol.assertion;
    });
    canonical_sort(b.labels);
    b.region = "|x|_inf <= " + std::to_string(B);
    return b;
  };
  F.increment = [L](const Label& a) {
    return IncrementBound{IncrementBound::Exact, kTwoPi * detail::euclid(detail::mat_vec(L, a.coords())), 0, std::nullopt};
  };
  F.increment_is_exact_sup = true;
  return F;
}

inline FourierMultiplier make_flat_identity(std::size_t m, double scale = 1.0) {
  std::vector<std::vector<double>> L(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) L[i][i] = scale;
  return make_flat(L);
}

// stage n of the rescaled flat solenoid family: 2 pi gamma(x / N^(n-1)); rescale=false drops the factor
inline FourierMultiplier make_flat_stage(long N, long n, bool rescale = true) {
  return make_flat_identity(2, rescale ? std::pow(double(N), -double(n - 1)) : 1.0);
}

// flat symbol on Gamma_N; balls are never finite, so only a sample is offered
inline FourierMultiplier make_flat_limit(long N, long sample_depth = 3) {
  if (N < 2) throw Error(ErrorCode::InvalidParameter, "N must be >= 2");
  auto gens = std::make_shared<std::vector<HermitianMatrix>>(clifford_generators(2));
  FourierMultiplier F;
  F.domain = FourierMultiplier::Domain::SolenoidLabels;
  F.family = FourierMultiplier::Family::FlatLimit;
  F.fiber_dim = 2;
  F.N = N;
  F.description = "flat Dirac symbol on Z[1/N]^2";
  F.symbol = [gens](const Label& g) {
    auto y = g.coords();
    for (auto& a : y) a *= kTwoPi;
    return clifford_multiply(*gens, y);
  };
  F.ball = [N, sample_depth](double R) {
    Ball b;
    b.kind = Ball::SampledOnly;
    for (long k = 0; k <= sample_depth; ++k)
      for (auto& l : detail::solenoid_shell(N, k, R / kTwoPi)) b.labels.push_back(l);
    canonical_sort(b.labels, N);
    b.region = "depth <= " + std::to_string(sample_depth) + ", |g| <= R/(2 pi)";
    return b;
  };
  F.increment = [](const Label& a) { return IncrementBound{IncrementBound::Exact, kTwoPi * a.norm(), 0, std::nullopt}; };
  F.increment_is_exact_sup = true;
  return F;
}

enum class LengthNorm { L1, Euclidean };

// weighted length on Z^m
inline FourierMultiplier make_length(const std::vector<double>& w, LengthNorm norm = LengthNorm::Euclidean, Tolerances tol = {}) {
  if (w.empty()) throw Error(ErrorCode::InvalidParameter, "length needs weights");
  for (double a : w)
    if (!(a > 0)) throw Error(ErrorCode::NonProperWeights, "weights must be positive");
  auto ell = [w, norm](const std::vector<double>& x) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += norm == LengthNorm::L1 ? w[i] * std::abs(x[i]) : (w[i] * x[i]) * (w[i] * x[i]);
    return norm == LengthNorm::L1 ? s : std::sqrt(s);
  };
  FourierMultiplier F;
  F.family = FourierMultiplier::Family::Length;
  F.rank = w.size();
  F.description = norm == LengthNorm::L1 ? "weighted l1 length" : "weighted Euclidean length";
  F.symbol = [ell](const Label& x) { return HermitianMatrix::scalar(ell(x.coords())); };
  double wmin = *std::min_element(w.begin(), w.end());
  std::size_t m = w.size();
  F.ball = [ell, wmin, m, tol](double R) {
    long B = static_cast<long>(std::floor(R / wmin + 1e-9));
    Ball b;
    b.labels = detail::lattice_box_filter(m, B, [&](const Label& x) { return ell(x.coords()) <= R + tol.assertion; });
    canonical_sort(b.labels);
    b.region = "|x|_inf <= " + std::to_string(B);
    return b;
  };
  F.increment = [ell](const Label& a) { return IncrementBound{IncrementBound::Exact, ell(a.coords()), 0, std::nullopt}; };
  return F;
}

inline double length_N_value(const std::vector<Rational>& g, long N) {
  Label l{g, {}};
  return l.norm() + double(denominator_depth(g, N));
}

// |g| + h_N(g) on Gamma_N
inline FourierMultiplier make_length_N(long N, Tolerances tol = {}) {
  if (N < 2) throw Error(ErrorCode::InvalidParameter, "N must be >= 2");
  FourierMultiplier F;
  F.domain = FourierMultiplier::Domain::SolenoidLabels;
  F.family = FourierMultiplier::Family::LengthN;
  F.N = N;
  F.description = "proper length |g| + h_N(g) on Z[1/N]^2";
  F.symbol = [N](const Label& g) { return HermitianMatrix::scalar(length_N_value(g.x, N)); };
  F.ball = [N, tol](double R) {
    Ball b;
    long K = static_cast<long>(std::floor(R + 1e-9));
    for (long k = 0; k <= K; ++k)
      for (auto& l : detail::solenoid_shell(N, k, R - double(k) + tol.assertion))
        if (length_N_value(l.x, N) <= R + tol.assertion) b.labels.push_back(l);
    canonical_sort(b.labels, N);
    b.region = "depth <= " + std::to_string(K) + ", |g| <= R";
    return b;
  };
  F.increment = [N](const Label& a) { return IncrementBound{IncrementBound::Exact, length_N_value(a.x, N), 0, std::nullopt}; };
  return F;
}

// stage n realisation of l_N on Z^2: x -> l_N(x / N^(n-1))
inline FourierMultiplier make_length_N_stage(long N, long n, Tolerances tol = {}) {
  if (N < 2) throw Error(ErrorCode::InvalidParameter, "N must be >= 2");
  Rational s = Rational(1) / Rational(pow_int(Integer(N), static_cast<unsigned>(n - 1)));
  auto val = [N, s](const Label& x) {
    std::vector<Rational> g;
    for (auto& q : x.x) g.push_back(q * s);
    return length_N_value(g, N);
  };
  FourierMultiplier F;
  F.family = FourierMultiplier::Family::LengthN;
  F.N = N;
  F.description = "stage " + std::to_string(n) + " of the proper length l_N";
  F.symbol = [val](const Label& x) { return HermitianMatrix::scalar(val(x)); };
  double inv = 1.0 / to_double(s);
  F.ball = [val, inv, tol](double R) {
    long B = static_cast<long>(std::floor(R * inv + 1e-9));
    Ball b;
    b.labels = detail::lattice_box_filter(2, B, [&](const Label& x) { return val(x) <= R + tol.assertion; });
    canonical_sort(b.labels);
    return b;
  };
  F.increment = [val](const Label& a) { return IncrementBound{IncrementBound::Exact, val(a), 0, std::nullopt}; };
  return F;
}

struct OmegaWeights {
  std::function<double(long)> w;       // coordinate weights, j >= 1
  std::function<double(long)> lambda;  // index weights, beta >= 1
  bool declared_proper = false;        // both sequences increase to infinity
  std::string description = "w_j, lambda_beta";
};

inline OmegaWeights linear_omega_weights() {
  return {[](long j) { return double(j); }, [](long b) { return double(b); }, true, "w_j = j, lambda_beta = beta"};
}

// labels (beta; g) with g finitely supported, value lambda_beta + sum w_j |g_j|
inline FourierMultiplier make_weighted_omega(OmegaWeights W, Tolerances tol = {}) {
  if (!W.declared_proper) throw Error(ErrorCode::NonProperWeights, "weight sequences must be declared to increase to infinity");
  auto value = [W](const Label& l) {
    double s = W.lambda(l.tags.back());
    for (std::size_t j = 0; j < l.x.size(); ++j) s += W.w(long(j) + 1) * std::abs(to_double(l.x[j]));
    return s;
  };
  FourierMultiplier F;
  F.domain = FourierMultiplier::Domain::OmegaLattice;
  F.family = FourierMultiplier::Family::WeightedOmega;
  F.rank = 0;
  F.description = "weighted length on finitely supported sequences, " + W.description;
  F.symbol = [value](const Label& l) { return HermitianMatrix::scalar(value(l)); };
  F.ball = [W, value, tol](double R) {
    Ball b;
    for (long beta = 1; W.lambda(beta) <= R + tol.assertion; ++beta) {
      double rem = R - W.lambda(beta);
      std::vector<long> bounds;
      for (long j = 1; W.w(j) <= rem + tol.assertion; ++j) bounds.push_back(long(std::floor(rem / W.w(j) + 1e-9)));
      std::vector<long> g(bounds.size());
      std::function<void(std::size_t, double)> rec = [&](std::size_t j, double used) {
        if (j == bounds.size()) {
          Label l;
          std::size_t len = g.size();
          while (len > 0 && g[len - 1] == 0) --len;
          for (std::size_t i = 0; i < len; ++i) l.x.emplace_back(g[i]);
          l.tags = {beta};
          b.labels.push_back(std::move(l));
          return;
        }
        for (long a = -bounds[j]; a <= bounds[j]; ++a) {
          double u = used + W.w(long(j) + 1) * std::abs(double(a));
          if (u > rem + tol.assertion) continue;
          g[j] = a;
          rec(j + 1, u);
        }
        g[j] = 0;
      };
      rec(0, 0.0);
    }
    canonical_sort(b.labels);
    b.region = "coordinates with w_j <= R, indices with lambda_beta <= R";
    return b;
  };
  F.increment = [W](const Label& a) {
    double s = 0;
    for (std::size_t j = 0; j < a.x.size(); ++j) s += W.w(long(j) + 1) * std::abs(to_double(a.x[j]));
    return IncrementBound{IncrementBound::Exact, s, 0, std::nullopt};
  };
  return F;
}

// labels (j; x), |D| value sqrt(4 pi^2 |x|^2 + j^2), j >= 1
inline FourierMultiplier make_stable_corner_square(std::size_t m, Tolerances tol = {}) {
  FourierMultiplier F;
  F.family = FourierMultiplier::Family::StableCornerSquare;
  F.rank = m;
  F.description = "anticommuting square model sqrt(4 pi^2 |x|^2 + j^2)";
  auto val = [](const Label& l) {
    double r = l.norm(), j = double(l.tags.at(0));
    return std::sqrt(kTwoPi * kTwoPi * r * r + j * j);
  };
  F.symbol = [val](const Label& l) { return HermitianMatrix::scalar(val(l)); };
  F.ball = [m, val, tol](double R) {
    Ball b;
    long B = static_cast<long>(std::floor(R / kTwoPi + 1e-9));
    for (long j = 1; double(j) <= R + tol.assertion; ++j)
      detail::box_points(m, B, [&](const std::vector<long>& v) {
        Label l = Label::lattice(v);
        l.tags = {j};
        if (val(l) <= R + tol.assertion) b.labels.push_back(l);
      });
    canonical_sort(b.labels);
    return b;
  };
  F.increment = [](const Label& a) { return IncrementBound{IncrementBound::Exact, kTwoPi * a.norm(), 0, std::nullopt}; };
  return F;
}

// F + G with sup ||G|| <= g_bound
inline FourierMultiplier make_perturbed(const FourierMultiplier& base, std::function<HermitianMatrix(const Label&)> G, double g_bound,
                                        Tolerances tol = {}) {
  FourierMultiplier F = base;
  F.family = FourierMultiplier::Family::Perturbed;
  F.description = base.description + " + bounded perturbation (" + std::to_string(g_bound) + ")";
  auto bs = base.symbol;
  F.symbol = [bs, G](const Label& x) { return bs(x) + G(x); };
  auto bb = base.ball;
  auto sym = F.symbol;
  F.ball = [bb, g_bound, sym, tol](double R) {
    Ball b = bb(R + g_bound);
    std::vector<Label> kept;
    for (auto& l : b.labels) {
      auto e = hermitian_eigs(sym(l));
      if (std::any_of(e.begin(), e.end(), [&](double v) { return std::abs(v) <= R + tol.assertion; })) kept.push_back(l);
    }
    b.labels = std::move(kept);
    b.region += " (base ball at R + " + std::to_string(g_bound) + ")";
    return b;
  };
  auto bi = base.increment;
  F.increment = [bi, g_bound](const Label& a) {
    IncrementBound ib = bi(a);
    ib.value += 2 * g_bound;
    ib.achieved.reset();
    return ib;
  };
  F.increment_is_exact_sup = false;
  return F;
}

inline FourierMultiplier make_zero(std::size_t rank, std::size_t fiber = 1) {
  FourierMultiplier F;
  F.family = FourierMultiplier::Family::Zero;
  F.rank = rank;
  F.fiber_dim = fiber;
  F.description = "zero symbol";
  F.symbol = [fiber](const Label&) { return HermitianMatrix(fiber); };
  F.ball = [rank](double) {
    Ball b;
    b.kind = Ball::SampledOnly;
    b.region = "every label";
    detail::box_points(rank, 2, [&](const std::vector<long>& v) { b.labels.push_back(Label::lattice(v)); });
    canonical_sort(b.labels);
    return b;
  };
  F.increment = [](const Label&) { return IncrementBound{}; };
  F.increment_is_exact_sup = true;
  return F;
}

// ---------------------------------------------------------------------------
// Operations

struct MultiplicityResult {
  enum Kind { CertifiedFinite, SampledPass, Fail } kind = CertifiedFinite;
  std::size_t count = 0;
  std::string region;
  std::vector<Label> witness;
};

inline const char* multiplicity_name(MultiplicityResult::Kind k) {
  switch (k) {
    case MultiplicityResult::CertifiedFinite: return "CertifiedFinite";
    case MultiplicityResult::SampledPass: return "SampledPass";
    default: return "Fail";
  }
}

inline std::size_t eigs_in_window(const HermitianMatrix& H, double R, double tol) {
  std::size_t c = 0;
  for (double e : hermitian_eigs(H))
    if (std::abs(e) <= R + tol) ++c;
  return c;
}

inline std::vector<Label> flat_limit_witness(long N, long depth) {
  std::vector<Label> w;
  for (long k = 1; k <= depth; ++k)
    w.push_back(Label{{Rational(1) / Rational(pow_int(Integer(N), static_cast<unsigned>(k))), Rational(0)}, {}});
  return w;
}

inline MultiplicityResult finite_multiplicity_check(const FourierMultiplier& F, double R, Tolerances tol = {}) {
  MultiplicityResult r;
  if (F.family == FourierMultiplier::Family::FlatLimit) {
    r.kind = MultiplicityResult::Fail;
    r.witness = flat_limit_witness(F.N, 10);
    r.region = "eigenvalues 2 pi N^-k accumulate at 0";
    return r;
  }
  Ball b = F.ball(R);
  r.region = b.region;
  for (auto& l : b.labels) r.count += eigs_in_window(F.symbol(l), R, tol.assertion);
  if (b.kind == Ball::SampledOnly) r.kind = MultiplicityResult::SampledPass;
  return r;
}

struct SpectralEntry {
  Label label;
  double eigenvalue;
};

inline std::vector<SpectralEntry> spectrum_enumerate(const FourierMultiplier& F, double R, Tolerances tol = {}) {
  if (F.family == FourierMultiplier::Family::FlatLimit) throw Error(ErrorCode::UncertifiedBall, "flat symbol on limit labels has no finite ball");
  Ball b = F.ball(R);
  if (b.kind != Ball::Certified) throw Error(ErrorCode::UncertifiedBall, "ball oracle is sampled only: " + b.region);
  std::vector<SpectralEntry> out;
  for (auto& l : b.labels)
    for (double e : hermitian_eigs(F.symbol(l)))
      if (std::abs(e) <= R + tol.assertion) out.push_back({l, e});
  return out;
}

inline IncrementBound increment_bound(const FourierMultiplier& F, const Label& a, double sample_radius = 0) {
  IncrementBound ib = F.increment(a);
  if (sample_radius > 0) {
    Ball b = F.ball(sample_radius);
    double sup = 0;
    for (auto& x : b.labels) sup = std::max(sup, operator_norm((F.symbol(x + a) - F.symbol(x)).matrix()));
    ib.achieved = sup;
    ib.radius = sample_radius;
  }
  return ib;
}

struct CommutatorNorm {
  double upper = 0, lower = 0;
  bool exact = false;
  double sample_radius = 0;
};

// ||[D_F, U^a]|| = sup_x ||F(x+a) - F(x)||
inline CommutatorNorm monomial_commutator_norm(const FourierMultiplier& F, const Label& a, double sample_radius = 4) {
  CommutatorNorm c;
  IncrementBound ib = increment_bound(F, a, sample_radius);
  c.upper = ib.value;
  c.lower = ib.achieved.value_or(0);
  c.sample_radius = sample_radius;
  c.exact = F.increment_is_exact_sup;
  if (c.exact) c.lower = c.upper;
  return c;
}

struct CosetEntry {
  IntVector representative;
  bool constant_offset = false;
  double offset_norm = 0;  // constant offset norm, or the sup over the ball
};

struct CosetReport {
  std::vector<CosetEntry> cosets;
  double aggregate = 0;
};

inline Label label_of(const IntVector& v) {
  Label l;
  for (auto& a : v) l.x.emplace_back(a);
  return l;
}

inline CosetReport coset_analysis(const IntMatrix& M, const FourierMultiplier& G, const FourierMultiplier& F, double R,
                                  Tolerances tol = {}) {
  CosetDescription cd = coset_representatives(M);
  if (!cd.finite) throw Error(ErrorCode::NotFullColumnRank, "coset listing needs a finite index");
  Ball b = F.ball(R);
  CosetReport rep;
  for (auto& r : cd.representatives) {
    CosetEntry e;
    e.representative = r;
    std::optional<CMatrix> first;
    e.constant_offset = true;
    for (auto& x : b.labels) {
      IntVector xi;
      for (auto& q : x.x) xi.push_back(num_of(q));
      IntVector y = M.apply(xi);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += r[i];
      CMatrix d = (G.symbol(label_of(y)) - F.symbol(x)).matrix();
      e.offset_norm = std::max(e.offset_norm, operator_norm(HermitianMatrix(d)));
      if (!first) first = d;
      else if ((d - *first).max_abs() > tol.assertion) e.constant_offset = false;
    }
    if (e.constant_offset && first) e.offset_norm = operator_norm(HermitianMatrix(*first));
    rep.aggregate = std::max(rep.aggregate, e.offset_norm);
    rep.cosets.push_back(std::move(e));
  }
  return rep;
}

struct CompatibilityResult {
  bool exact_on_ball = true;
  double max_defect = 0;
  std::optional<Label> witness;  // first label in canonical order with a defect
  double witness_defect = 0;
  std::size_t labels_checked = 0;
};

inline CompatibilityResult compatibility_check(const FourierMultiplier& Fn, const FourierMultiplier& Fn1, const IntMatrix& M,
                                               const CMatrix& J, double R, Tolerances tol = {}) {
  CMatrix JJ = J.adjoint() * J;
  if ((JJ - CMatrix::identity(J.cols())).max_abs() > tol.isometry) throw Error(ErrorCode::NonIsometry, "J does not have orthonormal columns");
  Ball b = Fn.ball(R);
  CompatibilityResult res;
  for (auto& x : b.labels) {
    IntVector xi;
    for (auto& q : x.x) xi.push_back(num_of(q));
    CMatrix d = Fn1.symbol(label_of(M.apply(xi))).matrix() * J - J * Fn.symbol(x).matrix();
    double v = operator_norm(d);
    ++res.labels_checked;
    res.max_defect = std::max(res.max_defect, v);
    if (v > tol.exact && !res.witness) {
      res.witness = x;
      res.witness_defect = v;
    }
  }
  res.exact_on_ball = !res.witness;
  return res;
}

struct ResolventDiagnostic {
  enum Kind { CompactEvidence, NonCompactWitness } kind = CompactEvidence;
  std::vector<double> radii;
  std::vector<std::size_t> counts;
  std::vector<Label> witness;
  std::vector<double> eigenvalues;
};

inline ResolventDiagnostic resolvent_diagnostic(const FourierMultiplier& F, const std::vector<double>& radii, long depth = 10,
                                                Tolerances tol = {}) {
  ResolventDiagnostic d;
  if (F.family == FourierMultiplier::Family::FlatLimit) {
    d.kind = ResolventDiagnostic::NonCompactWitness;
    d.witness = flat_limit_witness(F.N, depth);
    for (auto& g : d.witness) d.eigenvalues.push_back(hermitian_eigs(F.symbol(g)).back());
    return d;
  }
  for (double R : radii) {
    auto m = finite_multiplicity_check(F, R, tol);
    if (m.kind != MultiplicityResult::CertifiedFinite) throw Error(ErrorCode::UncertifiedBall, "resolvent evidence needs a certified ball");
    d.radii.push_back(R);
    d.counts.push_back(m.count);
  }
  return d;
}

struct CutdownResult {
  enum Kind { Finite, Unbounded } kind = Finite;
  std::size_t count = 0;
  std::string witness;
};

// labels (alpha, rest) with alpha <= cut; the value does not depend on alpha
inline CutdownResult cutdown_count(const FourierMultiplier& F, std::optional<long> cut, double R, Tolerances tol = {}) {
  using Fam = FourierMultiplier::Family;
  if (F.family != Fam::WeightedOmega && F.family != Fam::StableCornerSquare)
    throw Error(ErrorCode::InvalidParameter, "cut-down counting needs a weighted-omega or stable-corner-square model");
  Ball b = F.ball(R);
  if (b.kind != Ball::Certified) throw Error(ErrorCode::UncertifiedBall, "cut-down counting needs a certified ball");
  std::size_t per = 0;
  for (auto& l : b.labels) per += eigs_in_window(F.symbol(l), R, tol.assertion);
  CutdownResult r;
  if (!cut) {
    r.kind = per ? CutdownResult::Unbounded : CutdownResult::Finite;
    if (per) r.witness = "alpha = k, label " + b.labels.front().str() + " stays in the window for every k";
    return r;
  }
  if (*cut < 0) throw Error(ErrorCode::InvalidParameter, "cut must be nonnegative");
  r.count = per * static_cast<std::size_t>(*cut);
  return r;
}

struct BandedCheck {
  double lhs = 0, rhs = 0, norm_T = 0;
  long band = 0;
  bool pass = false;
};

inline BandedCheck banded_commutator_check(const CMatrix& T, const std::vector<long>& levels, Tolerances tol = {}) {
  if (T.rows() != levels.size() || T.cols() != levels.size()) throw Error(ErrorCode::DimensionMismatch, "levels must match T");
  for (long l : levels)
    if (l < 0) throw Error(ErrorCode::InvalidParameter, "filtration levels must be nonnegative");
  BandedCheck c;
  CMatrix C(T.rows(), T.cols());
  for (std::size_t i = 0; i < T.rows(); ++i)
    for (std::size_t j = 0; j < T.cols(); ++j) {
      if (T(i, j) == Complex{}) continue;
      long d = levels[i] - levels[j];
      c.band = std::max(c.band, d < 0 ? -d : d);
      C(i, j) = double(d) * T(i, j);
    }
  c.lhs = operator_norm(C);
  c.norm_T = operator_norm(T);
  c.rhs = double(c.band) * double(c.band + 1) * c.norm_T;
  c.pass = c.lhs <= c.rhs + tol.assertion;
  return c;
}

// ---------------------------------------------------------------------------
// Truncated Fourier blocks

struct Window {
  long x0 = 0, y0 = 0, w = 0, h = 0;
  std::size_t size() const { return std::size_t(w * h); }
  bool contains(long x, long y) const { return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h; }
  std::size_t index(long x, long y) const { return std::size_t((y - y0) * w + (x - x0)); }
  std::pair<long, long> at(std::size_t i) const { return {x0 + long(i) % w, y0 + long(i) / w}; }
  bool interior(long x, long y, long margin) const {
    return x >= x0 + margin && x < x0 + w - margin && y >= y0 + margin && y < y0 + h - margin;
  }
};

inline Window centered_window(long w, long h) { return {-(w / 2), -(h / 2), w, h}; }

// left (or right) multiplication by U^a on the twisted group algebra, cocycle e^{2 pi i theta x_2 y_1}
inline CMatrix twisted_shift(const Window& W, double theta, long a1, long a2, bool right) {
  CMatrix S(W.size(), W.size());
  for (std::size_t i = 0; i < W.size(); ++i) {
    auto [x1, x2] = W.at(i);
    long y1 = x1 + a1, y2 = x2 + a2;
    if (!W.contains(y1, y2)) continue;
    double ph = right ? theta * double(x2) * double(a1) : theta * double(a2) * double(x1);
    S(W.index(y1, y2), i) = std::polar(1.0, kTwoPi * ph);
  }
  return S;
}

struct FluctuationReport {
  double norm_B = 0, bound = 0, selfadjoint_residual = 0;
  std::size_t dim = 0, interior_dim = 0;
  bool pass = false;
};

// B = lambda U_h [D, U_h^*] at stage n of l_N, on a w x h window
inline FluctuationReport fluctuation_check(long N, long n, const std::vector<Rational>& h, double lambda, long w, long hgt,
                                           double theta = 0.0, Tolerances tol = {}) {
  Window W = centered_window(w, hgt);
  if (W.size() > 512) throw Error(ErrorCode::TruncationTooSmall, "truncation dimension exceeds 512");
  Integer scale = pow_int(Integer(N), static_cast<unsigned>(n - 1));
  std::vector<long> hn;
  for (auto& q : h) {
    Rational s = q * Rational(scale);
    if (den_of(s) != 1) throw Error(ErrorCode::InvalidParameter, "h is not a stage-" + std::to_string(n) + " label");
    hn.push_back(num_of(s).convert_to<long>());
  }
  FourierMultiplier F = make_length_N_stage(N, n);
  std::vector<double> dvals;
  for (std::size_t i = 0; i < W.size(); ++i) {
    auto [x1, x2] = W.at(i);
    dvals.push_back(hermitian_eigs(F.symbol(Label::lattice({x1, x2}))).front());
  }
  CMatrix D = CMatrix::diagonal(dvals);
  double th_n = theta / std::pow(double(N), 2.0 * double(n - 1));
  CMatrix U = twisted_shift(W, th_n, hn[0], hn[1], false);
  CMatrix Us = U.adjoint();
  CMatrix B = (U * (D * Us - Us * D)).scaled(lambda);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < W.size(); ++i) {
    auto [x1, x2] = W.at(i);
    if (W.contains(x1 - hn[0], x2 - hn[1])) keep.push_back(i);
  }
  FluctuationReport r;
  r.dim = W.size();
  r.interior_dim = keep.size();
  if (keep.empty()) throw Error(ErrorCode::TruncationTooSmall, "window leaves no interior block");
  CMatrix Bi = B.block(keep, keep);
  r.selfadjoint_residual = (Bi - Bi.adjoint()).max_abs();
  r.norm_B = operator_norm(HermitianMatrix(Bi, 1e-9));
  r.bound = std::abs(lambda) * length_N_value(h, N);
  r.pass = r.norm_B <= r.bound + tol.assertion && r.selfadjoint_residual <= tol.assertion;
  return r;
}

struct ConformalReport {
  double transport_residual = 0, commutation_residual = 0;
  std::size_t dim = 0, interior_dim = 0;
  bool pass = false;
};

// k = c0 + c1 (U + U^*) with U = U^(1,0); D = diag(|x|); a = U^(a1,a2)
inline ConformalReport conformal_check(double theta, long a1, long a2, double c0, double c1, long w, long hgt, long margin = 3,
                                       Tolerances tol = {}) {
  Window W = centered_window(w, hgt);
  if (W.size() > 512) throw Error(ErrorCode::TruncationTooSmall, "truncation dimension exceeds 512");
  std::vector<std::size_t> inner;
  for (std::size_t i = 0; i < W.size(); ++i) {
    auto [x1, x2] = W.at(i);
    if (W.interior(x1, x2, margin)) inner.push_back(i);
  }
  if (inner.empty()) throw Error(ErrorCode::TruncationTooSmall, "window leaves no interior block");
  std::vector<double> dv;
  for (std::size_t i = 0; i < W.size(); ++i) {
    auto [x1, x2] = W.at(i);
    dv.push_back(std::hypot(double(x1), double(x2)));
  }
  CMatrix D = CMatrix::diagonal(dv);
  CMatrix Ru = twisted_shift(W, theta, 1, 0, true);
  CMatrix Rk = CMatrix::identity(W.size()).scaled(c0) + (Ru + Ru.adjoint()).scaled(c1);
  CMatrix A = twisted_shift(W, theta, a1, a2, false);
  CMatrix Dk = Rk * D * Rk;
  CMatrix lhs = Dk * A - A * Dk;
  CMatrix rhs = Rk * (D * A - A * D) * Rk;
  CMatrix comm = Rk * A - A * Rk;
  ConformalReport r;
  r.dim = W.size();
  r.interior_dim = inner.size();
  r.transport_residual = (lhs - rhs).block(inner, inner).max_abs();
  r.commutation_residual = comm.block(inner, inner).max_abs();
  r.pass = r.transport_residual <= tol.assertion && r.commutation_residual <= tol.assertion;
  return r;
}

}  // namespace protorus
