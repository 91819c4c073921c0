#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"

namespace protorus {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const Integer& p, const Integer& q) {
  if (q == 0) throw Error(ErrorCode::DivisionByZeroScalar, "zero denominator");
  return Rational(p, q);
}

inline Integer num_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer den_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline std::string to_string(const Integer& z) { return z.str(); }

inline std::string to_string(const Rational& r) {
  if (den_of(r) == 1) return num_of(r).str();
  return num_of(r).str() + "/" + den_of(r).str();
}

inline Integer pow_int(const Integer& b, unsigned e) {
  Integer r = 1;
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

inline Rational pow_rat(const Rational& b, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

// floor(a / b) for b != 0
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// integer, decimal or scientific literal without a slash
inline Rational parse_decimal(std::string_view s) {
  s = trim(s);
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string_view mant = s, expo;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mant = s.substr(0, e);
    expo = s.substr(e + 1);
  }
  std::string_view ip = mant, fp;
  if (auto d = mant.find('.'); d != std::string_view::npos) {
    ip = mant.substr(0, d);
    fp = mant.substr(d + 1);
  }
  if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
    throw Error(ErrorCode::ParseError, "bad number '" + std::string(s) + "'");
  std::string digits = std::string(ip) + std::string(fp);
  digits.erase(0, digits.find_first_not_of('0'));  // a leading 0 would select octal
  Integer n(digits.empty() ? std::string("0") : digits);
  long shift = -static_cast<long>(fp.size());
  if (!expo.empty()) {
    bool eneg = false;
    if (expo.front() == '-' || expo.front() == '+') {
      eneg = expo.front() == '-';
      expo.remove_prefix(1);
    }
    if (!all_digits(expo) || expo.size() > 6) throw Error(ErrorCode::ParseError, "bad exponent in '" + std::string(s) + "'");
    long ev = std::stol(std::string(expo));
    shift += eneg ? -ev : ev;
  }
  Rational r = n;
  if (shift > 0) r *= pow_int(10, static_cast<unsigned>(shift));
  if (shift < 0) r /= pow_int(10, static_cast<unsigned>(-shift));
  return neg ? -r : r;
}

}  // namespace detail

// Accepts "p", "p/q", decimals and scientific notation.
inline Rational parse_rational(std::string_view s) {
  s = detail::trim(s);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational p = detail::parse_decimal(s.substr(0, slash));
    Rational q = detail::parse_decimal(s.substr(slash + 1));
    if (q == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(s) + "'");
    return p / q;
  }
  return detail::parse_decimal(s);
}

// ---------------------------------------------------------------------------
// Monomials and polynomials

class Monomial {
 public:
  using Factor = std::pair<std::string, unsigned>;

  Monomial() = default;

  static Monomial var(const std::string& name, unsigned e = 1) {
    Monomial m;
    if (e > 0) {
      m.f_.emplace_back(name, e);
      m.deg_ = e;
    }
    return m;
  }

  unsigned degree() const { return deg_; }
  bool is_one() const { return f_.empty(); }
  const std::vector<Factor>& factors() const { return f_; }

  unsigned exponent(std::string_view name) const {
    for (auto& [n, e] : f_)
      if (n == name) return e;
    return 0;
  }

  Monomial operator*(const Monomial& o) const {
    Monomial r;
    r.deg_ = deg_ + o.deg_;
    std::size_t i = 0, j = 0;
    while (i < f_.size() || j < o.f_.size()) {
      if (j == o.f_.size() || (i < f_.size() && f_[i].first < o.f_[j].first)) {
        r.f_.push_back(f_[i++]);
      } else if (i == f_.size() || o.f_[j].first < f_[i].first) {
        r.f_.push_back(o.f_[j++]);
      } else {
        r.f_.emplace_back(f_[i].first, f_[i].second + o.f_[j].second);
        ++i, ++j;
      }
    }
    return r;
  }

  std::optional<Monomial> divide(const Monomial& d) const {
    Monomial r;
    std::size_t j = 0;
    for (auto& [n, e] : f_) {
      unsigned de = 0;
      if (j < d.f_.size() && d.f_[j].first == n) de = d.f_[j++].second;
      else if (j < d.f_.size() && d.f_[j].first < n) return std::nullopt;
      if (de > e) return std::nullopt;
      if (e > de) {
        r.f_.emplace_back(n, e - de);
        r.deg_ += e - de;
      }
    }
    if (j != d.f_.size()) return std::nullopt;
    return r;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.f_ == b.f_; }

  std::string str() const {
    std::string s;
    for (auto& [n, e] : f_) {
      if (!s.empty()) s += "*";
      s += n;
      if (e > 1) s += "^" + std::to_string(e);
    }
    return s.empty() ? "1" : s;
  }

 private:
  std::vector<Factor> f_;  // sorted by name, exponents > 0
  unsigned deg_ = 0;
};

// graded lexicographic, variables ordered by name
struct GrLex {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    auto& fa = a.factors();
    auto& fb = b.factors();
    std::size_t i = 0, j = 0;
    while (i < fa.size() || j < fb.size()) {
      unsigned ea = 0, eb = 0;
      if (j == fb.size() || (i < fa.size() && fa[i].first < fb[j].first)) {
        ea = fa[i++].second;
      } else if (i == fa.size() || fb[j].first < fa[i].first) {
        eb = fb[j++].second;
      } else {
        ea = fa[i++].second;
        eb = fb[j++].second;
      }
      if (ea != eb) return ea < eb;
    }
    return false;
  }
};

class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GrLex>;

  Polynomial() = default;
  Polynomial(const Rational& c) {
    if (c != 0) t_.emplace(Monomial{}, c);
  }
  Polynomial(long c) : Polynomial(Rational(c)) {}

  static Polynomial var(const std::string& name) {
    Polynomial p;
    p.t_.emplace(Monomial::var(name), Rational(1));
    return p;
  }
  static Polynomial term(const Monomial& m, const Rational& c) {
    Polynomial p;
    if (c != 0) p.t_.emplace(m, c);
    return p;
  }

  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one()); }
  Rational constant_term() const {
    auto it = t_.find(Monomial{});
    return it == t_.end() ? Rational(0) : it->second;
  }
  Rational coefficient(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? Rational(0) : it->second;
  }
  const TermMap& terms() const { return t_; }
  std::size_t size() const { return t_.size(); }

  const Monomial& leading_monomial() const { return std::prev(t_.end())->first; }
  const Rational& leading_coefficient() const { return std::prev(t_.end())->second; }
  unsigned total_degree() const { return t_.empty() ? 0 : leading_monomial().degree(); }

  std::set<std::string> variables() const {
    std::set<std::string> v;
    for (auto& [m, c] : t_)
      for (auto& f : m.factors()) v.insert(f.first);
    return v;
  }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& [m, c] : r.t_) c = -c;
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (auto& [m, c] : o.t_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (auto& [m, c] : o.t_) add_term(m, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (auto& [ma, ca] : a.t_)
      for (auto& [mb, cb] : b.t_) r.add_term(ma * mb, ca * cb);
    return r;
  }

  Polynomial scaled(const Rational& s) const {
    if (s == 0) return {};
    Polynomial r = *this;
    for (auto& [m, c] : r.t_) c *= s;
    return r;
  }

  Polynomial pow(unsigned e) const {
    Polynomial r(Rational(1));
    for (unsigned i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  // exact quotient when d divides *this, by leading-term division
  std::optional<Polynomial> exact_divide(const Polynomial& d) const {
    if (d.is_zero()) throw Error(ErrorCode::DivisionByZeroScalar, "polynomial division by zero");
    Polynomial r = *this, q;
    const Monomial& ld = d.leading_monomial();
    const Rational& lc = d.leading_coefficient();
    while (!r.is_zero()) {
      auto m = r.leading_monomial().divide(ld);
      if (!m) return std::nullopt;
      Polynomial t = term(*m, r.leading_coefficient() / lc);
      q += t;
      r -= t * d;
    }
    return q;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.t_ == b.t_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  std::string str() const {
    if (t_.empty()) return "0";
    std::string s;
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
      const Rational& c = it->second;
      bool neg = c < 0;
      Rational a = neg ? Rational(-c) : c;
      if (s.empty()) s += neg ? "-" : "";
      else s += neg ? " - " : " + ";
      if (it->first.is_one()) s += to_string(a);
      else if (a == 1) s += it->first.str();
      else s += to_string(a) + "*" + it->first.str();
    }
    return s;
  }

 private:
  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = t_.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) t_.erase(it);
    }
  }

  TermMap t_;
};

namespace detail {

// dense coefficients of a univariate polynomial (or constant) in `v`
inline std::vector<Rational> dense(const Polynomial& p, const std::string& v) {
  std::vector<Rational> c(p.total_degree() + 1);
  for (auto& [m, a] : p.terms()) c[m.exponent(v)] += a;
  while (c.size() > 1 && c.back() == 0) c.pop_back();
  return c;
}

inline Polynomial from_dense(const std::vector<Rational>& c, const std::string& v) {
  Polynomial p;
  for (std::size_t i = 0; i < c.size(); ++i)
    p += Polynomial::term(Monomial::var(v, static_cast<unsigned>(i)), c[i]);
  return p;
}

inline bool dense_zero(const std::vector<Rational>& c) {
  return std::all_of(c.begin(), c.end(), [](const Rational& x) { return x == 0; });
}

inline std::vector<Rational> dense_rem(std::vector<Rational> a, const std::vector<Rational>& b) {
  while (a.size() >= b.size() && !dense_zero(a)) {
    Rational f = a.back() / b.back();
    std::size_t off = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[off + i] -= f * b[i];
    a.pop_back();
    while (a.size() > 1 && a.back() == 0) a.pop_back();
  }
  return a;
}

inline Polynomial univariate_gcd(const Polynomial& p, const Polynomial& q, const std::string& v) {
  auto a = dense(p, v), b = dense(q, v);
  while (!dense_zero(b)) {
    auto r = dense_rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  Rational lc = a.back();
  for (auto& x : a) x /= lc;
  return from_dense(a, v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fractions of polynomials

class SymbolicScalar {
 public:
  SymbolicScalar() : num_(), den_(Rational(1)) {}
  SymbolicScalar(const Rational& c) : num_(c), den_(Rational(1)) {}
  SymbolicScalar(long c) : SymbolicScalar(Rational(c)) {}
  SymbolicScalar(const Polynomial& p) : num_(p), den_(Rational(1)) {}
  SymbolicScalar(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw Error(ErrorCode::DivisionByZeroScalar, "zero denominator polynomial");
    normalize();
  }

  static SymbolicScalar var(const std::string& name) { return SymbolicScalar(Polynomial::var(name)); }
  static SymbolicScalar parse(std::string_view text);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  std::optional<Rational> constant_value() const {
    if (num_.is_constant() && den_.is_constant()) return num_.constant_term() / den_.constant_term();
    return std::nullopt;
  }

  std::set<std::string> variables() const {
    auto v = num_.variables();
    auto w = den_.variables();
    v.insert(w.begin(), w.end());
    return v;
  }

  SymbolicScalar operator-() const {
    SymbolicScalar r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend SymbolicScalar operator+(const SymbolicScalar& a, const SymbolicScalar& b) {
    if (a.den_ == b.den_) return SymbolicScalar(a.num_ + b.num_, a.den_);
    return SymbolicScalar(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend SymbolicScalar operator-(const SymbolicScalar& a, const SymbolicScalar& b) { return a + (-b); }
  friend SymbolicScalar operator*(const SymbolicScalar& a, const SymbolicScalar& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return SymbolicScalar(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend SymbolicScalar operator/(const SymbolicScalar& a, const SymbolicScalar& b) {
    if (b.is_zero()) throw Error(ErrorCode::DivisionByZeroScalar, "division by " + b.str());
    return SymbolicScalar(a.num_ * b.den_, a.den_ * b.num_);
  }
  SymbolicScalar& operator+=(const SymbolicScalar& o) { return *this = *this + o; }
  SymbolicScalar& operator-=(const SymbolicScalar& o) { return *this = *this - o; }
  SymbolicScalar& operator*=(const SymbolicScalar& o) { return *this = *this * o; }
  SymbolicScalar& operator/=(const SymbolicScalar& o) { return *this = *this / o; }

  SymbolicScalar pow(long e) const {
    SymbolicScalar base = e < 0 ? SymbolicScalar(1) / *this : *this;
    SymbolicScalar r(1);
    for (long i = 0; i < (e < 0 ? -e : e); ++i) r *= base;
    return r;
  }

  friend bool operator==(const SymbolicScalar& a, const SymbolicScalar& b) {
    if (a.den_ == b.den_) return a.num_ == b.num_;
    return a.num_ * b.den_ == b.num_ * a.den_;
  }
  friend bool operator!=(const SymbolicScalar& a, const SymbolicScalar& b) { return !(a == b); }

  std::string str() const {
    if (den_.is_constant()) return num_.str();
    auto wrap = [](const Polynomial& p) {
      return p.size() > 1 || p.leading_coefficient() != 1 ? "(" + p.str() + ")" : p.str();
    };
    return wrap(num_) + "/" + wrap(den_);
  }

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = Polynomial(Rational(1));
      return;
    }
    if (den_.is_constant()) {
      num_ = num_.scaled(Rational(1) / den_.constant_term());
      den_ = Polynomial(Rational(1));
      return;
    }
    auto vn = num_.variables();
    auto vd = den_.variables();
    if (vd.size() == 1 && (vn.empty() || vn == vd)) {
      Polynomial g = detail::univariate_gcd(num_, den_, *vd.begin());
      if (!g.is_constant()) {
        num_ = *num_.exact_divide(g);
        den_ = *den_.exact_divide(g);
      }
    } else if (auto q = num_.exact_divide(den_)) {
      num_ = std::move(*q);
      den_ = Polynomial(Rational(1));
      return;
    }
    Rational lc = den_.leading_coefficient();
    if (lc != 1) {
      num_ = num_.scaled(Rational(1) / lc);
      den_ = den_.scaled(Rational(1) / lc);
    }
    if (den_.is_constant()) {
      num_ = num_.scaled(Rational(1) / den_.constant_term());
      den_ = Polynomial(Rational(1));
    }
  }

  Polynomial num_;
  Polynomial den_;
};

using Scalar = SymbolicScalar;

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  SymbolicScalar run() {
    SymbolicScalar v = expr();
    skip();
    if (p_ != s_.size()) fail("unexpected '" + std::string(1, s_[p_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw Error(ErrorCode::ParseError, "in expression '" + std::string(s_) + "': " + why);
  }
  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  bool eat(char c) {
    skip();
    if (p_ < s_.size() && s_[p_] == c) {
      ++p_;
      return true;
    }
    return false;
  }
  bool starts_primary() {
    skip();
    if (p_ >= s_.size()) return false;
    char c = s_[p_];
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '(';
  }

  SymbolicScalar expr() {
    SymbolicScalar v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  SymbolicScalar term() {
    SymbolicScalar v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else if (starts_primary()) v *= power();
      else return v;
    }
  }
  SymbolicScalar unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  SymbolicScalar power() {
    SymbolicScalar b = primary();
    if (eat('^')) {
      skip();
      bool neg = eat('-');
      skip();
      std::size_t q = p_;
      while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
      if (q == p_) fail("exponent expected");
      long e = std::stol(std::string(s_.substr(q, p_ - q)));
      return b.pow(neg ? -e : e);
    }
    return b;
  }
  SymbolicScalar primary() {
    skip();
    if (p_ >= s_.size()) fail("unexpected end");
    char c = s_[p_];
    if (c == '(') {
      ++p_;
      SymbolicScalar v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t q = p_;
      while (p_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[p_])) || s_[p_] == '.')) ++p_;
      if (p_ < s_.size() && (s_[p_] == 'e' || s_[p_] == 'E')) {
        std::size_t save = p_++;
        if (p_ < s_.size() && (s_[p_] == '-' || s_[p_] == '+')) ++p_;
        if (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) {
          while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
        } else {
          p_ = save;
        }
      }
      return SymbolicScalar(parse_decimal(s_.substr(q, p_ - q)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t q = p_;
      while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_' || s_[p_] == '\''))
        ++p_;
      return SymbolicScalar::var(std::string(s_.substr(q, p_ - q)));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t p_ = 0;
};

}  // namespace detail

inline SymbolicScalar SymbolicScalar::parse(std::string_view text) { return detail::ExprParser(text).run(); }

// ---------------------------------------------------------------------------
// Intervals, anchors, sign certification

struct Interval {
  Rational lo, hi;

  static Interval point(const Rational& x) { return {x, x}; }
  bool contains_zero() const { return lo <= 0 && hi >= 0; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }

  friend Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
  friend Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
  friend Interval operator*(const Interval& a, const Interval& b) {
    Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
  }
  Interval scaled(const Rational& s) const { return s >= 0 ? Interval{lo * s, hi * s} : Interval{hi * s, lo * s}; }
  Interval pow(unsigned e) const {
    if (e == 0) return point(1);
    Rational a = pow_rat(lo, e), b = pow_rat(hi, e);
    if (e % 2 == 1 || lo >= 0) return {std::min(a, b), std::max(a, b)};
    if (hi <= 0) return {b, a};
    return {Rational(0), std::max(a, b)};
  }
  // requires 0 outside b
  friend Interval operator/(const Interval& a, const Interval& b) {
    return a * Interval{Rational(1) / b.hi, Rational(1) / b.lo};
  }
};

inline Rational eval_dense(const std::vector<Rational>& c, const Rational& x) {
  Rational r = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

inline int sgn(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Numeric anchor for a generator. An anchor with a defining polynomial can be
// bisected; a bare midpoint/radius anchor stays fixed.
struct Anchor {
  Rational mid;
  Rational radius;
  std::vector<Rational> poly;  // coefficients low to high

  static Anchor fixed(const Rational& mid, const Rational& radius) {
    if (radius <= 0) throw Error(ErrorCode::InvalidParameter, "anchor radius must be positive");
    return {mid, radius, {}};
  }

  static Anchor algebraic(std::vector<Rational> poly, const Rational& lo, const Rational& hi) {
    if (!(lo < hi)) throw Error(ErrorCode::InvalidParameter, "root bracket must satisfy lo < hi");
    while (poly.size() > 1 && poly.back() == 0) poly.pop_back();
    if (poly.size() < 2) throw Error(ErrorCode::InvalidParameter, "defining polynomial must be nonconstant");
    if (sgn(eval_dense(poly, lo)) * sgn(eval_dense(poly, hi)) > 0)
      throw Error(ErrorCode::InvalidParameter, "defining polynomial has no sign change on the bracket");
    return {(lo + hi) / 2, (hi - lo) / 2, std::move(poly)};
  }

  bool refinable() const { return !poly.empty(); }
  Interval interval() const { return {mid - radius, mid + radius}; }

  Anchor refined() const {
    if (!refinable()) return *this;
    Rational lo = mid - radius, half = radius / 2;
    int sl = sgn(eval_dense(poly, lo)), sm = sgn(eval_dense(poly, mid));
    Anchor a = *this;
    a.radius = half;
    if (sm == 0) return a;
    a.mid = (sl == 0 || sl * sm < 0) ? lo + half : mid + half;
    return a;
  }
};

enum class Sign { Negative, Zero, Positive, Undecided };

inline const char* sign_name(Sign s) {
  switch (s) {
    case Sign::Negative: return "Negative";
    case Sign::Zero: return "Zero";
    case Sign::Positive: return "Positive";
    default: return "Undecided";
  }
}

class GeneratorEnv {
 public:
  GeneratorEnv() = default;

  GeneratorEnv& declare(const std::string& name, const Anchor& a) {
    if (anchors_.count(name)) throw Error(ErrorCode::InvalidParameter, "duplicate generator '" + name + "'");
    names_.push_back(name);
    anchors_.emplace(name, a);
    return *this;
  }
  GeneratorEnv& set_independence(bool v) {
    independent_ = v;
    return *this;
  }

  const std::vector<std::string>& generators() const { return names_; }
  bool has(const std::string& name) const { return anchors_.count(name) > 0; }
  bool independence_assertion() const { return independent_; }

  const Anchor& anchor(const std::string& name) const {
    auto it = anchors_.find(name);
    if (it == anchors_.end()) throw Error(ErrorCode::MissingAnchor, "generator '" + name + "' has no anchor");
    return it->second;
  }

  GeneratorEnv refined() const {
    GeneratorEnv e = *this;
    for (auto& [n, a] : e.anchors_) a = a.refined();
    return e;
  }

  bool can_refine(const std::set<std::string>& vars) const {
    return std::any_of(vars.begin(), vars.end(), [&](const std::string& v) { return anchor(v).refinable(); });
  }

  Interval interval_of(const Polynomial& p) const {
    Interval acc = Interval::point(0);
    std::map<std::string, Interval> base;
    for (auto& [m, c] : p.terms()) {
      Interval t = Interval::point(c);
      for (auto& [v, e] : m.factors()) {
        auto it = base.find(v);
        if (it == base.end()) it = base.emplace(v, anchor(v).interval()).first;
        t = t * it->second.pow(e);
      }
      acc = acc + t;
    }
    return acc;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, Anchor> anchors_;
  bool independent_ = true;
};

inline int default_max_refinements() {
  if (const char* s = std::getenv("PROTORUS_MAX_REFINE")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && v >= 0 && v < 100000) return static_cast<int>(v);
  }
  return 64;
}

inline void require_anchors(const SymbolicScalar& a, const GeneratorEnv& env) {
  for (auto& v : a.variables()) env.anchor(v);
}

// one evaluation at the env's current anchor widths; nullopt if the denominator straddles 0
inline std::optional<Interval> try_interval_eval(const SymbolicScalar& a, const GeneratorEnv& env) {
  Interval n = env.interval_of(a.num());
  Interval d = env.interval_of(a.den());
  if (d.contains_zero()) return std::nullopt;
  return n / d;
}

inline Interval interval_eval(const SymbolicScalar& a, const GeneratorEnv& env, int max_refinements = -1) {
  require_anchors(a, env);
  if (max_refinements < 0) max_refinements = default_max_refinements();
  GeneratorEnv e = env;
  auto vars = a.variables();
  for (int k = 0;; ++k) {
    if (auto r = try_interval_eval(a, e)) return *r;
    if (k >= max_refinements || !e.can_refine(vars)) break;
    e = e.refined();
  }
  throw Error(ErrorCode::UndecidedSign, "denominator of " + a.str() + " not separated from 0");
}

inline Sign scalar_sign(const SymbolicScalar& a, const GeneratorEnv& env, int max_refinements = -1) {
  if (a.is_zero()) return Sign::Zero;
  if (auto c = a.constant_value()) return *c > 0 ? Sign::Positive : Sign::Negative;
  require_anchors(a, env);
  if (max_refinements < 0) max_refinements = default_max_refinements();
  GeneratorEnv e = env;
  auto vars = a.variables();
  for (int k = 0;; ++k) {
    if (auto r = try_interval_eval(a, e)) {
      if (r->lo > 0) return Sign::Positive;
      if (r->hi < 0) return Sign::Negative;
    }
    if (k >= max_refinements || !e.can_refine(vars)) break;
    e = e.refined();
  }
  return Sign::Undecided;
}

inline Sign require_sign(const SymbolicScalar& a, const GeneratorEnv& env, int max_refinements = -1) {
  Sign s = scalar_sign(a, env, max_refinements);
  if (s == Sign::Undecided) throw Error(ErrorCode::UndecidedSign, "sign of " + a.str() + " undecided");
  return s;
}

// primes dividing a nonzero integer
inline std::vector<Integer> prime_divisors(Integer n) {
  std::vector<Integer> ps;
  if (n < 0) n = -n;
  for (Integer p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

// strips every prime in `ps` from n
inline Integer strip_primes(Integer n, const std::vector<Integer>& ps) {
  if (n < 0) n = -n;
  for (auto& p : ps)
    while (n != 0 && n % p == 0) n /= p;
  return n;
}

}  // namespace protorus
