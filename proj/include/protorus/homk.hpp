#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exact.hpp"
#include "intlat.hpp"
#include "torus.hpp"

namespace protorus {

struct CongruenceResult {
  bool holds = false;
  IntMatrix residue;                 // Theta - M^t Psi M when integral
  unsigned row = 0, col = 0;         // first failing entry
  SymbolicScalar difference;         // entry of Theta - M^t Psi M there
  std::string message;
};

// Theta (m x m, source) against Psi (n x n, target) through M (n x m).
inline CongruenceResult check_congruence(const SkewForm& theta, const SkewForm& psi, const IntMatrix& M) {
  unsigned m = theta.size(), n = psi.size();
  if (M.rows() != n || M.cols() != m)
    throw Error(ErrorCode::DimensionMismatch, "M must be " + std::to_string(n) + "x" + std::to_string(m));
  CongruenceResult r;
  r.residue = IntMatrix(m, m);
  for (unsigned a = 0; a < m; ++a)
    for (unsigned b = a + 1; b < m; ++b) {
      SymbolicScalar pulled;
      for (auto& [jk, v] : psi.upper()) {
        auto [j, k] = jk;
        Integer c = M(j, a) * M(k, b) - M(k, a) * M(j, b);
        if (c != 0) pulled += SymbolicScalar(Rational(c)) * v;
      }
      SymbolicScalar d = theta.at(a, b) - pulled;
      auto cv = d.constant_value();
      if (!cv || den_of(*cv) != 1) {
        r.holds = false;
        r.row = a;
        r.col = b;
        r.difference = d;
        r.message = "entry (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "): " + theta.at(a, b).str() +
                    " differs from " + pulled.str() + " by a non-integer";
        return r;
      }
      r.residue(a, b) = num_of(*cv);
      r.residue(b, a) = -num_of(*cv);
    }
  r.holds = true;
  return r;
}

struct MonomialMap {
  TorusDescriptor source, target;
  IntMatrix M;
  std::vector<Rational> phases;  // angles as multiples of 2 pi; bookkeeping only

  static MonomialMap make(TorusDescriptor source, TorusDescriptor target, IntMatrix M, std::vector<Rational> phases = {}) {
    auto c = check_congruence(source.form, target.form, M);
    if (!c.holds) throw Error(ErrorCode::InvalidParameter, "congruence fails at " + c.message);
    if (phases.empty()) phases.assign(M.cols(), Rational(0));
    return {std::move(source), std::move(target), std::move(M), std::move(phases)};
  }
};

inline std::pair<IntMatrix, IntMatrix> induced_k_maps(const IntMatrix& M) {
  return {exterior_parity(M, Parity::Even), exterior_parity(M, Parity::Odd)};
}

inline std::pair<IntMatrix, IntMatrix> induced_k_maps(const MonomialMap& phi) { return induced_k_maps(phi.M); }

// ---------------------------------------------------------------------------
// Existence criteria

struct UnitalExistence {
  enum Kind { Exists, FailUnit, FailTrace } kind = Exists;
  IntVector unit_image;
  Subset index;
  SymbolicScalar difference;
};

inline const char* unital_name(UnitalExistence::Kind k) {
  switch (k) {
    case UnitalExistence::Exists: return "Exists";
    case UnitalExistence::FailUnit: return "FailUnit";
    default: return "FailTrace";
  }
}

namespace detail {

inline void check_k0_shape(const IntMatrix& k0, const SkewForm& theta, const SkewForm& psi) {
  std::size_t rs = parity_rank(psi.size(), Parity::Even), cs = parity_rank(theta.size(), Parity::Even);
  if (k0.rows() != rs || k0.cols() != cs)
    throw Error(ErrorCode::DimensionMismatch, "K0 matrix must be " + std::to_string(rs) + "x" + std::to_string(cs));
}

// first basis index I with sum_J k0[J,I] pf(Psi_J) != scale * pf(Theta_I)
inline std::optional<std::pair<std::size_t, SymbolicScalar>> trace_mismatch(const IntMatrix& k0, const SkewForm& theta,
                                                                            const SkewForm& psi, const SymbolicScalar& scale) {
  auto src = trace_pairing_vector({theta, 1});
  auto tgt = trace_pairing_vector({psi, 1});
  for (std::size_t I = 0; I < k0.cols(); ++I) {
    SymbolicScalar lhs;
    for (std::size_t J = 0; J < k0.rows(); ++J)
      if (k0(J, I) != 0 && !tgt[J].is_zero()) lhs += SymbolicScalar(Rational(k0(J, I))) * tgt[J];
    SymbolicScalar diff = lhs - scale * src[I];
    if (!diff.is_zero()) return std::make_pair(I, diff);
  }
  return std::nullopt;
}

}  // namespace detail

inline UnitalExistence check_unital_existence(const IntMatrix& k0, const SkewForm& theta, const SkewForm& psi) {
  detail::check_k0_shape(k0, theta, psi);
  UnitalExistence r;
  IntVector e(k0.cols(), 0);
  e[0] = 1;
  r.unit_image = k0.apply(e);
  IntVector want(k0.rows(), 0);
  want[0] = 1;
  if (r.unit_image != want) {
    r.kind = UnitalExistence::FailUnit;
    return r;
  }
  if (auto bad = detail::trace_mismatch(k0, theta, psi, SymbolicScalar(1))) {
    r.kind = UnitalExistence::FailTrace;
    r.index = subset_basis(theta.size(), Parity::Even).subsets[bad->first];
    r.difference = bad->second;
  }
  return r;
}

struct NonunitalExistence {
  enum Kind { ZeroMap, Exists, FailOrder, FailTrace } kind = ZeroMap;
  IntVector eta;
  SymbolicScalar t;            // rho_Psi(eta)
  Sign lower = Sign::Zero;     // sign of rho(eta)
  Sign upper = Sign::Zero;     // sign of k - rho(eta)
  bool boundary = false;       // rho(eta) = k with eta != k[1]
  Subset index;
  SymbolicScalar difference;
};

inline const char* nonunital_name(NonunitalExistence::Kind k) {
  switch (k) {
    case NonunitalExistence::ZeroMap: return "ZeroMap";
    case NonunitalExistence::Exists: return "Exists";
    case NonunitalExistence::FailOrder: return "FailOrder";
    default: return "FailTrace";
  }
}

inline NonunitalExistence check_nonunital_existence(const IntMatrix& k0, const IntMatrix& k1, const SkewForm& theta,
                                                    const SkewForm& psi, const Integer& k, const GeneratorEnv& env,
                                                    int max_refinements = -1) {
  detail::check_k0_shape(k0, theta, psi);
  NonunitalExistence r;
  if (k0.is_zero() && k1.is_zero()) return r;
  IntVector e(k0.cols(), 0);
  e[0] = 1;
  r.eta = k0.apply(e);
  r.t = trace_of_class({psi, 1}, r.eta);
  r.lower = require_sign(r.t, env, max_refinements);
  r.upper = require_sign(SymbolicScalar(Rational(k)) - r.t, env, max_refinements);
  if (r.lower != Sign::Positive || r.upper == Sign::Negative) {
    r.kind = NonunitalExistence::FailOrder;
    return r;
  }
  if (r.upper == Sign::Zero) {
    IntVector ku(k0.rows(), 0);
    ku[0] = k;
    if (r.eta != ku) {
      // equal trace, distinct classes: k[1] - eta is not positive
      r.boundary = true;
      r.kind = NonunitalExistence::FailOrder;
      return r;
    }
  }
  if (auto bad = detail::trace_mismatch(k0, theta, psi, r.t)) {
    r.kind = NonunitalExistence::FailTrace;
    r.index = subset_basis(theta.size(), Parity::Even).subsets[bad->first];
    r.difference = bad->second;
    return r;
  }
  r.kind = NonunitalExistence::Exists;
  return r;
}

// ---------------------------------------------------------------------------
// Connecting maps

enum class MapCase { UnitalToric, PureCorner, DimChangingCorner, SameDimProper, AbstractK };

inline const char* map_case_name(MapCase c) {
  switch (c) {
    case MapCase::UnitalToric: return "UnitalToric";
    case MapCase::PureCorner: return "PureCorner";
    case MapCase::DimChangingCorner: return "DimChangingCorner";
    case MapCase::SameDimProper: return "SameDimProper";
    default: return "AbstractK";
  }
}

inline MapCase parse_map_case(const std::string& s) {
  for (MapCase c : {MapCase::UnitalToric, MapCase::PureCorner, MapCase::DimChangingCorner, MapCase::SameDimProper, MapCase::AbstractK})
    if (s == map_case_name(c)) return c;
  throw Error(ErrorCode::InvalidParameter, "unknown map case '" + s + "'");
}

struct ConnectingMap {
  MapCase kind = MapCase::UnitalToric;
  IntMatrix k0, k1;
  SymbolicScalar t = SymbolicScalar(1);
  TorusDescriptor source, target;
  Integer blocks = 1;
  std::optional<IntMatrix> M;
};

struct ConnectingMapSpec {
  MapCase kind = MapCase::UnitalToric;
  TorusDescriptor source, target;
  std::optional<IntMatrix> M;
  Integer blocks = 1;                            // amplified unital toric maps
  SymbolicScalar corner_trace = SymbolicScalar(1);
  std::optional<IntMatrix> beta0, beta1;         // corner identifications
  std::optional<IntMatrix> kappa0, kappa1;       // AbstractK data
  SymbolicScalar t = SymbolicScalar(1);          // AbstractK trace scaling
};

inline ConnectingMap build_connecting_map(const ConnectingMapSpec& s, const GeneratorEnv& env, int max_refinements = -1) {
  ConnectingMap c;
  c.kind = s.kind;
  c.source = s.source;
  c.target = s.target;
  c.blocks = s.blocks;
  c.M = s.M;
  std::size_t r0 = c.target.k0_rank(), c0 = c.source.k0_rank();
  std::size_t r1 = c.target.k1_rank(), c1 = c.source.k1_rank();

  if (s.kind == MapCase::AbstractK) {
    if (!s.kappa0 || !s.kappa1) throw Error(ErrorCode::InvalidParameter, "AbstractK needs kappa0 and kappa1");
    c.k0 = *s.kappa0;
    c.k1 = *s.kappa1;
    c.t = s.t;
  } else {
    IntMatrix M = s.M ? *s.M : IntMatrix::identity(c.source.size());
    if (M.rows() != c.target.size() && s.kind != MapCase::PureCorner && s.kind != MapCase::SameDimProper)
      throw Error(ErrorCode::DimensionMismatch, "M rows must match the target rank");
    if (s.kind == MapCase::SameDimProper) {
      if (!M.is_square()) throw Error(ErrorCode::DimensionMismatch, "SameDimProper needs square M");
      Integer d = bareiss_det(M);
      if (abs(d) <= 1) throw Error(ErrorCode::DeterminantNotProper, "|det M| = " + Integer(abs(d)).str());
    }
    if (s.kind == MapCase::UnitalToric) {
      auto cg = check_congruence(c.source.form, c.target.form, M);
      if (!cg.holds) throw Error(ErrorCode::InvalidParameter, "unital toric map: " + cg.message);
    }
    c.M = M;
    auto [f0, f1] = induced_k_maps(M);
    if (s.blocks != 1) {
      f0 = f0.scaled(s.blocks);
      f1 = f1.scaled(s.blocks);
    }
    c.k0 = s.beta0 ? *s.beta0 * f0 : f0;
    c.k1 = s.beta1 ? *s.beta1 * f1 : f1;
    c.t = s.kind == MapCase::UnitalToric ? SymbolicScalar(1) : s.corner_trace;
  }
  if (c.k0.rows() != r0 || c.k0.cols() != c0 || c.k1.rows() != r1 || c.k1.cols() != c1)
    throw Error(ErrorCode::DimensionMismatch, "K-map shapes do not match the stage descriptors");
  if (require_sign(c.t, env, max_refinements) != Sign::Positive)
    throw Error(ErrorCode::NonPositiveTrace, "t = " + c.t.str() + " is not positive");
  if (require_sign(SymbolicScalar(1) - c.t, env, max_refinements) == Sign::Negative)
    throw Error(ErrorCode::NonPositiveTrace, "t = " + c.t.str() + " exceeds 1");
  return c;
}

struct RigidityResult {
  bool compatible = true;
  std::size_t source_rank = 0, target_rank = 0;
};

inline RigidityResult dimension_rigidity_check(unsigned m, unsigned n) {
  RigidityResult r;
  r.source_rank = parity_rank(m, Parity::Even);
  r.target_rank = parity_rank(n, Parity::Even);
  r.compatible = r.source_rank == r.target_rank;
  return r;
}

inline RigidityResult dimension_rigidity_check(const SkewForm& theta, const SkewForm& psi) {
  return dimension_rigidity_check(theta.size(), psi.size());
}

}  // namespace protorus
