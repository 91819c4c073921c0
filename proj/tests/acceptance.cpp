#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "protorus/cli.hpp"

using namespace protorus;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

SymbolicScalar S(const char* s) { return SymbolicScalar::parse(s); }

GeneratorEnv golden(const char* name) {
  GeneratorEnv env;
  env.declare(name, Anchor::fixed(parse_rational("0.618"), parse_rational("1e-6")));
  return env;
}

cli::json json_pair(const char* a, const char* b) {
  return cli::json::array({cli::parse_pair_member(a), cli::parse_pair_member(b)});
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Check {
  bool ok = true;
  std::string why;
  void expect(bool c, const std::string& what) {
    if (!c && ok) why = what;
    ok = ok && c;
  }
};

Check exterior_functoriality() {
  Check c;
  std::mt19937 rng(101);
  std::uniform_int_distribution<int> sz(1, 4);
  auto t0 = Clock::now();
  for (int it = 0; it < 200; ++it) {
    std::size_t a = sz(rng), b = sz(rng), d = sz(rng);
    IntMatrix A = oracle::random_matrix(rng, a, b, 3), B = oracle::random_matrix(rng, b, d, 3);
    for (std::size_t k = 0; k <= std::min({a, b, d}); ++k)
      c.expect(exterior_power(A * B, k) == exterior_power(A, k) * exterior_power(B, k), "functoriality");
    c.expect(exterior_power(A, 1) == A, "first power");
  }
  c.expect(seconds_since(t0) < 5.0, "time");
  return c;
}

Check pfaffian_squares() {
  Check c;
  std::mt19937 rng(103);
  std::uniform_int_distribution<long> v(-3, 3);
  const char* names[] = {"a", "b", "c"};
  auto t0 = Clock::now();
  for (unsigned m = 2; m <= 6; m += 2)
    for (unsigned g = 1; g <= 3; ++g) {
      SkewForm f(m);
      for (unsigned j = 0; j < m; ++j)
        for (unsigned k = j + 1; k < m; ++k) {
          SymbolicScalar e(Rational(v(rng), 3));
          for (unsigned i = 0; i < g; ++i) e += SymbolicScalar(Rational(v(rng))) * SymbolicScalar::var(names[i]);
          f.set(j, k, e);
        }
      PfaffianTable pf(f);
      for (auto& I : subset_basis(m, Parity::Even).subsets) c.expect(pf(I) * pf(I) == determinant(f, I), "pf^2 = det");
    }
  c.expect(seconds_since(t0) < 10.0, "time");
  return c;
}

Check trace_table() {
  Check c;
  TorusDescriptor t{SkewForm::block_diagonal({S("alpha"), S("beta")}), 1};
  std::vector<SymbolicScalar> want{S("1"), S("alpha"), S("0"), S("0"), S("0"), S("0"), S("beta"), S("alpha*beta")};
  c.expect(trace_pairing_vector(t) == want, "trace vector");
  return c;
}

Check solenoid_invariants() {
  Check c;
  GeneratorEnv env = golden("theta");
  for (long N : {2L, 3L, 4L}) {
    auto sys = build_family(FamilyTag::solenoid(S("theta"), N), env);
    for (long n = 1; n <= 6; ++n) {
      auto m = sys.map(n);
      c.expect(m.k0 == IntMatrix::diagonal({Integer(1), Integer(N * N)}), "k0");
      c.expect(m.k1 == IntMatrix::identity(2).scaled(N), "k1");
      c.expect(sys.scaling_constant(n) == SymbolicScalar(1), "c_n");
      c.expect(unit_class(sys.stage(n)) == IntVector{1, 0}, "unit");
    }
    LimitElement g{1, Parity::Odd, {1, 0}};
    for (auto& p : prime_divisors(Integer(N))) {
      auto r = divisibility_probe(g, p, 8, sys);
      c.expect(r.divisible && r.stages.size() == 8, "divisible to depth 8");
    }
    for (Integer p : {Integer(2), Integer(3), Integer(5)}) {
      if (N % p == 0) continue;
      auto r = divisibility_probe(g, p, 8, sys);
      c.expect(!r.divisible && r.obstructed_at == 1, "obstruction at depth 1");
    }
  }
  return c;
}

Check ax7_identities() {
  Check c;
  GeneratorEnv env = golden("theta0");
  std::mt19937 rng(107);
  std::uniform_int_distribution<long> v(-50, 50);
  auto t0 = Clock::now();
  for (long N : {2L, 3L}) {
    auto sys = build_family(FamilyTag::ax7(N, S("theta0")), env);
    SymbolicScalar th0 = S("theta0");
    for (long n = 0; n <= 10; ++n) {
      SymbolicScalar sn(oracle::geometric_tail(N, n));
      SymbolicScalar cn = sys.scaling_constant(n);
      c.expect(cn == SymbolicScalar(1) + th0 * sn, "c_n");
      SymbolicScalar thn = pfaffian(sys.stage(n).form);
      c.expect(cn * thn == th0 / SymbolicScalar(Rational(boost::multiprecision::pow(Integer(N), unsigned(n)))), "c_n theta_n");
      c.expect(limit_trace(unit_element(sys, n), sys) == SymbolicScalar(1) + th0 * sn, "unit trace");
      if (n < 10)
        for (int it = 0; it < 100; ++it) {
          long a = v(rng), b = v(rng);
          auto pushed = push_to_stage(LimitElement{n, Parity::Even, {a, b}}, n + 1, sys);
          auto lhs = oracle::ax7_F(N, n + 1, pushed.coords[0], pushed.coords[1]);
          auto rhs = oracle::ax7_F(N, n, Integer(a), Integer(b));
          c.expect(lhs == rhs, "F_{n+1} D = F_n");
        }
    }
  }
  c.expect(seconds_since(t0) < 10.0, "time");
  return c;
}

Check classification() {
  Check c;
  GeneratorEnv env = golden("theta");
  env.declare("theta'", Anchor::fixed(parse_rational("0.414"), parse_rational("1e-6")));
  auto r1 = classify_solenoid_pair(S("theta"), 2, S("theta"), 4, env);
  c.expect(r1.kind == Classification::Isomorphic && r1.u == Rational(1), "(theta,2)~(theta,4)");
  auto r2 = classify_solenoid_pair(S("theta"), 2, S("theta'"), 6, env);
  c.expect(r2.kind == Classification::NotIsomorphic && r2.obstruction.rfind("PrimeSets", 0) == 0, "prime sets");
  auto r3 = classify_solenoid_pair(S("theta"), 2, S("4*theta"), 2, env);
  c.expect(r3.kind == Classification::Isomorphic && r3.u == Rational(4), "(theta,2)~(4theta,2)");
  cli::RunConfig rc;
  rc.command = "classify";
  rc.overrides = {{"generators", {{"theta", {{"anchor", "0.618"}, {"radius", "1e-6"}}}}},
                  {"pair", json_pair("solenoid(theta,2)", "solenoid(theta,4)")}};
  c.expect(cli::run(rc).exit_code == 0, "exit 0 on decided pair");
  rc.overrides["pair"] = json_pair("solenoid(theta,2)", "solenoid(theta, 6)");
  c.expect(cli::run(rc).exit_code == 0, "exit 0 on obstruction");
  rc.overrides["generators"]["theta'"] = {{"anchor", "0.618"}, {"radius", "1e-6"}};
  rc.overrides["independent"] = false;
  rc.overrides["pair"] = json_pair("solenoid(theta,2)", "solenoid(theta',4)");
  c.expect(cli::run(rc).exit_code == 2, "exit 2 when unknown");
  rc.overrides["pair"] = json_pair("solenoid(theta,2)", "solenoid(theta,1)");
  c.expect(cli::run(rc).exit_code == 1, "exit 1 on invalid N");
  return c;
}

Check scales() {
  Check c;
  GeneratorEnv env = golden("theta");
  auto sc = build_family(FamilyTag::stable_corner(SkewForm::J(S("theta"))), env);
  c.expect(scale_classification(sc, env).kind == ScaleReport::Infinite, "stable corner infinite");
  std::mt19937 rng(109);
  std::uniform_int_distribution<long> a(1, 60), b(-30, 30);
  int tested = 0;
  while (tested < 20) {
    LimitElement x{1, Parity::Even, {a(rng), b(rng)}};
    if (scalar_sign(limit_trace(x, sc), env) != Sign::Positive) continue;
    ++tested;
    c.expect(projection_scale_member(x, sc, env).kind == ScaleMembership::Member, "stable corner member");
  }
  GeneratorEnv e7 = golden("theta0");
  auto ax = build_family(FamilyTag::ax7(2, S("theta0")), e7);
  auto s = scale_classification(ax, e7);
  c.expect(s.kind == ScaleReport::Finite && s.value == S("1 + theta0"), "ax7 finite scale");
  LimitElement two{0, Parity::Even, {2, 0}};
  c.expect(limit_trace(two, ax) == SymbolicScalar(2), "trace 2");
  c.expect(projection_scale_member(two, ax, e7).kind == ScaleMembership::NotMemberCertified, "not a member");
  return c;
}

Check flat_spectrum() {
  Check c;
  auto sp = spectrum_enumerate(make_flat_identity(2), 2 * kPi);
  std::vector<double> e;
  for (auto& s : sp) e.push_back(s.eigenvalue);
  std::sort(e.begin(), e.end());
  std::vector<double> want{-2 * kPi, -2 * kPi, -2 * kPi, -2 * kPi, 0, 0, 2 * kPi, 2 * kPi, 2 * kPi, 2 * kPi};
  c.expect(e.size() == 10, "count 10");
  for (std::size_t i = 0; i < std::min(e.size(), want.size()); ++i) c.expect(std::abs(e[i] - want[i]) <= 1e-9, "eigenvalue");
  return c;
}

Check clifford_and_jacobi() {
  Check c;
  for (unsigned d = 1; d <= 8; ++d) {
    auto g = clifford_generators(d);
    std::size_t n = g[0].dim();
    for (unsigned i = 0; i < d; ++i)
      for (unsigned j = 0; j < d; ++j) {
        CMatrix ac = g[i].matrix() * g[j].matrix() + g[j].matrix() * g[i].matrix();
        if (i == j) ac = ac - CMatrix::identity(n).scaled(2.0);
        c.expect(ac.max_abs() <= 1e-12, "anticommutation");
      }
  }
  std::mt19937 rng(113);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int it = 0; it < 50; ++it) {
    CMatrix a(2, 2);
    a(0, 0) = u(rng);
    a(1, 1) = u(rng);
    a(0, 1) = Complex(u(rng), u(rng));
    a(1, 0) = std::conj(a(0, 1));
    auto w2 = oracle::eig2(a(0, 0).real(), a(0, 1), a(1, 1).real());
    auto g2 = hermitian_eigs(HermitianMatrix(a));
    for (int i = 0; i < 2; ++i) c.expect(std::abs(w2[i] - g2[i]) <= 1e-10, "2x2");
    Complex h[3][3];
    CMatrix b(3, 3);
    for (int i = 0; i < 3; ++i) {
      b(i, i) = u(rng);
      for (int j = i + 1; j < 3; ++j) {
        b(i, j) = Complex(u(rng), u(rng));
        b(j, i) = std::conj(b(i, j));
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h[i][j] = b(i, j);
    auto w3 = oracle::eig3(h);
    auto g3 = hermitian_eigs(HermitianMatrix(b));
    for (int i = 0; i < 3; ++i) c.expect(std::abs(w3[i] - g3[i]) <= 1e-10, "3x3");
  }
  return c;
}

Check solenoid_spectral() {
  Check c;
  for (long n = 1; n <= 4; ++n) {
    auto r = compatibility_check(make_flat_stage(2, n), make_flat_stage(2, n + 1), IntMatrix::identity(2).scaled(2),
                                 CMatrix::identity(2), 8 * kPi);
    c.expect(r.exact_on_ball, "ExactOnBall");
  }
  auto d = resolvent_diagnostic(make_flat_limit(2), {1}, 10);
  c.expect(d.kind == ResolventDiagnostic::NonCompactWitness && d.witness.size() == 10, "witness");
  for (std::size_t k = 1; k <= d.witness.size(); ++k) {
    c.expect(d.witness[k - 1].x == std::vector<Rational>{Rational(1, 1L << k), Rational(0)}, "witness label");
    c.expect(std::abs(d.eigenvalues[k - 1] - 2 * kPi / double(1L << k)) <= 1e-12, "witness eigenvalue");
  }
  auto l = resolvent_diagnostic(make_length_N(2), {1});
  c.expect(!l.counts.empty() && l.counts[0] == 5 && oracle::length_N_ball_count(2, 1) == 5, "l2 count 5");
  return c;
}

Check increments() {
  Check c;
  auto ib = increment_bound(make_flat_identity(2), Label::lattice({1, 1}));
  c.expect(std::abs(ib.value - 2 * kPi * std::sqrt(2.0)) <= 1e-12, "2 pi sqrt 2");
  auto m = monomial_commutator_norm(make_length_N_stage(2, 1), Label::lattice({1, 0}));
  c.expect(m.upper == 1.0 && m.lower >= 1.0 - 1e-9, "commutator");
  return c;
}

Check cutdown() {
  Check c;
  auto F = make_weighted_omega(linear_omega_weights());
  auto r = cutdown_count(F, 2, 2);
  c.expect(r.kind == CutdownResult::Finite && r.count == 8 && oracle::omega_cutdown_count(2, 2) == 8, "count 8");
  auto u = cutdown_count(F, std::nullopt, 2);
  c.expect(u.kind == CutdownResult::Unbounded && !u.witness.empty(), "unbounded");
  return c;
}

Check banded() {
  Check c;
  std::mt19937 rng(127);
  std::uniform_int_distribution<int> dim(1, 16), band(0, 3), lev(0, 8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int it = 0; it < 100; ++it) {
    std::size_t n = dim(rng);
    int b = band(rng);
    std::vector<long> levels(n);
    for (auto& l : levels) l = lev(rng);
    CMatrix T(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (std::labs(levels[i] - levels[j]) <= b) T(i, j) = Complex(u(rng), u(rng));
    c.expect(banded_commutator_check(T, levels).pass, "banded bound");
  }
  return c;
}

Check fluctuation() {
  Check c;
  auto f = fluctuation_check(2, 3, {Rational(1), Rational(0)}, 1.0, 16, 8);
  c.expect(f.dim == 128 && f.norm_B <= 1 + 1e-9, "fluctuation norm");
  auto k = conformal_check(0.3, 1, 1, 2.0, 0.5, 16, 8);
  c.expect(k.transport_residual <= 1e-9 && k.commutation_residual <= 1e-9, "conformal residual");
  return c;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Check cli_determinism() {
  Check c;
  std::string fx = PROTORUS_FIXTURES;
  cli::RunConfig rc;
  rc.command = "invariant";
  rc.config_path = fx + "/solenoid.json";
  auto a = cli::run(rc), b = cli::run(rc);
  c.expect(a.exit_code == 0 && !a.output.empty() && a.output == b.output, "in-process determinism");
  auto tmp = std::filesystem::temp_directory_path();
  std::string o1 = (tmp / "protorus_acc_1.json").string(), o2 = (tmp / "protorus_acc_2.json").string();
  std::string bin = "\"" + std::string(PROTORUS_CLI_PATH) + "\"";
  std::string base = bin + " invariant --config \"" + fx + "/solenoid.json\" --out ";
  std::system((base + "\"" + o1 + "\"").c_str());
  std::system((base + "\"" + o2 + "\"").c_str());
  c.expect(!slurp(o1).empty() && slurp(o1) == slurp(o2), "binary determinism");
  std::remove(o1.c_str());
  std::remove(o2.c_str());
  int raw = std::system((bin + " check-hom --config \"" + fx + "/undecided.json\" > /dev/null").c_str());
  c.expect(WEXITSTATUS(raw) == 2, "undecided exit 2");
  rc.command = "check-hom";
  rc.config_path = fx + "/undecided.json";
  c.expect(cli::run(rc).exit_code == 2, "in-process exit 2");
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Check (*fn)();
  };
  const Entry entries[] = {
      {"exterior-functoriality", exterior_functoriality},
      {"pfaffian-squares", pfaffian_squares},
      {"trace-table", trace_table},
      {"solenoid-invariants", solenoid_invariants},
      {"ax7-identities", ax7_identities},
      {"classification", classification},
      {"scale-and-projection-scale", scales},
      {"flat-spectrum", flat_spectrum},
      {"clifford-and-jacobi", clifford_and_jacobi},
      {"solenoid-compatibility-resolvent", solenoid_spectral},
      {"increment-and-commutator", increments},
      {"cutdown", cutdown},
      {"banded-commutator", banded},
      {"fluctuation-conformal", fluctuation},
      {"cli-determinism", cli_determinism},
  };
  int failures = 0, i = 0;
  for (auto& e : entries) {
    ++i;
    Check c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.why = std::string("exception: ") + ex.what();
    }
    std::cout << (c.ok ? "PASS " : "FAIL ") << i << " " << e.name;
    if (!c.ok) std::cout << " (" << c.why << ")";
    std::cout << std::endl;
    if (!c.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
