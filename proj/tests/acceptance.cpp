// Acceptance gate: one pass/fail line per shipped guarantee, nonzero exit if
// any fails. Expects the path to the b0calc binary as argv[1] (used by the
// final criterion to drive the command-line self-test end to end).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ub0/abelian.hpp"
#include "ub0/errors.hpp"
#include "ub0/fakedegree.hpp"
#include "ub0/invariants.hpp"
#include "ub0/nilalgebra.hpp"
#include "ub0/pcgroup.hpp"
#include "ub0/smallfield.hpp"
#include "ub0/unitgroup.hpp"

using namespace ub0;

namespace {

int g_failures = 0;
std::string g_b0calc_path;

struct Check {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string& what) {
    if (cond || !ok) return;
    ok = false;
    detail = what;
  }
};

void criterion(int n, const std::string& title, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", c.ok ? "PASS" : "FAIL", n, title.c_str(),
              secs, c.ok ? "" : " -- ", c.ok ? "" : c.detail.c_str());
  std::fflush(stdout);
  if (!c.ok) ++g_failures;
}

Int int_pow(std::uint64_t b, std::uint64_t e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  return r;
}

std::vector<Int> factor_list(std::initializer_list<std::pair<std::uint64_t, int>> runs) {
  std::vector<Int> out;
  for (const auto& [f, times] : runs)
    for (int i = 0; i < times; ++i) out.emplace_back(static_cast<unsigned long>(f));
  return out;
}

bool has_factors(const AbelianGroup& g, const std::vector<Int>& want) {
  if (g.factors.size() != want.size()) return false;
  for (std::size_t i = 0; i < want.size(); ++i)
    if (g.factors[i] != want[i]) return false;
  return true;
}

// field sizes to exercise for one group: p and p^2
std::vector<std::uint64_t> q_list(const PcPresentation& pres) {
  return {pres.p, pres.p * pres.p};
}

// conjugacy classes the dumbest possible way: conjugate every element by
// every element, with no orbit shortcuts
std::uint64_t all_pairs_class_count(const PcPresentation& pres) {
  const std::uint64_t order = enumerable_order(pres);
  std::vector<bool> seen(order, false);
  std::uint64_t classes = 0;
  for (std::uint64_t a = 0; a < order; ++a) {
    if (seen[a]) continue;
    ++classes;
    const GroupElement x = element_at(pres, a);
    for (std::uint64_t b = 0; b < order; ++b) {
      const GroupElement t = element_at(pres, b);
      const GroupElement conj = multiply(pres, multiply(pres, inverse(pres, t), x), t);
      seen[element_index(pres, conj)] = true;
    }
  }
  return classes;
}

NilpotentAlgebra group_ideal(const std::string& name, std::uint64_t p, std::uint32_t n) {
  return augmentation_ideal(builtin(name), make_field(p, n));
}

// ---------------------------------------------------------------------------

void c1_regression(Check& c) {
  const PcPresentation pres = builtin("jm14_f39");
  const ClassData cd = conjugacy_classes(pres);
  c.expect(cd.k() == 26, "k != 26");

  const AbelianGroup pi_ab = abelianization_of_group(pres);
  c.expect(has_factors(pi_ab, factor_list({{4, 2}})),
           "group abelianization is " + factors_to_string(pi_ab) + ", want C4^2");

  const BogomolovReport rep = bogomolov(pres, 2);
  c.expect(has_factors(rep.unit_ab, factor_list({{2, 13}, {4, 5}, {8, 1}})),
           "unit abelianization is " + factors_to_string(rep.unit_ab) +
               ", want C2^13 x C4^5 x C8");
  c.expect(has_factors(rep.mq, factor_list({{2, 13}, {4, 6}})),
           "M_2 is " + factors_to_string(rep.mq) + ", want C2^13 x C4^6");
  c.expect(rep.b0_order == 2, "|B0| = " + rep.b0_order.get_str() + ", want 2");
  c.expect(has_factors(rep.b0_structure, factor_list({{2, 1}})),
           "B0 is " + factors_to_string(rep.b0_structure) + ", want C2");
}

void c2_counting_identity(Check& c) {
  for (const std::string& name : builtin_names()) {
    const PcPresentation pres = builtin(name);
    if (enumerable_order(pres) > 128) continue;
    for (const std::uint64_t q : q_list(pres)) {
      // bogomolov() itself cross-validates the counting route against the
      // kernel-stabilization route and throws on any disagreement
      const BogomolovReport rep = bogomolov(pres, q, name);
      const Int lhs = order(rep.unit_ab);
      const Int rhs = int_pow(q, rep.k - 1) * rep.b0_order;
      c.expect(lhs == rhs, name + " q=" + std::to_string(q) + ": |(1+I)_ab| = " +
                               lhs.get_str() + " != q^(k-1)|B0| = " + rhs.get_str());
      c.expect(!rep.kernel_orders.empty() &&
                   rep.kernel_orders.back().second == rep.b0_order,
               name + " q=" + std::to_string(q) + ": kernel chain did not reach |B0|");
    }
  }
}

void c3_oracle_equivalence(Check& c) {
  for (const std::string& name : builtin_names()) {
    const PcPresentation pres = builtin(name);
    if (enumerable_order(pres) > 16 || pres.p != 2) continue;
    const NilpotentAlgebra A = augmentation_ideal(pres, make_field(2, 1));
    const UnitOracle oracle = brute_force_units(A);
    const Int ab = order(unit_abelianization(A).group);
    c.expect(Int(static_cast<unsigned long>(oracle.ab_order)) == ab,
             name + ": exhaustive ab order " + std::to_string(oracle.ab_order) +
                 " != computed " + ab.get_str());
    const std::uint64_t brute_k = all_pairs_class_count(pres);
    c.expect(brute_k == conjugacy_classes(pres).k(),
             name + ": all-pairs class count " + std::to_string(brute_k) +
                 " != computed k");
  }
}

void c4_exponent(Check& c) {
  const PcPresentation jm = builtin("jm14_f39");
  c.expect(order(kernel_f(jm, 2, 1).structure) == 1, "jm14_f39: ker f_1 not trivial");
  c.expect(order(kernel_f(jm, 2, 2).structure) == 2, "jm14_f39: |ker f_2| != 2");
  c.expect(bogomolov(jm, 2).b0_exponent == 2, "jm14_f39: exp B0 != 2");

  for (const std::string& name : builtin_names()) {
    const PcPresentation pres = builtin(name);
    if (name == "jm14_f39") continue;  // the one built-in with nontrivial B0
    const std::uint64_t q = pres.p;
    for (std::uint32_t m : {1u, 2u}) {
      const Int ko = order(kernel_f(pres, q, m).structure);
      c.expect(ko == 1, name + ": ker f_" + std::to_string(m) + " has order " +
                            ko.get_str() + ", want trivial");
    }
  }
}

void c5_lie_codim(Check& c) {
  for (const std::string& name : builtin_names()) {
    const PcPresentation pres = builtin(name);
    const std::uint32_t k = conjugacy_classes(pres).k();
    for (const std::uint64_t q : q_list(pres)) {
      const auto [p, n] = split_prime_power(q);
      const NilpotentAlgebra A = augmentation_ideal(pres, make_field(p, n));
      const std::uint32_t codim = A.dim - lie_commutator_dim(A).first;
      c.expect(codim == k - 1, name + " q=" + std::to_string(q) + ": Lie codim " +
                                   std::to_string(codim) + " != k-1 = " +
                                   std::to_string(k - 1));
    }
  }
}

void c6_violation(Check& c) {
  const FakeDegreeReport rep = fake_degree_report(group_ideal("jm14_f39", 2, 1));
  c.expect(!rep.consistent, "verdict is CONSISTENT, want VIOLATED");
  c.expect(rep.fixed_points == int_pow(2, 25),
           "fixed points " + rep.fixed_points.get_str() + ", want 2^25");
  c.expect(rep.unit_ab_order == int_pow(2, 26),
           "abelianization order " + rep.unit_ab_order.get_str() + ", want 2^26");
}

void c7_heisenberg(Check& c) {
  const NilpotentAlgebra A = parse_algebra("algebra\np 3\nn 1\ndim 3\nb1*b2 = b3\n");
  const OrbitProfile prof = coadjoint_profile(A);
  std::map<std::uint64_t, std::uint64_t> degrees;
  for (const auto& [s, cnt] : prof.orbit_counts) {
    std::uint64_t fd = 1;
    for (std::uint64_t t = s; t > 1; t /= 9) fd *= 3;
    degrees[fd] = cnt;
  }
  const std::map<std::uint64_t, std::uint64_t> want{{1, 9}, {3, 2}};
  c.expect(degrees == want, "fake-degree profile is not {1 x 9, 3 x 2}");

  const UnitOracle oracle = brute_force_units(A);
  c.expect(oracle.group_order == 27, "1+J does not have 27 elements");
  c.expect(prof.orbit_total() == oracle.class_count,
           std::to_string(prof.orbit_total()) + " orbits != " +
               std::to_string(oracle.class_count) + " unit classes");
  c.expect(prof.fixed() == 9, "fixed-point count != 9");
  c.expect(oracle.ab_order == 9, "exhaustive abelianization order != 9");
  c.expect(order(unit_abelianization(A).group) == 9, "computed abelianization order != 9");
}

void c8_witness(Check& c) {
  const PcPresentation pres = builtin("jm14_f39");
  const NilpotentAlgebra A = augmentation_ideal(pres, make_field(2, 1));
  const UnitEngine E(A);
  const AbelianizationData ab = unit_abelianization(A);

  // u = (1-g7)(g3-g5) = (g3-1) + (g5-1) + (g7*g3-1) + (g7*g5-1) over F_2;
  // basis vector i of the ideal is (element_at(i+1) - 1)
  const auto gen = [&](std::uint32_t i) {
    GroupElement x(pres.m, 0);
    x[i] = 1;
    return x;
  };
  const GroupElement g3 = gen(2), g5 = gen(4), g7 = gen(6);
  AlgebraElement u(A.dim, 0);
  for (const GroupElement& x : {g3, g5, multiply(pres, g7, g3), multiply(pres, g7, g5)}) {
    const std::uint64_t idx = element_index(pres, x);
    c.expect(idx > 0, "witness term collapsed to the identity");
    u[idx - 1] ^= 1;
  }

  const IntVec proj = project_unit(E, ab, u);
  bool nonzero = false;
  for (const Int& v : proj) nonzero = nonzero || v != 0;
  c.expect(nonzero, "witness projects to zero in the abelianization");

  // x is a 4th power in prod Z/d_i iff gcd(4, d_i) divides x_i for every i
  for (std::size_t i = 0; i < proj.size(); ++i) {
    const Int g = gcd(Int(4), ab.group.factors[i]);
    c.expect(proj[i] % g == 0, "witness is not a 4th power in the abelianization");
  }

  // membership in ker f_2: the induced image in the F_4 abelianization is 0
  const Embedding emb = find_embedding(*A.field, *make_field(2, 2));
  const NilpotentAlgebra A2 = extend_scalars(A, emb, make_field(2, 2));
  const UnitEngine E2(A2);
  const AbelianizationData ab2 = unit_abelianization(A2);
  const IntMat T = inclusion_ab_map(E, ab, E2, ab2, emb);
  for (std::size_t r = 0; r < T.size(); ++r) {
    Int acc = 0;
    for (std::size_t j = 0; j < proj.size(); ++j) acc += T[r][j] * proj[j];
    c.expect(acc % ab2.group.factors[r] == 0, "witness does not lie in ker f_2");
  }
}

void c9_layers(Check& c) {
  for (const std::string& name : builtin_names()) {
    const PcPresentation pres = builtin(name);
    const ClassData cd = conjugacy_classes(pres);
    std::map<std::int32_t, std::uint64_t> by_height;
    for (std::uint32_t cl = 0; cl < cd.k(); ++cl)
      if (cl != cd.trivial_class) ++by_height[cd.heights[cl]];
    for (const std::uint64_t q : q_list(pres)) {
      const AbelianGroup mq = mq_structure(pres, q);
      c.expect(order(mq) == int_pow(q, cd.k() - 1),
               name + " q=" + std::to_string(q) + ": |M_q| != q^(k-1)");
      const auto [p, n] = split_prime_power(q);
      for (std::int32_t i = 0; i < 8; ++i) {
        // |p^i M / p^{i+1} M| = p^{#factors divisible by p^{i+1}}
        const Int threshold = int_pow(p, static_cast<std::uint64_t>(i) + 1);
        std::uint64_t live = 0;
        for (const Int& f : mq.factors)
          if (f % threshold == 0) ++live;
        const Int layer = int_pow(p, live);
        const auto it = by_height.find(i);
        const std::uint64_t classes_at_i = it == by_height.end() ? 0 : it->second;
        c.expect(layer == int_pow(q, classes_at_i),
                 name + " q=" + std::to_string(q) + ": layer " + std::to_string(i) +
                     " is " + layer.get_str() + ", want q^" +
                     std::to_string(classes_at_i));
      }
    }
  }
}

void c10_selftest(Check& c) {
  c.expect(!g_b0calc_path.empty(), "no b0calc path passed as argv[1]");
  if (g_b0calc_path.empty()) return;
  const std::string cmd = g_b0calc_path + " selftest --seed 12345 --json 2>/dev/null";
  const auto capture = [&](std::string& out) {
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return -1;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    return pclose(pipe);
  };
  std::string first, second;
  c.expect(capture(first) == 0, "self-test run 1 failed");
  c.expect(capture(second) == 0, "self-test run 2 failed");
  c.expect(!first.empty() && first == second,
           "self-test output is not deterministic for a fixed seed");
  c.expect(first.find("\"all_passed\": true") != std::string::npos,
           "self-test report does not say all_passed");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_b0calc_path = argv[1];

  criterion(1, "order-128 example regression over F_2", c1_regression);
  criterion(2, "counting identity with kernel cross-validation on all built-ins",
            c2_counting_identity);
  criterion(3, "exhaustive unit-group oracle agreement on small built-ins",
            c3_oracle_equivalence);
  criterion(4, "kernel chain pins the multiplier exponent", c4_exponent);
  criterion(5, "Lie commutator codimension equals k-1 everywhere", c5_lie_codim);
  criterion(6, "fixed-point count violation for the order-128 example", c6_violation);
  criterion(7, "Heisenberg orbit profile matches unit conjugacy data", c7_heisenberg);
  criterion(8, "split-failure witness: nonzero, a 4th power, and in ker f_2", c8_witness);
  criterion(9, "auxiliary-group layers match conjugacy-class heights", c9_layers);
  criterion(10, "deterministic property suites through the command-line self-test",
            c10_selftest);

  if (g_failures == 0) {
    std::printf("acceptance: 10/10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion/criteria FAILED\n", g_failures);
  return 1;
}
