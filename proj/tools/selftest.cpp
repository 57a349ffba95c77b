#include "selftest.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ub0/abelian.hpp"
#include "ub0/errors.hpp"
#include "ub0/fakedegree.hpp"
#include "ub0/invariants.hpp"
#include "ub0/nilalgebra.hpp"
#include "ub0/smallfield.hpp"
#include "ub0/unitgroup.hpp"

namespace ub0cli {

using namespace ub0;

namespace {

// one suite: run `body` with a `check` callback; the first failed check is
// recorded and later ones in the same suite are still evaluated (cheaply)
struct Suite {
  SuiteResult result;
  void check(bool cond, const std::string& what) {
    if (cond || !result.ok) return;
    result.ok = false;
    result.detail = what;
  }
};

std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

Int int_pow(std::uint64_t b, std::uint64_t e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  return r;
}

IntMat identity_mat(std::size_t n) {
  IntMat m(n, IntVec(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

SuiteResult suite_smith(std::uint64_t seed) {
  Suite s;
  s.result.name = "smith normal form: factorization, divisibility, unimodularity";
  std::mt19937_64 rng(seed);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t rows = 1 + rng_below(rng, 6), cols = 1 + rng_below(rng, 6);
    IntMat m(rows, IntVec(cols));
    for (auto& row : m)
      for (Int& x : row) x = static_cast<long>(rng_below(rng, 19)) - 9;
    const SmithResult snf = smith_normal_form(m);
    s.check(mat_mul(mat_mul(snf.U, m), snf.V) == snf.S, "S != U*M*V");
    const Int du = det(snf.U), dv = det(snf.V);
    s.check(du == 1 || du == -1, "U is not unimodular");
    s.check(dv == 1 || dv == -1, "V is not unimodular");
    s.check(mat_mul(snf.U, snf.Uinv) == identity_mat(rows), "Uinv is not the inverse of U");
    s.check(mat_mul(snf.V, snf.Vinv) == identity_mat(cols), "Vinv is not the inverse of V");
    Int prev = 0;
    for (std::size_t i = 0; i < rows && i < cols; ++i) {
      const Int& d = snf.S[i][i];
      s.check(d >= 0, "negative diagonal entry");
      if (prev != 0)
        s.check(mpz_divisible_p(d.get_mpz_t(), prev.get_mpz_t()) != 0 || d == 0,
                "diagonal entries out of divisibility order");
      if (prev == 0 && i > 0) s.check(d == 0, "nonzero after zero on the diagonal");
      prev = d;
    }
  }
  return s.result;
}

SuiteResult suite_collection(std::uint64_t seed, std::uint64_t max_order,
                             const std::vector<std::pair<std::string, PcPresentation>>& groups) {
  Suite s;
  s.result.name = "group collection: index, inverse and associativity round-trips";
  std::mt19937_64 rng(seed + 1);
  for (const auto& [name, pres] : groups) {
    const std::uint64_t order = enumerable_order(pres, max_order);
    for (int iter = 0; iter < 50; ++iter) {
      const GroupElement x = element_at(pres, rng_below(rng, order));
      const GroupElement y = element_at(pres, rng_below(rng, order));
      const GroupElement z = element_at(pres, rng_below(rng, order));
      s.check(element_at(pres, element_index(pres, x)) == x, name + ": index round-trip");
      s.check(multiply(pres, x, inverse(pres, x)) == identity(pres), name + ": x * x^-1 != 1");
      s.check(multiply(pres, multiply(pres, x, y), z) == multiply(pres, x, multiply(pres, y, z)),
              name + ": associativity");
      Word w;
      for (std::uint32_t g = 0; g < pres.m; ++g)
        if (x[g] != 0) w.push_back({g, x[g]});
      s.check(collect(pres, w) == x, name + ": collection of a normal word");
    }
  }
  return s.result;
}

SuiteResult suite_sift(std::uint64_t seed, std::uint64_t max_gens,
                       const std::vector<std::pair<std::string, PcPresentation>>& groups) {
  Suite s;
  s.result.name = "unit factorization: rebuild after sift reproduces the unit";
  std::mt19937_64 rng(seed + 2);
  for (const auto& [name, pres] : groups) {
    const FieldPtr F = make_field(pres.p, 1);
    const NilpotentAlgebra A = augmentation_ideal(pres, F);
    if (static_cast<std::uint64_t>(A.dim) > max_gens)
      fail(ErrKind::GeneratorGuardExceeded,
           "self-test unit sweep on " + name + " needs " + std::to_string(A.dim) +
               " generators, over the limit of " + std::to_string(max_gens));
    const UnitEngine E(A);
    for (int iter = 0; iter < 25; ++iter) {
      AlgebraElement u(A.dim, 0);
      for (auto& c : u) c = rng_below(rng, F->q());
      const std::vector<std::uint32_t> e = E.sift(u);
      s.check(E.rebuild(e) == u, name + ": rebuild(sift(u)) != u");
      s.check(E.sift_reference(u) == e, name + ": packed and reference sift disagree");
    }
  }
  return s.result;
}

SuiteResult suite_embedding(std::uint64_t) {
  Suite s;
  s.result.name = "extension kernels: conjugate-embedding invariance";
  for (const char* name : {"c4", "q8", "c2xc2"}) {
    const PcPresentation pres = builtin(name);
    const KernelResult a = kernel_f(pres, 4, 2, 0);
    const KernelResult b = kernel_f(pres, 4, 2, 1);
    s.check(is_isomorphic(a.structure, b.structure),
            std::string(name) + ": kernels differ between conjugate embeddings");
  }
  return s.result;
}

SuiteResult suite_orbits() {
  Suite s;
  s.result.name = "coadjoint orbits: even ranks, divisibility, full coverage";
  std::vector<std::pair<std::string, NilpotentAlgebra>> algebras;
  algebras.emplace_back("heisenberg/F2", parse_algebra("algebra\np 2\nn 1\ndim 3\nb1*b2 = b3\n"));
  algebras.emplace_back("heisenberg/F3", parse_algebra("algebra\np 3\nn 1\ndim 3\nb1*b2 = b3\n"));
  algebras.emplace_back("heisenberg/F4", parse_algebra("algebra\np 2\nn 2\ndim 3\nb1*b2 = b3\n"));
  algebras.emplace_back("zero/F2", parse_algebra("algebra\np 2\nn 1\ndim 5\n"));
  for (const char* name : {"c4", "d8", "q8"})
    algebras.emplace_back(std::string("I(") + name + ",F2)",
                          augmentation_ideal(builtin(name), make_field(2, 1)));
  for (const auto& [name, A] : algebras) {
    const std::uint64_t q = A.field->q();
    const OrbitProfile prof = coadjoint_profile(A);
    Int covered = 0;
    for (const auto& [size, count] : prof.counts) {
      std::uint64_t t = size;
      while (t > 1 && t % (q * q) == 0) t /= q * q;
      s.check(t == 1, name + ": orbit size is not an even power of q");
      s.check(count % size == 0, name + ": orbit size does not divide its stratum");
      covered += count;
    }
    s.check(covered == int_pow(q, A.dim), name + ": strata do not cover the dual space");
    s.check(Int(static_cast<unsigned long>(prof.fixed())) == fixed_point_count(A),
            name + ": rank-0 stratum disagrees with the Lie codimension");
  }
  return s.result;
}

}  // namespace

std::vector<SuiteResult> run_selftest(std::uint64_t seed, std::uint64_t max_order,
                                      std::uint64_t max_gens,
                                      const std::optional<PcPresentation>& extra) {
  std::vector<std::pair<std::string, PcPresentation>> groups;
  for (const std::string& name : builtin_names()) groups.emplace_back(name, builtin(name));
  if (extra) groups.emplace_back("user group", *extra);

  std::vector<SuiteResult> out;
  out.push_back(suite_smith(seed));
  out.push_back(suite_collection(seed, max_order, groups));
  out.push_back(suite_sift(seed, max_gens, groups));
  out.push_back(suite_embedding(seed));
  out.push_back(suite_orbits());
  return out;
}

}  // namespace ub0cli
