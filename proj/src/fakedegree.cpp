#include "ub0/fakedegree.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ub0/errors.hpp"
#include "ub0/smallfield.hpp"
#include "ub0/unitgroup.hpp"

namespace ub0 {

namespace {

// q^d when it stays <= guard, else fail(kind)
std::uint64_t guarded_pow(std::uint64_t q, std::uint32_t d, std::uint64_t guard, ErrKind kind,
                          const char* what) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < d; ++i) {
    if (r > guard / q)
      fail(kind, std::string(what) + " needs q^dim = " + std::to_string(q) + "^" +
                     std::to_string(d) + " element sweeps, over the limit of " +
                     std::to_string(guard));
    r *= q;
  }
  return r;
}

std::uint64_t u64_pow(std::uint64_t q, std::uint32_t e) {
  std::uint64_t r = 1;
  while (e--) r *= q;
  return r;
}

using SparseRow = std::vector<std::pair<std::uint32_t, std::uint64_t>>;

// upper-triangle commutator structure constants: cc[i*d+j] (i < j) holds the
// nonzero coordinates of b_i b_j - b_j b_i
std::vector<SparseRow> commutator_sc(const NilpotentAlgebra& A) {
  const Field& F = *A.field;
  const std::uint32_t d = A.dim;
  std::vector<SparseRow> cc(static_cast<std::size_t>(d) * d);
  std::vector<std::uint64_t> acc(d, 0);
  for (std::uint32_t i = 0; i < d; ++i)
    for (std::uint32_t j = i + 1; j < d; ++j) {
      std::fill(acc.begin(), acc.end(), 0);
      for (const ScEntry& e : A.at(i, j)) acc[e.k] = F.cadd(acc[e.k], e.c);
      for (const ScEntry& e : A.at(j, i)) acc[e.k] = F.csub(acc[e.k], e.c);
      SparseRow& row = cc[static_cast<std::size_t>(i) * d + j];
      for (std::uint32_t k = 0; k < d; ++k)
        if (acc[k] != 0) row.emplace_back(k, acc[k]);
    }
  return cc;
}

// in-place row reduction of a d x d matrix of field codes
std::uint32_t field_rank(const Field& F, std::vector<std::uint64_t>& m, std::uint32_t d) {
  std::uint32_t rank = 0;
  for (std::uint32_t col = 0; col < d && rank < d; ++col) {
    std::uint32_t piv = rank;
    while (piv < d && m[static_cast<std::size_t>(piv) * d + col] == 0) ++piv;
    if (piv == d) continue;
    if (piv != rank)
      for (std::uint32_t c = col; c < d; ++c)
        std::swap(m[static_cast<std::size_t>(piv) * d + c],
                  m[static_cast<std::size_t>(rank) * d + c]);
    const std::uint64_t inv = F.cinv(m[static_cast<std::size_t>(rank) * d + col]);
    for (std::uint32_t r = piv + 1; r < d; ++r) {
      const std::uint64_t head = m[static_cast<std::size_t>(r) * d + col];
      if (head == 0) continue;
      const std::uint64_t f = F.cmul(head, inv);
      for (std::uint32_t c = col; c < d; ++c)
        m[static_cast<std::size_t>(r) * d + c] =
            F.csub(m[static_cast<std::size_t>(r) * d + c],
                   F.cmul(f, m[static_cast<std::size_t>(rank) * d + c]));
    }
    ++rank;
  }
  return rank;
}

OrbitProfile detail_coadjoint_profile(const NilpotentAlgebra& A, bool parallel) {
  const Field& F = *A.field;
  const std::uint64_t q = F.q();
  const std::uint32_t d = A.dim;
  const std::uint64_t total =
      guarded_pow(q, d, kProfileGuard, ErrKind::ProfileGuardExceeded, "coadjoint profile");
  const std::vector<SparseRow> cc = commutator_sc(A);

  // rank is always even, so tally by half-rank; merged sums are independent
  // of the iteration split
  std::vector<std::uint64_t> tally(d / 2 + 1, 0);
  std::atomic<bool> odd_rank{false};

#pragma omp parallel if (parallel)
  {
    std::vector<std::uint64_t> local(tally.size(), 0);
    std::vector<std::uint64_t> lam(d), gram(static_cast<std::size_t>(d) * d);
#pragma omp for schedule(static)
    for (long long L = 0; L < static_cast<long long>(total); ++L) {
      std::uint64_t rest = static_cast<std::uint64_t>(L);
      for (std::uint32_t k = 0; k < d; ++k) {
        lam[k] = rest % q;
        rest /= q;
      }
      std::fill(gram.begin(), gram.end(), 0);
      bool nonzero = false;
      for (std::uint32_t i = 0; i < d; ++i)
        for (std::uint32_t j = i + 1; j < d; ++j) {
          const SparseRow& row = cc[static_cast<std::size_t>(i) * d + j];
          if (row.empty()) continue;
          std::uint64_t s = 0;
          for (const auto& [k, c] : row)
            if (lam[k] != 0) s = F.cadd(s, F.cmul(c, lam[k]));
          if (s == 0) continue;
          gram[static_cast<std::size_t>(i) * d + j] = s;
          gram[static_cast<std::size_t>(j) * d + i] = F.cneg(s);
          nonzero = true;
        }
      const std::uint32_t r = nonzero ? field_rank(F, gram, d) : 0;
      if (r % 2 != 0)
        odd_rank.store(true, std::memory_order_relaxed);
      else
        ++local[r / 2];
    }
#pragma omp critical(ub0_profile_merge)
    for (std::size_t w = 0; w < tally.size(); ++w) tally[w] += local[w];
  }

  if (odd_rank.load())
    fail(ErrKind::InternalInconsistency,
         "a coadjoint Gram matrix has odd rank; the form should be alternating");

  OrbitProfile prof;
  for (std::size_t w = 0; w < tally.size(); ++w) {
    if (tally[w] == 0) continue;
    const std::uint64_t s = u64_pow(q, 2 * static_cast<std::uint32_t>(w));
    if (tally[w] % s != 0)
      fail(ErrKind::InternalInconsistency, "orbit size " + std::to_string(s) +
                                               " does not divide its functional count " +
                                               std::to_string(tally[w]));
    prof.counts[s] = tally[w];
    prof.orbit_counts[s] = tally[w] / s;
    prof.fake_degrees[u64_pow(q, static_cast<std::uint32_t>(w))] = tally[w] / s;
  }
  return prof;
}

}  // namespace

OrbitProfile coadjoint_profile(const NilpotentAlgebra& A) {
  return detail_coadjoint_profile(A, true);
}

OrbitProfile coadjoint_profile_serial(const NilpotentAlgebra& A) {
  return detail_coadjoint_profile(A, false);
}

Int fixed_point_count(const NilpotentAlgebra& A) {
  const std::uint32_t ldim = lie_commutator_dim(A).first;
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), A.field->q(), A.dim - ldim);
  return r;
}

FakeDegreeReport fake_degree_report(const NilpotentAlgebra& A, bool with_orbit_check) {
  FakeDegreeReport rep;
  rep.fixed_points = fixed_point_count(A);
  rep.unit_ab_order = order(unit_abelianization(A).group);
  rep.consistent = rep.fixed_points == rep.unit_ab_order;
  rep.ratio = mpq_class(rep.unit_ab_order) / mpq_class(rep.fixed_points);
  rep.ratio.canonicalize();

  if (with_orbit_check) {
    // only where the exhaustive sweeps are affordable
    const std::uint64_t q = A.field->q();
    std::uint64_t size = 1;
    bool small = true;
    for (std::uint32_t i = 0; i < A.dim && small; ++i) {
      if (size > kOracleGuard / q)
        small = false;
      else
        size *= q;
    }
    if (small) {
      rep.orbit_check_run = true;
      rep.orbit_count = coadjoint_profile(A).orbit_total();
      rep.unit_class_count = brute_force_units(A).class_count;
    }
  }
  return rep;
}

UnitOracle brute_force_units(const NilpotentAlgebra& A, std::uint64_t guard) {
  const Field& F = *A.field;
  const std::uint64_t q = F.q();
  const std::uint32_t d = A.dim;
  const std::uint64_t total =
      guarded_pow(q, d, guard, ErrKind::OracleGuardExceeded, "unit-group enumeration");

  // units 1+u are coded by the mixed-radix packing of u's coordinate codes;
  // code 0 is the identity
  auto decode = [&](std::uint64_t code) {
    AlgebraElement u(d, 0);
    for (std::uint32_t k = 0; k < d; ++k) {
      u[k] = code % q;
      code /= q;
    }
    return u;
  };
  auto encode = [&](const AlgebraElement& u) {
    std::uint64_t code = 0;
    for (std::uint32_t k = d; k-- > 0;) code = code * q + u[k];
    return code;
  };
  auto mul = [&](std::uint64_t a, std::uint64_t b) {
    return encode(unit_mul(A, decode(a), decode(b)));
  };

  // Unit-group generators 1 + c*a_i over the filtration-adapted basis (one
  // term per level coordinate is enough to strip any unit level by level;
  // the plain basis would only generate a proper subgroup), plus inverses.
  const Filtration filt = power_filtration(A);
  std::vector<std::uint64_t> gens, gen_invs;
  for (std::uint32_t i = 0; i < d; ++i)
    for (std::uint64_t c = 1; c < q; ++c) {
      const AlgebraElement g = alg_scale(A, c, filt.adapted[i]);
      gens.push_back(encode(g));
      gen_invs.push_back(encode(unit_inverse(A, g)));
    }
  auto conj = [&](std::uint64_t x, std::size_t gi) {
    return mul(mul(gen_invs[gi], x), gens[gi]);
  };

  UnitOracle oracle;
  oracle.group_order = total;

  // derived subgroup: normal closure of the generator commutators. Grow the
  // generating set S with any conjugate that escapes the subgroup it spans,
  // until <S> is conjugation-stable.
  std::vector<std::uint64_t> s_list;
  {
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t a = 0; a < gens.size(); ++a)
      for (std::size_t b = 0; b < gens.size(); ++b) {
        const std::uint64_t comm = mul(mul(gen_invs[a], gen_invs[b]), mul(gens[a], gens[b]));
        if (comm != 0 && seen.insert(comm).second) s_list.push_back(comm);
      }
    std::sort(s_list.begin(), s_list.end());
  }
  std::vector<bool> in_derived(total, false);
  std::uint64_t derived_size = 0;
  {
    std::vector<std::uint64_t> members;
    for (;;) {
      std::fill(in_derived.begin(), in_derived.end(), false);
      members.assign(1, 0);
      in_derived[0] = true;
      for (std::size_t head = 0; head < members.size(); ++head)
        for (const std::uint64_t s : s_list) {
          const std::uint64_t y = mul(members[head], s);
          if (!in_derived[y]) {
            in_derived[y] = true;
            members.push_back(y);
          }
        }
      std::vector<std::uint64_t> fresh;
      for (const std::uint64_t s : s_list)
        for (std::size_t gi = 0; gi < gens.size(); ++gi) {
          const std::uint64_t y = conj(s, gi);
          if (!in_derived[y]) fresh.push_back(y);
        }
      if (fresh.empty()) {
        derived_size = members.size();
        break;
      }
      std::sort(fresh.begin(), fresh.end());
      fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
      s_list.insert(s_list.end(), fresh.begin(), fresh.end());
    }
  }
  oracle.derived_order = derived_size;
  if (total % derived_size != 0)
    fail(ErrKind::InternalInconsistency, "derived subgroup size does not divide the group order");
  oracle.ab_order = total / derived_size;

  // conjugacy classes: components of the generator-conjugation graph
  std::vector<bool> seen(total, false);
  std::vector<std::uint64_t> stack;
  for (std::uint64_t start = 0; start < total; ++start) {
    if (seen[start]) continue;
    ++oracle.class_count;
    seen[start] = true;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::uint64_t x = stack.back();
      stack.pop_back();
      for (std::size_t gi = 0; gi < gens.size(); ++gi) {
        const std::uint64_t y = conj(x, gi);
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
  }
  return oracle;
}

}  // namespace ub0
