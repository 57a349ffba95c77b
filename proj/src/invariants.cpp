#include "ub0/invariants.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ub0/errors.hpp"
#include "ub0/nilalgebra.hpp"

namespace ub0 {

namespace {

Int int_pow(std::uint64_t base, std::uint64_t e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, static_cast<unsigned long>(e));
  return r;
}

// v = p^e with e >= 0, or fail with `kind`
std::uint32_t p_log(std::uint64_t p, Int v, ErrKind kind, const std::string& what) {
  std::uint32_t e = 0;
  while (v > 1) {
    if (!mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(p)))
      fail(kind, what + " (" + v.get_str() + " is not a power of " + std::to_string(p) + ")");
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(p));
    ++e;
  }
  if (v != 1) fail(kind, what);
  return e;
}

std::pair<std::uint64_t, std::uint32_t> check_char(const PcPresentation& pres, std::uint64_t q) {
  const auto [p, n] = split_prime_power(q);
  if (p != pres.p)
    fail(ErrKind::FieldMismatch,
         "coefficient size " + std::to_string(q) + " has characteristic " + std::to_string(p) +
             " but the group is a " + std::to_string(pres.p) + "-group");
  return {p, n};
}

}  // namespace

AbelianGroup mq_structure(const PcPresentation& pres, std::uint64_t q) {
  const auto [p, n] = check_char(pres, q);

  const ClassData cd = conjugacy_classes(pres);
  const std::uint32_t k = cd.k();
  if (k <= 1) return cokernel(IntMat{}, 0);

  const std::uint32_t E = p_log(p, Int(static_cast<unsigned long>(group_exponent(pres))),
                                ErrKind::InternalInconsistency, "group exponent");
  const GaloisRing R = make_galois_ring(p, n, E);

  // one generator per (nontrivial class, power-basis index) pair, laid out as
  // slot(class)*n + index
  std::vector<std::uint32_t> slot(k, 0);
  {
    std::uint32_t s = 0;
    for (std::uint32_t c = 0; c < k; ++c)
      if (c != cd.trivial_class) slot[c] = s++;
  }
  const std::size_t N = static_cast<std::size_t>(k - 1) * n;
  const Int pE = int_pow(p, E);

  RelationAccumulator acc(N);
  {
    // p^E kills every generator: iterating the defining relation E times lands
    // on the class of rep^(p^E) = 1, whose generators are omitted. Feeding
    // these rows first keeps all echelon entries below p^E.
    IntVec row(N, 0);
    for (std::size_t g = 0; g < N; ++g) {
      row[g] = pE;
      acc.add(row);
      row[g] = 0;
    }
  }
  for (std::uint32_t c = 0; c < k; ++c) {
    if (c == cd.trivial_class) continue;
    const std::uint32_t tc = cd.power_map[c];
    for (std::uint32_t j = 0; j < n; ++j) {
      // p * e_{c,j} = sum_i a_{i,j} * e_{t(c),i} with a the Frobenius-lift
      // matrix mod p^E; the right side vanishes when rep^p is central-trivial
      IntVec row(N, 0);
      row[static_cast<std::size_t>(slot[c]) * n + j] += static_cast<unsigned long>(p);
      if (tc != cd.trivial_class)
        for (std::uint32_t i = 0; i < n; ++i)
          row[static_cast<std::size_t>(slot[tc]) * n + i] -=
              static_cast<unsigned long>(R.frob_matrix[i][j]);
      acc.add(std::move(row));
    }
  }
  return cokernel(acc);
}

MainTheoremReport main_theorem_report(const PcPresentation& pres, std::uint64_t q) {
  const auto [p, n] = check_char(pres, q);

  MainTheoremReport rep;
  rep.k = conjugacy_classes(pres).k();
  const NilpotentAlgebra A = augmentation_ideal(pres, make_field(p, n));
  rep.unit_ab_order = order(unit_abelianization(A).group);
  rep.q_pow_k_minus_1 = int_pow(q, rep.k - 1);

  if (!mpz_divisible_p(rep.unit_ab_order.get_mpz_t(), rep.q_pow_k_minus_1.get_mpz_t()))
    fail(ErrKind::NonIntegralRatio,
         "abelianization order " + rep.unit_ab_order.get_str() + " is not divisible by q^(k-1) = " +
             rep.q_pow_k_minus_1.get_str());
  rep.inferred_b0_order = rep.unit_ab_order / rep.q_pow_k_minus_1;
  p_log(p, rep.inferred_b0_order, ErrKind::NonIntegralRatio,
        "quotient of the abelianization order by q^(k-1)");
  return rep;
}

KernelResult kernel_f(const PcPresentation& pres, std::uint64_t q, std::uint32_t m,
                      unsigned root_index) {
  const auto [p, n] = check_char(pres, q);
  if (m == 0) fail(ErrKind::BadArgument, "extension degree must be positive");

  const FieldPtr Fq = make_field(p, n);
  const FieldPtr Fl = make_field(p, n * m);
  const Embedding e = find_embedding(*Fq, *Fl, root_index);
  const NilpotentAlgebra Aq = augmentation_ideal(pres, Fq);
  const NilpotentAlgebra Al = extend_scalars(Aq, e, Fl);

  const UnitEngine Eq(Aq);
  const UnitEngine El(Al);
  const AbelianizationData abq = unit_abelianization(Eq, unit_pcp(Eq));
  const AbelianizationData abl = unit_abelianization(El, unit_pcp(El));
  const IntMat T = inclusion_ab_map(Eq, abq, El, abl, e);
  return hom_kernel(abq.group, abl.group, T);
}

BogomolovReport bogomolov(const PcPresentation& pres, std::uint64_t q, std::string group_name) {
  const auto [p, n] = check_char(pres, q);

  BogomolovReport rep;
  rep.group_name = std::move(group_name);
  rep.q = q;
  rep.k = conjugacy_classes(pres).k();

  const NilpotentAlgebra A = augmentation_ideal(pres, make_field(p, n));
  rep.unit_ab = unit_abelianization(A).group;
  rep.mq = mq_structure(pres, q);

  // route 1: the counting identity. |M_q| must equal q^(k-1) and divide the
  // abelianization order; the quotient is the predicted invariant order.
  const Int qk1 = int_pow(q, rep.k - 1);
  if (order(rep.mq) != qk1)
    fail(ErrKind::InternalInconsistency,
         "auxiliary group order " + order(rep.mq).get_str() + " differs from q^(k-1) = " +
             qk1.get_str());
  const Int ab_order = order(rep.unit_ab);
  if (!mpz_divisible_p(ab_order.get_mpz_t(), qk1.get_mpz_t()))
    fail(ErrKind::NonIntegralRatio, "abelianization order " + ab_order.get_str() +
                                        " is not divisible by q^(k-1) = " + qk1.get_str());
  rep.b0_order = ab_order / qk1;
  const std::uint32_t b0_log =
      p_log(p, rep.b0_order, ErrKind::NonIntegralRatio,
            "quotient of the abelianization order by q^(k-1)");

  // route 2: extension-kernel chain. ker f_m grows monotonically with the
  // degree m = p^t and stabilizes at the same subgroup; stop as soon as its
  // order matches route 1, and give it two extra doublings of slack before
  // declaring the chain broken.
  Int prev = 0;
  std::uint32_t m = 1;
  for (std::uint32_t t = 0;; ++t) {
    if (t > b0_log + 2)
      fail(ErrKind::InternalInconsistency,
           "extension-kernel chain did not stabilize at the predicted order " +
               rep.b0_order.get_str());
    const KernelResult kr = kernel_f(pres, q, m);
    const Int ko = order(kr.structure);
    if (ko > rep.b0_order)
      fail(ErrKind::InternalInconsistency,
           "extension kernel of degree " + std::to_string(m) + " has order " + ko.get_str() +
               ", larger than the predicted " + rep.b0_order.get_str());
    if (ko < prev)
      fail(ErrKind::InternalInconsistency,
           "extension kernel shrank between consecutive degrees (" + prev.get_str() + " -> " +
               ko.get_str() + ")");
    rep.kernel_orders.emplace_back(m, ko);
    if (ko == rep.b0_order) {
      // first full-order degree = the invariant's exponent; the kernels are
      // nested, so full order means the whole subgroup is already present
      rep.b0_structure = kr.structure;
      rep.b0_exponent = m;
      break;
    }
    prev = ko;
    m = static_cast<std::uint32_t>(m * p);
  }
  if (exponent(rep.b0_structure) != rep.b0_exponent)
    fail(ErrKind::InternalInconsistency,
         "stabilized kernel has exponent " + exponent(rep.b0_structure).get_str() +
             " but first reached full order at degree " + rep.b0_exponent.get_str());
  return rep;
}

}  // namespace ub0
