#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ub0/abelian.hpp"
#include "ub0/pcgroup.hpp"
#include "ub0/smallfield.hpp"
#include "ub0/unitgroup.hpp"

namespace ub0 {

// The auxiliary abelian group attached to (pres, q): one generator per
// (nontrivial conjugacy class, field power-basis index) pair, with relations
//   p * e_{c,j} = sum_i a_{i,j} * e_{t(c),i}
// where t(c) is the class of rep^p (the right side is dropped when rep^p = 1)
// and a is the Frobenius-lift matrix of the degree-n Galois ring modulo p^E,
// E = log_p(group exponent). p^E kills the whole group, so those rows are
// included as well. |result| = q^(k-1) with k the class count.
AbelianGroup mq_structure(const PcPresentation& pres, std::uint64_t q);

struct MainTheoremReport {
  std::uint32_t k = 0;     // conjugacy class count
  Int unit_ab_order;       // |(1+I)_ab| over F_q
  Int q_pow_k_minus_1;     // q^(k-1)
  Int inferred_b0_order;   // unit_ab_order / q^(k-1), a power of p
};

// the counting identity |(1+I)_ab| = q^(k-1) * |B0|; NonIntegralRatio when
// the quotient is not a nonnegative power of p (that would be a bug)
MainTheoremReport main_theorem_report(const PcPresentation& pres, std::uint64_t q);

// kernel of the map (1+I_{F_q})_ab -> (1+I_{F_q^m})_ab induced by the
// degree-m coefficient field extension; gens_in_A rows are written in the
// invariant coordinates of the small-field abelianization.
// root_index selects among the conjugate embeddings (results must agree).
KernelResult kernel_f(const PcPresentation& pres, std::uint64_t q, std::uint32_t m,
                      unsigned root_index = 0);

struct BogomolovReport {
  std::string group_name;
  std::uint64_t q = 0;
  std::uint32_t k = 0;
  AbelianGroup unit_ab;
  AbelianGroup mq;
  Int b0_order;
  AbelianGroup b0_structure;
  Int b0_exponent;
  // (extension degree m, |ker f_m|) in the order tested, m running over
  // powers of p until the kernel order reaches b0_order
  std::vector<std::pair<std::uint64_t, Int>> kernel_orders;
};

// Order of the commutator-vanishing invariant from the counting identity,
// then its exponent and structure from the kernel-stabilization chain. The
// two routes are independent; any mismatch (kernel exceeding the predicted
// order, chain not stabilizing within log_p(order)+2 steps, auxiliary-group
// order off) raises InternalInconsistency.
BogomolovReport bogomolov(const PcPresentation& pres, std::uint64_t q,
                          std::string group_name = "");

}  // namespace ub0
