#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ub0/abelian.hpp"
#include "ub0/nilalgebra.hpp"

namespace ub0 {

inline constexpr std::uint32_t kUnitGenGuard = 512;

struct UnitPcp;

// Canonical coordinates on the group 1+J along the ideal power filtration.
// One generator per pair (adapted basis vector b of J, power-basis element
// λ of the field), meaning the unit 1 + λ·b; generators are ordered by
// filtration level, then adapted index, then field-power index. Every unit
// factors uniquely as an ordered product  prod_g (1+u_g)^{e_g},  e_g in [0,p).
//
// Internally the engine works over the prime-field restriction of J (N = n·d
// coordinates); for p = 2 all state is bit-packed and every sift step is a
// handful of word operations, which is what makes the 127-generator group
// algebra cases run in seconds. The generic route is kept as the reference.
class UnitEngine {
 public:
  explicit UnitEngine(const NilpotentAlgebra& A);  // GeneratorGuardExceeded
  UnitEngine(const NilpotentAlgebra& A, Filtration filt);

  const NilpotentAlgebra& algebra() const { return A_; }
  const Filtration& filtration() const { return filt_; }
  std::uint64_t p() const { return p_; }
  std::uint32_t gens() const { return N_; }
  std::uint32_t level_of(std::uint32_t g) const { return level_of_[g]; }
  const AlgebraElement& gen_elem(std::uint32_t g) const { return gen_u_[g]; }
  const AlgebraElement& gen_inv_elem(std::uint32_t g) const { return gen_v_[g]; }

  // canonical exponent vector of the unit 1+u
  std::vector<std::uint32_t> sift(const AlgebraElement& u) const;
  std::vector<std::uint32_t> sift_reference(const AlgebraElement& u) const;
  // inverse of sift: u with 1+u = prod_g (1+u_g)^{e_g} in generator order
  AlgebraElement rebuild(const std::vector<std::uint32_t>& e) const;

 private:
  friend UnitPcp detail_unit_pcp(const UnitEngine& E, bool parallel);

  void init();
  std::vector<std::uint32_t> sift_generic(const AlgebraElement& u) const;
  std::vector<std::uint32_t> sift_bits(std::vector<std::uint64_t> w) const;

  NilpotentAlgebra A_;
  Filtration filt_;
  std::uint64_t p_ = 0;
  std::uint32_t n_ = 0, d_ = 0, N_ = 0, L_ = 0;
  std::vector<std::uint64_t> xpow_;         // codes of x^j, j < n
  std::vector<std::uint64_t> pj_;           // p^j, j <= n (digit extraction)
  std::vector<std::uint32_t> level_of_;     // per generator
  std::vector<std::uint32_t> block_start_;  // level block bounds, size L+1
  std::vector<AlgebraElement> gen_u_;       // λ_j · adapted_i, plain coordinates
  std::vector<AlgebraElement> gen_v_;       // (1+u_g)^{-1} - 1

  // p = 2 fast path: unit coordinates as N-bit vectors over the prime field,
  // with per-generator packed matrices for the two multiplication maps that
  // sifting and rebuilding need (left by v_g, right by u_g)
  struct Packed;
  std::shared_ptr<const Packed> pk_;
};

// power-commutator relations of 1+J in the engine's generators: the induced
// abstract presentation has order exactly q^dim and is consistent because
// all words are sifted from true algebra elements
struct UnitPcp {
  std::uint64_t p = 0;
  std::uint32_t N = 0;
  std::vector<Word> power_words;  // sift of (1+u_g)^p - 1
  std::vector<Word> comm_words;   // [1+u_j, 1+u_i] at pair_index(j,i), j > i
  std::vector<std::uint32_t> level_of;
};

// the O(N^2) commutator sifts run OpenMP-parallel with a deterministic merge;
// the _serial variant is the reference kernel for tests and benchmarks
UnitPcp unit_pcp(const UnitEngine& E);
UnitPcp unit_pcp_serial(const UnitEngine& E);

// view the relations as an abstract power-commutator presentation (used for
// collection cross-checks and small-order oracles)
PcPresentation to_presentation(const UnitPcp& pcp);

struct AbelianizationData {
  AbelianGroup group;
  IntMat projection;  // one row per generator: its invariant coordinates
};

// cokernel of the abelianized relation rows (p·e_g - power word; comm words)
AbelianizationData unit_abelianization(const UnitEngine& E, const UnitPcp& pcp);
AbelianizationData unit_abelianization(const NilpotentAlgebra& A);

// invariant coordinates of the class of 1+u in (1+J)_ab
IntVec project_unit(const UnitEngine& E, const AbelianizationData& ab,
                    const AlgebraElement& u);

// matrix of the map (1+J_q)_ab -> (1+J_l)_ab induced by the coefficient
// embedding (El must be built on extend_scalars of Eq's algebra); one column
// per source invariant-factor generator
IntMat inclusion_ab_map(const UnitEngine& Eq, const AbelianizationData& ab_q,
                        const UnitEngine& El, const AbelianizationData& ab_l,
                        const Embedding& e);

}  // namespace ub0
