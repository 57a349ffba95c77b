#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ub0/pcgroup.hpp"
#include "ub0/smallfield.hpp"

namespace ub0 {

// elements are coordinate vectors in the distinguished basis, stored as
// packed field codes
using AlgebraElement = std::vector<std::uint64_t>;

struct ScEntry {
  std::uint32_t k = 0;   // basis index of the target
  std::uint64_t c = 0;   // nonzero field code

  bool operator==(const ScEntry&) const = default;
};

inline constexpr std::uint32_t kAlgebraDimGuard = 256;

// finite-dimensional nilpotent associative algebra over F_q, given by
// structure constants b_i * b_j = sum_k c_{ij}^k b_k (stored sparsely:
// group-algebra products touch at most three basis vectors)
struct NilpotentAlgebra {
  FieldPtr field;
  std::uint32_t dim = 0;
  std::vector<std::vector<ScEntry>> sc;  // dim*dim slots, row-major (i*dim+j)
  std::vector<std::string> labels;       // basis-element names
  std::uint32_t nil_index = 2;           // least t with J^t = 0

  const std::vector<ScEntry>& at(std::uint32_t i, std::uint32_t j) const {
    return sc[static_cast<std::size_t>(i) * dim + j];
  }
};

// validates and finishes an algebra given raw structure constants: optional
// associativity check on all basis triples (NotAssociative with a witness
// triple), then nilpotency via the power chain (NotNilpotent), which also
// fixes nil_index
NilpotentAlgebra make_algebra(FieldPtr field, std::uint32_t dim,
                              std::vector<std::vector<ScEntry>> sc,
                              std::vector<std::string> labels,
                              bool check_associativity);

// basis {g-1 : g != 1} in element-enumeration order of the group;
// (g-1)(h-1) = (gh-1) - (g-1) - (h-1)
NilpotentAlgebra augmentation_ideal(const PcPresentation& pres, const FieldPtr& field);

// text format:
//   algebra
//   p <prime>
//   n <degree>
//   dim <d>
//   b<i>*b<j> = <lin-combo>      (omitted products are zero)
// <lin-combo> is `0` or `+`-separated terms `[c0,c1,...]*b<k>` with the
// bracket holding power-basis coordinates; a `[1]*` prefix may be dropped
NilpotentAlgebra parse_algebra(const std::string& text);

AlgebraElement alg_zero(const NilpotentAlgebra& A);
bool alg_is_zero(const AlgebraElement& a);
AlgebraElement alg_add(const NilpotentAlgebra& A, const AlgebraElement& a,
                       const AlgebraElement& b);
AlgebraElement alg_sub(const NilpotentAlgebra& A, const AlgebraElement& a,
                       const AlgebraElement& b);
AlgebraElement alg_neg(const NilpotentAlgebra& A, const AlgebraElement& a);
AlgebraElement alg_scale(const NilpotentAlgebra& A, std::uint64_t c, const AlgebraElement& a);
AlgebraElement alg_multiply(const NilpotentAlgebra& A, const AlgebraElement& a,
                            const AlgebraElement& b);
AlgebraElement lie_bracket(const NilpotentAlgebra& A, const AlgebraElement& a,
                           const AlgebraElement& b);  // ab - ba

// units 1+u: (1+u)(1+v) = 1 + (u + v + uv)
AlgebraElement unit_mul(const NilpotentAlgebra& A, const AlgebraElement& u,
                        const AlgebraElement& v);
// v with (1+u)(1+v) = 1, via the truncated geometric series
AlgebraElement unit_inverse(const NilpotentAlgebra& A, const AlgebraElement& u);

// chain J = J^1 > J^2 > ... > J^{nil_index-1} > 0 with echelonized level
// bases, plus a basis of J reordered so that the suffix from level_start[k]
// spans J^{k+1}, and the change-of-basis rows taking plain coordinates to
// adapted ones
struct Filtration {
  std::vector<std::vector<AlgebraElement>> levels;  // levels[k] = RREF basis of J^{k+1}
  std::vector<AlgebraElement> adapted;              // size dim, level-ascending
  std::vector<std::uint32_t> level_of;              // adapted index -> level (1-based)
  std::vector<std::uint32_t> level_start;           // level k (1-based) begins at adapted
                                                    // index level_start[k-1]; sentinel dim
  std::vector<std::vector<std::uint64_t>> to_adapted_rows;  // dim x dim

  std::vector<std::uint32_t> dims() const {
    std::vector<std::uint32_t> d;
    for (const auto& lv : levels) d.push_back(static_cast<std::uint32_t>(lv.size()));
    return d;
  }
};

// dispatches to bit-packed row reduction over F_2, generic elimination
// otherwise; the _reference variant always takes the generic route (kept as
// the correctness baseline for the packed kernels)
Filtration power_filtration(const NilpotentAlgebra& A);
Filtration power_filtration_reference(const NilpotentAlgebra& A);

AlgebraElement to_adapted(const NilpotentAlgebra& A, const Filtration& filt,
                          const AlgebraElement& x);

// dimension and echelonized basis of span{ b_i b_j - b_j b_i }
std::pair<std::uint32_t, std::vector<AlgebraElement>> lie_commutator_dim(
    const NilpotentAlgebra& A);

// same structure constants pushed through a field embedding; FieldMismatch
// when e.src is not A's field or dst does not realize e.dst
NilpotentAlgebra extend_scalars(const NilpotentAlgebra& A, const Embedding& e,
                                const FieldPtr& dst);

}  // namespace ub0
