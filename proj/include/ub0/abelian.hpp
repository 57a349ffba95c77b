#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ub0/errors.hpp"

namespace ub0 {

using Int = mpz_class;
using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;  // row-major, rectangular

IntMat identity_mat(std::size_t k);
IntMat mat_mul(const IntMat& a, const IntMat& b);
IntVec mat_vec(const IntMat& a, const IntVec& x);
Int det(IntMat m);  // Gauss-Bareiss; intended for unimodularity checks in tests

struct SmithResult {
  IntMat S;        // diagonal, same shape as the input, d1 | d2 | ..., zeros last
  IntMat U, Uinv;  // S = U * M * V with U, V unimodular
  IntMat V, Vinv;
};

// Smith normal form. Pivot selection: smallest nonzero |entry| of the working
// submatrix, ties broken by (row, col), so the reduction is deterministic.
SmithResult smith_normal_form(const IntMat& m);

// A finitely generated abelian group presented as Z^gens / rowspace(relations),
// with the change of basis needed to map generator exponent vectors into
// invariant-factor coordinates.
struct AbelianGroup {
  // invariant factors in divisibility order: each >= 2, or 0 for a free factor
  // (free factors come last); empty list = trivial group
  IntVec factors;
  std::size_t gens = 0;  // number of original generators
  // invariant coordinates of an exponent vector x are (U*x)[kept[i]] mod factors[i]
  IntMat U, Uinv;
  std::vector<std::size_t> kept;

  std::size_t rank() const { return factors.size(); }
  bool is_trivial() const { return factors.empty(); }
};

// Streaming integer row-echelon compression: accepts arbitrarily many
// relation rows while holding at most `gens` pivot rows that generate the
// same row lattice (unimodular row operations only). Lets callers with very
// large redundant relation lists avoid materializing them.
class RelationAccumulator {
 public:
  explicit RelationAccumulator(std::size_t gens) : gens_(gens) {}

  std::size_t gens() const { return gens_; }
  void add(IntVec row);
  IntMat rows() const;  // compressed generating set, ordered by leading column

 private:
  void reduce_tail(std::map<std::size_t, IntVec>::iterator it);

  std::size_t gens_;
  std::map<std::size_t, IntVec> pivots_;
};

// Z^gens modulo the row space of `relations` (each row has length `gens`).
// Relation lists may be large and redundant; they are compressed by integer
// row reduction before the Smith form is computed.
AbelianGroup cokernel(const IntMat& relations, std::size_t gens);
AbelianGroup cokernel(const RelationAccumulator& acc);

Int order(const AbelianGroup& a);     // throws InfiniteGroup on free factors
Int exponent(const AbelianGroup& a);  // largest invariant factor; 1 for trivial
Int m_torsion_order(const AbelianGroup& a, const Int& m);  // #{x : m*x = 0}
bool is_isomorphic(const AbelianGroup& a, const AbelianGroup& b);

// exponent vector (length gens) -> invariant coordinates (length rank),
// reduced into [0, factor) (free factors: plain integer)
IntVec project(const AbelianGroup& a, const IntVec& x);
// a preimage in Z^gens of the i-th invariant-factor generator
IntVec invariant_gen_rep(const AbelianGroup& a, std::size_t i);

struct KernelResult {
  AbelianGroup structure;
  // one row per invariant factor of the kernel: its representative written in
  // invariant coordinates of the ambient group A
  IntMat gens_in_A;
};

// Kernel of the homomorphism A -> B given by the integer matrix T
// (rank(B) x rank(A)) acting on invariant coordinates. Throws IllDefinedMap
// if T does not send every relation of A into the relations of B, and
// InfiniteGroup if A or B has free factors.
KernelResult hom_kernel(const AbelianGroup& A, const AbelianGroup& B, const IntMat& T);

// "C2^3 x C4 x Z" pretty form; "1" for the trivial group
std::string factors_to_string(const AbelianGroup& a);

}  // namespace ub0
