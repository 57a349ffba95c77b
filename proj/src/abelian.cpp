#include "ub0/abelian.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>

namespace ub0 {

IntMat identity_mat(std::size_t k) {
  IntMat m(k, IntVec(k, 0));
  for (std::size_t i = 0; i < k; ++i) m[i][i] = 1;
  return m;
}

IntMat mat_mul(const IntMat& a, const IntMat& b) {
  std::size_t r = a.size();
  std::size_t inner = r ? a[0].size() : 0;
  std::size_t c = b.empty() ? 0 : b[0].size();
  if (inner != b.size()) fail(ErrKind::BadArgument, "mat_mul: shape mismatch");
  IntMat out(r, IntVec(c, 0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < c; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

IntVec mat_vec(const IntMat& a, const IntVec& x) {
  IntVec out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != x.size()) fail(ErrKind::BadArgument, "mat_vec: shape mismatch");
    for (std::size_t j = 0; j < x.size(); ++j)
      if (a[i][j] != 0 && x[j] != 0) out[i] += a[i][j] * x[j];
  }
  return out;
}

Int det(IntMat m) {
  std::size_t n = m.size();
  for (auto& row : m)
    if (row.size() != n) fail(ErrKind::BadArgument, "det: matrix not square");
  if (n == 0) return 1;
  // Bareiss fraction-free elimination
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t piv = k + 1;
      while (piv < n && m[piv][k] == 0) ++piv;
      if (piv == n) return 0;
      std::swap(m[k], m[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

namespace {

// In-place transform bookkeeping for S = U * M * V. Row ops touch U/Uinv,
// column ops touch V/Vinv, so both stay exact inverses of each other.
struct SnfWork {
  IntMat A, U, Uinv, V, Vinv;
  std::size_t r, c;

  explicit SnfWork(const IntMat& m) : A(m), r(m.size()), c(m.empty() ? 0 : m[0].size()) {
    for (const auto& row : A)
      if (row.size() != c) fail(ErrKind::BadArgument, "smith_normal_form: ragged matrix");
    U = identity_mat(r);
    Uinv = identity_mat(r);
    V = identity_mat(c);
    Vinv = identity_mat(c);
  }

  void swap_rows(std::size_t i, std::size_t k) {
    if (i == k) return;
    std::swap(A[i], A[k]);
    std::swap(U[i], U[k]);
    for (std::size_t t = 0; t < r; ++t) std::swap(Uinv[t][i], Uinv[t][k]);
  }
  void swap_cols(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t t = 0; t < r; ++t) std::swap(A[t][i], A[t][k]);
    for (std::size_t t = 0; t < c; ++t) std::swap(V[t][i], V[t][k]);
    std::swap(Vinv[i], Vinv[k]);
  }
  void negate_row(std::size_t i) {
    for (auto& x : A[i]) x = -x;
    for (auto& x : U[i]) x = -x;
    for (std::size_t t = 0; t < r; ++t) Uinv[t][i] = -Uinv[t][i];
  }
  // row_i -= q * row_k
  void row_sub(std::size_t i, std::size_t k, const Int& q) {
    if (q == 0) return;
    for (std::size_t j = 0; j < c; ++j) A[i][j] -= q * A[k][j];
    for (std::size_t j = 0; j < r; ++j) U[i][j] -= q * U[k][j];
    for (std::size_t j = 0; j < r; ++j) Uinv[j][k] += q * Uinv[j][i];
  }
  // col_i -= q * col_k
  void col_sub(std::size_t i, std::size_t k, const Int& q) {
    if (q == 0) return;
    for (std::size_t t = 0; t < r; ++t) A[t][i] -= q * A[t][k];
    for (std::size_t t = 0; t < c; ++t) V[t][i] -= q * V[t][k];
    for (std::size_t j = 0; j < c; ++j) Vinv[k][j] += q * Vinv[i][j];
  }

  // smallest |entry| != 0 in the submatrix starting at (t,t); ties by (row, col)
  bool find_pivot(std::size_t t, std::size_t& pi, std::size_t& pj) const {
    bool found = false;
    Int best;
    for (std::size_t i = t; i < r; ++i)
      for (std::size_t j = t; j < c; ++j) {
        if (A[i][j] == 0) continue;
        Int a = abs(A[i][j]);
        if (!found || a < best) {
          found = true;
          best = a;
          pi = i;
          pj = j;
        }
      }
    return found;
  }
};

}  // namespace

SmithResult smith_normal_form(const IntMat& m) {
  SnfWork w(m);
  std::size_t lim = std::min(w.r, w.c);

  for (std::size_t t = 0; t < lim; ++t) {
    std::size_t pi = 0, pj = 0;
    if (!w.find_pivot(t, pi, pj)) break;  // submatrix is zero; done
    for (;;) {
      w.swap_rows(t, pi);
      w.swap_cols(t, pj);
      if (w.A[t][t] < 0) w.negate_row(t);

      bool clean = true;
      for (std::size_t i = t + 1; i < w.r; ++i) {
        if (w.A[i][t] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), w.A[i][t].get_mpz_t(), w.A[t][t].get_mpz_t());
        w.row_sub(i, t, q);
        if (w.A[i][t] != 0) clean = false;  // remainder is smaller than the pivot
      }
      for (std::size_t j = t + 1; j < w.c; ++j) {
        if (w.A[t][j] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), w.A[t][j].get_mpz_t(), w.A[t][t].get_mpz_t());
        w.col_sub(j, t, q);
        if (w.A[t][j] != 0) clean = false;
      }
      if (!clean) {
        if (!w.find_pivot(t, pi, pj)) fail(ErrKind::InternalInconsistency, "snf: pivot vanished");
        continue;
      }
      // pivot divides everything that remains, or gets another pass
      bool divides = true;
      for (std::size_t i = t + 1; i < w.r && divides; ++i)
        for (std::size_t j = t + 1; j < w.c; ++j)
          if (w.A[i][j] % w.A[t][t] != 0) {
            w.row_sub(t, i, Int(-1));  // fold row i into row t, then reduce again
            divides = false;
            break;
          }
      if (divides) break;
      if (!w.find_pivot(t, pi, pj)) fail(ErrKind::InternalInconsistency, "snf: pivot vanished");
    }
  }
  return SmithResult{std::move(w.A), std::move(w.U), std::move(w.Uinv), std::move(w.V),
                     std::move(w.Vinv)};
}

void RelationAccumulator::add(IntVec row) {
  if (row.size() != gens_) fail(ErrKind::BadArgument, "relation width mismatch");
  for (;;) {
    std::size_t lead = 0;
    while (lead < gens_ && row[lead] == 0) ++lead;
    if (lead == gens_) return;  // reduced to zero
    if (row[lead] < 0)
      for (auto& x : row) x = -x;
    auto it = pivots_.find(lead);
    if (it == pivots_.end()) {
      reduce_tail(pivots_.emplace(lead, std::move(row)).first);
      return;
    }
    IntVec& p = it->second;
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), row[lead].get_mpz_t(), p[lead].get_mpz_t());
    if (q != 0)
      for (std::size_t j = lead; j < gens_; ++j)
        if (p[j] != 0) row[j] -= q * p[j];
    if (row[lead] != 0) {
      std::swap(row, p);  // remainder becomes the new, smaller pivot
      reduce_tail(it);
    }
  }
}

// Keep stored rows reduced against the pivots to their right. Without this,
// tail entries can square in bit length from one column to the next and the
// working set explodes; with it, every entry stays below the largest pivot
// value whenever all columns carry a pivot (which callers arrange by seeding
// e.g. exponent-bound rows).
void RelationAccumulator::reduce_tail(std::map<std::size_t, IntVec>::iterator it) {
  IntVec& r = it->second;
  for (auto jt = std::next(it); jt != pivots_.end(); ++jt) {
    const std::size_t c = jt->first;
    if (r[c] == 0) continue;
    const IntVec& p = jt->second;
    if (mpz_cmpabs(r[c].get_mpz_t(), p[c].get_mpz_t()) < 0 && r[c] > 0) continue;
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r[c].get_mpz_t(), p[c].get_mpz_t());
    if (q == 0) continue;
    for (std::size_t j = c; j < gens_; ++j)
      if (p[j] != 0) r[j] -= q * p[j];
  }
}

IntMat RelationAccumulator::rows() const {
  IntMat out;
  out.reserve(pivots_.size());
  for (const auto& [lead, row] : pivots_) out.push_back(row);
  return out;
}

AbelianGroup cokernel(const RelationAccumulator& acc) {
  return cokernel(acc.rows(), acc.gens());
}

AbelianGroup cokernel(const IntMat& relations, std::size_t gens) {
  IntMat rel;
  // compress redundant relation lists down to at most `gens` pivot rows
  if (relations.size() > gens) {
    RelationAccumulator acc(gens);
    for (const auto& row : relations) acc.add(row);
    rel = acc.rows();
  } else {
    for (const auto& row : relations) {
      if (row.size() != gens) fail(ErrKind::BadArgument, "relation width mismatch");
      for (const auto& x : row)
        if (x != 0) {
          rel.push_back(row);
          break;
        }
    }
  }

  // generators index the rows of A = rel^T, so U acts on the generator side
  IntMat A(gens, IntVec(rel.size(), 0));
  for (std::size_t i = 0; i < rel.size(); ++i)
    for (std::size_t j = 0; j < gens; ++j) A[j][i] = rel[i][j];

  SmithResult snf = smith_normal_form(A);

  AbelianGroup g;
  g.gens = gens;
  g.U = std::move(snf.U);
  g.Uinv = std::move(snf.Uinv);
  std::size_t diag = std::min(gens, rel.size());
  for (std::size_t i = 0; i < gens; ++i) {
    Int d = (i < diag) ? snf.S[i][i] : Int(0);
    if (d == 1) continue;
    g.kept.push_back(i);
    g.factors.push_back(d);
  }
  return g;
}

Int order(const AbelianGroup& a) {
  Int n = 1;
  for (const auto& f : a.factors) {
    if (f == 0) fail(ErrKind::InfiniteGroup, "order of a group with free factors");
    n *= f;
  }
  return n;
}

Int exponent(const AbelianGroup& a) {
  if (a.is_trivial()) return 1;
  for (const auto& f : a.factors)
    if (f == 0) fail(ErrKind::InfiniteGroup, "exponent of a group with free factors");
  return a.factors.back();  // divisibility chain: the last factor is the exponent
}

Int m_torsion_order(const AbelianGroup& a, const Int& m) {
  if (m <= 0) fail(ErrKind::BadArgument, "m_torsion_order: m must be positive");
  Int n = 1;
  for (const auto& f : a.factors) {
    if (f == 0) continue;  // free factor contributes no m-torsion
    n *= gcd(m, f);
  }
  return n;
}

bool is_isomorphic(const AbelianGroup& a, const AbelianGroup& b) {
  // invariant-factor lists are canonical, so equality decides isomorphism
  return a.factors == b.factors;
}

IntVec project(const AbelianGroup& a, const IntVec& x) {
  if (x.size() != a.gens) fail(ErrKind::BadArgument, "project: exponent vector width mismatch");
  IntVec out(a.rank(), 0);
  for (std::size_t i = 0; i < a.rank(); ++i) {
    const IntVec& urow = a.U[a.kept[i]];
    Int y = 0;
    for (std::size_t j = 0; j < a.gens; ++j)
      if (urow[j] != 0 && x[j] != 0) y += urow[j] * x[j];
    if (a.factors[i] != 0)
      mpz_fdiv_r(y.get_mpz_t(), y.get_mpz_t(), a.factors[i].get_mpz_t());
    out[i] = y;
  }
  return out;
}

IntVec invariant_gen_rep(const AbelianGroup& a, std::size_t i) {
  if (i >= a.rank()) fail(ErrKind::BadArgument, "invariant_gen_rep: index out of range");
  IntVec out(a.gens, 0);
  for (std::size_t j = 0; j < a.gens; ++j) out[j] = a.Uinv[j][a.kept[i]];
  return out;
}

KernelResult hom_kernel(const AbelianGroup& A, const AbelianGroup& B, const IntMat& T) {
  std::size_t rA = A.rank(), rB = B.rank();
  if (T.size() != rB) fail(ErrKind::BadArgument, "hom_kernel: T row count != rank(B)");
  for (const auto& row : T)
    if (row.size() != rA) fail(ErrKind::BadArgument, "hom_kernel: T column count != rank(A)");
  for (const auto& f : A.factors)
    if (f == 0) fail(ErrKind::InfiniteGroup, "hom_kernel: domain has free factors");
  for (const auto& f : B.factors)
    if (f == 0) fail(ErrKind::InfiniteGroup, "hom_kernel: codomain has free factors");

  // well-definedness: the image of a_i * e_i must vanish in B
  for (std::size_t i = 0; i < rA; ++i)
    for (std::size_t j = 0; j < rB; ++j)
      if ((A.factors[i] * T[j][i]) % B.factors[j] != 0)
        fail(ErrKind::IllDefinedMap,
             "hom_kernel: generator " + std::to_string(i) + " violates the order relation");

  // integer kernel of [T | diag(b)]; its x-parts span the kernel subgroup
  IntMat M(rB, IntVec(rA + rB, 0));
  for (std::size_t j = 0; j < rB; ++j) {
    for (std::size_t i = 0; i < rA; ++i) M[j][i] = T[j][i];
    M[j][rA + j] = B.factors[j];
  }
  SmithResult s1 = smith_normal_form(M);
  std::size_t rank1 = 0;
  for (std::size_t i = 0; i < std::min(rB, rA + rB); ++i)
    if (s1.S[i][i] != 0) ++rank1;
  std::size_t t = rA + rB - rank1;  // = rA whenever B is finite
  IntMat L(rA, IntVec(t, 0));
  for (std::size_t k = 0; k < t; ++k)
    for (std::size_t i = 0; i < rA; ++i) L[i][k] = s1.V[i][rank1 + k];

  // relations among the kernel generators: c with L*c in diag(a) Z^rA
  IntMat M2(rA, IntVec(t + rA, 0));
  for (std::size_t i = 0; i < rA; ++i) {
    for (std::size_t k = 0; k < t; ++k) M2[i][k] = L[i][k];
    M2[i][t + i] = A.factors[i];
  }
  SmithResult s2 = smith_normal_form(M2);
  std::size_t rank2 = 0;
  for (std::size_t i = 0; i < std::min(rA, t + rA); ++i)
    if (s2.S[i][i] != 0) ++rank2;
  IntMat rel;
  for (std::size_t k = rank2; k < t + rA; ++k) {
    IntVec row(t);
    for (std::size_t i = 0; i < t; ++i) row[i] = s2.V[i][k];
    rel.push_back(std::move(row));
  }

  KernelResult res;
  res.structure = cokernel(rel, t);
  for (std::size_t s = 0; s < res.structure.rank(); ++s) {
    IntVec c = invariant_gen_rep(res.structure, s);
    IntVec xa(rA, 0);
    for (std::size_t i = 0; i < rA; ++i) {
      for (std::size_t k = 0; k < t; ++k)
        if (L[i][k] != 0 && c[k] != 0) xa[i] += L[i][k] * c[k];
      mpz_fdiv_r(xa[i].get_mpz_t(), xa[i].get_mpz_t(), A.factors[i].get_mpz_t());
    }
    res.gens_in_A.push_back(std::move(xa));
  }
  return res;
}

std::string factors_to_string(const AbelianGroup& a) {
  if (a.is_trivial()) return "1";
  std::ostringstream out;
  std::size_t i = 0;
  bool first = true;
  while (i < a.factors.size()) {
    std::size_t j = i;
    while (j < a.factors.size() && a.factors[j] == a.factors[i]) ++j;
    if (!first) out << " x ";
    first = false;
    if (a.factors[i] == 0)
      out << "Z";
    else
      out << "C" << a.factors[i].get_str();
    if (j - i > 1) out << "^" << (j - i);
    i = j;
  }
  return out.str();
}

}  // namespace ub0
