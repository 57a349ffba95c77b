#include "ub0/unitgroup.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <utility>

namespace ub0 {

namespace {

// v * b_k, with v in plain coordinates
AlgebraElement left_mul_basis(const NilpotentAlgebra& A, const AlgebraElement& v,
                              std::uint32_t k) {
  const Field& F = *A.field;
  AlgebraElement out(A.dim, 0);
  for (std::uint32_t i = 0; i < A.dim; ++i) {
    if (!v[i]) continue;
    for (const ScEntry& e : A.at(i, k)) out[e.k] = F.cadd(out[e.k], F.cmul(v[i], e.c));
  }
  return out;
}

// b_k * u
AlgebraElement right_mul_basis(const NilpotentAlgebra& A, std::uint32_t k,
                               const AlgebraElement& u) {
  const Field& F = *A.field;
  AlgebraElement out(A.dim, 0);
  for (std::uint32_t j = 0; j < A.dim; ++j) {
    if (!u[j]) continue;
    for (const ScEntry& e : A.at(k, j)) out[e.k] = F.cadd(out[e.k], F.cmul(u[j], e.c));
  }
  return out;
}

bool bits_zero(const std::uint64_t* w, std::uint32_t words) {
  for (std::uint32_t t = 0; t < words; ++t)
    if (w[t]) return false;
  return true;
}

// out bit r = parity(row_r(M) & w); XOR-accumulating word products preserves
// the total bit-count parity
void bit_matvec(const std::uint64_t* M, std::uint32_t rows, std::uint32_t words,
                const std::uint64_t* w, std::uint64_t* out) {
  std::fill(out, out + words, 0);
  for (std::uint32_t r = 0; r < rows; ++r) {
    const std::uint64_t* row = M + static_cast<std::size_t>(r) * words;
    std::uint64_t acc = 0;
    for (std::uint32_t t = 0; t < words; ++t) acc ^= row[t] & w[t];
    if (__builtin_popcountll(acc) & 1) out[r >> 6] |= std::uint64_t(1) << (r & 63);
  }
}

Word to_word(const std::vector<std::uint32_t>& e) {
  Word w;
  for (std::uint32_t g = 0; g < e.size(); ++g)
    if (e[g]) w.push_back(Letter{g, e[g]});
  return w;
}

}  // namespace

// All bit-packed state lives over the prime-field restriction: coordinate
// r = k*n + l is the l-th field digit of the plain coordinate k, so a unit
// 1+u is one N-bit row and the per-generator multiplication maps are N x N
// bit matrices.
struct UnitEngine::Packed {
  std::uint32_t words = 0;
  std::vector<std::uint64_t> tinv;            // N rows: adapted-digit functionals
  std::vector<std::uint64_t> u_bits, v_bits;  // N rows each
  std::vector<std::uint64_t> lv, ru;          // N matrices of N rows each
};

UnitEngine::UnitEngine(const NilpotentAlgebra& A) : UnitEngine(A, power_filtration(A)) {}

UnitEngine::UnitEngine(const NilpotentAlgebra& A, Filtration filt)
    : A_(A), filt_(std::move(filt)) {
  init();
}

void UnitEngine::init() {
  const Field& F = *A_.field;
  p_ = F.p();
  n_ = F.n();
  d_ = A_.dim;
  const std::uint64_t N64 = static_cast<std::uint64_t>(n_) * d_;
  if (N64 > kUnitGenGuard)
    fail(ErrKind::GeneratorGuardExceeded,
         "unit group needs " + std::to_string(N64) + " generators (field degree " +
             std::to_string(n_) + " x dimension " + std::to_string(d_) + "), guard is " +
             std::to_string(kUnitGenGuard));
  N_ = static_cast<std::uint32_t>(N64);
  L_ = static_cast<std::uint32_t>(filt_.levels.size());

  xpow_.resize(n_);
  pj_.resize(n_ + 1);
  pj_[0] = 1;
  for (std::uint32_t j = 0; j < n_; ++j) {
    xpow_[j] = pj_[j];  // packed code of x^j in the power basis
    pj_[j + 1] = pj_[j] * p_;
  }

  level_of_.resize(N_);
  gen_u_.resize(N_);
  gen_v_.resize(N_);
  for (std::uint32_t a = 0; a < d_; ++a) {
    for (std::uint32_t j = 0; j < n_; ++j) {
      const std::uint32_t g = a * n_ + j;
      level_of_[g] = filt_.level_of[a];
      gen_u_[g] = alg_scale(A_, xpow_[j], filt_.adapted[a]);
      gen_v_[g] = unit_inverse(A_, gen_u_[g]);
    }
  }
  block_start_.resize(L_ + 1);
  for (std::uint32_t l = 0; l < L_; ++l) block_start_[l] = filt_.level_start[l] * n_;
  block_start_[L_] = N_;

  if (p_ != 2) return;

  auto pk = std::make_shared<Packed>();
  const std::uint32_t W = pk->words = (N_ + 63) / 64;
  auto set_bit = [](std::uint64_t* row, std::uint32_t s) {
    row[s >> 6] |= std::uint64_t(1) << (s & 63);
  };
  auto pack_elem = [&](const AlgebraElement& x, std::uint64_t* row) {
    for (std::uint32_t k = 0; k < d_; ++k) {
      std::uint64_t c = x[k];
      while (c) {
        const std::uint32_t l = static_cast<std::uint32_t>(__builtin_ctzll(c));
        c &= c - 1;
        set_bit(row, k * n_ + l);
      }
    }
  };

  pk->tinv.assign(static_cast<std::size_t>(N_) * W, 0);
  for (std::uint32_t a = 0; a < d_; ++a) {
    const auto& trow = filt_.to_adapted_rows[a];
    for (std::uint32_t k = 0; k < d_; ++k) {
      if (!trow[k]) continue;
      for (std::uint32_t l = 0; l < n_; ++l) {
        const std::uint64_t c = F.cmul(trow[k], xpow_[l]);
        for (std::uint32_t j = 0; j < n_; ++j)
          if ((c >> j) & 1)
            set_bit(pk->tinv.data() + static_cast<std::size_t>(a * n_ + j) * W, k * n_ + l);
      }
    }
  }

  pk->u_bits.assign(static_cast<std::size_t>(N_) * W, 0);
  pk->v_bits.assign(static_cast<std::size_t>(N_) * W, 0);
  for (std::uint32_t g = 0; g < N_; ++g) {
    pack_elem(gen_u_[g], pk->u_bits.data() + static_cast<std::size_t>(g) * W);
    pack_elem(gen_v_[g], pk->v_bits.data() + static_cast<std::size_t>(g) * W);
  }

  // column s = k*n + l of lv[g] is v_g * (x^l b_k); of ru[g] is (x^l b_k) * u_g
  pk->lv.assign(static_cast<std::size_t>(N_) * N_ * W, 0);
  pk->ru.assign(static_cast<std::size_t>(N_) * N_ * W, 0);
  AlgebraElement col(d_);
  for (std::uint32_t g = 0; g < N_; ++g) {
    std::uint64_t* lv_g = pk->lv.data() + static_cast<std::size_t>(g) * N_ * W;
    std::uint64_t* ru_g = pk->ru.data() + static_cast<std::size_t>(g) * N_ * W;
    for (std::uint32_t k = 0; k < d_; ++k) {
      const AlgebraElement vb = left_mul_basis(A_, gen_v_[g], k);
      const AlgebraElement bu = right_mul_basis(A_, k, gen_u_[g]);
      for (std::uint32_t l = 0; l < n_; ++l) {
        const std::uint32_t s = k * n_ + l;
        auto scatter = [&](const AlgebraElement& base, std::uint64_t* M) {
          for (std::uint32_t t = 0; t < d_; ++t) {
            std::uint64_t c = base[t] ? F.cmul(xpow_[l], base[t]) : 0;
            while (c) {
              const std::uint32_t bit = static_cast<std::uint32_t>(__builtin_ctzll(c));
              c &= c - 1;
              set_bit(M + static_cast<std::size_t>(t * n_ + bit) * W, s);
            }
          }
        };
        scatter(vb, lv_g);
        scatter(bu, ru_g);
      }
    }
  }
  pk_ = std::move(pk);
}

std::vector<std::uint32_t> UnitEngine::sift_bits(std::vector<std::uint64_t> w) const {
  const Packed& pk = *pk_;
  const std::uint32_t W = pk.words;
  std::vector<std::uint32_t> e(N_, 0);
  std::vector<std::uint64_t> prod(W);
  for (std::uint32_t l = 0; l < L_; ++l) {
    if (bits_zero(w.data(), W)) break;
    const std::uint32_t g0 = block_start_[l], g1 = block_start_[l + 1];
    bool any = false;
    for (std::uint32_t g = g0; g < g1; ++g) {
      const std::uint64_t* row = pk.tinv.data() + static_cast<std::size_t>(g) * W;
      std::uint64_t acc = 0;
      for (std::uint32_t t = 0; t < W; ++t) acc ^= row[t] & w[t];
      if (__builtin_popcountll(acc) & 1) {
        e[g] = 1;
        any = true;
      }
    }
    if (!any) continue;
    for (std::uint32_t g = g0; g < g1; ++g) {
      if (!e[g]) continue;
      bit_matvec(pk.lv.data() + static_cast<std::size_t>(g) * N_ * W, N_, W, w.data(),
                 prod.data());
      const std::uint64_t* v = pk.v_bits.data() + static_cast<std::size_t>(g) * W;
      for (std::uint32_t t = 0; t < W; ++t) w[t] ^= v[t] ^ prod[t];
    }
  }
  if (!bits_zero(w.data(), W))
    fail(ErrKind::InternalInconsistency, "unit sift left a nonzero remainder");
  return e;
}

std::vector<std::uint32_t> UnitEngine::sift_generic(const AlgebraElement& u) const {
  const Field& F = *A_.field;
  std::vector<std::uint32_t> e(N_, 0);
  AlgebraElement w = u;
  for (std::uint32_t l = 0; l < L_; ++l) {
    if (alg_is_zero(w)) break;
    const std::uint32_t a0 = filt_.level_start[l], a1 = filt_.level_start[l + 1];
    bool any = false;
    for (std::uint32_t a = a0; a < a1; ++a) {
      const auto& trow = filt_.to_adapted_rows[a];
      std::uint64_t c = 0;
      for (std::uint32_t k = 0; k < d_; ++k)
        if (w[k] && trow[k]) c = F.cadd(c, F.cmul(trow[k], w[k]));
      if (!c) continue;
      any = true;
      for (std::uint32_t j = 0; j < n_; ++j) {
        e[a * n_ + j] = static_cast<std::uint32_t>(c % p_);
        c /= p_;
      }
    }
    if (!any) continue;
    for (std::uint32_t g = a0 * n_; g < a1 * n_; ++g)
      for (std::uint32_t rep = e[g]; rep > 0; --rep) w = unit_mul(A_, gen_v_[g], w);
  }
  if (!alg_is_zero(w))
    fail(ErrKind::InternalInconsistency, "unit sift left a nonzero remainder");
  return e;
}

std::vector<std::uint32_t> UnitEngine::sift(const AlgebraElement& u) const {
  if (u.size() != d_)
    fail(ErrKind::BadArgument, "element has " + std::to_string(u.size()) +
                                   " coordinates, algebra dimension is " + std::to_string(d_));
  if (!pk_) return sift_generic(u);
  const std::uint32_t W = pk_->words;
  std::vector<std::uint64_t> w(W, 0);
  for (std::uint32_t k = 0; k < d_; ++k) {
    std::uint64_t c = u[k];
    while (c) {
      const std::uint32_t l = static_cast<std::uint32_t>(__builtin_ctzll(c));
      c &= c - 1;
      const std::uint32_t r = k * n_ + l;
      w[r >> 6] |= std::uint64_t(1) << (r & 63);
    }
  }
  return sift_bits(std::move(w));
}

std::vector<std::uint32_t> UnitEngine::sift_reference(const AlgebraElement& u) const {
  if (u.size() != d_)
    fail(ErrKind::BadArgument, "element has " + std::to_string(u.size()) +
                                   " coordinates, algebra dimension is " + std::to_string(d_));
  return sift_generic(u);
}

AlgebraElement UnitEngine::rebuild(const std::vector<std::uint32_t>& e) const {
  if (e.size() != N_)
    fail(ErrKind::BadArgument, "exponent vector has " + std::to_string(e.size()) +
                                   " entries, engine has " + std::to_string(N_) +
                                   " generators");
  if (pk_) {
    const std::uint32_t W = pk_->words;
    std::vector<std::uint64_t> w(W, 0), prod(W);
    for (std::uint32_t g = 0; g < N_; ++g) {
      if (!(e[g] & 1)) continue;
      bit_matvec(pk_->ru.data() + static_cast<std::size_t>(g) * N_ * W, N_, W, w.data(),
                 prod.data());
      const std::uint64_t* u = pk_->u_bits.data() + static_cast<std::size_t>(g) * W;
      for (std::uint32_t t = 0; t < W; ++t) w[t] ^= u[t] ^ prod[t];
    }
    AlgebraElement x(d_, 0);
    for (std::uint32_t r = 0; r < N_; ++r)
      if ((w[r >> 6] >> (r & 63)) & 1) x[r / n_] |= std::uint64_t(1) << (r % n_);
    return x;
  }
  AlgebraElement w = alg_zero(A_);
  for (std::uint32_t g = 0; g < N_; ++g)
    for (std::uint64_t rep = e[g] % p_; rep > 0; --rep) w = unit_mul(A_, w, gen_u_[g]);
  return w;
}

UnitPcp detail_unit_pcp(const UnitEngine& E, bool parallel) {
  const NilpotentAlgebra& A = E.algebra();
  const std::uint64_t p = E.p();
  const std::int64_t N = E.gens();

  UnitPcp out;
  out.p = p;
  out.N = static_cast<std::uint32_t>(N);
  out.level_of.resize(N);
  for (std::int64_t g = 0; g < N; ++g) out.level_of[g] = E.level_of(static_cast<std::uint32_t>(g));
  out.power_words.resize(N);
  out.comm_words.resize(static_cast<std::size_t>(N) * (N - 1) / 2);

  std::exception_ptr first_error = nullptr;
  std::atomic<bool> bail{false};

  auto guarded = [&](auto&& body) {
    try {
      body();
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(unitpcp_error)
#endif
      {
        if (!first_error) first_error = std::current_exception();
        bail.store(true, std::memory_order_release);
      }
    }
  };

  const UnitEngine::Packed* pk = E.pk_.get();
  const std::uint32_t W = pk ? pk->words : 0;
  auto apply_step = [&](std::uint32_t g, const std::vector<std::uint64_t>& M,
                        const std::vector<std::uint64_t>& add, std::vector<std::uint64_t>& w,
                        std::vector<std::uint64_t>& prod) {
    bit_matvec(M.data() + static_cast<std::size_t>(g) * E.N_ * W, E.N_, W, w.data(),
               prod.data());
    const std::uint64_t* a = add.data() + static_cast<std::size_t>(g) * W;
    for (std::uint32_t t = 0; t < W; ++t) w[t] ^= a[t] ^ prod[t];
  };

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (std::int64_t g = 0; g < N; ++g) {
    guarded([&] {
      if (bail.load(std::memory_order_acquire)) return;
      const std::uint32_t gg = static_cast<std::uint32_t>(g);
      std::vector<std::uint32_t> e;
      if (pk) {
        // (1+u)^2 = 1 + (u # u) where # is the unit-composition u+v+uv
        std::vector<std::uint64_t> w(pk->u_bits.begin() + static_cast<std::size_t>(g) * W,
                                     pk->u_bits.begin() + static_cast<std::size_t>(g + 1) * W);
        std::vector<std::uint64_t> prod(W);
        apply_step(gg, pk->ru, pk->u_bits, w, prod);
        e = E.sift_bits(std::move(w));
      } else {
        AlgebraElement t = E.gen_elem(gg);
        for (std::uint64_t k = 1; k < p; ++k) t = alg_multiply(A, t, E.gen_elem(gg));
        e = E.sift(t);  // (1+u)^p = 1 + u^p in characteristic p
      }
      for (std::uint32_t h = 0; h <= gg; ++h)
        if (e[h])
          fail(ErrKind::InternalInconsistency,
               "power word of generator " + std::to_string(gg + 1) +
                   " touches generator " + std::to_string(h + 1));
      out.power_words[g] = to_word(e);
    });
  }

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (std::int64_t j = 1; j < N; ++j) {
    guarded([&] {
      if (bail.load(std::memory_order_acquire)) return;
      const std::uint32_t jj = static_cast<std::uint32_t>(j);
      std::vector<std::uint64_t> w, prod;
      if (pk) prod.resize(W);
      for (std::uint32_t i = 0; i < jj; ++i) {
        std::vector<std::uint32_t> e;
        if (pk) {
          // [1+u_j, 1+u_i] - 1 composed as v_j # (v_i # (u_j # u_i))
          w.assign(pk->u_bits.begin() + static_cast<std::size_t>(j) * W,
                   pk->u_bits.begin() + static_cast<std::size_t>(j + 1) * W);
          apply_step(i, pk->ru, pk->u_bits, w, prod);
          apply_step(i, pk->lv, pk->v_bits, w, prod);
          apply_step(jj, pk->lv, pk->v_bits, w, prod);
          e = E.sift_bits(std::move(w));
        } else {
          const AlgebraElement t1 = unit_mul(A, E.gen_inv_elem(jj), E.gen_inv_elem(i));
          const AlgebraElement t2 = unit_mul(A, E.gen_elem(jj), E.gen_elem(i));
          e = E.sift(unit_mul(A, t1, t2));
        }
        for (std::uint32_t h = 0; h <= jj; ++h)
          if (e[h])
            fail(ErrKind::InternalInconsistency,
                 "commutator word of generators " + std::to_string(jj + 1) + "," +
                     std::to_string(i + 1) + " touches generator " + std::to_string(h + 1));
        out.comm_words[PcPresentation::pair_index(jj, i)] = to_word(e);
      }
    });
  }

  if (first_error) std::rethrow_exception(first_error);
  return out;
}

UnitPcp unit_pcp(const UnitEngine& E) { return detail_unit_pcp(E, true); }
UnitPcp unit_pcp_serial(const UnitEngine& E) { return detail_unit_pcp(E, false); }

PcPresentation to_presentation(const UnitPcp& pcp) {
  PcPresentation pres;
  pres.p = pcp.p;
  pres.m = pcp.N;
  pres.power_words = pcp.power_words;
  pres.comm_words = pcp.comm_words;
  return pres;
}

AbelianizationData unit_abelianization(const UnitEngine& E, const UnitPcp& pcp) {
  const std::uint32_t N = pcp.N;
  if (E.gens() != N || E.p() != pcp.p)
    fail(ErrKind::BadArgument, "relation data does not belong to this engine");

  // (1+u)^(p^E) = 1 + u^(p^E) = 1 once p^E >= nil_index, so p^E * e_g is a
  // consequence of the presentation for every g. Seeding those rows first
  // pins a pivot in every column and keeps all entries of the integer
  // reduction below p^E, which the raw relation stream does not guarantee
  Int pE = 1;
  while (pE < E.algebra().nil_index) pE *= static_cast<unsigned long>(pcp.p);

  RelationAccumulator acc(N);
  {
    IntVec row(N, 0);
    for (std::uint32_t g = 0; g < N; ++g) {
      row[g] = pE;
      acc.add(row);
      row[g] = 0;
    }
  }
  for (std::uint32_t g = 0; g < N; ++g) {
    IntVec row(N, 0);
    row[g] = static_cast<unsigned long>(pcp.p);
    for (const Letter& t : pcp.power_words[g])
      row[t.gen] -= static_cast<unsigned long>(t.exp);
    acc.add(std::move(row));
  }
  for (const Word& w : pcp.comm_words) {
    if (w.empty()) continue;
    IntVec row(N, 0);
    for (const Letter& t : w) row[t.gen] += static_cast<unsigned long>(t.exp);
    acc.add(std::move(row));
  }
  AbelianizationData data;
  data.group = cokernel(acc);
  data.projection.reserve(N);
  IntVec x(N, 0);
  for (std::uint32_t g = 0; g < N; ++g) {
    x[g] = 1;
    data.projection.push_back(project(data.group, x));
    x[g] = 0;
  }
  return data;
}

AbelianizationData unit_abelianization(const NilpotentAlgebra& A) {
  UnitEngine E(A);
  return unit_abelianization(E, unit_pcp(E));
}

IntVec project_unit(const UnitEngine& E, const AbelianizationData& ab,
                    const AlgebraElement& u) {
  const auto e = E.sift(u);
  IntVec x(E.gens(), 0);
  for (std::uint32_t g = 0; g < E.gens(); ++g) x[g] = static_cast<unsigned long>(e[g]);
  return project(ab.group, x);
}

IntMat inclusion_ab_map(const UnitEngine& Eq, const AbelianizationData& ab_q,
                        const UnitEngine& El, const AbelianizationData& ab_l,
                        const Embedding& e) {
  if (Eq.algebra().field->desc() != e.src)
    fail(ErrKind::FieldMismatch, "embedding source is not the small engine's field");
  if (El.algebra().field->desc() != e.dst)
    fail(ErrKind::FieldMismatch, "embedding target is not the large engine's field");
  if (Eq.algebra().dim != El.algebra().dim)
    fail(ErrKind::FieldMismatch, "the two engines live on algebras of different dimension");

  const Field& dstF = *El.algebra().field;
  const std::uint32_t Nq = Eq.gens(), dim = Eq.algebra().dim;
  const std::size_t rq = ab_q.group.rank(), rl = ab_l.group.rank();

  // the induced map is linear on exponent vectors, so the images of the
  // source generator classes determine everything
  IntMat gen_image(Nq);
  AlgebraElement v(dim);
  for (std::uint32_t g = 0; g < Nq; ++g) {
    const AlgebraElement& u = Eq.gen_elem(g);
    for (std::uint32_t k = 0; k < dim; ++k) v[k] = embed_code(e, dstF, u[k]);
    gen_image[g] = project_unit(El, ab_l, v);
  }

  IntMat T(rl, IntVec(rq, 0));
  for (std::size_t i = 0; i < rq; ++i) {
    const IntVec rep = invariant_gen_rep(ab_q.group, i);
    for (std::size_t j = 0; j < rl; ++j) {
      Int s = 0;
      for (std::uint32_t g = 0; g < Nq; ++g)
        if (rep[g] != 0 && gen_image[g][j] != 0) s += rep[g] * gen_image[g][j];
      const Int& f = ab_l.group.factors[j];
      if (f != 0) mpz_mod(s.get_mpz_t(), s.get_mpz_t(), f.get_mpz_t());
      T[j][i] = s;
    }
  }
  return T;
}

}  // namespace ub0
