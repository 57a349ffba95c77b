#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "ub0/errors.hpp"

namespace ub0 {

struct FieldDesc {
  std::uint64_t p = 0;
  std::uint32_t n = 0;
  // monic irreducible modulus, constant term first, length n+1; the
  // lexicographically smallest one (coefficients compared low-degree-first)
  std::vector<std::uint64_t> f;

  bool operator==(const FieldDesc&) const = default;
};

struct FieldElement {
  std::vector<std::uint32_t> coords;  // length n, entries in [0, p)
  bool operator==(const FieldElement&) const = default;
};

// F_{p^n} arithmetic. Elements travel either as FieldElement (power-basis
// coordinate vectors) or as packed codes c = sum coords[i] * p^i < q, which is
// what the algebra layer stores. Small fields (q <= 256) get full add/mul
// tables; larger ones fall back to polynomial arithmetic per operation.
class Field {
 public:
  Field(std::uint64_t p, std::uint32_t n);  // NotPrime, DegreeOutOfRange

  const FieldDesc& desc() const { return d_; }
  std::uint64_t p() const { return d_.p; }
  std::uint32_t n() const { return d_.n; }
  std::uint64_t q() const { return q_; }

  FieldElement zero() const;
  FieldElement one() const;
  FieldElement gen() const;  // the class of x (= 0 when n == 1, since f = x)
  FieldElement from_int(std::uint64_t c) const;

  FieldElement add(const FieldElement& a, const FieldElement& b) const;
  FieldElement sub(const FieldElement& a, const FieldElement& b) const;
  FieldElement neg(const FieldElement& a) const;
  FieldElement mul(const FieldElement& a, const FieldElement& b) const;
  FieldElement inv(const FieldElement& a) const;  // DivisionByZero
  FieldElement pow(const FieldElement& a, std::uint64_t e) const;
  FieldElement frobenius(const FieldElement& a) const;  // a^p
  bool is_zero(const FieldElement& a) const;

  // packed-code interface
  std::uint64_t code(const FieldElement& a) const;
  FieldElement decode(std::uint64_t c) const;
  std::uint64_t cadd(std::uint64_t a, std::uint64_t b) const {
    if (d_.p == 2) return a ^ b;
    if (tabled_) return add_tab_[a * q_ + b];
    return cadd_slow(a, b);
  }
  std::uint64_t cmul(std::uint64_t a, std::uint64_t b) const {
    if (tabled_) return mul_tab_[a * q_ + b];
    return cmul_slow(a, b);
  }
  std::uint64_t cneg(std::uint64_t a) const;
  std::uint64_t csub(std::uint64_t a, std::uint64_t b) const { return cadd(a, cneg(b)); }
  std::uint64_t cinv(std::uint64_t a) const;  // DivisionByZero
  std::uint64_t cpow(std::uint64_t a, std::uint64_t e) const;
  std::uint64_t cfrob(std::uint64_t a) const { return cpow(a, d_.p); }

  bool tabled() const { return tabled_; }

 private:
  std::uint64_t cadd_slow(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t cmul_slow(std::uint64_t a, std::uint64_t b) const;

  FieldDesc d_;
  std::uint64_t q_ = 0;
  bool tabled_ = false;
  std::vector<std::uint32_t> add_tab_, mul_tab_, neg_tab_, inv_tab_;
};

using FieldPtr = std::shared_ptr<const Field>;
FieldPtr make_field(std::uint64_t p, std::uint32_t n);

struct Embedding {
  FieldDesc src, dst;
  FieldElement image_of_x;                // root of src.f in dst
  std::vector<FieldElement> pow_x;        // image_of_x^0 .. image_of_x^(src.n-1)
  std::vector<std::uint64_t> pow_x_code;  // same, packed
};

// Ring monomorphism F_{p^n} -> F_{p^(n*k)} sending x to the (root_index+1)-th
// root of src.f in dst, under enumeration of dst elements in lexicographic
// coordinate order. root_index 0 is the canonical choice; higher indices give
// the Frobenius-conjugate embeddings (used to test result independence).
Embedding find_embedding(const Field& src, const Field& dst, unsigned root_index = 0);

FieldElement embed(const Embedding& e, const Field& dst, const FieldElement& a);
std::uint64_t embed_code(const Embedding& e, const Field& dst, std::uint64_t c);

// (Z/p^E)[x]/(f) with f the field modulus lifted coefficient-wise: a truncated
// unramified extension, plus the matrix of the Frobenius lift on the power
// basis (Hensel-lifted root of f congruent to x^p mod p).
struct GaloisRing {
  std::uint64_t p = 0;
  std::uint32_t n = 0, E = 0;
  std::uint64_t pE = 0;                              // p^E
  std::vector<std::uint64_t> f_lift;                 // length n+1, constant first
  std::vector<std::vector<std::uint64_t>> frob_matrix;  // [i][j] = coeff of x^i in phi(x^j)
};

GaloisRing make_galois_ring(std::uint64_t p, std::uint32_t n, std::uint32_t E);

// shared helpers (also used by presentation validation)
bool is_prime_u64(std::uint64_t p);  // trial division; requires p < 2^31
// p^n, or nullopt on overflow past 2^62
std::uint64_t checked_pow(std::uint64_t p, std::uint32_t n, const char* what);
// q = p^n with p prime, n >= 1; BadArgument otherwise
std::pair<std::uint64_t, std::uint32_t> split_prime_power(std::uint64_t q);

}  // namespace ub0
