#include "ub0/smallfield.hpp"

#include <algorithm>
#include <string>

namespace ub0 {

namespace {

using U64 = std::uint64_t;
using U128 = unsigned __int128;
using Poly = std::vector<U64>;  // coefficients mod some modulus, constant first

U64 mulmod(U64 a, U64 b, U64 m) { return static_cast<U64>((U128(a) * b) % m); }
U64 submod(U64 a, U64 b, U64 m) { return (a + m - b % m) % m; }

U64 powmod(U64 a, U64 e, U64 m) {
  U64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// reduce a by the monic polynomial f (degree n), all arithmetic mod m
void reduce_by_monic(Poly& a, const Poly& f, U64 m) {
  std::size_t n = f.size() - 1;
  while (a.size() > n) {
    U64 c = a.back();
    std::size_t d = a.size() - 1;
    a.pop_back();
    if (c == 0) continue;
    for (std::size_t i = 0; i < n; ++i)
      a[d - n + i] = submod(a[d - n + i], mulmod(c, f[i], m), m);
  }
  trim(a);
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, U64 m) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + U128(a[i]) * b[j]) % m;
  }
  reduce_by_monic(r, f, m);
  return r;
}

Poly poly_powmod(Poly base, U64 e, const Poly& f, U64 m) {
  Poly r = {1 % m};
  trim(r);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, f, m);
    base = poly_mulmod(base, base, f, m);
    e >>= 1;
  }
  return r;
}

Poly poly_sub(Poly a, const Poly& b, U64 m) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = submod(a[i], b[i], m);
  trim(a);
  return a;
}

// gcd over the prime field F_m (m prime)
Poly poly_gcd(Poly a, Poly b, U64 m) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    // a mod b, with b made effectively monic through leading-coefficient inverses
    U64 lead_inv = powmod(b.back(), m - 2, m);
    while (a.size() >= b.size()) {
      U64 c = mulmod(a.back(), lead_inv, m);
      std::size_t shift = a.size() - b.size();
      if (c != 0)
        for (std::size_t i = 0; i < b.size(); ++i)
          a[shift + i] = submod(a[shift + i], mulmod(c, b[i], m), m);
      a.pop_back();
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return a;
}

std::vector<U64> prime_divisors(std::uint32_t n) {
  std::vector<U64> out;
  for (U64 d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) out.push_back(n);
  return out;
}

// Frobenius-chain irreducibility test for a monic degree-n polynomial over
// F_p: x^(p^n) = x mod f, and gcd(x^(p^(n/l)) - x, f) = 1 for prime l | n.
bool is_irreducible(const Poly& f, U64 p, std::uint32_t n) {
  Poly x = {0, 1};
  reduce_by_monic(x, f, p);  // n >= 2 here, so x stays x
  std::vector<Poly> chain(n + 1);
  chain[0] = x;
  for (std::uint32_t k = 1; k <= n; ++k) chain[k] = poly_powmod(chain[k - 1], p, f, p);
  if (chain[n] != x) return false;
  for (U64 l : prime_divisors(n)) {
    Poly g = poly_gcd(poly_sub(chain[n / l], x, p), f, p);
    if (g.size() != 1) return false;  // nontrivial common factor (or f itself)
  }
  return true;
}

void decode_big_endian(U64 v, U64 p, std::uint32_t n, std::vector<U64>& coords) {
  coords.assign(n, 0);
  for (std::uint32_t i = n; i-- > 0;) {  // coords[0] is the most significant digit
    coords[n - 1 - i] = 0;
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    coords[n - 1 - i] = v % p;
    v /= p;
  }
}

}  // namespace

bool is_prime_u64(std::uint64_t p) {
  if (p < 2) return false;
  for (U64 d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::pair<std::uint64_t, std::uint32_t> split_prime_power(std::uint64_t q) {
  if (q < 2) fail(ErrKind::BadArgument, std::to_string(q) + " is not a prime power");
  U64 p = q;
  for (U64 d = 2; d * d <= q; ++d)
    if (q % d == 0) {
      p = d;
      break;
    }
  std::uint32_t n = 0;
  U64 rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++n;
  }
  if (rest != 1)
    fail(ErrKind::BadArgument, std::to_string(q) + " is not a prime power");
  return {p, n};
}

std::uint64_t checked_pow(std::uint64_t p, std::uint32_t n, const char* what) {
  U64 r = 1;
  const U64 cap = U64(1) << 62;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (r > cap / p)
      fail(ErrKind::DegreeOutOfRange, std::string(what) + " exceeds the 2^62 size cap");
    r *= p;
  }
  return r;
}

Field::Field(std::uint64_t p, std::uint32_t n) {
  if (n < 1 || n > 16)
    fail(ErrKind::DegreeOutOfRange, "extension degree " + std::to_string(n) + " not in [1, 16]");
  if (p >= (U64(1) << 31))
    fail(ErrKind::DegreeOutOfRange, "characteristic " + std::to_string(p) + " exceeds 2^31");
  if (!is_prime_u64(p)) fail(ErrKind::NotPrime, std::to_string(p) + " is not prime");
  d_.p = p;
  d_.n = n;
  q_ = checked_pow(p, n, "field order");

  if (n == 1) {
    d_.f = {0, 1};  // x
  } else {
    // scan candidates in ascending coordinate-lex order (constant term first);
    // the first irreducible wins
    std::vector<U64> coords;
    bool found = false;
    for (U64 v = 0; v < q_ && !found; ++v) {
      decode_big_endian(v, p, n, coords);
      if (coords[0] == 0) continue;  // constant term 0 means x divides f
      Poly f(coords.begin(), coords.end());
      f.push_back(1);
      if (p <= 1024) {
        bool has_root = false;
        for (U64 a = 0; a < p && !has_root; ++a) {
          U64 acc = 0;
          for (std::size_t i = f.size(); i-- > 0;) acc = (mulmod(acc, a, p) + f[i]) % p;
          has_root = (acc == 0);
        }
        if (has_root) continue;
      }
      if (is_irreducible(f, p, n)) {
        d_.f.assign(f.begin(), f.end());
        found = true;
      }
    }
    if (!found) fail(ErrKind::InternalInconsistency, "no irreducible polynomial found");
  }

  if (q_ <= 256) {
    tabled_ = true;
    add_tab_.resize(q_ * q_);
    mul_tab_.resize(q_ * q_);
    neg_tab_.resize(q_);
    inv_tab_.resize(q_, 0);
    for (U64 a = 0; a < q_; ++a) {
      for (U64 b = 0; b < q_; ++b) {
        add_tab_[a * q_ + b] = static_cast<std::uint32_t>(cadd_slow(a, b));
        mul_tab_[a * q_ + b] = static_cast<std::uint32_t>(cmul_slow(a, b));
      }
    }
    // negation and inverses read off the finished add/mul tables
    for (U64 a = 0; a < q_; ++a) {
      U64 nega = 0;
      for (U64 b = 0; b < q_; ++b)
        if (add_tab_[a * q_ + b] == 0) {
          nega = b;
          break;
        }
      neg_tab_[a] = static_cast<std::uint32_t>(nega);
      if (a != 0) {
        for (U64 b = 1; b < q_; ++b)
          if (mul_tab_[a * q_ + b] == 1) {
            inv_tab_[a] = static_cast<std::uint32_t>(b);
            break;
          }
      }
    }
  }
}

FieldElement Field::zero() const { return FieldElement{std::vector<std::uint32_t>(d_.n, 0)}; }

FieldElement Field::one() const {
  FieldElement e = zero();
  e.coords[0] = 1 % static_cast<std::uint32_t>(d_.p);
  return e;
}

FieldElement Field::gen() const {
  FieldElement e = zero();
  if (d_.n >= 2)
    e.coords[1] = 1;
  // n == 1: x = 0 in F_p[x]/(x)
  return e;
}

FieldElement Field::from_int(std::uint64_t c) const {
  FieldElement e = zero();
  e.coords[0] = static_cast<std::uint32_t>(c % d_.p);
  return e;
}

std::uint64_t Field::code(const FieldElement& a) const {
  if (a.coords.size() != d_.n) fail(ErrKind::BadArgument, "field element has wrong width");
  U64 c = 0, pw = 1;
  for (std::uint32_t i = 0; i < d_.n; ++i) {
    if (a.coords[i] >= d_.p) fail(ErrKind::BadArgument, "field element coordinate out of range");
    c += pw * a.coords[i];
    pw *= d_.p;
  }
  return c;
}

FieldElement Field::decode(std::uint64_t c) const {
  FieldElement e = zero();
  for (std::uint32_t i = 0; i < d_.n; ++i) {
    e.coords[i] = static_cast<std::uint32_t>(c % d_.p);
    c /= d_.p;
  }
  return e;
}

FieldElement Field::add(const FieldElement& a, const FieldElement& b) const {
  FieldElement r = zero();
  for (std::uint32_t i = 0; i < d_.n; ++i)
    r.coords[i] = static_cast<std::uint32_t>((U64(a.coords[i]) + b.coords[i]) % d_.p);
  return r;
}

FieldElement Field::neg(const FieldElement& a) const {
  FieldElement r = zero();
  for (std::uint32_t i = 0; i < d_.n; ++i)
    r.coords[i] = static_cast<std::uint32_t>(submod(0, a.coords[i], d_.p));
  return r;
}

FieldElement Field::sub(const FieldElement& a, const FieldElement& b) const {
  return add(a, neg(b));
}

FieldElement Field::mul(const FieldElement& a, const FieldElement& b) const {
  return decode(cmul(code(a), code(b)));
}

FieldElement Field::inv(const FieldElement& a) const { return decode(cinv(code(a))); }

FieldElement Field::pow(const FieldElement& a, std::uint64_t e) const {
  return decode(cpow(code(a), e));
}

FieldElement Field::frobenius(const FieldElement& a) const { return pow(a, d_.p); }

bool Field::is_zero(const FieldElement& a) const {
  return std::all_of(a.coords.begin(), a.coords.end(), [](std::uint32_t c) { return c == 0; });
}

std::uint64_t Field::cadd_slow(std::uint64_t a, std::uint64_t b) const {
  U64 r = 0, pw = 1;
  for (std::uint32_t i = 0; i < d_.n; ++i) {
    r += pw * ((a % d_.p + b % d_.p) % d_.p);
    a /= d_.p;
    b /= d_.p;
    pw *= d_.p;
  }
  return r;
}

std::uint64_t Field::cmul_slow(std::uint64_t a, std::uint64_t b) const {
  Poly pa, pb;
  for (std::uint32_t i = 0; i < d_.n; ++i) {
    pa.push_back(a % d_.p);
    a /= d_.p;
    pb.push_back(b % d_.p);
    b /= d_.p;
  }
  trim(pa);
  trim(pb);
  Poly f(d_.f.begin(), d_.f.end());
  Poly r = poly_mulmod(pa, pb, f, d_.p);
  U64 c = 0, pw = 1;
  for (std::uint32_t i = 0; i < d_.n; ++i) {
    c += pw * (i < r.size() ? r[i] : 0);
    pw *= d_.p;
  }
  return c;
}

std::uint64_t Field::cneg(std::uint64_t a) const {
  if (d_.p == 2) return a;
  if (tabled_) return neg_tab_[a];
  U64 r = 0, pw = 1;
  for (std::uint32_t i = 0; i < d_.n; ++i) {
    r += pw * submod(0, a % d_.p, d_.p);
    a /= d_.p;
    pw *= d_.p;
  }
  return r;
}

std::uint64_t Field::cinv(std::uint64_t a) const {
  if (a == 0) fail(ErrKind::DivisionByZero, "inverse of 0 in F_" + std::to_string(q_));
  if (tabled_) return inv_tab_[a];
  return cpow(a, q_ - 2);
}

std::uint64_t Field::cpow(std::uint64_t a, std::uint64_t e) const {
  U64 r = 1;
  while (e) {
    if (e & 1) r = cmul(r, a);
    a = cmul(a, a);
    e >>= 1;
  }
  return r;
}

FieldPtr make_field(std::uint64_t p, std::uint32_t n) {
  return std::make_shared<Field>(p, n);
}

Embedding find_embedding(const Field& src, const Field& dst, unsigned root_index) {
  if (src.p() != dst.p() || dst.n() % src.n() != 0)
    fail(ErrKind::NotASubfield,
         "F_" + std::to_string(src.q()) + " is not a subfield of F_" + std::to_string(dst.q()));

  // coefficients of src.f as codes of constants in dst
  std::vector<U64> fc(src.desc().f.begin(), src.desc().f.end());

  Embedding e;
  e.src = src.desc();
  e.dst = dst.desc();

  unsigned seen = 0;
  bool found = false;
  std::vector<U64> coords;
  for (U64 v = 0; v < dst.q() && !found; ++v) {
    decode_big_endian(v, dst.p(), dst.n(), coords);
    // candidate code from big-endian coords
    U64 cand = 0, pw = 1;
    for (std::uint32_t i = 0; i < dst.n(); ++i) {
      cand += pw * coords[i];
      pw *= dst.p();
    }
    U64 acc = 0;
    for (std::size_t i = fc.size(); i-- > 0;) acc = dst.cadd(dst.cmul(acc, cand), fc[i]);
    if (acc == 0) {
      if (seen == root_index) {
        e.image_of_x = dst.decode(cand);
        found = true;
      }
      ++seen;
    }
  }
  if (!found) {
    if (seen > 0)
      fail(ErrKind::BadArgument,
           "embedding root index " + std::to_string(root_index) + " out of range (" +
               std::to_string(seen) + " roots)");
    fail(ErrKind::InternalInconsistency, "subfield modulus has no root in the extension");
  }

  U64 img = dst.code(e.image_of_x);
  U64 pw = 1;
  for (std::uint32_t j = 0; j < src.n(); ++j) {
    e.pow_x_code.push_back(pw);
    e.pow_x.push_back(dst.decode(pw));
    pw = dst.cmul(pw, img);
  }
  return e;
}

std::uint64_t embed_code(const Embedding& e, const Field& dst, std::uint64_t c) {
  U64 out = 0;
  for (std::uint32_t j = 0; j < e.src.n; ++j) {
    U64 digit = c % e.src.p;
    c /= e.src.p;
    if (digit) out = dst.cadd(out, dst.cmul(digit, e.pow_x_code[j]));
  }
  return out;
}

FieldElement embed(const Embedding& e, const Field& dst, const FieldElement& a) {
  U64 c = 0, pw = 1;
  for (std::uint32_t i = 0; i < e.src.n; ++i) {
    c += pw * a.coords[i];
    pw *= e.src.p;
  }
  return dst.decode(embed_code(e, dst, c));
}

namespace {

// ring element of (Z/m)[x]/(f): polynomial of degree < n
Poly ring_mul(const Poly& a, const Poly& b, const Poly& f, U64 m) {
  return poly_mulmod(a, b, f, m);
}

Poly eval_scalar_poly(const Poly& coeffs, const Poly& r, const Poly& f, U64 m) {
  Poly acc;
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    acc = ring_mul(acc, r, f, m);
    if (coeffs[i] % m != 0) {
      if (acc.empty()) acc.push_back(0);
      acc[0] = (acc[0] + coeffs[i]) % m;
      trim(acc);
    }
  }
  return acc;
}

Poly ring_inverse(const Poly& u, const Field& field, const Poly& f, U64 m,
                  std::uint32_t precision) {
  // start from the mod-p inverse, then Newton-double the precision
  FieldElement u0 = field.zero();
  for (std::size_t i = 0; i < u.size(); ++i)
    u0.coords[i] = static_cast<std::uint32_t>(u[i] % field.p());
  FieldElement i0 = field.inv(u0);
  Poly inv(i0.coords.begin(), i0.coords.end());
  trim(inv);
  std::uint32_t prec = 1;
  while (prec < precision) {
    // inv <- inv * (2 - u * inv)
    Poly t = ring_mul(u, inv, f, m);
    Poly two = {2 % m};
    trim(two);
    t = poly_sub(two, t, m);
    inv = ring_mul(inv, t, f, m);
    prec *= 2;
  }
  return inv;
}

}  // namespace

GaloisRing make_galois_ring(std::uint64_t p, std::uint32_t n, std::uint32_t E) {
  if (E < 1) fail(ErrKind::BadArgument, "truncation exponent must be at least 1");
  Field field(p, n);

  GaloisRing ring;
  ring.p = p;
  ring.n = n;
  ring.E = E;
  ring.pE = checked_pow(p, E, "ring modulus");
  ring.f_lift.assign(field.desc().f.begin(), field.desc().f.end());

  Poly f(ring.f_lift.begin(), ring.f_lift.end());
  Poly fprime;
  for (std::size_t i = 1; i < f.size(); ++i) fprime.push_back((U128(i) * f[i]) % ring.pE);
  trim(fprime);

  // r starts as x^p in the residue field, then Hensel-climbs to a root of f
  // mod p^E (f separablemod p, so f'(r) stays a unit)
  FieldElement xq = field.frobenius(field.gen());
  Poly r(xq.coords.begin(), xq.coords.end());
  trim(r);

  std::uint32_t k = 1;
  while (k < E) {
    std::uint32_t k2 = std::min(2 * k, E);
    U64 mk = checked_pow(p, k2, "ring modulus");
    Poly u = eval_scalar_poly(fprime, r, f, mk);
    Poly uinv = ring_inverse(u, field, f, mk, k2);
    Poly fr = eval_scalar_poly(f, r, f, mk);
    Poly delta = ring_mul(fr, uinv, f, mk);
    // r <- r - delta mod p^(k2)
    r = poly_sub(r, delta, mk);
    k = k2;
  }

  // cross-checks: r is a root mod p^E and reduces to x^p mod p
  Poly residue = eval_scalar_poly(f, r, f, ring.pE);
  if (!residue.empty())
    fail(ErrKind::InternalInconsistency, "Frobenius lift is not a root of the lifted modulus");
  for (std::uint32_t i = 0; i < n; ++i) {
    U64 ri = i < r.size() ? r[i] % p : 0;
    if (ri != xq.coords[i])
      fail(ErrKind::InternalInconsistency, "Frobenius lift does not reduce to x^p mod p");
  }

  ring.frob_matrix.assign(n, std::vector<U64>(n, 0));
  Poly pw = {1};
  for (std::uint32_t j = 0; j < n; ++j) {
    for (std::uint32_t i = 0; i < n; ++i) ring.frob_matrix[i][j] = i < pw.size() ? pw[i] : 0;
    pw = ring_mul(pw, r, f, ring.pE);
  }
  return ring;
}

}  // namespace ub0
