#include <random>
#include <vector>

#include "doctest.h"
#include "ub0/smallfield.hpp"

using namespace ub0;

namespace {

uint64_t rand_below(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

// oracle: a monic quadratic over F_p is irreducible iff it has no root
bool quadratic_has_root(uint64_t c0, uint64_t c1, uint64_t p) {
  for (uint64_t a = 0; a < p; ++a)
    if ((a * a + c1 * a + c0) % p == 0) return true;
  return false;
}

std::vector<std::vector<uint64_t>> mat_mul_mod(const std::vector<std::vector<uint64_t>>& a,
                                               const std::vector<std::vector<uint64_t>>& b,
                                               uint64_t m) {
  size_t n = a.size();
  std::vector<std::vector<uint64_t>> r(n, std::vector<uint64_t>(n, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k)
      for (size_t j = 0; j < n; ++j) r[i][j] = (r[i][j] + a[i][k] * b[k][j]) % m;
  return r;
}

}  // namespace

TEST_CASE("make_field: lexicographically smallest irreducible modulus") {
  CHECK(make_field(2, 1)->desc().f == std::vector<uint64_t>{0, 1});

  // oracle for the quadratics: first rootless monic quadratic in lex order
  for (uint64_t p : {2ull, 3ull, 5ull}) {
    std::vector<uint64_t> expect;
    for (uint64_t c0 = 0; c0 < p && expect.empty(); ++c0)
      for (uint64_t c1 = 0; c1 < p; ++c1)
        if (!quadratic_has_root(c0, c1, p)) {
          expect = {c0, c1, 1};
          break;
        }
    CHECK(make_field(p, 2)->desc().f == expect);
  }
  CHECK(make_field(2, 2)->desc().f == std::vector<uint64_t>{1, 1, 1});  // x^2+x+1
  CHECK(make_field(3, 2)->desc().f == std::vector<uint64_t>{1, 0, 1});  // x^2+1

  // determinism
  CHECK(make_field(2, 5)->desc().f == make_field(2, 5)->desc().f);

  CHECK_THROWS_WITH_AS(static_cast<void>(make_field(6, 1)), doctest::Contains("NotPrime"), Error);
  CHECK_THROWS_WITH_AS(static_cast<void>(make_field(1, 1)), doctest::Contains("NotPrime"), Error);
  CHECK_THROWS_WITH_AS(static_cast<void>(make_field(2, 0)),
                       doctest::Contains("DegreeOutOfRange"), Error);
  CHECK_THROWS_WITH_AS(static_cast<void>(make_field(2, 17)),
                       doctest::Contains("DegreeOutOfRange"), Error);
}

TEST_CASE("field arithmetic in F_4 and F_9") {
  FieldPtr f4 = make_field(2, 2);
  FieldElement x = f4->gen();
  FieldElement xp1 = f4->add(x, f4->one());
  CHECK(f4->mul(x, x) == xp1);           // x^2 = x + 1
  CHECK(f4->inv(x) == xp1);              // x * (x+1) = 1
  CHECK(f4->frobenius(x) == xp1);        // x^2
  CHECK(f4->mul(x, f4->one()) == x);
  CHECK_THROWS_WITH_AS(static_cast<void>(f4->inv(f4->zero())),
                       doctest::Contains("DivisionByZero"), Error);

  FieldPtr f2 = make_field(2, 1);
  CHECK(f2->frobenius(f2->one()) == f2->one());

  FieldPtr f9 = make_field(3, 2);
  FieldElement y = f9->gen();
  FieldElement two_y = f9->add(y, y);
  CHECK(f9->frobenius(y) == two_y);  // x^3 = x * x^2 = -x

  // every element: mul by one is identity; code/decode roundtrip
  for (uint64_t c = 0; c < f9->q(); ++c) {
    FieldElement a = f9->decode(c);
    CHECK(f9->code(a) == c);
    CHECK(f9->mul(a, f9->one()) == a);
  }
}

TEST_CASE("frobenius is a ring automorphism of order n") {
  for (auto [p, n] : std::vector<std::pair<uint64_t, uint32_t>>{{2, 4}, {3, 3}, {5, 2}}) {
    FieldPtr f = make_field(p, n);
    std::mt19937_64 rng(99 + p);
    for (int i = 0; i < 100; ++i) {
      uint64_t a = rand_below(rng, f->q());
      uint64_t b = rand_below(rng, f->q());
      CHECK(f->cfrob(f->cmul(a, b)) == f->cmul(f->cfrob(a), f->cfrob(b)));
      CHECK(f->cfrob(f->cadd(a, b)) == f->cadd(f->cfrob(a), f->cfrob(b)));
      uint64_t t = a;
      for (uint32_t k = 0; k < n; ++k) t = f->cfrob(t);
      CHECK(t == a);
    }
  }
}

TEST_CASE("large fields fall back to polynomial arithmetic") {
  for (auto [p, n] : std::vector<std::pair<uint64_t, uint32_t>>{{2, 9}, {3, 6}}) {
    FieldPtr f = make_field(p, n);
    CHECK_FALSE(f->tabled());
    std::mt19937_64 rng(7 * p);
    for (int i = 0; i < 50; ++i) {
      uint64_t a = 1 + rand_below(rng, f->q() - 1);
      uint64_t b = rand_below(rng, f->q());
      uint64_t c = rand_below(rng, f->q());
      CHECK(f->cmul(a, f->cinv(a)) == 1);
      CHECK(f->cmul(a, f->cadd(b, c)) == f->cadd(f->cmul(a, b), f->cmul(a, c)));
      CHECK(f->cmul(f->cmul(a, b), c) == f->cmul(a, f->cmul(b, c)));
    }
  }
}

TEST_CASE("find_embedding picks the first root in coordinate-lex order") {
  FieldPtr f2 = make_field(2, 1);
  FieldPtr f4 = make_field(2, 2);
  FieldPtr f8 = make_field(2, 3);
  FieldPtr f16 = make_field(2, 4);

  {
    // prime-field inclusion is the constant map
    Embedding e = find_embedding(*f2, *f4);
    CHECK(embed(e, *f4, f2->one()) == f4->one());
    CHECK(embed(e, *f4, f2->zero()) == f4->zero());
  }
  {
    Embedding e = find_embedding(*f4, *f16);
    // oracle: scan all of F_16 in lex coordinate order for roots of x^2+x+1
    std::vector<uint64_t> roots;
    for (uint64_t v = 0; v < 16; ++v) {
      // big-endian decode: coords[0] is the most significant digit
      uint64_t cand = 0;
      uint64_t tmp = v;
      for (uint32_t i = 0; i < 4; ++i) {
        uint64_t digit = tmp % 2;
        tmp /= 2;
        cand += digit << (3 - i);
      }
      uint64_t val = f16->cadd(f16->cadd(f16->cmul(cand, cand), cand), 1);
      if (val == 0) roots.push_back(cand);
    }
    REQUIRE(roots.size() == 2);
    CHECK(f16->code(e.image_of_x) == roots[0]);
    Embedding alt = find_embedding(*f4, *f16, 1);
    CHECK(f16->code(alt.image_of_x) == roots[1]);
    // both are ring homomorphisms
    for (const Embedding& emb : {e, alt}) {
      std::mt19937_64 rng(5);
      for (int i = 0; i < 100; ++i) {
        FieldElement a = f4->decode(rand_below(rng, 4));
        FieldElement b = f4->decode(rand_below(rng, 4));
        CHECK(embed(emb, *f16, f4->mul(a, b)) ==
              f16->mul(embed(emb, *f16, a), embed(emb, *f16, b)));
        CHECK(embed(emb, *f16, f4->add(a, b)) ==
              f16->add(embed(emb, *f16, a), embed(emb, *f16, b)));
      }
    }
    // determinism
    CHECK(find_embedding(*f4, *f16).image_of_x == e.image_of_x);
  }
  {
    // identity-degree embedding of a prime field is the identity map
    Embedding e = find_embedding(*f2, *f2);
    CHECK(embed(e, *f2, f2->one()) == f2->one());
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(find_embedding(*f4, *f8)),
                       doctest::Contains("NotASubfield"), Error);
}

TEST_CASE("embedding F_9 into F_81 is multiplicative") {
  FieldPtr f9 = make_field(3, 2);
  FieldPtr f81 = make_field(3, 4);
  Embedding e = find_embedding(*f9, *f81);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    uint64_t a = rand_below(rng, 9);
    uint64_t b = rand_below(rng, 9);
    CHECK(embed_code(e, *f81, f9->cmul(a, b)) ==
          f81->cmul(embed_code(e, *f81, a), embed_code(e, *f81, b)));
  }
}

TEST_CASE("galois ring: frobenius lift") {
  {
    GaloisRing r = make_galois_ring(2, 1, 3);
    CHECK(r.frob_matrix == std::vector<std::vector<uint64_t>>{{1}});
    CHECK(r.pE == 8);
  }
  {
    GaloisRing r = make_galois_ring(3, 1, 2);
    CHECK(r.frob_matrix == std::vector<std::vector<uint64_t>>{{1}});
  }
  {
    GaloisRing r = make_galois_ring(2, 2, 2);
    // oracle: scan all 16 elements a+bx of (Z/4)[x]/(x^2+x+1) for roots of f
    // that reduce to x^2 = x+1 mod 2
    std::vector<std::pair<uint64_t, uint64_t>> found;
    for (uint64_t a = 0; a < 4; ++a)
      for (uint64_t b = 0; b < 4; ++b) {
        // (a+bx)^2 = a^2 + 2abx + b^2 x^2, x^2 = -x-1 = 3x+3
        uint64_t c0 = (a * a + 3 * b * b) % 4;
        uint64_t c1 = (2 * a * b + 3 * b * b) % 4;
        // + (a+bx) + 1
        c0 = (c0 + a + 1) % 4;
        c1 = (c1 + b) % 4;
        if (c0 == 0 && c1 == 0 && a % 2 == 1 && b % 2 == 1) found.emplace_back(a, b);
      }
    REQUIRE(found.size() == 1);
    CHECK(found[0] == std::pair<uint64_t, uint64_t>{3, 3});
    // phi(x) = 3 + 3x: second column of the matrix
    CHECK(r.frob_matrix[0][1] == 3);
    CHECK(r.frob_matrix[1][1] == 3);
    CHECK(r.frob_matrix[0][0] == 1);
    CHECK(r.frob_matrix[1][0] == 0);
  }
}

TEST_CASE("galois ring: invariants across parameters") {
  for (auto [p, n, E] : std::vector<std::tuple<uint64_t, uint32_t, uint32_t>>{
           {2, 2, 2}, {2, 2, 5}, {2, 3, 3}, {3, 2, 2}, {3, 2, 4}, {5, 2, 2}, {2, 4, 3}}) {
    GaloisRing r = make_galois_ring(p, n, E);
    FieldPtr f = make_field(p, n);

    // frob_matrix mod p is the matrix of x -> x^p on the residue field
    for (uint32_t j = 0; j < n; ++j) {
      FieldElement xj = f->pow(f->gen(), j);
      FieldElement fx = f->frobenius(xj);
      for (uint32_t i = 0; i < n; ++i) CHECK(r.frob_matrix[i][j] % p == fx.coords[i]);
    }

    // phi^n = identity mod p^E
    std::vector<std::vector<uint64_t>> acc(n, std::vector<uint64_t>(n, 0));
    for (uint32_t i = 0; i < n; ++i) acc[i][i] = 1;
    for (uint32_t k = 0; k < n; ++k) acc = mat_mul_mod(r.frob_matrix, acc, r.pE);
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = 0; j < n; ++j) CHECK(acc[i][j] == (i == j ? 1u : 0u));

    // f_lift reduces to the field modulus
    CHECK(r.f_lift == f->desc().f);
  }
}

TEST_CASE("prime-power factorization of field sizes") {
  CHECK(split_prime_power(2) == std::pair<uint64_t, uint32_t>{2, 1});
  CHECK(split_prime_power(8) == std::pair<uint64_t, uint32_t>{2, 3});
  CHECK(split_prime_power(9) == std::pair<uint64_t, uint32_t>{3, 2});
  CHECK(split_prime_power(1024) == std::pair<uint64_t, uint32_t>{2, 10});
  CHECK(split_prime_power(7) == std::pair<uint64_t, uint32_t>{7, 1});
  CHECK(split_prime_power(121) == std::pair<uint64_t, uint32_t>{11, 2});

  for (uint64_t bad : {0ull, 1ull, 6ull, 12ull, 100ull, 1000ull})
    CHECK_THROWS_AS((void)split_prime_power(bad), Error);
}
