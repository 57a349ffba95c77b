#include "ub0/nilalgebra.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

namespace ub0 {
namespace {

// ---------------------------------------------------------------------------
// generic echelon span tracker over F_q (code rows, pivot entries scaled to 1)
// ---------------------------------------------------------------------------

class GenericTracker {
 public:
  GenericTracker(const Field& f, std::uint32_t width) : f_(f), width_(width) {}

  std::uint32_t rank() const { return static_cast<std::uint32_t>(rows_.size()); }

  // reduce against the current echelon; keep the remainder as a new pivot row
  // when nonzero, returning whether the vector enlarged the span
  bool insert(AlgebraElement row) {
    std::uint32_t lead = 0;
    while (lead < width_) {
      while (lead < width_ && row[lead] == 0) ++lead;
      if (lead == width_) return false;
      std::size_t slot = slot_of(lead);
      if (slot == rows_.size() || pivots_[slot] != lead) {
        std::uint64_t inv = f_.cinv(row[lead]);
        for (std::uint32_t k = lead; k < width_; ++k) row[k] = f_.cmul(row[k], inv);
        rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(slot), std::move(row));
        pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(slot), lead);
        return true;
      }
      const AlgebraElement& piv = rows_[slot];
      std::uint64_t c = row[lead];
      for (std::uint32_t k = lead; k < width_; ++k)
        row[k] = f_.csub(row[k], f_.cmul(c, piv[k]));
    }
    return false;
  }

  // canonical reduced form: eliminate every pivot column above its pivot row
  std::vector<AlgebraElement> finalize() {
    for (std::size_t j = 1; j < rows_.size(); ++j)
      for (std::size_t i = 0; i < j; ++i) {
        std::uint64_t c = rows_[i][pivots_[j]];
        if (c == 0) continue;
        for (std::uint32_t k = pivots_[j]; k < width_; ++k)
          rows_[i][k] = f_.csub(rows_[i][k], f_.cmul(c, rows_[j][k]));
      }
    return rows_;
  }

 private:
  std::size_t slot_of(std::uint32_t lead) const {
    return static_cast<std::size_t>(
        std::lower_bound(pivots_.begin(), pivots_.end(), lead) - pivots_.begin());
  }

  const Field& f_;
  std::uint32_t width_;
  std::vector<AlgebraElement> rows_;
  std::vector<std::uint32_t> pivots_;
};

// ---------------------------------------------------------------------------
// bit-packed span tracker over F_2
// ---------------------------------------------------------------------------

using BitRow = std::vector<std::uint64_t>;

std::uint32_t word_count(std::uint32_t bits) { return (bits + 63) >> 6; }

BitRow pack_row(const AlgebraElement& a) {
  BitRow r(word_count(static_cast<std::uint32_t>(a.size())), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]) r[i >> 6] |= std::uint64_t(1) << (i & 63);
  return r;
}

AlgebraElement unpack_row(const BitRow& r, std::uint32_t width) {
  AlgebraElement a(width, 0);
  for (std::uint32_t i = 0; i < width; ++i)
    if ((r[i >> 6] >> (i & 63)) & 1) a[i] = 1;
  return a;
}

int first_bit(const BitRow& r) {
  for (std::size_t w = 0; w < r.size(); ++w)
    if (r[w]) return static_cast<int>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(r[w])));
  return -1;
}

class PackedTracker {
 public:
  explicit PackedTracker(std::uint32_t width) : width_(width) {}

  std::uint32_t rank() const { return static_cast<std::uint32_t>(rows_.size()); }

  bool insert(BitRow row) {
    for (std::size_t s = 0; s < rows_.size(); ++s) {
      std::uint32_t pv = pivots_[s];
      if ((row[pv >> 6] >> (pv & 63)) & 1)
        for (std::size_t w = pv >> 6; w < row.size(); ++w) row[w] ^= rows_[s][w];
    }
    int lead = first_bit(row);
    if (lead < 0) return false;
    std::size_t slot = static_cast<std::size_t>(
        std::lower_bound(pivots_.begin(), pivots_.end(), static_cast<std::uint32_t>(lead)) -
        pivots_.begin());
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(slot), std::move(row));
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(slot),
                   static_cast<std::uint32_t>(lead));
    return true;
  }

  std::vector<AlgebraElement> finalize() {
    for (std::size_t j = 1; j < rows_.size(); ++j) {
      std::uint32_t pv = pivots_[j];
      for (std::size_t i = 0; i < j; ++i)
        if ((rows_[i][pv >> 6] >> (pv & 63)) & 1)
          for (std::size_t w = 0; w < rows_[i].size(); ++w) rows_[i][w] ^= rows_[j][w];
    }
    std::vector<AlgebraElement> out;
    out.reserve(rows_.size());
    for (const BitRow& r : rows_) out.push_back(unpack_row(r, width_));
    return out;
  }

 private:
  std::uint32_t width_;
  std::vector<BitRow> rows_;
  std::vector<std::uint32_t> pivots_;
};

bool use_packed(const NilpotentAlgebra& A) {
  return A.field->p() == 2 && A.field->n() == 1;
}

// row * b_j expanded through the structure constants
AlgebraElement mul_row_basis(const NilpotentAlgebra& A, const AlgebraElement& row,
                             std::uint32_t j) {
  const Field& f = *A.field;
  AlgebraElement res(A.dim, 0);
  for (std::uint32_t i = 0; i < A.dim; ++i) {
    std::uint64_t c = row[i];
    if (c == 0) continue;
    for (const ScEntry& e : A.at(i, j)) res[e.k] = f.cadd(res[e.k], f.cmul(c, e.c));
  }
  return res;
}

// level bases of J, J^2, ...: each next level is spanned by (previous level
// basis) * (algebra basis); strict shrinking is exactly nilpotency
std::vector<std::vector<AlgebraElement>> compute_levels(const NilpotentAlgebra& A,
                                                        bool allow_packed) {
  std::vector<std::vector<AlgebraElement>> levels;
  std::vector<AlgebraElement> cur;
  for (std::uint32_t i = 0; i < A.dim; ++i) {
    AlgebraElement e(A.dim, 0);
    e[i] = 1;
    cur.push_back(std::move(e));
  }
  levels.push_back(cur);

  // sparse product masks make the packed route's level products pure XOR
  std::vector<BitRow> packed_sc;
  bool packed = allow_packed && use_packed(A);
  if (packed) {
    packed_sc.resize(static_cast<std::size_t>(A.dim) * A.dim);
    for (std::uint32_t i = 0; i < A.dim; ++i)
      for (std::uint32_t j = 0; j < A.dim; ++j) {
        BitRow m(word_count(A.dim), 0);
        for (const ScEntry& e : A.at(i, j)) m[e.k >> 6] ^= std::uint64_t(1) << (e.k & 63);
        packed_sc[static_cast<std::size_t>(i) * A.dim + j] = std::move(m);
      }
  }

  while (true) {
    std::vector<AlgebraElement> next;
    if (packed) {
      PackedTracker tr(A.dim);
      for (const AlgebraElement& row : levels.back()) {
        BitRow prow = pack_row(row);
        for (std::uint32_t j = 0; j < A.dim; ++j) {
          BitRow prod(word_count(A.dim), 0);
          for (std::uint32_t i = 0; i < A.dim; ++i)
            if ((prow[i >> 6] >> (i & 63)) & 1) {
              const BitRow& m = packed_sc[static_cast<std::size_t>(i) * A.dim + j];
              for (std::size_t w = 0; w < prod.size(); ++w) prod[w] ^= m[w];
            }
          tr.insert(std::move(prod));
        }
      }
      next = tr.finalize();
    } else {
      GenericTracker tr(*A.field, A.dim);
      for (const AlgebraElement& row : levels.back())
        for (std::uint32_t j = 0; j < A.dim; ++j) tr.insert(mul_row_basis(A, row, j));
      next = tr.finalize();
    }
    if (next.empty()) break;
    if (next.size() >= levels.back().size())
      fail(ErrKind::NotNilpotent,
           "power chain stalls at dimension " + std::to_string(next.size()));
    levels.push_back(std::move(next));
  }
  return levels;
}

void check_associativity(const NilpotentAlgebra& A) {
  const Field& f = *A.field;
  AlgebraElement acc(A.dim, 0);
  std::vector<std::uint32_t> touched;
  auto bump = [&](std::uint32_t k, std::uint64_t c) {
    if (acc[k] == 0 && c != 0) touched.push_back(k);
    acc[k] = f.cadd(acc[k], c);
  };
  for (std::uint32_t i = 0; i < A.dim; ++i)
    for (std::uint32_t j = 0; j < A.dim; ++j)
      for (std::uint32_t k = 0; k < A.dim; ++k) {
        for (const ScEntry& e : A.at(i, j))
          for (const ScEntry& e2 : A.at(e.k, k)) bump(e2.k, f.cmul(e.c, e2.c));
        for (const ScEntry& e : A.at(j, k))
          for (const ScEntry& e2 : A.at(i, e.k)) bump(e2.k, f.cneg(f.cmul(e.c, e2.c)));
        bool ok = true;
        for (std::uint32_t t : touched) {
          if (acc[t] != 0) ok = false;
          acc[t] = 0;
        }
        touched.clear();
        if (!ok)
          fail(ErrKind::NotAssociative, "(b" + std::to_string(i + 1) + "*b" +
                                            std::to_string(j + 1) + ")*b" +
                                            std::to_string(k + 1) + " != b" +
                                            std::to_string(i + 1) + "*(b" +
                                            std::to_string(j + 1) + "*b" +
                                            std::to_string(k + 1) + ")");
      }
}

}  // namespace

NilpotentAlgebra make_algebra(FieldPtr field, std::uint32_t dim,
                              std::vector<std::vector<ScEntry>> sc,
                              std::vector<std::string> labels,
                              bool check_assoc) {
  if (dim == 0) fail(ErrKind::BadArgument, "algebra dimension must be positive");
  if (dim > kAlgebraDimGuard)
    fail(ErrKind::OrderGuardExceeded, "algebra dimension " + std::to_string(dim) +
                                          " exceeds guard " +
                                          std::to_string(kAlgebraDimGuard));
  NilpotentAlgebra A;
  A.field = std::move(field);
  A.dim = dim;
  A.sc.resize(static_cast<std::size_t>(dim) * dim);
  for (std::size_t s = 0; s < sc.size(); ++s) {
    // normalize: accumulate duplicate targets, drop zeros, sort by target
    std::map<std::uint32_t, std::uint64_t> acc;
    for (const ScEntry& e : sc[s]) {
      if (e.k >= dim) fail(ErrKind::BadArgument, "structure constant target out of range");
      if (e.c >= A.field->q()) fail(ErrKind::BadArgument, "structure constant code out of range");
      auto [it, fresh] = acc.emplace(e.k, e.c);
      if (!fresh) it->second = A.field->cadd(it->second, e.c);
    }
    for (auto& [k, c] : acc)
      if (c != 0) A.sc[s].push_back({k, c});
  }
  if (labels.empty())
    for (std::uint32_t i = 0; i < dim; ++i) labels.push_back("b" + std::to_string(i + 1));
  A.labels = std::move(labels);
  if (check_assoc) check_associativity(A);
  A.nil_index = static_cast<std::uint32_t>(compute_levels(A, true).size()) + 1;
  return A;
}

NilpotentAlgebra augmentation_ideal(const PcPresentation& pres, const FieldPtr& field) {
  if (field->p() != pres.p)
    fail(ErrKind::FieldMismatch, "field characteristic " + std::to_string(field->p()) +
                                     " differs from group prime " + std::to_string(pres.p));
  std::uint64_t order =
      enumerable_order(pres, static_cast<std::uint64_t>(kAlgebraDimGuard) + 1);
  std::uint32_t dim = static_cast<std::uint32_t>(order - 1);

  const Field& f = *field;
  const std::uint64_t neg1 = f.cneg(1);
  std::vector<std::vector<ScEntry>> sc(static_cast<std::size_t>(dim) * dim);
  std::vector<GroupElement> elems(order);
  for (std::uint64_t a = 0; a < order; ++a) elems[a] = element_at(pres, a);

  for (std::uint32_t i = 0; i < dim; ++i)
    for (std::uint32_t j = 0; j < dim; ++j) {
      // (g-1)(h-1) = (gh-1) - (g-1) - (h-1)
      std::uint64_t gh = element_index(pres, multiply(pres, elems[i + 1], elems[j + 1]));
      std::map<std::uint32_t, std::uint64_t> acc;
      auto bump = [&](std::uint32_t k, std::uint64_t c) {
        auto [it, fresh] = acc.emplace(k, c);
        if (!fresh) it->second = f.cadd(it->second, c);
      };
      if (gh != 0) bump(static_cast<std::uint32_t>(gh - 1), 1);
      bump(i, neg1);
      bump(j, neg1);
      auto& slot = sc[static_cast<std::size_t>(i) * dim + j];
      for (auto& [k, c] : acc)
        if (c != 0) slot.push_back({k, c});
    }

  std::vector<std::string> labels;
  for (std::uint32_t i = 0; i < dim; ++i)
    labels.push_back(element_to_string(elems[i + 1]) + "-1");
  return make_algebra(field, dim, std::move(sc), std::move(labels), false);
}

// ---------------------------------------------------------------------------
// element arithmetic
// ---------------------------------------------------------------------------

AlgebraElement alg_zero(const NilpotentAlgebra& A) { return AlgebraElement(A.dim, 0); }

bool alg_is_zero(const AlgebraElement& a) {
  for (std::uint64_t c : a)
    if (c) return false;
  return true;
}

AlgebraElement alg_add(const NilpotentAlgebra& A, const AlgebraElement& a,
                       const AlgebraElement& b) {
  AlgebraElement r(A.dim);
  for (std::uint32_t i = 0; i < A.dim; ++i) r[i] = A.field->cadd(a[i], b[i]);
  return r;
}

AlgebraElement alg_sub(const NilpotentAlgebra& A, const AlgebraElement& a,
                       const AlgebraElement& b) {
  AlgebraElement r(A.dim);
  for (std::uint32_t i = 0; i < A.dim; ++i) r[i] = A.field->csub(a[i], b[i]);
  return r;
}

AlgebraElement alg_neg(const NilpotentAlgebra& A, const AlgebraElement& a) {
  AlgebraElement r(A.dim);
  for (std::uint32_t i = 0; i < A.dim; ++i) r[i] = A.field->cneg(a[i]);
  return r;
}

AlgebraElement alg_scale(const NilpotentAlgebra& A, std::uint64_t c, const AlgebraElement& a) {
  AlgebraElement r(A.dim);
  for (std::uint32_t i = 0; i < A.dim; ++i) r[i] = A.field->cmul(c, a[i]);
  return r;
}

AlgebraElement alg_multiply(const NilpotentAlgebra& A, const AlgebraElement& a,
                            const AlgebraElement& b) {
  const Field& f = *A.field;
  AlgebraElement r(A.dim, 0);
  for (std::uint32_t i = 0; i < A.dim; ++i) {
    if (a[i] == 0) continue;
    for (std::uint32_t j = 0; j < A.dim; ++j) {
      if (b[j] == 0) continue;
      std::uint64_t c = f.cmul(a[i], b[j]);
      for (const ScEntry& e : A.at(i, j)) r[e.k] = f.cadd(r[e.k], f.cmul(c, e.c));
    }
  }
  return r;
}

AlgebraElement lie_bracket(const NilpotentAlgebra& A, const AlgebraElement& a,
                           const AlgebraElement& b) {
  return alg_sub(A, alg_multiply(A, a, b), alg_multiply(A, b, a));
}

AlgebraElement unit_mul(const NilpotentAlgebra& A, const AlgebraElement& u,
                        const AlgebraElement& v) {
  return alg_add(A, alg_add(A, u, v), alg_multiply(A, u, v));
}

AlgebraElement unit_inverse(const NilpotentAlgebra& A, const AlgebraElement& u) {
  AlgebraElement w = alg_neg(A, u);
  AlgebraElement v = w;
  AlgebraElement pw = w;
  for (std::uint32_t k = 2; k + 1 <= A.nil_index; ++k) {
    pw = alg_multiply(A, pw, w);
    if (alg_is_zero(pw)) break;
    v = alg_add(A, v, pw);
  }
  return v;
}

// ---------------------------------------------------------------------------
// filtration
// ---------------------------------------------------------------------------

namespace {

// invert the matrix whose columns are the adapted vectors; returns the rows
// of the inverse (adapted coordinates = rows * plain coordinates)
std::vector<std::vector<std::uint64_t>> invert_adapted(
    const NilpotentAlgebra& A, const std::vector<AlgebraElement>& adapted) {
  const Field& f = *A.field;
  const std::uint32_t d = A.dim;
  // augmented rows [T | I]
  std::vector<std::vector<std::uint64_t>> rows(d, std::vector<std::uint64_t>(2 * d, 0));
  for (std::uint32_t r = 0; r < d; ++r) {
    for (std::uint32_t c = 0; c < d; ++c) rows[r][c] = adapted[c][r];
    rows[r][d + r] = 1;
  }
  for (std::uint32_t col = 0; col < d; ++col) {
    std::uint32_t piv = col;
    while (piv < d && rows[piv][col] == 0) ++piv;
    if (piv == d) fail(ErrKind::InternalInconsistency, "adapted basis is singular");
    std::swap(rows[piv], rows[col]);
    std::uint64_t inv = f.cinv(rows[col][col]);
    for (std::uint32_t k = col; k < 2 * d; ++k) rows[col][k] = f.cmul(rows[col][k], inv);
    for (std::uint32_t r = 0; r < d; ++r) {
      if (r == col || rows[r][col] == 0) continue;
      std::uint64_t c = rows[r][col];
      for (std::uint32_t k = col; k < 2 * d; ++k)
        rows[r][k] = f.csub(rows[r][k], f.cmul(c, rows[col][k]));
    }
  }
  std::vector<std::vector<std::uint64_t>> tinv(d, std::vector<std::uint64_t>(d));
  for (std::uint32_t r = 0; r < d; ++r)
    for (std::uint32_t c = 0; c < d; ++c) tinv[r][c] = rows[r][d + c];
  return tinv;
}

Filtration filtration_impl(const NilpotentAlgebra& A, bool allow_packed) {
  Filtration filt;
  filt.levels = compute_levels(A, allow_packed);
  const std::size_t nlevels = filt.levels.size();

  // pick adapted vectors deepest level first so each level's contribution is
  // independent modulo the next level, then emit them level-ascending
  std::vector<std::vector<AlgebraElement>> per_level(nlevels);
  bool packed = allow_packed && use_packed(A);
  PackedTracker ptr_(A.dim);
  GenericTracker gtr_(*A.field, A.dim);
  for (std::size_t k = nlevels; k-- > 0;)
    for (const AlgebraElement& row : filt.levels[k]) {
      bool fresh = packed ? ptr_.insert(pack_row(row)) : gtr_.insert(row);
      if (fresh) per_level[k].push_back(row);
    }

  filt.level_start.clear();
  for (std::size_t k = 0; k < nlevels; ++k) {
    filt.level_start.push_back(static_cast<std::uint32_t>(filt.adapted.size()));
    for (AlgebraElement& v : per_level[k]) {
      filt.adapted.push_back(std::move(v));
      filt.level_of.push_back(static_cast<std::uint32_t>(k + 1));
    }
  }
  filt.level_start.push_back(A.dim);
  if (filt.adapted.size() != A.dim)
    fail(ErrKind::InternalInconsistency, "adapted basis does not span the algebra");
  filt.to_adapted_rows = invert_adapted(A, filt.adapted);
  return filt;
}

}  // namespace

Filtration power_filtration(const NilpotentAlgebra& A) { return filtration_impl(A, true); }

Filtration power_filtration_reference(const NilpotentAlgebra& A) {
  return filtration_impl(A, false);
}

AlgebraElement to_adapted(const NilpotentAlgebra& A, const Filtration& filt,
                          const AlgebraElement& x) {
  const Field& f = *A.field;
  AlgebraElement y(A.dim, 0);
  for (std::uint32_t r = 0; r < A.dim; ++r) {
    std::uint64_t s = 0;
    const auto& row = filt.to_adapted_rows[r];
    for (std::uint32_t k = 0; k < A.dim; ++k)
      if (x[k]) s = f.cadd(s, f.cmul(row[k], x[k]));
    y[r] = s;
  }
  return y;
}

std::pair<std::uint32_t, std::vector<AlgebraElement>> lie_commutator_dim(
    const NilpotentAlgebra& A) {
  const Field& f = *A.field;
  GenericTracker tr(f, A.dim);
  for (std::uint32_t i = 0; i < A.dim; ++i)
    for (std::uint32_t j = i + 1; j < A.dim; ++j) {
      AlgebraElement row(A.dim, 0);
      for (const ScEntry& e : A.at(i, j)) row[e.k] = f.cadd(row[e.k], e.c);
      for (const ScEntry& e : A.at(j, i)) row[e.k] = f.csub(row[e.k], e.c);
      tr.insert(std::move(row));
    }
  std::vector<AlgebraElement> basis = tr.finalize();
  return {static_cast<std::uint32_t>(basis.size()), std::move(basis)};
}

NilpotentAlgebra extend_scalars(const NilpotentAlgebra& A, const Embedding& e,
                                const FieldPtr& dst) {
  if (!(A.field->desc() == e.src))
    fail(ErrKind::FieldMismatch, "embedding source is not the algebra's field");
  if (!(dst->desc() == e.dst))
    fail(ErrKind::FieldMismatch, "destination field does not match the embedding");
  std::vector<std::vector<ScEntry>> sc(A.sc.size());
  for (std::size_t s = 0; s < A.sc.size(); ++s)
    for (const ScEntry& en : A.sc[s]) sc[s].push_back({en.k, embed_code(e, *dst, en.c)});
  return make_algebra(dst, A.dim, std::move(sc), A.labels, false);
}

// ---------------------------------------------------------------------------
// text format
// ---------------------------------------------------------------------------

namespace {

struct AlgLine {
  const std::string* s = nullptr;
  int line = 0;
  std::size_t pos = 0;

  int col() const { return static_cast<int>(pos) + 1; }
  void skip_ws() {
    while (pos < s->size() && (*s)[pos] == ' ') ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s->size();
  }
  bool peek(char c) {
    skip_ws();
    return pos < s->size() && (*s)[pos] == c;
  }
  void expect(char c) {
    skip_ws();
    if (pos >= s->size() || (*s)[pos] != c)
      fail_syntax(std::string("expected '") + c + "'", line, col());
    ++pos;
  }
  std::uint64_t number() {
    skip_ws();
    if (pos >= s->size() || !std::isdigit(static_cast<unsigned char>((*s)[pos])))
      fail_syntax("expected a number", line, col());
    std::uint64_t v = 0;
    while (pos < s->size() && std::isdigit(static_cast<unsigned char>((*s)[pos]))) {
      v = v * 10 + static_cast<std::uint64_t>((*s)[pos] - '0');
      if (v > (std::uint64_t(1) << 62)) fail_syntax("number too large", line, col());
      ++pos;
    }
    return v;
  }
  std::string keyword() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s->size() && std::isalpha(static_cast<unsigned char>((*s)[pos]))) ++pos;
    return s->substr(start, pos - start);
  }
  // b<k>, 1-based in the file
  std::uint32_t basis_index(std::uint32_t dim) {
    skip_ws();
    int c = col();
    if (pos >= s->size() || (*s)[pos] != 'b') fail_syntax("expected basis element b<k>", line, c);
    ++pos;
    std::uint64_t k = number();
    if (k < 1 || k > dim) fail_syntax("basis index out of range", line, c);
    return static_cast<std::uint32_t>(k - 1);
  }
};

}  // namespace

NilpotentAlgebra parse_algebra(const std::string& text) {
  std::vector<std::pair<int, std::string>> lines;
  {
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      std::size_t i = 0;
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t')) ++i;
      if (i < raw.size()) lines.emplace_back(no, raw);
    }
  }
  std::size_t at = 0;
  auto next_line = [&](const char* what) -> AlgLine {
    if (at >= lines.size())
      fail_syntax(std::string("missing ") + what, lines.empty() ? 1 : lines.back().first + 1, 1);
    AlgLine ln{&lines[at].second, lines[at].first, 0};
    ++at;
    return ln;
  };

  AlgLine header = next_line("header line 'algebra'");
  if (header.keyword() != "algebra" || !header.done())
    fail_syntax("first line must be 'algebra'", header.line, 1);

  AlgLine pline = next_line("'p <prime>' line");
  if (pline.keyword() != "p") fail_syntax("expected 'p <prime>'", pline.line, 1);
  std::uint64_t p = pline.number();
  if (!pline.done()) fail_syntax("trailing input after prime", pline.line, pline.col());

  AlgLine nline = next_line("'n <degree>' line");
  if (nline.keyword() != "n") fail_syntax("expected 'n <degree>'", nline.line, 1);
  std::uint64_t n = nline.number();
  if (!nline.done()) fail_syntax("trailing input after degree", nline.line, nline.col());
  FieldPtr field = make_field(p, static_cast<std::uint32_t>(n));  // NotPrime, DegreeOutOfRange

  AlgLine dline = next_line("'dim <d>' line");
  if (dline.keyword() != "dim") fail_syntax("expected 'dim <d>'", dline.line, 1);
  std::uint64_t dim64 = dline.number();
  if (!dline.done()) fail_syntax("trailing input after dimension", dline.line, dline.col());
  if (dim64 == 0) fail_syntax("dimension must be positive", dline.line, 1);
  if (dim64 > kAlgebraDimGuard)
    fail(ErrKind::OrderGuardExceeded, "algebra dimension " + std::to_string(dim64) +
                                          " exceeds guard " +
                                          std::to_string(kAlgebraDimGuard));
  std::uint32_t dim = static_cast<std::uint32_t>(dim64);

  std::vector<std::vector<ScEntry>> sc(static_cast<std::size_t>(dim) * dim);
  std::vector<bool> seen(sc.size(), false);
  while (at < lines.size()) {
    AlgLine ln = next_line("product line");
    std::uint32_t i = ln.basis_index(dim);
    ln.expect('*');
    std::uint32_t j = ln.basis_index(dim);
    ln.expect('=');
    std::size_t slot = static_cast<std::size_t>(i) * dim + j;
    if (seen[slot])
      fail_syntax("duplicate product b" + std::to_string(i + 1) + "*b" + std::to_string(j + 1),
                  ln.line, 1);
    seen[slot] = true;
    if (ln.peek('0')) {
      ++ln.pos;
      if (!ln.done()) fail_syntax("trailing input after 0", ln.line, ln.col());
      continue;
    }
    while (true) {
      std::uint64_t code = 1;
      if (ln.peek('[')) {
        ln.expect('[');
        std::uint64_t c = 0, scale = 1;
        std::uint32_t digits = 0;
        while (true) {
          int cl = ln.col();
          std::uint64_t d = ln.number();
          if (d >= p) fail_syntax("coordinate must be below p", ln.line, cl);
          if (++digits > n) fail_syntax("more coordinates than the field degree", ln.line, cl);
          c += d * scale;
          scale *= p;
          if (ln.peek(',')) {
            ln.expect(',');
            continue;
          }
          break;
        }
        ln.expect(']');
        ln.expect('*');
        code = c;
      }
      std::uint32_t k = ln.basis_index(dim);
      if (code != 0) sc[slot].push_back({k, code});
      if (ln.peek('+')) {
        ln.expect('+');
        continue;
      }
      break;
    }
    if (!ln.done()) fail_syntax("trailing input after product", ln.line, ln.col());
  }

  return make_algebra(std::move(field), dim, std::move(sc), {}, true);
}

}  // namespace ub0
