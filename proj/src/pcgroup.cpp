#include "ub0/pcgroup.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ub0/smallfield.hpp"  // is_prime_u64

namespace ub0 {

namespace {

constexpr std::uint64_t kCollectStepCap = 1'000'000'000;
constexpr std::size_t kCollectLengthCap = 10'000'000;
constexpr std::uint32_t kGeneratorCap = 256;

using WorkLetter = std::pair<std::uint32_t, std::uint64_t>;  // (gen, exp), exp may exceed p

}  // namespace

GroupElement identity(const PcPresentation& pres) { return GroupElement(pres.m, 0); }

GroupElement collect(const PcPresentation& pres, const Word& word) {
  const std::uint64_t p = pres.p;
  std::vector<WorkLetter> w;
  w.reserve(word.size());
  for (const Letter& l : word) {
    if (l.gen >= pres.m) fail(ErrKind::BadArgument, "collect: generator index out of range");
    if (l.exp != 0) w.emplace_back(l.gen, l.exp);
  }

  std::uint64_t steps = 0;
  std::size_t k = 0;
  while (k < w.size()) {
    // exponent overflow: g^e = g^(e-p) * (g^p)
    if (w[k].second >= p) {
      const Word& pw = pres.power_words[w[k].first];
      w[k].second -= p;
      std::size_t at = k + 1;
      if (w[k].second == 0) {
        w.erase(w.begin() + k);
        at = k;
      }
      std::vector<WorkLetter> ins;
      ins.reserve(pw.size());
      for (const Letter& l : pw) ins.emplace_back(l.gen, l.exp);
      w.insert(w.begin() + at, ins.begin(), ins.end());
    } else if (k + 1 < w.size() && w[k].first == w[k + 1].first) {
      // merge adjacent equal generators
      w[k].second += w[k + 1].second;
      w.erase(w.begin() + k + 1);
    } else if (k + 1 < w.size() && w[k].first > w[k + 1].first) {
      // g_j^e1 g_i^e2 -> g_j^(e1-1) g_i g_j [g_j,g_i] g_i^(e2-1)
      std::uint32_t j = w[k].first, i = w[k + 1].first;
      std::uint64_t e1 = w[k].second, e2 = w[k + 1].second;
      const Word& c = pres.comm(j, i);
      std::vector<WorkLetter> repl;
      repl.reserve(3 + c.size());
      if (e1 > 1) repl.emplace_back(j, e1 - 1);
      repl.emplace_back(i, 1);
      repl.emplace_back(j, 1);
      for (const Letter& l : c) repl.emplace_back(l.gen, l.exp);
      if (e2 > 1) repl.emplace_back(i, e2 - 1);
      w.erase(w.begin() + k, w.begin() + k + 2);
      w.insert(w.begin() + k, repl.begin(), repl.end());
    } else {
      ++k;
      continue;
    }
    if (k > 0) --k;  // a fix can only create new violations one slot to the left
    if (++steps > kCollectStepCap || w.size() > kCollectLengthCap)
      fail(ErrKind::CollectionDiverged, "collection exceeded the step/length cap");
  }

  GroupElement e(pres.m, 0);
  std::uint32_t prev = 0;
  bool first = true;
  for (const WorkLetter& l : w) {
    if (!first && l.first <= prev)
      fail(ErrKind::InternalInconsistency, "collected word is not normal");
    prev = l.first;
    first = false;
    e[l.first] = static_cast<std::uint32_t>(l.second);
  }
  return e;
}

GroupElement multiply(const PcPresentation& pres, const GroupElement& a, const GroupElement& b) {
  Word w;
  w.reserve(2 * pres.m);
  for (std::uint32_t i = 0; i < pres.m; ++i)
    if (a[i]) w.push_back({i, a[i]});
  for (std::uint32_t i = 0; i < pres.m; ++i)
    if (b[i]) w.push_back({i, b[i]});
  return collect(pres, w);
}

GroupElement inverse(const PcPresentation& pres, const GroupElement& a) {
  // left-multiply by g_i^(p - e_i) for ascending i; each step zeroes
  // coordinate i of the running product without touching lower ones
  GroupElement inv = identity(pres);
  GroupElement t = a;
  for (std::uint32_t i = 0; i < pres.m; ++i) {
    if (t[i] == 0) continue;
    std::uint32_t c = static_cast<std::uint32_t>(pres.p) - t[i];
    GroupElement step = identity(pres);
    step[i] = c;
    t = multiply(pres, step, t);
    inv = multiply(pres, step, inv);
    if (t[i] != 0) fail(ErrKind::InternalInconsistency, "inverse: coordinate did not cancel");
  }
  return inv;
}

GroupElement power(const PcPresentation& pres, const GroupElement& a, std::uint64_t e) {
  GroupElement r = identity(pres);
  GroupElement base = a;
  while (e) {
    if (e & 1) r = multiply(pres, r, base);
    e >>= 1;
    if (e) base = multiply(pres, base, base);
  }
  return r;
}

GroupElement conjugate(const PcPresentation& pres, const GroupElement& x, const GroupElement& g,
                       const GroupElement& g_inv) {
  return multiply(pres, multiply(pres, g_inv, x), g);
}

std::optional<std::string> consistency_check(const PcPresentation& pres) {
  const std::uint32_t m = pres.m;
  auto gen_elem = [&](std::uint32_t i, std::uint64_t e) {
    return collect(pres, Word{{i, e}});
  };
  // associativity overlaps g_k (g_j g_i) = (g_k g_j) g_i, k > j > i
  for (std::uint32_t k = 2; k < m; ++k)
    for (std::uint32_t j = 1; j < k; ++j)
      for (std::uint32_t i = 0; i < j; ++i) {
        GroupElement lhs =
            multiply(pres, gen_elem(k, 1), multiply(pres, gen_elem(j, 1), gen_elem(i, 1)));
        GroupElement rhs =
            multiply(pres, multiply(pres, gen_elem(k, 1), gen_elem(j, 1)), gen_elem(i, 1));
        if (lhs != rhs) {
          std::ostringstream out;
          out << "overlap g" << (k + 1) << "*(g" << (j + 1) << "*g" << (i + 1) << ") != (g"
              << (k + 1) << "*g" << (j + 1) << ")*g" << (i + 1);
          return out.str();
        }
      }
  // power overlaps
  for (std::uint32_t j = 0; j < m; ++j)
    for (std::uint32_t i = 0; i < j; ++i) {
      GroupElement lhs = collect(pres, Word{{j, pres.p}, {i, 1}});
      GroupElement rhs = multiply(pres, gen_elem(j, pres.p - 1),
                                  multiply(pres, gen_elem(j, 1), gen_elem(i, 1)));
      if (lhs != rhs)
        return "overlap g" + std::to_string(j + 1) + "^p * g" + std::to_string(i + 1);
      lhs = collect(pres, Word{{j, 1}, {i, pres.p}});
      rhs = multiply(pres, multiply(pres, gen_elem(j, 1), gen_elem(i, 1)),
                     gen_elem(i, pres.p - 1));
      if (lhs != rhs)
        return "overlap g" + std::to_string(j + 1) + " * g" + std::to_string(i + 1) + "^p";
    }
  for (std::uint32_t i = 0; i < m; ++i) {
    GroupElement pw = collect(pres, pres.power_words[i]);
    GroupElement lhs = multiply(pres, gen_elem(i, 1), pw);
    GroupElement rhs = multiply(pres, pw, gen_elem(i, 1));
    if (lhs != rhs) return "overlap g" + std::to_string(i + 1) + "^(p+1)";
  }
  return std::nullopt;
}

std::uint64_t enumerable_order(const PcPresentation& pres, std::uint64_t guard) {
  std::uint64_t n = 1;
  for (std::uint32_t i = 0; i < pres.m; ++i) {
    if (n > guard / pres.p)
      fail(ErrKind::OrderGuardExceeded,
           "group order p^" + std::to_string(pres.m) + " exceeds the enumeration guard " +
               std::to_string(guard));
    n *= pres.p;
  }
  if (n > guard)
    fail(ErrKind::OrderGuardExceeded, "group order exceeds the enumeration guard");
  return n;
}

std::uint64_t element_index(const PcPresentation& pres, const GroupElement& x) {
  std::uint64_t idx = 0;
  for (std::uint32_t i = 0; i < pres.m; ++i) idx = idx * pres.p + x[i];
  return idx;
}

GroupElement element_at(const PcPresentation& pres, std::uint64_t idx) {
  GroupElement x(pres.m, 0);
  for (std::uint32_t i = pres.m; i-- > 0;) {
    x[i] = static_cast<std::uint32_t>(idx % pres.p);
    idx /= pres.p;
  }
  return x;
}

ClassData conjugacy_classes(const PcPresentation& pres, std::uint64_t order_guard) {
  const std::uint64_t n = enumerable_order(pres, std::min(order_guard, kOrderGuard));
  constexpr std::uint32_t kUnassigned = 0xffffffffu;

  std::vector<GroupElement> gens(pres.m), gen_invs(pres.m);
  for (std::uint32_t i = 0; i < pres.m; ++i) {
    gens[i] = identity(pres);
    gens[i][i] = 1;
    gen_invs[i] = inverse(pres, gens[i]);
  }

  ClassData cd;
  cd.class_of.assign(n, kUnassigned);
  std::vector<std::uint64_t> stack;
  for (std::uint64_t seed = 0; seed < n; ++seed) {
    if (cd.class_of[seed] != kUnassigned) continue;
    std::uint32_t c = static_cast<std::uint32_t>(cd.reps.size());
    cd.reps.push_back(element_at(pres, seed));  // ascending scan => lex-minimal member
    cd.sizes.push_back(0);
    cd.class_of[seed] = c;
    stack.assign(1, seed);
    while (!stack.empty()) {
      std::uint64_t xi = stack.back();
      stack.pop_back();
      ++cd.sizes[c];
      GroupElement x = element_at(pres, xi);
      for (std::uint32_t i = 0; i < pres.m; ++i) {
        std::uint64_t yi = element_index(pres, conjugate(pres, x, gens[i], gen_invs[i]));
        if (cd.class_of[yi] == kUnassigned) {
          cd.class_of[yi] = c;
          stack.push_back(yi);
        }
      }
    }
  }
  cd.trivial_class = cd.class_of[0];

  cd.power_map.resize(cd.reps.size());
  for (std::size_t c = 0; c < cd.reps.size(); ++c)
    cd.power_map[c] =
        cd.class_of[element_index(pres, power(pres, cd.reps[c], pres.p))];

  // heights: peel off successive p-th power images until only 1 remains
  cd.heights.assign(cd.reps.size(), 0);
  cd.heights[cd.trivial_class] = -1;
  std::vector<char> in_set(n, 1);
  std::int32_t level = 0;
  for (;;) {
    std::vector<char> next(n, 0);
    bool nontrivial = false;
    for (std::uint64_t xi = 0; xi < n; ++xi) {
      if (!in_set[xi]) continue;
      std::uint64_t yi = element_index(pres, power(pres, element_at(pres, xi), pres.p));
      next[yi] = 1;
      if (yi != 0) nontrivial = true;
    }
    ++level;
    in_set.swap(next);
    for (std::size_t c = 0; c < cd.reps.size(); ++c)
      if (static_cast<std::int32_t>(c) != static_cast<std::int32_t>(cd.trivial_class) &&
          in_set[element_index(pres, cd.reps[c])])
        cd.heights[c] = level;
    if (!nontrivial) break;
  }
  return cd;
}

std::uint64_t element_order(const PcPresentation& pres, const GroupElement& x) {
  GroupElement t = x;
  std::uint64_t ord = 1;
  const GroupElement id = identity(pres);
  for (std::uint32_t i = 0; i <= pres.m; ++i) {
    if (t == id) return ord;
    t = power(pres, t, pres.p);
    ord *= pres.p;
  }
  fail(ErrKind::InternalInconsistency, "element order exceeds p^m");
}

std::uint64_t group_exponent(const PcPresentation& pres, std::uint64_t order_guard) {
  ClassData cd = conjugacy_classes(pres, order_guard);
  std::uint64_t e = 1;
  for (const GroupElement& rep : cd.reps) e = std::max(e, element_order(pres, rep));
  return e;
}

std::string element_to_string(const GroupElement& x) {
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    if (!first) out << "*";
    out << "g" << (i + 1);
    if (x[i] != 1) out << "^" << x[i];
    first = false;
  }
  return first ? "1" : out.str();
}

AbelianGroup abelianization_of_group(const PcPresentation& pres) {
  IntMat rel;
  auto word_row = [&](const Word& w) {
    IntVec row(pres.m, 0);
    for (const Letter& l : w) row[l.gen] += static_cast<long>(l.exp);
    return row;
  };
  for (std::uint32_t i = 0; i < pres.m; ++i) {
    IntVec row = word_row(pres.power_words[i]);
    for (auto& v : row) v = -v;
    row[i] += static_cast<long>(pres.p);
    rel.push_back(std::move(row));
  }
  for (std::uint32_t j = 1; j < pres.m; ++j)
    for (std::uint32_t i = 0; i < j; ++i) {
      const Word& c = pres.comm(j, i);
      if (!c.empty()) rel.push_back(word_row(c));
    }
  return cokernel(rel, pres.m);
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct LineCursor {
  const std::string& s;
  int line;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  int col() const { return static_cast<int>(pos) + 1; }

  std::uint64_t number(const char* what) {
    skip_ws();
    if (pos >= s.size() || !isdigit(static_cast<unsigned char>(s[pos])))
      fail_syntax(std::string("expected ") + what, line, col());
    std::uint64_t v = 0;
    while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + (s[pos] - '0');
      if (v > (std::uint64_t(1) << 62)) fail_syntax("number too large", line, col());
      ++pos;
    }
    return v;
  }

  void expect(char c, const char* what) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c)
      fail_syntax(std::string("expected ") + what, line, col());
    ++pos;
  }

  std::string keyword() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
    return s.substr(start, pos - start);
  }
};

// `g<k>` with 1-based k, converted to 0-based
std::uint32_t parse_gen(LineCursor& cur, std::uint32_t m) {
  cur.skip_ws();
  if (cur.pos >= cur.s.size() || cur.s[cur.pos] != 'g')
    fail_syntax("expected generator g<k>", cur.line, cur.col());
  ++cur.pos;
  std::uint64_t k = cur.number("generator index");
  if (k < 1 || k > m)
    fail_syntax("generator index out of range 1.." + std::to_string(m), cur.line, cur.col());
  return static_cast<std::uint32_t>(k - 1);
}

Word parse_word(LineCursor& cur, std::uint32_t m, std::uint64_t p, std::uint32_t min_gen) {
  cur.skip_ws();
  if (cur.pos < cur.s.size() && cur.s[cur.pos] == '1') {
    ++cur.pos;
    return {};
  }
  Word w;
  std::int64_t prev = -1;
  for (;;) {
    int gen_col = cur.col();
    std::uint32_t g = parse_gen(cur, m);
    if (g < min_gen)
      fail_syntax("word must use generator indices greater than g" + std::to_string(min_gen),
                  cur.line, gen_col);
    if (static_cast<std::int64_t>(g) <= prev)
      fail_syntax("word generators must be strictly increasing", cur.line, gen_col);
    prev = g;
    std::uint64_t e = 1;
    cur.skip_ws();
    if (cur.pos < cur.s.size() && cur.s[cur.pos] == '^') {
      ++cur.pos;
      int exp_col = cur.col();
      e = cur.number("exponent");
      if (e < 1 || e >= p)
        fail_syntax("exponent must lie in [1, p)", cur.line, exp_col);
    }
    w.push_back({g, e});
    cur.skip_ws();
    if (cur.pos < cur.s.size() && cur.s[cur.pos] == '*') {
      ++cur.pos;
      continue;
    }
    break;
  }
  return w;
}

}  // namespace

PcPresentation parse_presentation(const std::string& text) {
  std::vector<std::pair<int, std::string>> lines;
  {
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      std::size_t a = raw.find_first_not_of(" \t");
      if (a == std::string::npos) continue;
      lines.emplace_back(no, raw);
    }
  }
  if (lines.empty()) fail_syntax("empty presentation", 1, 1);

  std::size_t li = 0;
  {
    LineCursor cur{lines[li].second, lines[li].first};
    if (cur.keyword() != "pgroup" || !cur.done())
      fail_syntax("first line must be `pgroup`", lines[li].first, 1);
    ++li;
  }
  if (li >= lines.size()) fail_syntax("missing `p <prime>` line", lines.back().first, 1);
  std::uint64_t p;
  {
    LineCursor cur{lines[li].second, lines[li].first};
    if (cur.keyword() != "p") fail_syntax("expected `p <prime>`", cur.line, 1);
    p = cur.number("prime");
    if (!cur.done()) fail_syntax("trailing characters", cur.line, cur.col());
    if (p >= (std::uint64_t(1) << 31))
      fail(ErrKind::DegreeOutOfRange, "characteristic exceeds 2^31");
    if (!is_prime_u64(p)) fail(ErrKind::NotPrime, std::to_string(p) + " is not prime");
    ++li;
  }
  if (li >= lines.size()) fail_syntax("missing `gens <m>` line", lines.back().first, 1);
  std::uint32_t m;
  {
    LineCursor cur{lines[li].second, lines[li].first};
    if (cur.keyword() != "gens") fail_syntax("expected `gens <m>`", cur.line, 1);
    std::uint64_t mm = cur.number("generator count");
    if (!cur.done()) fail_syntax("trailing characters", cur.line, cur.col());
    if (mm < 1) fail_syntax("generator count must be at least 1", cur.line, 1);
    if (mm > kGeneratorCap)
      fail(ErrKind::OrderGuardExceeded,
           "generator count exceeds the supported maximum " + std::to_string(kGeneratorCap));
    m = static_cast<std::uint32_t>(mm);
    ++li;
  }

  PcPresentation pres;
  pres.p = p;
  pres.m = m;
  pres.power_words.assign(m, {});
  pres.comm_words.assign(static_cast<std::size_t>(m) * (m - 1) / 2, {});
  std::vector<bool> pow_seen(m, false);
  std::vector<bool> comm_seen(pres.comm_words.size(), false);

  for (; li < lines.size(); ++li) {
    LineCursor cur{lines[li].second, lines[li].first};
    std::string kw = cur.keyword();
    if (kw == "pow") {
      std::uint32_t i = parse_gen(cur, m);
      cur.expect('=', "`=`");
      Word w = parse_word(cur, m, p, i + 1);
      if (!cur.done()) fail_syntax("trailing characters", cur.line, cur.col());
      if (pow_seen[i])
        fail_syntax("duplicate pow line for g" + std::to_string(i + 1), cur.line, 1);
      pow_seen[i] = true;
      pres.power_words[i] = std::move(w);
    } else if (kw == "comm") {
      std::uint32_t j = parse_gen(cur, m);
      int icol = cur.col();
      std::uint32_t i = parse_gen(cur, m);
      if (j <= i) fail_syntax("comm requires j > i", cur.line, icol);
      cur.expect('=', "`=`");
      Word w = parse_word(cur, m, p, j + 1);
      if (!cur.done()) fail_syntax("trailing characters", cur.line, cur.col());
      std::size_t pi = PcPresentation::pair_index(j, i);
      if (comm_seen[pi])
        fail_syntax("duplicate comm line for [g" + std::to_string(j + 1) + ",g" +
                        std::to_string(i + 1) + "]",
                    cur.line, 1);
      comm_seen[pi] = true;
      pres.comm_words[pi] = std::move(w);
    } else {
      fail_syntax("expected `pow` or `comm` directive", lines[li].first, 1);
    }
  }

  if (auto violation = consistency_check(pres))
    fail(ErrKind::InconsistentPresentation, *violation);
  return pres;
}

namespace {

const std::vector<std::pair<std::string, std::string>>& builtin_table() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"c2", "pgroup\np 2\ngens 1\n"},
      {"c4", "pgroup\np 2\ngens 2\npow g1 = g2\n"},
      {"c2xc2", "pgroup\np 2\ngens 2\n"},
      {"c8", "pgroup\np 2\ngens 3\npow g1 = g2\npow g2 = g3\n"},
      {"d8", "pgroup\np 2\ngens 3\npow g2 = g3\ncomm g2 g1 = g3\n"},
      {"q8", "pgroup\np 2\ngens 3\npow g1 = g3\npow g2 = g3\ncomm g2 g1 = g3\n"},
      {"heis3", "pgroup\np 3\ngens 3\ncomm g2 g1 = g3\n"},
      {"jm14_f39",
       "pgroup\n"
       "p 2\n"
       "gens 7\n"
       "pow g1 = g4\n"
       "pow g2 = g5\n"
       "comm g2 g1 = g3\n"
       "comm g3 g1 = g6\n"
       "comm g3 g2 = g7\n"
       "comm g4 g2 = g6\n"
       "comm g5 g1 = g7\n"},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, src] : builtin_table()) v.push_back(name);
    return v;
  }();
  return names;
}

const std::string& builtin_source(const std::string& name) {
  for (const auto& [n, src] : builtin_table())
    if (n == name) return src;
  fail(ErrKind::UnknownBuiltin, "unknown built-in group `" + name + "`");
}

PcPresentation builtin(const std::string& name) {
  return parse_presentation(builtin_source(name));
}

}  // namespace ub0
