#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ub0/abelian.hpp"
#include "ub0/errors.hpp"

namespace ub0 {

struct Letter {
  std::uint32_t gen;  // 0-based generator index
  std::uint64_t exp;
  bool operator==(const Letter&) const = default;
};
using Word = std::vector<Letter>;

// Power-commutator presentation of a finite p-group: every generator has
// relative order p, g_i^p equals power_words[i] (a normal word in higher
// generators), and g_j g_i = g_i g_j [g_j,g_i] with [g_j,g_i] stored in
// comm_words at pair_index(j,i). Missing/empty words mean trivial.
struct PcPresentation {
  std::uint64_t p = 0;
  std::uint32_t m = 0;
  std::vector<Word> power_words;  // size m
  std::vector<Word> comm_words;   // size m*(m-1)/2

  static std::size_t pair_index(std::uint32_t j, std::uint32_t i) {
    // requires j > i
    return static_cast<std::size_t>(j) * (j - 1) / 2 + i;
  }
  const Word& comm(std::uint32_t j, std::uint32_t i) const {
    return comm_words[pair_index(j, i)];
  }
};

// normal form: exponent vector of length m, entries in [0, p)
using GroupElement = std::vector<std::uint32_t>;

inline constexpr std::uint64_t kOrderGuard = std::uint64_t(1) << 20;

PcPresentation parse_presentation(const std::string& text);
PcPresentation builtin(const std::string& name);  // UnknownBuiltin
const std::vector<std::string>& builtin_names();
const std::string& builtin_source(const std::string& name);

GroupElement identity(const PcPresentation& pres);
GroupElement collect(const PcPresentation& pres, const Word& word);
GroupElement multiply(const PcPresentation& pres, const GroupElement& a, const GroupElement& b);
GroupElement inverse(const PcPresentation& pres, const GroupElement& a);
GroupElement power(const PcPresentation& pres, const GroupElement& a, std::uint64_t e);
// g^－1 * x * g
GroupElement conjugate(const PcPresentation& pres, const GroupElement& x, const GroupElement& g,
                       const GroupElement& g_inv);

// nullopt when consistent; otherwise a description of the first violated
// overlap relation
std::optional<std::string> consistency_check(const PcPresentation& pres);

// p^m when it fits under `guard`, else OrderGuardExceeded
std::uint64_t enumerable_order(const PcPresentation& pres, std::uint64_t guard = kOrderGuard);
std::uint64_t element_index(const PcPresentation& pres, const GroupElement& x);
GroupElement element_at(const PcPresentation& pres, std::uint64_t idx);

struct ClassData {
  std::vector<GroupElement> reps;     // lexicographically minimal member per class
  std::vector<std::uint64_t> sizes;
  std::vector<std::uint32_t> class_of;    // element index -> class index
  std::vector<std::uint32_t> power_map;   // class -> class of rep^p
  std::vector<std::int32_t> heights;      // largest i with rep a p^i-th power; -1 = infinity
  std::uint32_t trivial_class = 0;

  std::uint32_t k() const { return static_cast<std::uint32_t>(reps.size()); }
};

ClassData conjugacy_classes(const PcPresentation& pres, std::uint64_t order_guard = kOrderGuard);

std::uint64_t element_order(const PcPresentation& pres, const GroupElement& x);
std::uint64_t group_exponent(const PcPresentation& pres, std::uint64_t order_guard = kOrderGuard);

// normal form as text: "1" or "g1^2*g3"
std::string element_to_string(const GroupElement& x);

AbelianGroup abelianization_of_group(const PcPresentation& pres);

}  // namespace ub0
