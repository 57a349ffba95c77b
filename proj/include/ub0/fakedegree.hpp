#pragma once

#include <cstdint>
#include <map>

#include "ub0/abelian.hpp"
#include "ub0/nilalgebra.hpp"

namespace ub0 {

// full functional sweep: q^dim ranks computed
inline constexpr std::uint64_t kProfileGuard = std::uint64_t(1) << 24;
// exhaustive unit-group enumeration
inline constexpr std::uint64_t kOracleGuard = std::uint64_t(1) << 20;

// How the functionals on J fall into coadjoint orbits: N_s functionals lie on
// orbits of size s, giving N_s/s orbits and N_s/s degree-sqrt(s) entries in
// the degree multiset. Every s is an even power of q.
struct OrbitProfile {
  std::map<std::uint64_t, std::uint64_t> counts;        // s -> N_s
  std::map<std::uint64_t, std::uint64_t> orbit_counts;  // s -> N_s / s
  std::map<std::uint64_t, std::uint64_t> fake_degrees;  // sqrt(s) -> N_s / s

  std::uint64_t orbit_total() const {
    std::uint64_t t = 0;
    for (const auto& [s, c] : orbit_counts) t += c;
    return t;
  }
  std::uint64_t fixed() const {
    const auto it = counts.find(1);
    return it == counts.end() ? 0 : it->second;
  }
};

// Sweeps every functional lambda on J, builds the d x d Gram matrix
// lambda(b_i b_j - b_j b_i), and tallies orbit size q^rank. The parallel and
// serial versions produce identical results (commutative tallies).
OrbitProfile coadjoint_profile(const NilpotentAlgebra& A);
OrbitProfile coadjoint_profile_serial(const NilpotentAlgebra& A);

// q^(dim - dim[J,J]_L): the number of rank-0 functionals, counted without
// sweeping (they are exactly the functionals vanishing on Lie commutators)
Int fixed_point_count(const NilpotentAlgebra& A);

struct FakeDegreeReport {
  Int fixed_points;   // linear-character count predicted by the orbit picture
  Int unit_ab_order;  // actual |(1+J)_ab|
  bool consistent = false;
  mpq_class ratio;  // unit_ab_order / fixed_points, exact

  // filled when requested and q^dim is within the oracle guard
  bool orbit_check_run = false;
  std::uint64_t orbit_count = 0;       // total coadjoint orbits
  std::uint64_t unit_class_count = 0;  // conjugacy classes of 1+J, brute force
};

// The linear-character comparison: the orbit picture predicts exactly
// fixed_point_count degree-1 characters, i.e. |(1+J)_ab| functionals of rank
// 0; report whether the group agrees. With with_orbit_check set (and the
// algebra small enough) also counts orbits and brute-force conjugacy classes.
FakeDegreeReport fake_degree_report(const NilpotentAlgebra& A, bool with_orbit_check = false);

// Exhaustive reference data for the unit group 1+J, computed without any of
// the presentation machinery: the derived subgroup is grown as the normal
// closure of the generator commutators, classes by orbit sweep.
struct UnitOracle {
  std::uint64_t group_order = 0;
  std::uint64_t derived_order = 0;
  std::uint64_t ab_order = 0;
  std::uint64_t class_count = 0;
};

UnitOracle brute_force_units(const NilpotentAlgebra& A, std::uint64_t guard = kOracleGuard);

}  // namespace ub0
