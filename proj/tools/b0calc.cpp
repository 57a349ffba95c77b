// b0calc: conjugacy data, unit-group abelianizations, the auxiliary group
// M_q, Bogomolov-multiplier reports, coadjoint-orbit profiles and a
// deterministic self-test, over power-commutator presentations and
// structure-constant algebra files.
//
// Exit codes: 0 success, 1 usage, 2 invalid input, 3 resource guard tripped,
// 4 internal cross-validation failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "selftest.hpp"
#include "ub0/abelian.hpp"
#include "ub0/errors.hpp"
#include "ub0/fakedegree.hpp"
#include "ub0/invariants.hpp"
#include "ub0/nilalgebra.hpp"
#include "ub0/pcgroup.hpp"
#include "ub0/smallfield.hpp"
#include "ub0/unitgroup.hpp"

using nlohmann::json;
using namespace ub0;

namespace {

struct RunConfig {
  std::string group_source;
  std::string algebra_source;
  std::uint64_t q = 0;
  std::uint64_t m = 0;  // 0 = not given
  bool json_out = false;
  bool alt_embedding = false;
  std::uint64_t max_order = kOrderGuard;
  std::uint64_t max_gens = kUnitGenGuard;
  std::uint64_t seed = 12345;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrKind::BadArgument, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PcPresentation load_group(const std::string& source) {
  const std::string prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return builtin(source.substr(prefix.size()));
  return parse_presentation(read_file(source));
}

Int int_pow(std::uint64_t b, std::uint64_t e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  return r;
}

// the CLI overrides can only lower the compiled-in limits, never raise them
void check_unit_gen_budget(std::uint64_t order, std::uint32_t n, std::uint64_t max_gens) {
  const std::uint64_t gens = (order - 1) * n;
  if (gens > max_gens)
    fail(ErrKind::GeneratorGuardExceeded,
         "unit group needs " + std::to_string(gens) + " generators, over the limit of " +
             std::to_string(max_gens));
}

json factors_json(const AbelianGroup& g) {
  json arr = json::array();
  for (const Int& f : g.factors) arr.push_back(f.get_ui());
  return arr;
}

// shared by text and JSON output so both carry byte-identical numbers
std::string factors_compact(const AbelianGroup& g) { return factors_json(g).dump(); }

void emit_json(const RunConfig& cfg, const std::string& command, const std::string& input,
               std::optional<std::uint64_t> q, const json& results) {
  if (!cfg.json_out) return;
  json out;
  out["command"] = command;
  out["input"] = input;
  out["q"] = q ? json(*q) : json(nullptr);
  out["results"] = results;
  out["timings_ms"] = 0;
  std::cout << out.dump(2) << "\n";
}

int cmd_classes(const RunConfig& cfg) {
  const PcPresentation pres = load_group(cfg.group_source);
  const std::uint64_t order = enumerable_order(pres, cfg.max_order);
  const ClassData cd = conjugacy_classes(pres, cfg.max_order);

  json res;
  res["group_order"] = order;
  res["k"] = cd.k();
  res["class_sizes"] = cd.sizes;
  res["power_map"] = cd.power_map;
  res["heights"] = cd.heights;

  if (!cfg.json_out) {
    std::cout << "group: " << cfg.group_source << "\n"
              << "order: " << order << "\n"
              << "k: " << cd.k() << "\n";
    for (std::uint32_t c = 0; c < cd.k(); ++c)
      std::cout << "class " << c << ": size " << cd.sizes[c] << ", power -> " << cd.power_map[c]
                << ", height " << cd.heights[c] << "\n";
  }
  emit_json(cfg, "classes", cfg.group_source, std::nullopt, res);
  return 0;
}

int cmd_units(const RunConfig& cfg) {
  const auto [p, n] = split_prime_power(cfg.q);
  const PcPresentation pres = load_group(cfg.group_source);
  const std::uint64_t order = enumerable_order(pres, cfg.max_order);
  check_unit_gen_budget(order, n, cfg.max_gens);

  const NilpotentAlgebra A = augmentation_ideal(pres, make_field(p, n));
  const AbelianizationData ab = unit_abelianization(A);
  const Int ab_order = ::ub0::order(ab.group);
  const std::uint32_t k = conjugacy_classes(pres, cfg.max_order).k();
  const Int q_pow = int_pow(cfg.q, k - 1);

  if (!mpz_divisible_p(ab_order.get_mpz_t(), q_pow.get_mpz_t()))
    fail(ErrKind::NonIntegralRatio, "abelianization order " + ab_order.get_str() +
                                        " is not divisible by q^(k-1) = " + q_pow.get_str());
  Int b0 = ab_order / q_pow;
  for (Int t = b0; t != 1;) {
    if (!mpz_divisible_ui_p(t.get_mpz_t(), p))
      fail(ErrKind::NonIntegralRatio,
           "quotient " + b0.get_str() + " by q^(k-1) is not a power of p");
    t /= p;
  }

  json res;
  res["k"] = k;
  res["inferred_b0_order"] = b0.get_str();
  res["q_pow_k_minus_1"] = q_pow.get_str();
  res["unit_ab_factors"] = factors_json(ab.group);
  res["unit_ab_order"] = ab_order.get_str();
  res["unit_ab_pretty"] = factors_to_string(ab.group);

  if (!cfg.json_out) {
    std::cout << "group: " << cfg.group_source << "\n"
              << "q: " << cfg.q << "\n"
              << "k: " << k << "\n"
              << "unit abelianization: " << factors_to_string(ab.group) << "\n"
              << "invariant factors: " << factors_compact(ab.group) << "\n"
              << "order: " << ab_order.get_str() << "\n"
              << "q^(k-1): " << q_pow.get_str() << "\n"
              << "inferred |B0|: " << b0.get_str() << "\n";
  }
  emit_json(cfg, "units", cfg.group_source, cfg.q, res);
  return 0;
}

int cmd_mq(const RunConfig& cfg) {
  const PcPresentation pres = load_group(cfg.group_source);
  enumerable_order(pres, cfg.max_order);
  const AbelianGroup mq = mq_structure(pres, cfg.q);
  const Int mq_order = ::ub0::order(mq);

  json res;
  res["mq_factors"] = factors_json(mq);
  res["mq_order"] = mq_order.get_str();
  res["mq_pretty"] = factors_to_string(mq);

  if (!cfg.json_out) {
    std::cout << "group: " << cfg.group_source << "\n"
              << "q: " << cfg.q << "\n"
              << "M_q: " << factors_to_string(mq) << "\n"
              << "invariant factors: " << factors_compact(mq) << "\n"
              << "order: " << mq_order.get_str() << "\n";
  }
  emit_json(cfg, "mq", cfg.group_source, cfg.q, res);
  return 0;
}

int cmd_bogomolov(const RunConfig& cfg) {
  const auto [p, n] = split_prime_power(cfg.q);
  const PcPresentation pres = load_group(cfg.group_source);
  const std::uint64_t order = enumerable_order(pres, cfg.max_order);
  check_unit_gen_budget(order, n, cfg.max_gens);

  if (cfg.m != 0) {
    // single-degree probe of the coefficient-extension kernel ker f_m
    const unsigned root = cfg.alt_embedding ? 1 : 0;
    const KernelResult kr = kernel_f(pres, cfg.q, static_cast<std::uint32_t>(cfg.m), root);
    const Int ko = ::ub0::order(kr.structure);

    json res;
    res["kernel_factors"] = factors_json(kr.structure);
    res["kernel_order"] = ko.get_str();
    res["kernel_pretty"] = factors_to_string(kr.structure);
    res["m"] = cfg.m;
    res["root_index"] = root;

    if (!cfg.json_out) {
      std::cout << "group: " << cfg.group_source << "\n"
                << "q: " << cfg.q << "\n"
                << "kernel of f_" << cfg.m << ": " << factors_to_string(kr.structure)
                << " (order " << ko.get_str() << "), root index " << root << "\n";
    }
    emit_json(cfg, "bogomolov", cfg.group_source, cfg.q, res);
    return 0;
  }

  const BogomolovReport rep = bogomolov(pres, cfg.q, cfg.group_source);

  json chain = json::array();
  for (const auto& [deg, ko] : rep.kernel_orders)
    chain.push_back(json{{"degree", deg}, {"order", ko.get_str()}});

  json res;
  res["b0_exponent"] = rep.b0_exponent.get_str();
  res["b0_factors"] = factors_json(rep.b0_structure);
  res["b0_order"] = rep.b0_order.get_str();
  res["b0_pretty"] = factors_to_string(rep.b0_structure);
  res["k"] = rep.k;
  res["kernel_chain"] = chain;
  res["mq_factors"] = factors_json(rep.mq);
  res["mq_pretty"] = factors_to_string(rep.mq);
  res["unit_ab_factors"] = factors_json(rep.unit_ab);
  res["unit_ab_pretty"] = factors_to_string(rep.unit_ab);

  if (!cfg.json_out) {
    std::cout << "group: " << cfg.group_source << "\n"
              << "q: " << cfg.q << "\n"
              << "k: " << rep.k << "\n"
              << "unit abelianization: " << factors_to_string(rep.unit_ab) << " "
              << factors_compact(rep.unit_ab) << "\n"
              << "M_q: " << factors_to_string(rep.mq) << " " << factors_compact(rep.mq) << "\n"
              << "|B0|: " << rep.b0_order.get_str() << "\n"
              << "B0 structure: " << factors_to_string(rep.b0_structure) << "\n"
              << "exp B0: " << rep.b0_exponent.get_str() << "\n";
    std::cout << "kernel chain:";
    const char* sep = " ";
    for (const auto& [deg, ko] : rep.kernel_orders) {
      std::cout << sep << "|ker f_" << deg << "| = " << ko.get_str();
      sep = ", ";
    }
    std::cout << "\n";
  }
  emit_json(cfg, "bogomolov", cfg.group_source, cfg.q, res);
  return 0;
}

int cmd_fakedegree(RunConfig& cfg) {
  NilpotentAlgebra A = [&] {
    if (!cfg.algebra_source.empty()) {
      NilpotentAlgebra parsed = parse_algebra(read_file(cfg.algebra_source));
      if (cfg.q != 0 && cfg.q != parsed.field->q())
        fail(ErrKind::FieldMismatch, "--q " + std::to_string(cfg.q) +
                                         " does not match the algebra's field of size " +
                                         std::to_string(parsed.field->q()));
      cfg.q = parsed.field->q();
      return parsed;
    }
    const auto [p, n] = split_prime_power(cfg.q);
    const PcPresentation pres = load_group(cfg.group_source);
    enumerable_order(pres, cfg.max_order);
    return augmentation_ideal(pres, make_field(p, n));
  }();
  const std::string input = cfg.algebra_source.empty() ? cfg.group_source : cfg.algebra_source;

  const FakeDegreeReport rep = fake_degree_report(A, true);
  const char* verdict = rep.consistent ? "CONSISTENT" : "VIOLATED";

  json res;
  res["dim"] = A.dim;
  res["fixed_points"] = rep.fixed_points.get_str();
  res["ratio"] = rep.ratio.get_str();
  res["unit_ab_order"] = rep.unit_ab_order.get_str();
  res["verdict"] = verdict;

  // orbit sizes are exact powers q^{2w}; the matching fake degree is q^w
  const auto degree_of = [&](std::uint64_t size) {
    std::uint64_t fd = 1;
    for (std::uint64_t t = size; t > 1; t /= cfg.q * cfg.q) fd *= cfg.q;
    return fd;
  };

  const bool with_profile = int_pow(cfg.q, A.dim) <= kProfileGuard;
  OrbitProfile prof;
  if (with_profile) {
    prof = coadjoint_profile(A);
    json strata = json::array();
    for (const auto& [size, count] : prof.counts)
      strata.push_back(json{{"count", count},
                            {"fake_degree", degree_of(size)},
                            {"orbit_size", size},
                            {"orbits", prof.orbit_counts.at(size)}});
    res["orbit_profile"] = strata;
    res["orbit_total"] = prof.orbit_total();
  }
  if (rep.orbit_check_run) {
    res["orbit_check"] =
        json{{"orbit_count", rep.orbit_count}, {"unit_class_count", rep.unit_class_count}};
  }

  if (!cfg.json_out) {
    std::cout << "algebra: " << input << " (dim " << A.dim << " over F_" << cfg.q << ")\n"
              << "fixed points: " << rep.fixed_points.get_str() << "\n"
              << "unit abelianization order: " << rep.unit_ab_order.get_str() << "\n"
              << "verdict: " << verdict << " (ratio " << rep.ratio.get_str() << ")\n";
    if (with_profile) {
      std::cout << "orbit profile:\n";
      for (const auto& [size, count] : prof.counts)
        std::cout << "  orbit size " << size << ": " << count << " functionals, "
                  << prof.orbit_counts.at(size) << " orbits, fake degree " << degree_of(size)
                  << "\n";
      std::cout << "total orbits: " << prof.orbit_total() << "\n";
    }
    if (rep.orbit_check_run)
      std::cout << "unit conjugacy classes (exhaustive): " << rep.unit_class_count
                << ", coadjoint orbits: " << rep.orbit_count << "\n";
  }
  emit_json(cfg, "fakedegree", input, cfg.q, res);
  return 0;
}

int cmd_selftest(const RunConfig& cfg) {
  std::optional<PcPresentation> extra;
  if (!cfg.group_source.empty()) extra = load_group(cfg.group_source);

  const std::vector<ub0cli::SuiteResult> suites =
      ub0cli::run_selftest(cfg.seed, cfg.max_order, cfg.max_gens, extra);
  bool all_ok = true;
  json arr = json::array();
  for (const auto& s : suites) {
    all_ok = all_ok && s.ok;
    arr.push_back(json{{"detail", s.detail}, {"name", s.name}, {"ok", s.ok}});
  }
  json res;
  res["all_passed"] = all_ok;
  res["seed"] = cfg.seed;
  res["suites"] = arr;

  if (!cfg.json_out) {
    for (const auto& s : suites) {
      std::cout << (s.ok ? "[PASS] " : "[FAIL] ") << s.name;
      if (!s.ok) std::cout << " -- " << s.detail;
      std::cout << "\n";
    }
    std::size_t passed = 0;
    for (const auto& s : suites) passed += s.ok;
    std::cout << "self-test: " << passed << "/" << suites.size() << " suites passed\n";
  }
  emit_json(cfg, "selftest", cfg.group_source.empty() ? "builtins" : cfg.group_source,
            std::nullopt, res);
  return all_ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "b0calc: unit groups of modular group algebras, the auxiliary group M_q,\n"
      "Bogomolov multipliers and coadjoint-orbit profiles for finite p-groups"};
  app.require_subcommand(1);
  RunConfig cfg;

  const std::string group_help = "presentation file or builtin:<name>";
  const std::string order_help = "lower the group-order enumeration limit";
  const std::string gens_help = "lower the unit-generator limit";
  const std::string json_help = "emit the report as JSON on stdout";

  CLI::App* sc_classes =
      app.add_subcommand("classes", "conjugacy classes, power map and heights");
  sc_classes->add_option("--group", cfg.group_source, group_help)->required();
  sc_classes->add_option("--max-order", cfg.max_order, order_help);
  sc_classes->add_flag("--json", cfg.json_out, json_help);

  CLI::App* sc_units =
      app.add_subcommand("units", "abelianization of the normalized unit group over F_q");
  sc_units->add_option("--group", cfg.group_source, group_help)->required();
  sc_units->add_option("--q", cfg.q, "field size (a prime power)")->required();
  sc_units->add_option("--max-order", cfg.max_order, order_help);
  sc_units->add_option("--max-gens", cfg.max_gens, gens_help);
  sc_units->add_flag("--json", cfg.json_out, json_help);

  CLI::App* sc_mq = app.add_subcommand("mq", "the auxiliary abelian group M_q");
  sc_mq->add_option("--group", cfg.group_source, group_help)->required();
  sc_mq->add_option("--q", cfg.q, "field size (a prime power)")->required();
  sc_mq->add_option("--max-order", cfg.max_order, order_help);
  sc_mq->add_flag("--json", cfg.json_out, json_help);

  CLI::App* sc_bog = app.add_subcommand(
      "bogomolov", "Bogomolov multiplier via both routes, or one extension kernel with --m");
  sc_bog->add_option("--group", cfg.group_source, group_help)->required();
  sc_bog->add_option("--q", cfg.q, "field size (a prime power)")->required();
  CLI::Option* m_opt =
      sc_bog->add_option("--m", cfg.m, "probe a single extension degree F_q -> F_{q^m}");
  sc_bog->add_flag("--alt-embedding", cfg.alt_embedding,
                   "debug: use the second conjugate embedding for the probe")
      ->needs(m_opt);
  sc_bog->add_option("--max-order", cfg.max_order, order_help);
  sc_bog->add_option("--max-gens", cfg.max_gens, gens_help);
  sc_bog->add_flag("--json", cfg.json_out, json_help);

  CLI::App* sc_fd = app.add_subcommand(
      "fakedegree", "coadjoint-orbit profile and the fixed-point consistency verdict");
  sc_fd->add_option("--group", cfg.group_source, group_help);
  sc_fd->add_option("--algebra", cfg.algebra_source, "structure-constant algebra file");
  sc_fd->add_option("--q", cfg.q, "field size (required with --group)");
  sc_fd->add_option("--max-order", cfg.max_order, order_help);
  sc_fd->add_flag("--json", cfg.json_out, json_help);

  CLI::App* sc_self =
      app.add_subcommand("selftest", "deterministic property suites over the built-in groups");
  sc_self->add_option("--seed", cfg.seed, "seed for the randomized sweeps");
  sc_self->add_option("--group", cfg.group_source, "extra presentation to include");
  sc_self->add_option("--max-order", cfg.max_order, order_help);
  sc_self->add_option("--max-gens", cfg.max_gens, gens_help);
  sc_self->add_flag("--json", cfg.json_out, json_help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (app.got_subcommand(sc_fd)) {
    if (cfg.group_source.empty() == cfg.algebra_source.empty()) {
      std::cerr << "error: fakedegree needs exactly one of --group or --algebra\n";
      return 1;
    }
    if (!cfg.group_source.empty() && cfg.q == 0) {
      std::cerr << "error: --q is required when fakedegree runs on --group\n";
      return 1;
    }
  }

  try {
    if (app.got_subcommand(sc_classes)) return cmd_classes(cfg);
    if (app.got_subcommand(sc_units)) return cmd_units(cfg);
    if (app.got_subcommand(sc_mq)) return cmd_mq(cfg);
    if (app.got_subcommand(sc_bog)) return cmd_bogomolov(cfg);
    if (app.got_subcommand(sc_fd)) return cmd_fakedegree(cfg);
    if (app.got_subcommand(sc_self)) return cmd_selftest(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.bucket());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 4;  // unreachable: require_subcommand(1) guarantees a dispatch
}
