#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bogolib/fock.hpp"
#include "bogolib/hartree.hpp"

namespace bogolib {

// Flat INI-like run description:
//
//   [model]      kinetic, mass, exponent, interaction, coupling, depth, width, L, n
//   [solver]     tol, max_iter, tau, initial_width
//   [bogoliubov] mode_counts
//   [manybody]   N_list, m_exc, M_policy (cap:K or fixed:K), mode_policy, lanczos_tol
//   [checks]     list, samples, eps, lambda_rel, Lambda_rel
//   [output]     dir, cache
//   [random]     seed
//
// '#' and ';' start comments. Unknown sections or keys are errors.
struct RunConfig {
  KineticSpec kinetic;
  InteractionSpec interaction;
  double L = 64.0;
  Index n = 2048;

  MinimizeConfig solver;

  std::vector<Index> mode_counts{64, 128, 256, 512};

  std::vector<int> N_list{4, 8, 16};
  Index m_exc = 8;
  MPolicy M_policy;
  ModePolicy mode_policy = ModePolicy::lplus_ordered;
  double lanczos_tol = 1e-9;

  std::vector<std::string> checks;
  bool checks_given = false;
  Index check_samples = 200;
  double check_eps = 0.1;
  double lambda_rel = 1.0;
  double Lambda_rel = 4.0;

  std::filesystem::path out_dir = "out";
  std::filesystem::path cache_dir;  // empty: <out_dir>/cache

  std::uint64_t seed = 20240601;

  Model model() const;
  std::filesystem::path cache() const { return cache_dir.empty() ? out_dir / "cache" : cache_dir; }
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Checks every parsed value against the module preconditions; throws ConfigError.
void validate_config(const RunConfig& cfg);

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"relative_bound", "coercivity", "commutative", "excitation_map",
                                              "eta",            "ims",        "median",      "gradient"};
  return names;
}

}  // namespace bogolib
