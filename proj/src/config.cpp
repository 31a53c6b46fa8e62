#include "bogolib/config.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace bogolib {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    bad(key, "not a number: '" + v + "'");
  }
  if (pos != v.size()) bad(key, "not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, "not an integer: '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, "not an unsigned integer: '" + v + "'");
  return x;
}

}  // namespace

Model RunConfig::model() const {
  Grid g(L, n);
  InteractionSpec v = interaction;
  return Model{g, kinetic, v};
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::string interaction_kind = "none";
  double coupling = 0.0, depth = 0.0, width = 1.0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> sections{"model",  "solver", "bogoliubov", "manybody",
                                                  "checks", "output", "random"};
      if (!sections.count(section)) throw ConfigError("unknown config section '" + section + "'");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    std::string k = trim(line.substr(0, eq));
    std::string v = trim(line.substr(eq + 1));
    std::string key = section + "." + k;
    if (!seen.insert(key).second) bad(key, "given twice");

    if (key == "model.kinetic") {
      if (v == "nonrelativistic") cfg.kinetic.kind = KineticSpec::Kind::nonrelativistic;
      else if (v == "fractional") cfg.kinetic.kind = KineticSpec::Kind::fractional;
      else bad(key, "expected nonrelativistic or fractional");
    } else if (key == "model.mass") {
      cfg.kinetic.mass = to_double(key, v);
    } else if (key == "model.exponent") {
      cfg.kinetic.exponent = to_double(key, v);
    } else if (key == "model.interaction") {
      if (v != "none" && v != "delta" && v != "gaussian") bad(key, "expected none, delta or gaussian");
      interaction_kind = v;
    } else if (key == "model.coupling") {
      coupling = to_double(key, v);
    } else if (key == "model.depth") {
      depth = to_double(key, v);
    } else if (key == "model.width") {
      width = to_double(key, v);
    } else if (key == "model.L") {
      cfg.L = to_double(key, v);
    } else if (key == "model.n") {
      cfg.n = to_int(key, v);
    } else if (key == "solver.tol") {
      cfg.solver.tol = to_double(key, v);
    } else if (key == "solver.max_iter") {
      cfg.solver.max_iter = to_int(key, v);
    } else if (key == "solver.tau") {
      cfg.solver.tau = to_double(key, v);
    } else if (key == "solver.initial_width") {
      cfg.solver.initial_width = to_double(key, v);
    } else if (key == "bogoliubov.mode_counts") {
      cfg.mode_counts.clear();
      for (const auto& s : split_list(v)) cfg.mode_counts.push_back(to_int(key, s));
    } else if (key == "manybody.N_list") {
      cfg.N_list.clear();
      for (const auto& s : split_list(v)) cfg.N_list.push_back(static_cast<int>(to_int(key, s)));
    } else if (key == "manybody.m_exc") {
      cfg.m_exc = to_int(key, v);
    } else if (key == "manybody.M_policy") {
      auto colon = v.find(':');
      if (colon == std::string::npos) bad(key, "expected cap:K or fixed:K");
      std::string kind = trim(v.substr(0, colon));
      if (kind == "cap") cfg.M_policy.fixed = false;
      else if (kind == "fixed") cfg.M_policy.fixed = true;
      else bad(key, "expected cap:K or fixed:K");
      cfg.M_policy.cap = to_int(key, trim(v.substr(colon + 1)));
    } else if (key == "manybody.mode_policy") {
      if (v == "lplus_ordered") cfg.mode_policy = ModePolicy::lplus_ordered;
      else if (v == "natural_orbitals") cfg.mode_policy = ModePolicy::natural_orbitals;
      else bad(key, "expected lplus_ordered or natural_orbitals");
    } else if (key == "manybody.lanczos_tol") {
      cfg.lanczos_tol = to_double(key, v);
    } else if (key == "checks.list") {
      cfg.checks = split_list(v);
      cfg.checks_given = true;
    } else if (key == "checks.samples") {
      cfg.check_samples = to_int(key, v);
    } else if (key == "checks.eps") {
      cfg.check_eps = to_double(key, v);
    } else if (key == "checks.lambda_rel") {
      cfg.lambda_rel = to_double(key, v);
    } else if (key == "checks.Lambda_rel") {
      cfg.Lambda_rel = to_double(key, v);
    } else if (key == "output.dir") {
      cfg.out_dir = v;
    } else if (key == "output.cache") {
      cfg.cache_dir = v;
    } else if (key == "random.seed") {
      cfg.seed = to_u64(key, v);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (interaction_kind == "none") cfg.interaction = InteractionSpec::none();
  else if (interaction_kind == "delta") cfg.interaction = InteractionSpec::delta(coupling);
  else cfg.interaction = InteractionSpec::gaussian(depth, width);
  if (!cfg.checks_given) cfg.checks = known_checks();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config '" + path.string() + "': " + e.what());
  }
  return parse_config(text);
}

void validate_config(const RunConfig& cfg) {
  auto wrap = [](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string(what) + ": " + e.what());
    }
  };
  wrap("model", [&] {
    Model m = cfg.model();
    if (m.kinetic.kind == KineticSpec::Kind::fractional) (void)KineticSpec::fractional(m.kinetic.mass, m.kinetic.exponent);
    if (!m.interaction.is_delta() && !m.interaction.is_zero()) m.interaction.validate(m.grid);
  });
  if (!(cfg.solver.tol > 0.0)) bad("solver.tol", "must be positive");
  if (cfg.solver.max_iter < 1) bad("solver.max_iter", "must be positive");
  if (!(cfg.solver.tau > 0.0)) bad("solver.tau", "must be positive");
  if (!(cfg.solver.initial_width > 0.0)) bad("solver.initial_width", "must be positive");
  if (cfg.mode_counts.empty()) bad("bogoliubov.mode_counts", "must not be empty");
  for (Index c : cfg.mode_counts)
    if (c < 1 || c > cfg.n - 2) bad("bogoliubov.mode_counts", "entries must lie in 1..n-2");
  for (int N : cfg.N_list) {
    if (N < 2) bad("manybody.N_list", "particle numbers must be at least 2");
    wrap("manybody.M_policy", [&] { (void)cfg.M_policy.resolve(N); });
  }
  if (cfg.m_exc < 1 || cfg.m_exc > cfg.n - 1) bad("manybody.m_exc", "must lie in 1..n-1");
  if (!(cfg.lanczos_tol > 0.0)) bad("manybody.lanczos_tol", "must be positive");
  for (const auto& c : cfg.checks)
    if (std::find(known_checks().begin(), known_checks().end(), c) == known_checks().end())
      bad("checks.list", "unknown check '" + c + "'");
  if (cfg.check_samples < 1) bad("checks.samples", "must be positive");
  if (!(cfg.check_eps > 0.0 && cfg.check_eps < 1.0)) bad("checks.eps", "must lie in (0, 1)");
  if (cfg.out_dir.empty()) bad("output.dir", "must not be empty");
}

}  // namespace bogolib
