#include "bogolib/pipeline.hpp"

#include <numeric>
#include <random>
#include <sstream>

#include "bogolib/toolbox.hpp"

namespace bogolib {

namespace {

using json = nlohmann::ordered_json;

void emit(const RunConfig& cfg, const std::string& file, const std::string& text, std::ostream& out) {
  std::filesystem::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / file, text);
  out << text;
}

json state_json(const HartreeState& s, bool cached) {
  json j;
  j["command"] = "hartree";
  j["model_hash"] = s.model->hash();
  j["model"] = s.model->canonical();
  j["cached"] = cached;
  j["e_H"] = s.e_H;
  j["mu_H"] = s.mu_H;
  j["el_residual"] = s.el_residual;
  j["centered"] = s.centered;
  j["converged"] = s.converged;
  j["iterations"] = s.iterations;
  return j;
}

// ---- individual checks; each returns a JSON record with a "passed" field

json check_relative_bound(const RunConfig& cfg, const Model& m) {
  RelativeBoundReport r = relative_bound_check(m.grid, m.kinetic, m.interaction, cfg.lambda_rel, cfg.Lambda_rel,
                                               cfg.check_samples, cfg.seed);
  json j;
  j["samples"] = r.samples;
  j["worst_upper_margin"] = r.worst_upper_margin;
  j["worst_lower_margin"] = r.worst_lower_margin;
  j["passed"] = r.passed;
  return j;
}

json check_coercivity(const HessianOperators& ops) {
  CoercivityReport r = coercivity_check(ops);
  json j;
  j["eta"] = r.eta;
  j["min_lminus"] = r.min_lminus;
  j["min_lplus"] = r.min_lplus;
  j["lplus_zero_eig"] = r.lplus_zero_eig;
  j["lplus_zero_count"] = r.lplus_zero_count;
  j["passed"] = r.passed;
  return j;
}

json check_commutative(const RunConfig& cfg, const HessianOperators& ops) {
  json j;
  if (!ops.has_zero_mode()) {
    j["applicable"] = false;
    j["passed"] = true;
    return j;
  }
  Chart chart = make_chart(ops);
  InequalityReport r = commutative_inequality_check(ops, chart, cfg.check_eps, cfg.check_samples, 0.05, cfg.seed + 1);
  j["chart_radius"] = chart.radius;
  j["samples"] = r.samples;
  j["violations"] = r.violations;
  j["worst_margin"] = r.worst_margin;
  j["max_norm"] = r.max_norm;
  j["passed"] = r.violations == 0;
  return j;
}

json check_excitation_map() {
  json j;
  bool ok = true;
  double worst = 0.0;
  for (int N = 2; N <= 4; ++N) {
    ExcitationMapReport r = excitation_map_check(N);
    ok = ok && r.passed;
    worst = std::max({worst, r.unitarity, r.vacuum, r.law_condensate, r.law_transfer, r.law_excited});
  }
  j["max_deviation"] = worst;
  j["passed"] = ok;
  return j;
}

json check_eta(const RunConfig& cfg, const HessianOperators& ops) {
  json j;
  if (!ops.has_zero_mode()) {
    j["applicable"] = false;
    j["passed"] = true;
    return j;
  }
  ProjectedPair perp = project_perp(ops, true, std::min<Index>(cfg.mode_counts.back(), ops.grid().size() - 2));
  ZeroModeCoupling g = zero_mode_coupling(ops, perp);
  std::mt19937_64 rng(cfg.seed + 2);
  std::uniform_real_distribution<double> uni(-10.0, 10.0);
  double worst = std::numeric_limits<double>::infinity();
  const Index samples = 100;
  for (Index s = 0; s < samples; ++s) worst = std::min(worst, eta(perp, g, uni(rng)));
  j["samples"] = samples;
  j["min_eta"] = worst;
  j["passed"] = worst >= -1e-9;
  return j;
}

json check_ims(const RunConfig& cfg, const Model& m) {
  json j;
  bool ok = true;
  json runs = json::array();
  auto part = two_bump_partition(m.grid);
  for (const KineticSpec& k : {KineticSpec::fractional(1.0, 0.5), KineticSpec::nonrelativistic()}) {
    ImsReport r = ims_check(m.grid, k, part, cfg.check_samples, cfg.seed + 3);
    json e;
    e["kinetic"] = k.canonical();
    e["trials"] = r.trials;
    e["violations"] = r.violations;
    e["worst_margin"] = r.worst_margin;
    runs.push_back(e);
    ok = ok && r.violations == 0;
  }
  j["runs"] = runs;
  j["passed"] = ok;
  return j;
}

json check_median(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed + 4);
  std::uniform_int_distribution<int> nd(4, 40);
  std::normal_distribution<double> gauss;
  Index bad_perm = 0, bad_shift = 0, bad_lip = 0, bad_odd = 0;
  const Index trials = 1000;
  for (Index t = 0; t < trials; ++t) {
    Index N = nd(rng);
    // admissible k values: k + N/2 integer, window N/2 - k .. N/2 + k inside 1..N
    std::vector<double> ks;
    for (double k = (N % 2 ? 1.5 : 1.0); k <= 0.5 * double(N) - 1.0 + 1e-12; k += 1.0) ks.push_back(k);
    if (ks.empty()) continue;
    double k = ks[std::uniform_int_distribution<std::size_t>(0, ks.size() - 1)(rng)];
    MedianSpec spec(N, k);
    Vector x(N);
    for (Index i = 0; i < N; ++i) x(i) = gauss(rng);
    double m0 = regularized_median(spec, x);
    Vector p = x;
    std::shuffle(p.data(), p.data() + N, rng);
    if (std::abs(regularized_median(spec, p) - m0) > 1e-12) ++bad_perm;
    double c = gauss(rng);
    if (std::abs(regularized_median(spec, Vector(x.array() + c)) - (m0 + c)) > 1e-12) ++bad_shift;
    Index jdx = std::uniform_int_distribution<Index>(0, N - 1)(rng);
    double h = gauss(rng);
    Vector y = x;
    y(jdx) += h;
    if (std::abs(regularized_median(spec, y) - m0) > std::abs(h) / (2.0 * k + 1.0) + 1e-12) ++bad_lip;
    // reflection moves the window up by one slot
    std::vector<double> sorted(x.data(), x.data() + N);
    std::sort(sorted.begin(), sorted.end());
    double up = 0.0;
    for (Index i = spec.lo() + 1; i <= spec.hi() + 1; ++i) up += sorted[static_cast<std::size_t>(i - 1)];
    up /= double(spec.hi() - spec.lo() + 1);
    if (std::abs(regularized_median(spec, Vector(-x)) + up) > 1e-12) ++bad_odd;
  }
  json j;
  j["trials"] = trials;
  j["permutation_failures"] = bad_perm;
  j["translation_failures"] = bad_shift;
  j["lipschitz_failures"] = bad_lip;
  j["reflection_failures"] = bad_odd;
  j["passed"] = bad_perm + bad_shift + bad_lip + bad_odd == 0;
  return j;
}

json check_gradient(const RunConfig& cfg, const Model& m) {
  const Grid& g = m.grid;
  std::mt19937_64 rng(cfg.seed + 5);
  std::normal_distribution<double> gauss;
  const double h = 1e-5;
  double worst = 0.0;
  const Index trials = 10;
  for (Index t = 0; t < trials; ++t) {
    // smooth random state and direction
    auto smooth = [&] {
      CVector s(g.size());
      for (Index k = 0; k < g.size(); ++k) {
        double p = g.frequencies()(k);
        s(k) = std::complex<double>(gauss(rng), gauss(rng)) * std::exp(-0.5 * p * p);
      }
      Vector v = inverse_transform(g, s).real();
      return Vector(v / g.norm(v));
    };
    Vector u = smooth(), d = smooth();
    double fd = (hartree_functional(m, CVector((u + h * d).cast<std::complex<double>>())) -
                 hartree_functional(m, CVector((u - h * d).cast<std::complex<double>>()))) /
                (2.0 * h);
    double an = 2.0 * g.inner(gradient(m, u), d);
    worst = std::max(worst, std::abs(fd - an) / std::max(1e-300, std::abs(an)));
  }
  json j;
  j["trials"] = trials;
  j["worst_relative_error"] = worst;
  j["passed"] = worst < 1e-6;
  return j;
}

}  // namespace

HartreeState hartree_cached(const RunConfig& cfg, bool* cached) {
  auto model = std::make_shared<const Model>(cfg.model());
  std::filesystem::path stem = cfg.cache() / model->hash();
  auto js = stem;
  js += ".json";
  if (std::filesystem::exists(js)) {
    try {
      HartreeState s = load_state(stem, model);
      if (cached) *cached = true;
      return s;
    } catch (const Error&) {
      // stale or foreign entry: recompute
    } catch (const nlohmann::json::exception&) {
    }
  }
  HartreeState s = minimize(model, cfg.solver);
  std::filesystem::create_directories(cfg.cache());
  save_state(stem, s);
  if (cached) *cached = false;
  return s;
}

int cmd_hartree(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  bool cached = false;
  HartreeState s = hartree_cached(cfg, &cached);
  emit(cfg, "hartree.json", dump_json(state_json(s, cached)) + "\n", out);
  return kExitOk;
}

int cmd_bogoliubov(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  HartreeState s = hartree_cached(cfg);
  HessianOperators ops = build_hessian(s);
  CoercivityReport coer = coercivity_check(ops);
  if (!coer.passed) {
    err << "coercivity failure: eta = " << format_double(coer.eta) << " (min Lminus "
        << format_double(coer.min_lminus) << ", min Lplus " << format_double(coer.min_lplus) << ")\n";
    return kExitCheck;
  }
  std::vector<ConvergenceRow> rows = convergence_study(ops, cfg.mode_counts);
  const std::string hash = s.model->hash();
  std::ostringstream csv;
  csv << "model_hash,n_mode,c0,e_perp,e_total,floor_count,rel_delta_prev,extrapolated\n";
  for (const auto& r : rows)
    csv << hash << ',' << r.n_mode << ',' << format_double(r.c0) << ',' << format_double(r.e_perp) << ','
        << format_double(r.e_total) << ',' << r.floor_count << ',' << format_double(r.rel_delta_prev) << ','
        << format_double(r.extrapolated) << '\n';
  std::filesystem::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / "bogoliubov.csv", csv.str());

  const ConvergenceRow& last = rows.back();
  json j;
  j["command"] = "bogoliubov";
  j["model_hash"] = hash;
  j["e_H"] = s.e_H;
  j["mu_H"] = s.mu_H;
  j["eta"] = coer.eta;
  j["n_mode"] = last.n_mode;
  j["c0"] = last.c0;
  j["e_perp"] = last.e_perp;
  j["e_total"] = last.e_total;
  j["rel_delta_prev"] = last.rel_delta_prev;
  j["extrapolated"] = last.extrapolated;
  j["floor_count"] = last.floor_count;
  write_text(cfg.out_dir / "bogoliubov.json", dump_json(j) + "\n");
  out << csv.str();
  return kExitOk;
}

int cmd_manybody(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  HartreeState s = hartree_cached(cfg);
  HessianOperators ops = build_hessian(s);
  ProjectedPair perp = project_perp(ops, true, cfg.mode_counts.back());
  BogoliubovSolution bog = decouple_and_solve(perp, zero_mode_coupling(ops, perp));
  ModeCatalog cat = build_mode_catalog(s, ops, cfg.m_exc + 1, cfg.mode_policy);
  LanczosConfig lc;
  lc.tol = cfg.lanczos_tol;
  lc.seed = cfg.seed;
  auto rows = energy_asymptotics_run(cat, cfg.N_list, cfg.m_exc, cfg.M_policy, bog.e_total, lc);
  emit(cfg, "manybody.csv", asymptotics_csv(rows), out);
  return kExitOk;
}

int cmd_checks(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  json report;
  report["command"] = "checks";
  json results = json::object();
  std::vector<std::string> failed;
  const Model model = cfg.model();

  auto needs_state = [&] {
    for (const auto& c : cfg.checks)
      if (c == "coercivity" || c == "commutative" || c == "eta") return true;
    return false;
  };
  std::optional<HessianOperators> ops;
  if (needs_state()) {
    HartreeState s = hartree_cached(cfg);
    ops = build_hessian(s);
    report["model_hash"] = s.model->hash();
  } else {
    report["model_hash"] = model.hash();
  }

  for (const auto& name : cfg.checks) {
    json r;
    try {
      if (name == "relative_bound") r = check_relative_bound(cfg, model);
      else if (name == "coercivity") r = check_coercivity(*ops);
      else if (name == "commutative") r = check_commutative(cfg, *ops);
      else if (name == "excitation_map") r = check_excitation_map();
      else if (name == "eta") r = check_eta(cfg, *ops);
      else if (name == "ims") r = check_ims(cfg, model);
      else if (name == "median") r = check_median(cfg);
      else if (name == "gradient") r = check_gradient(cfg, model);
    } catch (const std::exception& e) {
      r = json::object();
      r["error"] = e.what();
      r["passed"] = false;
    }
    if (!r.value("passed", false)) failed.push_back(name);
    results[name] = r;
  }
  report["checks"] = results;
  report["passed"] = failed.empty();
  emit(cfg, "checks.json", dump_json(report) + "\n", out);
  if (!failed.empty()) {
    err << "failed checks:";
    for (const auto& f : failed) err << ' ' << f;
    err << '\n';
    return kExitCheck;
  }
  return kExitOk;
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opts.config);
    if (opts.out_dir) cfg.out_dir = *opts.out_dir;
    if (opts.seed) cfg.seed = *opts.seed;
    validate_config(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    if (name == "hartree") return cmd_hartree(cfg, out, err);
    if (name == "bogoliubov") return cmd_bogoliubov(cfg, out, err);
    if (name == "manybody") return cmd_manybody(cfg, out, err);
    if (name == "checks") return cmd_checks(cfg, out, err);
    err << "unknown command '" << name << "'\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << " (residual " << format_double(e.residual) << ")\n";
    return kExitSolver;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace bogolib
