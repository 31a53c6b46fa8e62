// Acceptance runs on the reference configurations. One PASS/FAIL line per criterion;
// INFO lines carry supporting numbers that do not decide the verdict.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "bogolib/fock.hpp"
#include "bogolib/toolbox.hpp"

using namespace bogolib;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct Verdict {
  int id;
  std::string title;
  bool ok = true;
  std::vector<std::string> parts;

  void require(bool cond, const std::string& what) {
    ok = ok && cond;
    parts.push_back(what + (cond ? "" : " [violated]"));
  }
  void note(const std::string& what) { parts.push_back(what); }
  bool report() const {
    std::printf("%s criterion %d (%s):", ok ? "PASS" : "FAIL", id, title.c_str());
    for (std::size_t i = 0; i < parts.size(); ++i) std::printf("%s %s", i ? ";" : "", parts[i].c_str());
    std::printf("\n");
    return ok;
  }
};

void info(int id, const std::string& text) { std::printf("INFO criterion %d: %s\n", id, text.c_str()); }

std::shared_ptr<const Model> delta_model(double L = 64, Index n = 2048, double lambda = 4.0) {
  return std::make_shared<const Model>(Model{Grid(L, n), KineticSpec{}, InteractionSpec::delta(lambda)});
}

struct Reference {
  HartreeState state;
  HessianOperators ops;
  double t_hartree = 0.0;
  double t_hessian = 0.0;
};

const Reference& reference() {
  static Reference r = [] {
    Reference x;
    auto t0 = Clock::now();
    x.state = minimize(delta_model());
    x.t_hartree = seconds_since(t0);
    t0 = Clock::now();
    x.ops = build_hessian(x.state);
    x.t_hessian = seconds_since(t0);
    return x;
  }();
  return r;
}

// ------------------------------------------------------------------ 1

bool criterion1() {
  Verdict v{1, "Hartree oracle"};
  auto t0 = Clock::now();
  HartreeState s = minimize(delta_model());
  double t = seconds_since(t0);
  double re = std::abs(s.e_H + 1.0 / 3.0) * 3.0;
  double rm = std::abs(s.mu_H + 1.0);
  v.require(s.converged, "converged in " + std::to_string(s.iterations) + " iterations");
  v.require(re <= 1e-6, "e_H = " + fmt("%.12f", s.e_H) + " rel err " + fmt("%.2e", re) + " <= 1e-6");
  v.require(rm <= 1e-6, "mu_H = " + fmt("%.12f", s.mu_H) + " err " + fmt("%.2e", rm) + " <= 1e-6");
  v.require(t < 10.0, "runtime " + fmt("%.2f", t) + " s < 10 s");
  return v.report();
}

// ------------------------------------------------------------------ 2

bool criterion2() {
  Verdict v{2, "zero modes"};
  const auto& r = reference();
  const Grid& g = r.ops.grid();
  double a = g.norm(Vector(r.ops.Lminus * r.ops.u0));
  v.require(a <= 1e-7, "||L- u0|| = " + fmt("%.3e", a) + " <= 1e-7");
  if (!r.ops.has_zero_mode()) {
    v.require(false, "no translation zero mode found");
    return v.report();
  }
  double b = g.norm(Vector(r.ops.Lplus * r.ops.zero_modes[0]));
  v.require(b <= 1e-5, "||L+ u1|| = " + fmt("%.3e", b) + " <= 1e-5");
  return v.report();
}

// ------------------------------------------------------------------ 3

bool criterion3() {
  Verdict v{3, "headline Bogoliubov number"};
  auto t0 = Clock::now();
  const auto& r = reference();
  auto rows = convergence_study(r.ops, {64, 128, 256, 512});
  double t = seconds_since(t0);
  for (const auto& row : rows)
    info(3, "n_mode " + std::to_string(row.n_mode) + ": c0 " + fmt("%.10f", row.c0) + " e_perp " +
                fmt("%.10f", row.e_perp) + " e_total " + fmt("%.10f", row.e_total) + " rel delta " +
                fmt("%.3e", row.rel_delta_prev) + " 1/n extrapolation " + fmt("%.10f", row.extrapolated));
  const auto& last = rows.back();
  double target = -2.0 / 3.0;
  double rel = std::abs(last.e_total - target) / std::abs(target);
  v.require(rel <= 0.02, "e_total(512) = " + fmt("%.8f", last.e_total) + " vs -2/3, rel err " + fmt("%.4f", rel) +
                             " <= 0.02");
  v.require(last.rel_delta_prev < 5e-3, "|delta| 256 -> 512 relative " + fmt("%.3e", last.rel_delta_prev) +
                                            " < 5e-3");
  v.require(t < 120.0, "runtime " + fmt("%.1f", t) + " s < 120 s");
  info(3, "extrapolated e_total " + fmt("%.8f", last.extrapolated) + " rel err " +
              fmt("%.4f", std::abs(last.extrapolated - target) / std::abs(target)));
  return v.report();
}

// ------------------------------------------------------------------ 4

bool criterion4() {
  Verdict v{4, "c0 check"};
  const auto& r = reference();
  ProjectedPair perp = project_perp(r.ops, true, 64);
  double c0 = zero_mode_coupling(r.ops, perp).g11;
  v.require(std::abs(c0 + 0.4) <= 1e-4, "c0 = " + fmt("%.10f", c0) + " vs -lambda^2/40 = -0.4, err " +
                                            fmt("%.2e", std::abs(c0 + 0.4)) + " <= 1e-4");
  // closed sech integrals: u0 = sech/sqrt2, u1 = u0'/||u0'||, c0 = -(lambda/2) int u1^2 u0^2
  const Grid& g = r.ops.grid();
  Vector u0 = g.nodes().unaryExpr([](double x) { return 1.0 / (std::sqrt(2.0) * std::cosh(x)); });
  Vector du = g.nodes().unaryExpr([](double x) { return -std::tanh(x) / (std::sqrt(2.0) * std::cosh(x)); });
  du /= g.norm(du);
  double quad = -2.0 * g.inner(Vector(du.cwiseAbs2()), Vector(u0.cwiseAbs2()));
  v.require(std::abs(quad + 0.4) <= 1e-4, "grid quadrature of the closed form " + fmt("%.10f", quad) +
                                              ", err " + fmt("%.2e", std::abs(quad + 0.4)) + " <= 1e-4");
  return v.report();
}

// ------------------------------------------------------------------ 5

bool criterion5() {
  Verdict v{5, "one-mode analytic"};
  const double exact = (std::sqrt(3.0) - 2.0) / 2.0;
  Matrix Q(1, 1), G(1, 1);
  Q << 2.0;
  G << 0.5;
  double sym = symplectic_ground_energy(Matrix(Q + 2 * G), Matrix(Q - 2 * G)).energy;
  auto basis = std::make_shared<const FockBasis>(1, 60);
  LanczosConfig cfg;
  cfg.tol = 1e-12;
  double fock = lanczos_ground(bogoliubov_fock(basis, Q, G), cfg).energy;
  v.require(std::abs(sym - exact) <= 1e-6, "symplectic " + fmt("%.12f", sym) + " err " +
                                               fmt("%.2e", std::abs(sym - exact)) + " <= 1e-6");
  v.require(std::abs(fock - exact) <= 1e-6, "Fock-Lanczos (M=60) " + fmt("%.12f", fock) + " err " +
                                                fmt("%.2e", std::abs(fock - exact)) + " <= 1e-6");
  return v.report();
}

// ------------------------------------------------------------------ 6

double fock_ground_even(const ModeCatalog& cat, Index m, Index M, bool use_perp, double tol = 1e-10) {
  auto basis = std::make_shared<const FockBasis>(m, M, FockSector{std::vector<bool>(static_cast<std::size_t>(m), true), 0});
  LanczosConfig cfg;
  cfg.tol = tol;
  return lanczos_ground(build_bogoliubov_fock(cat, basis, use_perp), cfg).energy;
}

bool criterion6() {
  Verdict v{6, "cross-formalism"};
  const auto& r = reference();
  // u0 plus 10 excitation modes: u1 and nine complement modes
  ModeCatalog cat = build_mode_catalog(r.state, r.ops, 11);
  const Index k = 9;
  Matrix Qp = cat.Q.bottomRightCorner(k, k), Gp = cat.G.bottomRightCorner(k, k);
  double e_perp = symplectic_ground_energy(Matrix(Qp + 2 * Gp), Matrix(Qp - 2 * Gp)).energy;
  double c0 = cat.G(0, 0);
  double target = c0 + e_perp;
  auto t0 = Clock::now();
  double e12 = fock_ground_even(cat, 10, 12, false);
  double t12 = seconds_since(t0);
  t0 = Clock::now();
  double e14 = fock_ground_even(cat, 10, 14, false);
  double t14 = seconds_since(t0);
  double envelope = std::abs(e12 - e14);
  double gap = std::abs(e14 - target);
  info(6, "c0 " + fmt("%.10f", c0) + ", symplectic e_perp (9 modes) " + fmt("%.10f", e_perp) +
              ", Fock ground M=12 " + fmt("%.10f", e12) + " (" + fmt("%.1f", t12) + " s), M=14 " +
              fmt("%.10f", e14));
  v.require(gap <= envelope + 1e-6, "|FockGround(M=14) - (c0 + e_perp)| = " + fmt("%.3e", gap) +
                                        " <= envelope " + fmt("%.3e", envelope) + " + 1e-6");
  v.require(t14 < 300.0, "runtime at M=14 " + fmt("%.1f", t14) + " s < 300 s");
  // without the zero mode the cutoff converges quickly; this isolates the slow direction
  double p10 = fock_ground_even(cat, k, 10, true);
  double p12 = fock_ground_even(cat, k, 12, true);
  info(6, "perpendicular operator only: Fock M=10 " + fmt("%.10f", p10) + ", M=12 " + fmt("%.10f", p12) +
              ", symplectic " + fmt("%.10f", e_perp) + ", |diff| " + fmt("%.3e", std::abs(p12 - e_perp)));
  return v.report();
}

// ------------------------------------------------------------------ 7

bool criterion7() {
  Verdict v{7, "many-body trend"};
  auto t0 = Clock::now();
  const auto& r = reference();
  const Index m_exc = 8;
  ModeCatalog cat = build_mode_catalog(r.state, r.ops, m_exc + 1);
  LanczosConfig cfg;
  cfg.tol = 1e-9;
  std::vector<double> gaps;
  bool within = true, monotone = true;
  for (int N : {4, 8, 16}) {
    Index M = std::min<Index>(N, 14);
    auto run = [&](Index cutoff) {
      auto basis = std::make_shared<const FockBasis>(m_exc, cutoff);
      FockOperator h = build_excitation_hamiltonian(cat, basis, N);
      Vector start = Vector::Zero(basis->size());
      start(0) = 1.0;
      return lanczos_ground(h, cfg, start).energy;
    };
    double e = run(M);
    double e_lower = run(M - 2);
    double gap = e - N * r.state.e_H;
    double target = -(2.0 / 3.0) * N / (N - 1.0);
    double rel = std::abs(gap - target) / std::abs(target);
    within = within && rel <= 0.10;
    monotone = monotone && e <= e_lower + 1e-9;
    gaps.push_back(gap);
    info(7, "N=" + std::to_string(N) + " M=" + std::to_string(M) + ": E_N " + fmt("%.10f", e) + ", E_N - N e_H " +
                fmt("%.6f", gap) + ", target " + fmt("%.6f", target) + " (rel err " + fmt("%.3f", rel) +
                "), McGuire gap " + fmt("%.6f", mcguire_exact(N, 4.0) - N * r.state.e_H) + ", cutoff M-2 gives " +
                fmt("%.10f", e_lower));
  }
  double t = seconds_since(t0);
  bool toward = true;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    toward = toward && std::abs(gaps[i] + 2.0 / 3.0) < std::abs(gaps[i - 1] + 2.0 / 3.0);
  v.require(within, "E_N - N e_H within 10% of -(2/3) N/(N-1) for N = 4, 8, 16");
  v.require(monotone, "non-increasing from cutoff M-2 to M");
  v.require(toward, "distance to -2/3 decreasing in N");
  v.require(t < 1800.0, "runtime " + fmt("%.1f", t) + " s < 1800 s");
  return v.report();
}

// ------------------------------------------------------------------ 8

bool criterion8() {
  Verdict v{8, "N=2 exactness"};
  auto m = delta_model(16, 64);
  HartreeState s = minimize(m);
  HessianOperators h = build_hessian(s);
  ModeCatalog cat = build_mode_catalog(s, h, 64);
  auto basis = std::make_shared<const FockBasis>(63, 2);
  FockOperator op = build_excitation_hamiltonian(cat, basis, 2);
  Eigen::SelfAdjointEigenSolver<Matrix> es{Matrix(op.to_sparse()), Eigen::EigenvaluesOnly};
  double fock = es.eigenvalues()(0);
  double grid = two_body_grid_ground(*m);
  v.require(std::abs(fock - grid) <= 1e-8, "excitation Hamiltonian " + fmt("%.12f", fock) + " vs two-body grid " +
                                               fmt("%.12f", grid) + ", diff " + fmt("%.2e", std::abs(fock - grid)) +
                                               " <= 1e-8");
  return v.report();
}

// ------------------------------------------------------------------ 9

bool criterion9() {
  Verdict v{9, "excitation-map laws"};
  for (int N = 1; N <= 4; ++N) {
    ExcitationMapReport r = excitation_map_check(N);
    double worst = std::max({r.unitarity, r.vacuum, r.law_condensate, r.law_transfer, r.law_excited});
    v.require(worst <= 1e-12, "N=" + std::to_string(N) + " max deviation " + fmt("%.2e", worst) + " <= 1e-12");
  }
  return v.report();
}

// ------------------------------------------------------------------ 10

bool criterion10() {
  Verdict v{10, "property suites"};
  const auto& r = reference();
  {
    ProjectedPair perp = project_perp(r.ops, true, 256);
    ZeroModeCoupling g = zero_mode_coupling(r.ops, perp);
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> uni(-10.0, 10.0);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) worst = std::min(worst, eta(perp, g, uni(rng)));
    v.require(worst >= -1e-9, "min eta over 100 samples " + fmt("%.3e", worst) + " >= -1e-9");
  }
  {
    Chart chart = make_chart(r.ops);
    InequalityReport rep = commutative_inequality_check(r.ops, chart, 0.1, 200);
    v.require(rep.samples == 200 && rep.violations == 0,
              "commutative inequality eps=0.1: " + std::to_string(rep.violations) + " violations in " +
                  std::to_string(rep.samples) + " samples, worst margin " + fmt("%.3e", rep.worst_margin));
  }
  {
    const Grid& g = r.ops.grid();
    auto part = two_bump_partition(g);
    for (const KineticSpec& k : {KineticSpec::fractional(1.0, 0.5), KineticSpec::nonrelativistic()}) {
      ImsReport rep = ims_check(g, k, part, 200);
      v.require(rep.violations == 0, "IMS s=" + fmt("%.1f", k.kind == KineticSpec::Kind::fractional ? 0.5 : 1.0) +
                                         ": " + std::to_string(rep.violations) + " violations in 200, worst margin " +
                                         fmt("%.3e", rep.worst_margin));
    }
  }
  {
    std::mt19937_64 rng(202);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> nd(4, 60);
    int bad = 0;
    for (int t = 0; t < 1000; ++t) {
      Index N = nd(rng);
      double kmin = N % 2 ? 1.5 : 1.0;
      int steps = static_cast<int>(std::floor(0.5 * N - 1.0 - kmin));
      double k = kmin + std::uniform_int_distribution<int>(0, steps)(rng);
      MedianSpec spec(N, k);
      Vector x(N);
      for (Index i = 0; i < N; ++i) x(i) = gauss(rng);
      double m0 = regularized_median(spec, x);
      Vector p = x;
      std::shuffle(p.data(), p.data() + N, rng);
      if (std::abs(regularized_median(spec, p) - m0) > 1e-12) ++bad;
      double c = gauss(rng);
      if (std::abs(regularized_median(spec, Vector(x.array() + c)) - m0 - c) > 1e-12) ++bad;
      Vector y = x;
      double h = gauss(rng);
      y(std::uniform_int_distribution<Index>(0, N - 1)(rng)) += h;
      double dm = std::abs(regularized_median(spec, y) - m0);
      if (dm > std::abs(h) / k + 1e-12 || dm > std::abs(h) / (2 * k + 1) + 1e-12) ++bad;
    }
    v.require(bad == 0, "median invariance/equivariance/Lipschitz on 1000 vectors: " + std::to_string(bad) +
                            " failures");
  }
  {
    const Model& m = *r.state.model;
    const Grid& g = m.grid;
    std::mt19937_64 rng(303);
    std::normal_distribution<double> gauss;
    const double h = 1e-5;
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      auto smooth = [&] {
        CVector s(g.size());
        for (Index k = 0; k < g.size(); ++k) {
          double p = g.frequencies()(k);
          s(k) = std::complex<double>(gauss(rng), gauss(rng)) * std::exp(-0.5 * p * p);
        }
        Vector u = inverse_transform(g, s).real();
        return Vector(u / g.norm(u));
      };
      Vector u = smooth(), d = smooth();
      auto E = [&](const Vector& w) { return hartree_functional(m, CVector(w.cast<std::complex<double>>())); };
      double fd = (E(u + h * d) - E(u - h * d)) / (2 * h);
      double an = 2.0 * g.inner(gradient(m, u), d);
      worst = std::max(worst, std::abs(fd - an) / std::abs(an));
    }
    v.require(worst < 1e-6, "gradient finite-difference relative error " + fmt("%.2e", worst) + " < 1e-6");
  }
  return v.report();
}

// ------------------------------------------------------------------ 11

// e_total at 512 modes for s = 1/2, m = 1, gaussian depth 4 width 1, L = 64, n = 2048
constexpr double kFractionalGaussianFixture = -0.27984800;

bool criterion11() {
  Verdict v{11, "fractional regression"};
  auto model = std::make_shared<const Model>(
      Model{Grid(64, 2048), KineticSpec::fractional(1.0, 0.5), InteractionSpec::delta(4.0)});
  try {
    HartreeState s = minimize(model);
    auto coarse = std::make_shared<const Model>(
        Model{Grid(64, 1024), KineticSpec::fractional(1.0, 0.5), InteractionSpec::delta(4.0)});
    double e_coarse = minimize(coarse).e_H;
    info(11, "delta s=1/2: e_H " + fmt("%.8f", s.e_H) + " at n=2048, " + fmt("%.8f", e_coarse) +
                 " at n=1024 (grid-scale collapse when these differ)");
    HessianOperators h = build_hessian(s);
    auto rows = convergence_study(h, {256, 512});
    const auto& last = rows.back();
    v.require(std::isfinite(last.e_total), "pipeline completed, e_total(512) = " + fmt("%.10f", last.e_total));
    v.require(last.rel_delta_prev < 1e-2, "self-convergence 256 -> 512 relative " + fmt("%.3e", last.rel_delta_prev) +
                                              " < 1e-2");
  } catch (const std::exception& e) {
    v.require(false, std::string("pipeline did not complete: ") + e.what());
  }

  // the same pipeline with a smooth kernel, which is form-bounded for s = 1/2
  auto smooth = std::make_shared<const Model>(
      Model{Grid(64, 2048), KineticSpec::fractional(1.0, 0.5), InteractionSpec::gaussian(4.0, 1.0)});
  HessianOperators hs = build_hessian(minimize(smooth));
  auto rows = convergence_study(hs, {256, 512});
  info(11, "gaussian depth 4 width 1, s=1/2: e_total(512) " + fmt("%.10f", rows.back().e_total) +
               ", relative change 256 -> 512 " + fmt("%.3e", rows.back().rel_delta_prev) + ", fixture " +
               fmt("%.8f", kFractionalGaussianFixture) + ", |diff| " +
               fmt("%.2e", std::abs(rows.back().e_total - kFractionalGaussianFixture)));
  return v.report();
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  CLI::App app{"acceptance runs"};
  int which = 0;
  app.add_option("--criterion", which, "criterion number (1-11); all when omitted")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<bool()>> all{criterion1, criterion2, criterion3, criterion4,
                                                criterion5, criterion6, criterion7, criterion8,
                                                criterion9, criterion10, criterion11};
  bool ok = true;
  for (int i = 1; i <= 11; ++i) {
    if (which != 0 && which != i) continue;
    auto t0 = Clock::now();
    bool pass = all[static_cast<std::size_t>(i - 1)]();
    std::printf("     criterion %d took %.1f s\n", i, seconds_since(t0));
    ok = ok && pass;
  }
  return ok ? 0 : 1;
}
