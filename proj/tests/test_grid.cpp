#include <doctest.h>

#include <numbers>
#include <random>

#include "bogolib/grid.hpp"
#include "bogolib/io.hpp"

using namespace bogolib;
using doctest::Approx;

namespace {

Vector random_smooth(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CVector s(g.size());
  for (Index k = 0; k < g.size(); ++k) {
    double p = g.frequencies()(k);
    s(k) = std::complex<double>(gauss(rng), gauss(rng)) * std::exp(-0.1 * p * p);
  }
  return inverse_transform(g, s).real();
}

}  // namespace

TEST_CASE("grid construction") {
  Grid g(2 * std::numbers::pi, 8);
  CHECK(g.spacing() == Approx(std::numbers::pi / 4));
  std::vector<double> p(g.frequencies().data(), g.frequencies().data() + 8);
  std::sort(p.begin(), p.end());
  for (int k = 0; k < 8; ++k) CHECK(p[static_cast<std::size_t>(k)] == Approx(double(k - 4)));
  CHECK(g.nodes()(0) == Approx(-std::numbers::pi));

  Grid big = make_grid(64, 2048);
  CHECK(big.spacing() == 0.03125);
  CHECK(big.spacing() * double(big.size()) == Approx(64.0).epsilon(1e-15));

  CHECK_THROWS_WITH_AS(Grid(10, 7), "n must be even", ContractError);
  CHECK_THROWS_AS(Grid(10, 6), ContractError);
  CHECK_THROWS_AS(Grid(0, 16), ContractError);
  CHECK_THROWS_AS(Grid(-1, 16), ContractError);
}

TEST_CASE("frequencies pair up except zero and Nyquist") {
  Grid g(10, 32);
  int unpaired = 0;
  for (Index k = 0; k < 32; ++k) {
    bool found = false;
    for (Index j = 0; j < 32; ++j)
      if (j != k && std::abs(g.frequencies()(j) + g.frequencies()(k)) < 1e-12) found = true;
    if (!found) ++unpaired;
  }
  CHECK(unpaired == 2);
}

TEST_CASE("kinetic symbols") {
  KineticSpec nr;
  CHECK(nr(0.0) == 0.0);
  CHECK(nr(3.0) == Approx(9.0));
  KineticSpec fr = KineticSpec::fractional(1.0, 0.5);
  CHECK(fr(0.0) == 0.0);
  CHECK(fr(1.0) == Approx(std::sqrt(2.0) - 1.0));
  CHECK(fr(-2.0) == Approx(fr(2.0)));
  CHECK(fr(1e6) > 1e5);
  // tiny momenta stay accurate
  CHECK(fr(1e-8) == Approx(0.5e-16).epsilon(1e-6));
  CHECK_THROWS_AS(KineticSpec::fractional(0.0, 0.5), ContractError);
  CHECK_THROWS_AS(KineticSpec::fractional(1.0, 1.5), ContractError);
}

TEST_CASE("apply_multiplier on single modes") {
  Grid g(2 * std::numbers::pi, 64);
  Vector c = Vector::Constant(64, 1.3);
  CHECK(apply_multiplier(g, KineticSpec{}, c).cwiseAbs().maxCoeff() < 1e-12);

  Vector u = g.nodes().unaryExpr([](double x) { return std::cos(x); });
  Vector tu = apply_multiplier(g, KineticSpec{}, u);
  CHECK((tu - u).cwiseAbs().maxCoeff() < 1e-12);
  Vector fu = apply_multiplier(g, KineticSpec::fractional(1.0, 0.5), u);
  CHECK((fu - (std::sqrt(2.0) - 1.0) * u).cwiseAbs().maxCoeff() < 1e-12);

  Grid h(64, 256);
  Vector v = h.nodes().unaryExpr([](double x) { return std::cos(2 * std::numbers::pi * x / 64); });
  double p = 2 * std::numbers::pi / 64;
  CHECK((apply_multiplier(h, KineticSpec{}, v) - p * p * v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Parseval and symmetry of the multiplier") {
  Grid g(20, 128);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    Vector f = random_smooth(g, rng), h = random_smooth(g, rng);
    CVector fh = forward_transform(g, f.cast<std::complex<double>>());
    // sum |u|^2 dx = (1/L) sum |u_hat|^2
    CHECK(fh.squaredNorm() / g.box_length() == Approx(g.inner(f, f)).epsilon(1e-12));
    for (const KineticSpec& k : {KineticSpec{}, KineticSpec::fractional(1.0, 0.5)}) {
      double a = g.inner(f, apply_multiplier(g, k, h));
      double b = g.inner(apply_multiplier(g, k, f), h);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
    CVector back = inverse_transform(g, fh);
    CHECK((back.real() - f).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("kinetic matrix matches the multiplier") {
  Grid g(12, 32);
  Matrix T = kinetic_matrix(g, KineticSpec{});
  std::mt19937_64 rng(3);
  Vector f = random_smooth(g, rng);
  CHECK((T * f - apply_multiplier(g, KineticSpec{}, f)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((T - T.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("convolution") {
  Grid g(20, 128);
  std::mt19937_64 rng(5);
  Vector f = random_smooth(g, rng);
  CHECK((convolve(g, InteractionSpec::delta(4.0), f) + 4.0 * f).cwiseAbs().maxCoeff() == 0.0);

  // gaussian against a constant: c * integral of v
  InteractionSpec gs = InteractionSpec::gaussian(2.0, 1.0);
  Vector c = Vector::Constant(128, 0.7);
  double integral = -2.0 * std::sqrt(2 * std::numbers::pi);
  CHECK((convolve(g, gs, c).array() - 0.7 * integral).abs().maxCoeff() < 1e-10);

  // discrete delta with weight 1/dx is the identity
  Vector s = Vector::Zero(128);
  s(g.center_index()) = 1.0 / g.spacing();
  InteractionSpec id = InteractionSpec::sampled(g, s);
  CHECK((convolve(g, id, f) - f).cwiseAbs().maxCoeff() < 1e-12);

  // direct summation oracle for the gaussian kernel
  Vector k = gs.kernel(g);
  Vector direct = Vector::Zero(128);
  for (Index i = 0; i < 128; ++i)
    for (Index j = 0; j < 128; ++j) {
      Index d = ((i - j) % 128 + 128) % 128;  // separation index
      direct(i) += k((d + 64) % 128) * f(j) * g.spacing();
    }
  CHECK((convolve(g, gs, f) - direct).cwiseAbs().maxCoeff() < 1e-12);

  // even kernels commute with reflection
  CHECK((convolve(g, gs, reflect(f)) - reflect(convolve(g, gs, f))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sampled kernels are symmetrized and tail checked") {
  Grid g(20, 64);
  Vector raw = g.nodes().unaryExpr([](double x) { return std::exp(-(x - 0.1) * (x - 0.1)); });
  InteractionSpec s = InteractionSpec::sampled(g, raw);
  Vector k = s.kernel(g);
  CHECK((k - reflect(k)).cwiseAbs().maxCoeff() < 1e-15);
  Vector wide = Vector::Ones(64);
  CHECK_THROWS_AS(InteractionSpec::sampled(g, wide), ContractError);
  CHECK_THROWS_AS(InteractionSpec::delta(4.0).kernel(g), ContractError);
}

TEST_CASE("spectral shift and derivative") {
  Grid g(20, 256);
  Vector u = g.nodes().unaryExpr([](double x) { return std::exp(-x * x); });
  Vector s = spectral_shift(g, u, 0.3);
  Vector exact = g.nodes().unaryExpr([](double x) { return std::exp(-(x - 0.3) * (x - 0.3)); });
  CHECK((s - exact).cwiseAbs().maxCoeff() < 1e-12);
  Vector d = spectral_derivative(g, u);
  Vector dexact = g.nodes().unaryExpr([](double x) { return -2 * x * std::exp(-x * x); });
  CHECK((d - dexact).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("relative bounds") {
  Grid g(32, 256);
  auto rep = relative_bound_check(g, KineticSpec{}, InteractionSpec::delta(4.0), 1.0, 4.0, 100);
  CHECK(rep.passed);
  CHECK(rep.worst_upper_margin >= 0.0);
  CHECK(rep.worst_lower_margin >= 0.0);

  auto free = relative_bound_check(g, KineticSpec{}, InteractionSpec::none(), 1.0, 4.0, 20);
  CHECK(free.passed);
  CHECK(free.worst_lower_margin >= 4.0);

  // a huge on-site kernel against a state sitting on one node
  Vector spike = Vector::Zero(256);
  spike(g.center_index()) = 1e6;
  InteractionSpec bad = InteractionSpec::sampled(g, -spike);
  Vector probe = Vector::Zero(256);
  probe(g.center_index()) = 1.0;
  auto adv = relative_bound_check(g, KineticSpec{}, bad, 1.0, 4.0, 5, 1, {probe});
  CHECK_FALSE(adv.passed);
  CHECK(adv.worst_lower_margin < 0.0);
}

TEST_CASE("model hash is stable and sensitive") {
  Model a{Grid(64, 2048), KineticSpec{}, InteractionSpec::delta(4.0)};
  Model b{Grid(64, 2048), KineticSpec{}, InteractionSpec::delta(4.0)};
  Model c{Grid(64, 2048), KineticSpec{}, InteractionSpec::delta(3.0)};
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("field container round trip") {
  Grid g(10, 16);
  std::mt19937_64 rng(1);
  Vector u = random_smooth(g, rng);
  auto path = std::filesystem::temp_directory_path() / "bogolib_field_test.bin";
  write_field(path, g, u);
  FieldFile f = read_field(path);
  CHECK(f.box_length == 10.0);
  CHECK(f.n_points == 16);
  CHECK((f.values - u).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
