#include "bogolib/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <numbers>
#include <random>
#include <sstream>

#include "bogolib/io.hpp"

namespace bogolib {

namespace {

Eigen::FFT<double>& fft_engine() {
  // kissfft caches twiddles per size; one engine per thread keeps Grid shareable.
  thread_local Eigen::FFT<double> fft;
  return fft;
}

double sign_of_k(const Grid& grid, Index k) {
  // exp(i p_k L / 2) = (-1)^k
  Index kk = k < grid.size() / 2 ? k : k - grid.size();
  return (kk % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

Grid::Grid(double box_length, Index n_points) : L_(box_length), n_(n_points) {
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw ContractError("box length must be positive");
  if (n_points % 2 != 0) throw ContractError("n must be even");
  if (n_points < 8) throw ContractError("n must be at least 8");
  dx_ = L_ / static_cast<double>(n_);
  x_.resize(n_);
  p_.resize(n_);
  for (Index i = 0; i < n_; ++i) {
    x_(i) = -0.5 * L_ + static_cast<double>(i) * dx_;
    Index k = i < n_ / 2 ? i : i - n_;
    p_(i) = 2.0 * std::numbers::pi * static_cast<double>(k) / L_;
  }
}

void Grid::check_length(Index len, const char* what) const {
  if (len != n_) {
    std::ostringstream os;
    os << what << ": length " << len << " does not match grid size " << n_;
    throw ContractError(os.str());
  }
}

Grid make_grid(double box_length, Index n_points) { return Grid(box_length, n_points); }

KineticSpec KineticSpec::fractional(double mass, double exponent) {
  if (!(mass > 0.0)) throw ContractError("fractional kinetic energy needs mass > 0");
  if (!(exponent > 0.0 && exponent <= 1.0)) throw ContractError("exponent s must lie in (0, 1]");
  KineticSpec k;
  k.kind = Kind::fractional;
  k.mass = mass;
  k.exponent = exponent;
  return k;
}

double KineticSpec::operator()(double p) const {
  if (kind == Kind::nonrelativistic) return p * p;
  double m2 = mass * mass;
  // (m^2+p^2)^s - m^{2s} written to avoid cancellation for small p
  return std::pow(m2, exponent) * std::expm1(exponent * std::log1p(p * p / m2));
}

double KineticSpec::ims_constant() const {
  if (kind == Kind::nonrelativistic) return 1.0;
  return std::pow(mass, 2.0 * (exponent - 1.0)) * exponent;
}

std::string KineticSpec::canonical() const {
  if (kind == Kind::nonrelativistic) return "kinetic=nonrelativistic";
  return "kinetic=fractional;mass=" + format_double(mass) + ";exponent=" + format_double(exponent);
}

InteractionSpec InteractionSpec::delta(double coupling) {
  if (!std::isfinite(coupling)) throw ContractError("coupling must be finite");
  InteractionSpec v;
  v.kind = Kind::delta;
  v.coupling = coupling;
  return v;
}

InteractionSpec InteractionSpec::gaussian(double depth, double width) {
  if (!(width > 0.0)) throw ContractError("gaussian width must be positive");
  InteractionSpec v;
  v.kind = Kind::gaussian;
  v.depth = depth;
  v.width = width;
  return v;
}

InteractionSpec InteractionSpec::sampled(const Grid& grid, const Vector& values, double tail_tol) {
  grid.check_length(values.size(), "sampled kernel");
  InteractionSpec v;
  v.kind = Kind::sampled;
  v.samples = 0.5 * (values + reflect(values));
  v.validate(grid, tail_tol);
  return v;
}

bool InteractionSpec::is_zero() const {
  switch (kind) {
    case Kind::none: return true;
    case Kind::delta: return coupling == 0.0;
    case Kind::gaussian: return depth == 0.0;
    case Kind::sampled: return samples.size() == 0 || samples.cwiseAbs().maxCoeff() == 0.0;
  }
  return true;
}

Vector InteractionSpec::kernel(const Grid& grid) const {
  const Index n = grid.size();
  switch (kind) {
    case Kind::none: return Vector::Zero(n);
    case Kind::delta: throw ContractError("delta interaction has no sampled kernel");
    case Kind::gaussian: {
      Vector out(n);
      for (Index i = 0; i < n; ++i) {
        double x = grid.nodes()(i);
        out(i) = -depth * std::exp(-x * x / (2.0 * width * width));
      }
      // the node at -L/2 has no mirror partner on the grid; symmetrize anyway
      return 0.5 * (out + reflect(out));
    }
    case Kind::sampled:
      grid.check_length(samples.size(), "sampled kernel");
      return samples;
  }
  return Vector::Zero(n);
}

void InteractionSpec::validate(const Grid& grid, double tail_tol) const {
  if (kind == Kind::none || kind == Kind::delta) return;
  Vector k = kernel(grid);
  double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  double edge = std::abs(k(0));
  if (edge > tail_tol * scale) {
    std::ostringstream os;
    os << "interaction kernel does not decay at the box edge: |v(-L/2)| = " << edge;
    throw ContractError(os.str());
  }
  if ((k - reflect(k)).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ContractError("interaction kernel is not even");
}

std::string InteractionSpec::canonical() const {
  switch (kind) {
    case Kind::none: return "interaction=none";
    case Kind::delta: return "interaction=delta;coupling=" + format_double(coupling);
    case Kind::gaussian:
      return "interaction=gaussian;depth=" + format_double(depth) + ";width=" + format_double(width);
    case Kind::sampled: {
      std::string s = "interaction=sampled;values=";
      for (Index i = 0; i < samples.size(); ++i) s += format_double(samples(i)) + ",";
      return s;
    }
  }
  return "";
}

Vector kinetic_symbol(const Grid& grid, const KineticSpec& kin) {
  return grid.frequencies().unaryExpr([&](double p) { return kin(p); });
}

CVector forward_transform(const Grid& grid, const CVector& u) {
  grid.check_length(u.size(), "forward_transform");
  CVector out;
  fft_engine().fwd(out, u);
  for (Index k = 0; k < grid.size(); ++k) out(k) *= grid.spacing() * sign_of_k(grid, k);
  return out;
}

CVector inverse_transform(const Grid& grid, const CVector& uhat) {
  grid.check_length(uhat.size(), "inverse_transform");
  CVector tmp(uhat.size());
  for (Index k = 0; k < grid.size(); ++k) tmp(k) = uhat(k) * sign_of_k(grid, k);
  CVector out;
  fft_engine().inv(out, tmp);  // includes 1/n
  return out / grid.spacing();
}

CVector apply_multiplier(const Grid& grid, const KineticSpec& kin, const CVector& u) {
  grid.check_length(u.size(), "apply_multiplier");
  CVector spec;
  fft_engine().fwd(spec, u);
  spec.array() *= kinetic_symbol(grid, kin).array().cast<std::complex<double>>();
  CVector out;
  fft_engine().inv(out, spec);
  return out;
}

Vector apply_multiplier(const Grid& grid, const KineticSpec& kin, const Vector& u) {
  return apply_multiplier(grid, kin, CVector(u.cast<std::complex<double>>())).real();
}

Vector spectral_derivative(const Grid& grid, const Vector& u) {
  grid.check_length(u.size(), "spectral_derivative");
  CVector spec;
  CVector in = u.cast<std::complex<double>>();
  fft_engine().fwd(spec, in);
  const Index n = grid.size();
  for (Index k = 0; k < n; ++k) spec(k) *= std::complex<double>(0.0, grid.frequencies()(k));
  spec(n / 2) = 0.0;
  CVector out;
  fft_engine().inv(out, spec);
  return out.real();
}

Vector spectral_shift(const Grid& grid, const Vector& u, double a) {
  grid.check_length(u.size(), "spectral_shift");
  CVector spec;
  CVector in = u.cast<std::complex<double>>();
  fft_engine().fwd(spec, in);
  const Index n = grid.size();
  for (Index k = 0; k < n; ++k) {
    double ph = -grid.frequencies()(k) * a;
    if (k == n / 2)
      spec(k) *= std::cos(ph);  // keep the shifted field real
    else
      spec(k) *= std::polar(1.0, ph);
  }
  CVector out;
  fft_engine().inv(out, spec);
  return out.real();
}

Vector reflect(const Vector& u) {
  const Index n = u.size();
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = u((n - i) % n);
  return out;
}

Vector convolve(const Grid& grid, const InteractionSpec& v, const Vector& f) {
  grid.check_length(f.size(), "convolve");
  const Index n = grid.size();
  if (v.kind == InteractionSpec::Kind::none) return Vector::Zero(n);
  if (v.kind == InteractionSpec::Kind::delta) return -v.coupling * f;
  Vector k = v.kernel(grid);
  // kernel sampled at separations m dx, m in FFT order
  CVector w(n);
  for (Index m = 0; m < n; ++m) w(m) = k((m + n / 2) % n);
  CVector wf, ff;
  fft_engine().fwd(wf, w);
  CVector fin = f.cast<std::complex<double>>();
  fft_engine().fwd(ff, fin);
  CVector prod = wf.cwiseProduct(ff);
  CVector out;
  fft_engine().inv(out, prod);
  return out.real() * grid.spacing();
}

Matrix kinetic_matrix(const Grid& grid, const KineticSpec& kin) {
  const Index n = grid.size();
  CVector sym = kinetic_symbol(grid, kin).cast<std::complex<double>>();
  CVector col;
  fft_engine().inv(col, sym);
  Matrix t(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) t(i, j) = col(((i - j) % n + n) % n).real();
  return 0.5 * (t + t.transpose());
}

namespace {

// Smooth random normalized state: Gaussian-decaying Fourier coefficients around a random center.
Vector random_state(const Grid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Index n = grid.size();
  const double pmax = std::numbers::pi / grid.spacing();
  double pc = pmax * std::pow(10.0, -2.0 * uni(rng));  // cutoff from pmax/100 to pmax
  CVector spec(n);
  for (Index k = 0; k < n; ++k) {
    double p = grid.frequencies()(k);
    double env = std::exp(-0.5 * p * p / (pc * pc));
    spec(k) = std::complex<double>(gauss(rng), gauss(rng)) * env;
  }
  spec(n / 2) = spec(n / 2).real();
  Vector u = inverse_transform(grid, spec).real();
  if (uni(rng) < 0.5) {
    // localized variant
    double c = (uni(rng) - 0.5) * grid.box_length() * 0.5;
    double w = grid.box_length() * std::pow(10.0, -2.0 * uni(rng)) * 0.1 + grid.spacing();
    for (Index i = 0; i < n; ++i) {
      double d = grid.nodes()(i) - c;
      u(i) *= std::exp(-0.5 * d * d / (w * w));
    }
  }
  double nu = grid.norm(u);
  if (nu == 0.0) {
    u.setConstant(1.0);
    nu = grid.norm(u);
  }
  return u / nu;
}

struct PairForms {
  double v;
  double abs_v;
};

// Two-body form for the symmetrized state (u(x)w(y) + w(x)u(y))/Z, or the
// product u(x)w(y) when symmetric is false.
PairForms pair_form(const Grid& grid, const InteractionSpec& v, const InteractionSpec& absv,
                    const Vector& u, const Vector& w, bool symmetric) {
  Vector u2 = u.cwiseProduct(u), w2 = w.cwiseProduct(w);
  double d = grid.inner(u2, convolve(grid, v, w2));
  double da = grid.inner(u2, convolve(grid, absv, w2));
  if (!symmetric) return {d, da};
  Vector uw = u.cwiseProduct(w);
  double x = grid.inner(uw, convolve(grid, v, uw));
  double xa = grid.inner(uw, convolve(grid, absv, uw));
  double s = grid.inner(u, w);
  double z = 2.0 * (1.0 + s * s);
  return {(2.0 * d + 2.0 * x) / z, (2.0 * da + 2.0 * xa) / z};
}

}  // namespace

RelativeBoundReport relative_bound_check(const Grid& grid, const KineticSpec& kin,
                                         const InteractionSpec& v, double lambda_rel,
                                         double Lambda_rel, Index samples, std::uint64_t seed,
                                         const std::vector<Vector>& probes) {
  InteractionSpec absv = v;
  if (v.kind == InteractionSpec::Kind::delta) {
    absv.coupling = -std::abs(v.coupling);
  } else if (v.kind == InteractionSpec::Kind::gaussian) {
    absv.depth = -std::abs(v.depth);
  } else if (v.kind == InteractionSpec::Kind::sampled) {
    absv.samples = v.samples.cwiseAbs();
  }

  std::mt19937_64 rng(seed);
  std::vector<Vector> states;
  for (Index i = 0; i < samples; ++i) states.push_back(random_state(grid, rng));
  for (const auto& p : probes) {
    grid.check_length(p.size(), "probe state");
    states.push_back(p / grid.norm(p));
  }

  RelativeBoundReport rep;
  rep.worst_upper_margin = std::numeric_limits<double>::infinity();
  rep.worst_lower_margin = std::numeric_limits<double>::infinity();
  auto kinetic = [&](const Vector& a, const Vector& b) {
    return grid.inner(a, apply_multiplier(grid, kin, b));
  };
  const std::size_t count = states.size();
  for (std::size_t i = 0; i < count; ++i) {
    const Vector& u = states[i];
    const Vector& w = states[(i + 1) % count];
    double tu = kinetic(u, u), tw = kinetic(w, w);
    // product state u(x)w(y): one-body kinetic term in the first slot
    {
      PairForms f = pair_form(grid, v, absv, u, w, false);
      rep.worst_upper_margin = std::min(rep.worst_upper_margin, Lambda_rel * (tu + 1.0) - f.abs_v);
      rep.worst_lower_margin = std::min(rep.worst_lower_margin, f.v + lambda_rel * tu + Lambda_rel);
    }
    // same-orbital state u(x)u(y)
    {
      PairForms f = pair_form(grid, v, absv, u, u, false);
      rep.worst_upper_margin = std::min(rep.worst_upper_margin, Lambda_rel * (tu + 1.0) - f.abs_v);
      rep.worst_lower_margin = std::min(rep.worst_lower_margin, f.v + lambda_rel * tu + Lambda_rel);
    }
    // symmetrized state, exchange term included
    {
      PairForms f = pair_form(grid, v, absv, u, w, true);
      double s = grid.inner(u, w);
      double t = (tu + tw + 2.0 * s * kinetic(u, w)) / (2.0 * (1.0 + s * s));
      rep.worst_upper_margin = std::min(rep.worst_upper_margin, Lambda_rel * (t + 1.0) - f.abs_v);
      rep.worst_lower_margin = std::min(rep.worst_lower_margin, f.v + lambda_rel * t + Lambda_rel);
    }
    ++rep.samples;
  }
  rep.passed = rep.worst_upper_margin >= 0.0 && rep.worst_lower_margin >= 0.0;
  return rep;
}

std::string Model::canonical() const {
  return "L=" + format_double(grid.box_length()) + ";n=" + std::to_string(grid.size()) + ";" +
         kinetic.canonical() + ";" + interaction.canonical();
}

std::string Model::hash() const {
  return fnv1a_hex(canonical() + ";version=" + kLibraryVersion);
}

}  // namespace bogolib
