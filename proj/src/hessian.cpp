#include "bogolib/hessian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace bogolib {

Vector HessianOperators::u0_unit() const { return u0 * std::sqrt(grid().spacing()); }

Vector HessianOperators::u1_unit() const {
  if (zero_modes.empty()) throw ContractError("model has no translation zero mode");
  return zero_modes.front() * std::sqrt(grid().spacing());
}

HessianOperators build_hessian(const HartreeState& state) {
  if (!state.converged) throw ContractError("build_hessian: state is not converged");
  const Model& m = *state.model;
  const Grid& g = m.grid;
  const Index n = g.size();
  const double dx = g.spacing();

  HessianOperators ops;
  ops.model = state.model;
  ops.u0 = state.u0;
  ops.e_H = state.e_H;
  ops.mu = state.mu_H;
  ops.centered = state.centered;
  ops.Vd = convolve(g, m.interaction, state.u0.cwiseProduct(state.u0));

  if (m.interaction.is_delta()) {
    ops.K = (-m.interaction.coupling * state.u0.cwiseProduct(state.u0)).asDiagonal();
  } else if (m.interaction.is_zero()) {
    ops.K = Matrix::Zero(n, n);
  } else {
    Vector k = m.interaction.kernel(g);
    ops.K.resize(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        Index d = ((i - j) % n + n) % n;  // separation in FFT order
        ops.K(i, j) = state.u0(i) * k((d + n / 2) % n) * state.u0(j) * dx;
      }
    ops.K = 0.5 * (ops.K + ops.K.transpose()).eval();
  }

  ops.Lminus = kinetic_matrix(g, m.kinetic);
  ops.Lminus.diagonal() += ops.Vd - Vector::Constant(n, ops.mu);
  ops.Lplus = ops.Lminus + 2.0 * ops.K;

  if (!m.interaction.is_zero()) {
    Vector d = spectral_derivative(g, state.u0);
    double nd = g.norm(d);
    if (nd > 1e-8) ops.zero_modes.push_back(d / nd);
  }
  return ops;
}

double hessian_quadratic_form(const HessianOperators& ops, const CVector& z) {
  const Grid& g = ops.grid();
  g.check_length(z.size(), "hessian_quadratic_form");
  CVector u0c = ops.u0.cast<std::complex<double>>();
  double overlap = std::abs(g.inner(u0c, z));
  if (overlap > 1e-10 * std::max(1.0, g.norm(z))) {
    std::ostringstream os;
    os << "hessian_quadratic_form: z is not orthogonal to u0 (overlap " << overlap << ")";
    throw ContractError(os.str());
  }
  Vector f = z.real(), h = z.imag();
  return (f.dot(ops.Lplus * f) + h.dot(ops.Lminus * h)) * g.spacing();
}

namespace {

// Columns spanning the orthogonal complement of the (orthonormal) columns of q.
Matrix householder_complement(const Matrix& q) {
  const Index n = q.rows(), d = q.cols();
  Eigen::HouseholderQR<Matrix> qr(q);
  Matrix full = qr.householderQ() * Matrix::Identity(n, n);
  return full.rightCols(n - d);
}

Matrix deflation_set(const HessianOperators& ops, bool remove_zero_modes) {
  Index d = (remove_zero_modes && ops.has_zero_mode()) ? 2 : 1;
  Matrix q(ops.u0.size(), d);
  q.col(0) = ops.u0_unit();
  if (d == 2) {
    Vector u1 = ops.u1_unit();
    u1 -= q.col(0).dot(u1) * q.col(0);
    q.col(1) = u1.normalized();
  }
  return q;
}

// Real Fourier modes ordered by |k|: 1, cos 1, sin 1, cos 2, ..., Nyquist.
Vector fourier_candidate(const Grid& g, Index j) {
  const Index n = g.size();
  Vector out(n);
  const double two_pi_over_L = 2.0 * std::numbers::pi / g.box_length();
  if (j == 0) return Vector::Constant(n, 1.0 / std::sqrt(double(n)));
  if (j == n - 1) {
    for (Index i = 0; i < n; ++i) out(i) = std::cos(two_pi_over_L * (n / 2) * g.nodes()(i));
    return out / std::sqrt(double(n));
  }
  Index k = (j + 1) / 2;
  bool is_cos = (j % 2) == 1;
  for (Index i = 0; i < n; ++i) {
    double ph = two_pi_over_L * double(k) * g.nodes()(i);
    out(i) = is_cos ? std::cos(ph) : std::sin(ph);
  }
  return out.normalized();
}

double min_eig(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

Matrix complement_basis(const HessianOperators& ops, bool remove_zero_modes, Index n_mode,
                        Index* dropped) {
  const Grid& g = ops.grid();
  const Index n = g.size();
  Matrix q = deflation_set(ops, remove_zero_modes);
  const Index d = q.cols();
  const Index cap = n - d;
  if (dropped) *dropped = 0;

  Matrix basis;
  if (n_mode < 0 || n_mode >= cap) {
    basis = householder_complement(q);
  } else {
    Index want = std::min<Index>(n_mode + d, n);
    std::vector<Vector> kept;
    Index drop = 0;
    for (Index j = 0; j < n && static_cast<Index>(kept.size()) < want; ++j) {
      Vector c = fourier_candidate(g, j);
      Vector v = c;
      // classical Gram-Schmidt, applied twice
      for (int pass = 0; pass < 2; ++pass) {
        v -= q * (q.transpose() * v);
        for (const auto& b : kept) v -= b.dot(v) * b;
      }
      double nv = v.norm();
      if (nv < 1e-8) {
        ++drop;
        continue;
      }
      kept.push_back(v / nv);
    }
    basis.resize(n, static_cast<Index>(kept.size()));
    for (Index j = 0; j < basis.cols(); ++j) basis.col(j) = kept[static_cast<std::size_t>(j)];
    if (dropped) *dropped = drop;
  }

  // order by the Lplus quotient, then truncate
  Vector quot = (basis.transpose() * (ops.Lplus * basis)).diagonal();
  std::vector<Index> order(static_cast<std::size_t>(basis.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return quot(a) < quot(b); });
  Index keep = (n_mode < 0) ? basis.cols() : std::min<Index>(n_mode, basis.cols());
  Matrix out(n, keep);
  for (Index j = 0; j < keep; ++j) out.col(j) = basis.col(order[static_cast<std::size_t>(j)]);
  return out;
}

ProjectedPair project_perp(const HessianOperators& ops, bool remove_zero_modes, Index n_mode) {
  ProjectedPair p;
  p.basis = complement_basis(ops, remove_zero_modes, n_mode, &p.dropped);
  p.zero_modes_removed = remove_zero_modes && ops.has_zero_mode();
  Matrix lb = ops.Lplus * p.basis;
  p.A = p.basis.transpose() * lb;
  p.A = 0.5 * (p.A + p.A.transpose()).eval();
  Matrix mb = ops.Lminus * p.basis;
  p.B = p.basis.transpose() * mb;
  p.B = 0.5 * (p.B + p.B.transpose()).eval();
  p.eta_prime = std::min(min_eig(p.A), min_eig(p.B));
  return p;
}

CoercivityReport coercivity_check(const HessianOperators& ops) {
  const Model& m = *ops.model;
  if (!m.interaction.is_zero() && !ops.centered)
    throw ContractError(
        "coercivity_check: interacting state is not localized/centered; the check is meaningless");
  CoercivityReport r;
  const Index n = ops.u0.size();
  const double dx = ops.grid().spacing();

  Matrix c1 = householder_complement(deflation_set(ops, false));
  Matrix lm = c1.transpose() * ops.Lminus * c1;
  lm = 0.5 * (lm + lm.transpose()).eval();
  Matrix lp1 = c1.transpose() * ops.Lplus * c1;
  lp1 = 0.5 * (lp1 + lp1.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es_m(lm);
  Eigen::SelfAdjointEigenSolver<Matrix> es_p1(lp1, Eigen::EigenvaluesOnly);
  double norm_lp = std::max(es_p1.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  double tol = 1e-6 * norm_lp;
  Index d = ops.has_zero_mode() ? 1 : 0;

  r.lplus_zero_count = (es_p1.eigenvalues().array().abs() < tol).count();
  r.lminus_zero_count = (es_m.eigenvalues().array().abs() < tol).count();
  Index closest;
  es_p1.eigenvalues().cwiseAbs().minCoeff(&closest);
  r.lplus_zero_eig = es_p1.eigenvalues()(closest);
  if (r.lplus_zero_count != d || r.lminus_zero_count != 0) {
    std::ostringstream os;
    os << "zero-mode classification mismatch: Lplus has " << r.lplus_zero_count
       << " numerical zero modes (expected " << d << "), Lminus has " << r.lminus_zero_count
       << " (expected 0)";
    throw SolverError(os.str(), r.lplus_zero_eig);
  }

  r.min_lminus = es_m.eigenvalues()(0);
  Vector wit_m = c1 * es_m.eigenvectors().col(0);

  Vector wit_p;
  if (d == 1) {
    Matrix c2 = householder_complement(deflation_set(ops, true));
    Matrix lp2 = c2.transpose() * ops.Lplus * c2;
    lp2 = 0.5 * (lp2 + lp2.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es_p2(lp2);
    r.min_lplus = es_p2.eigenvalues()(0);
    wit_p = c2 * es_p2.eigenvectors().col(0);
  } else {
    r.min_lplus = es_p1.eigenvalues()(0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(lp1);
    wit_p = c1 * es.eigenvectors().col(0);
  }
  (void)n;
  if (r.min_lminus <= r.min_lplus) {
    r.eta = r.min_lminus;
    r.witness = wit_m / std::sqrt(dx);
    r.witness_imaginary = true;
  } else {
    r.eta = r.min_lplus;
    r.witness = wit_p / std::sqrt(dx);
  }
  r.passed = r.eta > 0.0;
  return r;
}

ZeroModeCoupling zero_mode_coupling(const HessianOperators& ops, const ProjectedPair& perp) {
  ZeroModeCoupling c;
  if (!ops.has_zero_mode()) {
    c.g_perp = Vector::Zero(perp.size());
    return c;
  }
  Vector u1 = ops.u1_unit();
  Vector ku1 = ops.K * u1;
  c.g11 = 0.5 * u1.dot(ku1);
  c.g_perp = 0.5 * perp.basis.transpose() * ku1;
  return c;
}

double Chart::lambda(double y) const {
  const Grid& g = ops->grid();
  return g.inner(ops->zero_modes.front(), spectral_shift(g, ops->u0, y));
}

Chart make_chart(const HessianOperators& ops) {
  if (!ops.has_zero_mode()) throw ContractError("make_chart: model has no translation zero mode");
  Chart c;
  c.ops = &ops;
  const Grid& g = ops.grid();
  const double h = g.spacing();
  const double ymax = 0.25 * g.box_length();
  // lambda decreases through y = 0; walk out to the first turning point on each side
  auto turning = [&](double dir) {
    double y = 0.0, prev = c.lambda(0.0);
    for (;;) {
      double yn = y + dir * h;
      double cur = c.lambda(yn);
      bool still = dir > 0 ? (cur < prev) : (cur > prev);
      if (!still || std::abs(yn) > ymax) break;
      y = yn;
      prev = cur;
    }
    // golden-section refinement of the extremum on [y - h, y + h]
    double a = y - h, b = y + h;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto obj = [&](double t) { return dir > 0 ? c.lambda(t) : -c.lambda(t); };
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = obj(x1), f2 = obj(x2);
    for (int i = 0; i < 60; ++i) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = obj(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = obj(x2);
      }
    }
    return 0.5 * (a + b);
  };
  c.y_hi = turning(1.0);
  c.y_lo = turning(-1.0);
  double lam_hi = c.lambda(c.y_hi), lam_lo = c.lambda(c.y_lo);
  c.radius = std::min(std::abs(lam_hi), std::abs(lam_lo)) * (1.0 - 1e-9);
  return c;
}

double Chart::invert(double t) const {
  if (!(std::abs(t) < radius)) {
    std::ostringstream os;
    os << "chart: t = " << t << " is outside the invertibility radius " << radius;
    throw ContractError(os.str());
  }
  if (t == 0.0) return 0.0;
  double a = y_lo, b = y_hi;  // lambda(a) > t > lambda(b)
  for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++i) {
    double mid = 0.5 * (a + b);
    if (lambda(mid) > t)
      a = mid;
    else
      b = mid;
  }
  // one secant polish
  double fa = lambda(a) - t, fb = lambda(b) - t;
  if (fa != fb) {
    double y = a - fa * (b - a) / (fb - fa);
    if (y >= a && y <= b) return y;
  }
  return 0.5 * (a + b);
}

Vector chart_f(const Chart& chart, double t) {
  const HessianOperators& ops = *chart.ops;
  const Grid& g = ops.grid();
  if (t == 0.0) return Vector::Zero(g.size());
  double y = chart.invert(t);
  Vector uy = spectral_shift(g, ops.u0, y);
  return uy - g.inner(ops.u0, uy) * ops.u0 - t * ops.zero_modes.front();
}

CVector embed(const HessianOperators& ops, const CVector& z) {
  const Grid& g = ops.grid();
  double nz2 = z.squaredNorm() * g.spacing();
  if (nz2 > 1.0) throw ContractError("embed: ||z|| > 1");
  return std::sqrt(1.0 - nz2) * ops.u0.cast<std::complex<double>>() + z;
}

double commutative_margin(const HessianOperators& ops, const Chart& chart, double eps, double t,
                          double s, const CVector& z_perp) {
  const Grid& g = ops.grid();
  const Vector& u1 = ops.zero_modes.front();
  CVector u1c = u1.cast<std::complex<double>>();
  CVector z = std::complex<double>(t, s) * u1c + z_perp;
  double rhs = ops.e_H + (1.0 - eps) * hessian_quadratic_form(ops, z);

  Vector f = chart_f(chart, t);
  double h = 1e-4 * chart.radius;
  Vector df = (chart_f(chart, t + h) - chart_f(chart, t - h)) / (2.0 * h);
  double s_shift = s - g.inner(df, Vector(z_perp.imag()));
  CVector F = std::complex<double>(t, s_shift) * u1c + z_perp + f.cast<std::complex<double>>();
  double lhs = hartree_functional(*ops.model, embed(ops, F));
  return lhs - rhs;
}

InequalityReport commutative_inequality_check(const HessianOperators& ops, const Chart& chart,
                                              double eps, Index samples, double max_norm,
                                              std::uint64_t seed) {
  const Grid& g = ops.grid();
  const Index n = g.size();
  InequalityReport rep;
  rep.max_norm = std::min(max_norm, 0.25 * chart.radius);
  rep.worst_margin = std::numeric_limits<double>::infinity();

  // localized and extended real building blocks, projected off u0 and u1
  std::vector<Vector> blocks;
  for (int k = 0; k < 8; ++k) {
    Vector b = g.nodes().unaryExpr([k](double x) { return std::pow(x, k) * std::exp(-0.5 * x * x); });
    blocks.push_back(b);
  }
  for (int k = 1; k <= 8; ++k) {
    Vector c(n), sn(n);
    for (Index i = 0; i < n; ++i) {
      double ph = 2.0 * std::numbers::pi * k * g.nodes()(i) / g.box_length();
      c(i) = std::cos(ph);
      sn(i) = std::sin(ph);
    }
    blocks.push_back(c);
    blocks.push_back(sn);
  }
  const Vector& u0 = ops.u0;
  const Vector& u1 = ops.zero_modes.front();
  for (auto& b : blocks) {
    b -= g.inner(u0, b) * u0;
    b -= g.inner(u1, b) * u1;
    b /= g.norm(b);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double thr = 1e-10;
  for (Index i = 0; i < samples; ++i) {
    double t = gauss(rng), s = gauss(rng);
    CVector zp = CVector::Zero(n);
    for (const auto& b : blocks) zp += std::complex<double>(gauss(rng), gauss(rng)) * b.cast<std::complex<double>>();
    double w = uni(rng);  // weight of the zero-mode part
    double scale_perp = std::sqrt(std::max(0.0, 1.0 - w)) / g.norm(zp);
    double scale_zero = std::sqrt(w) / std::hypot(t, s);
    double r = rep.max_norm * uni(rng);
    t *= r * scale_zero;
    s *= r * scale_zero;
    zp *= r * scale_perp;
    double m = commutative_margin(ops, chart, eps, t, s, zp);
    rep.worst_margin = std::min(rep.worst_margin, m);
    if (m < -thr) ++rep.violations;
    ++rep.samples;
  }
  return rep;
}

}  // namespace bogolib
