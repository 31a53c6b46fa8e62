#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bogolib/error.hpp"

namespace bogolib {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;

// Uniform periodic grid on [-L/2, L/2). Frequencies are stored in FFT order
// (k = 0, 1, ..., n/2-1, -n/2, ..., -1).
class Grid {
 public:
  Grid(double box_length, Index n_points);

  double box_length() const { return L_; }
  Index size() const { return n_; }
  double spacing() const { return dx_; }
  const Vector& nodes() const { return x_; }
  const Vector& frequencies() const { return p_; }
  Index center_index() const { return n_ / 2; }

  // Quadrature inner product and norm, weight dx.
  double inner(const Vector& f, const Vector& g) const { return f.dot(g) * dx_; }
  double norm(const Vector& f) const { return std::sqrt(inner(f, f)); }
  std::complex<double> inner(const CVector& f, const CVector& g) const { return f.dot(g) * dx_; }
  double norm(const CVector& f) const { return std::sqrt(f.squaredNorm() * dx_); }

  void check_length(Index len, const char* what) const;

 private:
  double L_;
  Index n_;
  double dx_;
  Vector x_;
  Vector p_;
};

Grid make_grid(double box_length, Index n_points);

struct KineticSpec {
  enum class Kind { nonrelativistic, fractional };
  Kind kind = Kind::nonrelativistic;
  double mass = 1.0;
  double exponent = 1.0;

  static KineticSpec nonrelativistic() { return {}; }
  static KineticSpec fractional(double mass, double exponent);

  double operator()(double p) const;
  // Constant of the localization error bound, m^{2(s-1)} s (1 for p^2).
  double ims_constant() const;
  std::string canonical() const;
};

struct InteractionSpec {
  enum class Kind { none, delta, gaussian, sampled };
  Kind kind = Kind::none;
  double coupling = 0.0;  // delta: v = -coupling * delta
  double depth = 0.0;     // gaussian: v(x) = -depth * exp(-x^2 / (2 width^2))
  double width = 1.0;
  Vector samples;         // sampled: v(x_i) on the grid nodes, symmetrized

  static InteractionSpec none() { return {}; }
  static InteractionSpec delta(double coupling);
  static InteractionSpec gaussian(double depth, double width);
  // Symmetrizes under x -> -x and checks the edge tail.
  static InteractionSpec sampled(const Grid& grid, const Vector& values, double tail_tol = 1e-10);

  bool is_zero() const;
  bool is_delta() const { return kind == Kind::delta; }
  // Kernel values at the grid nodes. Not available for delta.
  Vector kernel(const Grid& grid) const;
  // Checks evenness/tail conditions against a grid.
  void validate(const Grid& grid, double tail_tol = 1e-10) const;
  std::string canonical() const;
};

// t(p_k) in FFT order.
Vector kinetic_symbol(const Grid& grid, const KineticSpec& kin);

// Forward transform u_hat(p_k) = dx * sum_j u_j exp(-i p_k x_j), FFT order.
CVector forward_transform(const Grid& grid, const CVector& u);
// Inverse u_j = (1/L) sum_k u_hat_k exp(i p_k x_j).
CVector inverse_transform(const Grid& grid, const CVector& uhat);

CVector apply_multiplier(const Grid& grid, const KineticSpec& kin, const CVector& u);
Vector apply_multiplier(const Grid& grid, const KineticSpec& kin, const Vector& u);

// Derivative by i p multiplication with the Nyquist component dropped.
Vector spectral_derivative(const Grid& grid, const Vector& u);
// Band-limited translate: returns u(x - a).
Vector spectral_shift(const Grid& grid, const Vector& u, double a);
// Reflection x -> -x on the grid (index i -> n - i mod n).
Vector reflect(const Vector& u);

// (v * f)(x_i) = sum_j v(x_i - x_j) f_j dx; for delta returns -coupling * f.
Vector convolve(const Grid& grid, const InteractionSpec& v, const Vector& f);

// Dense circulant matrix of the kinetic multiplier.
Matrix kinetic_matrix(const Grid& grid, const KineticSpec& kin);

struct RelativeBoundReport {
  Index samples = 0;
  double worst_upper_margin = 0.0;  // min of Lambda(<T>+1) - <|v|>
  double worst_lower_margin = 0.0;  // min of <v> + lambda <T> + Lambda
  bool passed = false;
};

// Monte-Carlo check of |v| <= Lambda (T + 1) and v >= -lambda T - Lambda as two-body
// forms on product and symmetrized states. Extra probe states are appended to
// the random sample.
RelativeBoundReport relative_bound_check(const Grid& grid, const KineticSpec& kin,
                                         const InteractionSpec& v, double lambda_rel,
                                         double Lambda_rel, Index samples = 200,
                                         std::uint64_t seed = 1,
                                         const std::vector<Vector>& probes = {});

struct Model {
  Grid grid;
  KineticSpec kinetic;
  InteractionSpec interaction;

  std::string canonical() const;
  std::string hash() const;
};

}  // namespace bogolib
