#pragma once

#include <cstdint>
#include <vector>

#include "bogolib/hartree.hpp"

namespace bogolib {

// Linearization blocks at a Hartree minimizer. All matrices act on grid values;
// quadratic forms carry the quadrature weight dx, e.g. <f, Lplus f> = f.dot(Lplus f) dx.
struct HessianOperators {
  std::shared_ptr<const Model> model;
  Vector u0;
  double e_H = 0.0;
  double mu = 0.0;
  bool centered = false;
  Vector Vd;      // v * u0^2
  Matrix K;       // u0(x) v(x-y) u0(y) dx
  Matrix Lminus;  // T + Vd - mu
  Matrix Lplus;   // Lminus + 2K
  std::vector<Vector> zero_modes;  // normalized d_x u0; empty when v = 0

  const Grid& grid() const { return model->grid; }
  bool has_zero_mode() const { return !zero_modes.empty(); }
  // Euclidean-normalized copies (sqrt(dx) * u); the matrices are symmetric in this frame.
  Vector u0_unit() const;
  Vector u1_unit() const;
};

HessianOperators build_hessian(const HartreeState& state);

// f^T Lplus f + h^T Lminus h (weight dx) for z = f + i h; z must be orthogonal to u0.
double hessian_quadratic_form(const HessianOperators& ops, const CVector& z);

struct CoercivityReport {
  double eta = 0.0;
  Vector witness;            // grid function realizing eta
  bool witness_imaginary = false;  // true when the witness lives in the Lminus block
  double min_lminus = 0.0;   // Lminus on {u0}^perp
  double min_lplus = 0.0;    // Lplus on {u0, u1}^perp
  double lplus_zero_eig = 0.0;  // eigenvalue of Lplus on {u0}^perp closest to zero
  Index lplus_zero_count = 0;
  Index lminus_zero_count = 0;
  bool passed = false;
};

// Hard error when the numerical zero-mode count disagrees with the analytic one, or when
// the state is interacting but not localized.
CoercivityReport coercivity_check(const HessianOperators& ops);

// Orthonormal (Euclidean) basis of a complement and the projected blocks.
struct ProjectedPair {
  Matrix basis;  // n x k, columns orthonormal in R^n
  Matrix A;      // basis^T Lplus basis
  Matrix B;      // basis^T Lminus basis
  bool zero_modes_removed = false;
  Index dropped = 0;     // candidates discarded for rank loss
  double eta_prime = 0;  // min(min eig A, min eig B)

  Index size() const { return A.rows(); }
};

// n_mode < 0 selects the full complement (Householder); otherwise Fourier candidates are
// deflated, Gram-Schmidt orthonormalized, ordered by <b, Lplus b> and truncated.
ProjectedPair project_perp(const HessianOperators& ops, bool remove_zero_modes, Index n_mode = -1);

// Complement basis only (same construction as project_perp).
Matrix complement_basis(const HessianOperators& ops, bool remove_zero_modes, Index n_mode,
                        Index* dropped = nullptr);

// G_{1,1} = 1/2 <u1, K u1> and G_{1,k} for the columns of pair_perp.basis.
struct ZeroModeCoupling {
  double g11 = 0.0;
  Vector g_perp;
};
ZeroModeCoupling zero_mode_coupling(const HessianOperators& ops, const ProjectedPair& perp);

// Translation chart around u0: lambda(y) = <u1, u0(. - y)> is inverted on the interval
// where it is monotone.
struct Chart {
  const HessianOperators* ops = nullptr;
  double radius = 0.0;  // |t| < radius is inside
  double y_lo = 0.0;    // lambda(y_lo) = max
  double y_hi = 0.0;    // lambda(y_hi) = min

  double lambda(double y) const;
  // y with lambda(y) = t.
  double invert(double t) const;
};

Chart make_chart(const HessianOperators& ops);

// f(t) = u0(. - y) - <u0, u0(. - y)> u0 - t u1 with y = lambda^{-1}(t).
Vector chart_f(const Chart& chart, double t);

// iota(z) = sqrt(1 - ||z||^2) u0 + z
CVector embed(const HessianOperators& ops, const CVector& z);

struct InequalityReport {
  Index samples = 0;
  Index violations = 0;
  double worst_margin = 0.0;  // min over samples of lhs - rhs
  double max_norm = 0.0;
};

// Samples z = t u1 + i s u1 + z_perp with ||z|| <= min(max_norm, radius/4) and checks
// E[iota(F(z))] >= e_H + (1 - eps) Hess[z].
InequalityReport commutative_inequality_check(const HessianOperators& ops, const Chart& chart,
                                              double eps, Index samples, double max_norm = 0.05,
                                              std::uint64_t seed = 7);
// Evaluates one sample; returns lhs - rhs.
double commutative_margin(const HessianOperators& ops, const Chart& chart, double eps,
                          double t, double s, const CVector& z_perp);

}  // namespace bogolib
