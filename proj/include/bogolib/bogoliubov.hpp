#pragma once

#include <vector>

#include "bogolib/hessian.hpp"

namespace bogolib {

struct SymplecticResult {
  double energy = 0.0;
  Vector eigs;  // nonincreasing
  Index floor_count = 0;
};

// Ground energy of the quadratic Hamiltonian with quadrature blocks A = Q + 2G, B = Q - 2G:
// E = spec sqrt(B^{1/2} A B^{1/2}), energy = (sum E - Tr (A + B)/2) / 2.
SymplecticResult symplectic_ground_energy(const Matrix& A, const Matrix& B);

template <class DerivedA, class DerivedB>
SymplecticResult symplectic_ground_energy(const Eigen::MatrixBase<DerivedA>& A,
                                          const Eigen::MatrixBase<DerivedB>& B) {
  return symplectic_ground_energy(Matrix(A), Matrix(B));
}

// Symmetric square root by eigendecomposition; eigenvalues below tol_rel * ||a|| (and
// above -tol_abs) are floored to zero and counted.
Matrix psd_sqrt(const Matrix& a, Index* floors = nullptr, const char* name = "matrix");

struct BogoliubovSolution {
  double c0 = 0.0;
  Vector symplectic_eigs;
  double e_perp = 0.0;
  double e_total = 0.0;
  Index mode_count = 0;
  std::vector<double> eta_samples;
  Index floor_count = 0;
};

// c0 + inf spec of the perpendicular part; eta sampled at a few y for diagnostics.
BogoliubovSolution decouple_and_solve(const ProjectedPair& perp, const ZeroModeCoupling& g);

// w(y) = -i B^{-1} Im u(y) with u(y) = 4 i y sum_k G_{1k} u_k (basis coordinates).
CVector shift_vector(const ProjectedPair& perp, const ZeroModeCoupling& g, double y);

// The R-linear map L(w) = Q w + 2 G conj(w) in basis coordinates.
CVector apply_L(const ProjectedPair& perp, const CVector& w);
// u(y) in basis coordinates.
CVector zero_mode_source(const ZeroModeCoupling& g, double y);

// eta(y) = -4 G_11 y^2 + Re <w(y), u(y)>
double eta(const ProjectedPair& perp, const ZeroModeCoupling& g, double y);

struct ConvergenceRow {
  Index n_mode = 0;
  double c0 = 0.0;
  double e_perp = 0.0;
  double e_total = 0.0;
  double delta_prev = 0.0;      // e_total - previous e_total (0 for the first row)
  double rel_delta_prev = 0.0;  // |delta| / |e_total|
  double extrapolated = 0.0;    // 1/n_mode tail removed using the previous row
  Index floor_count = 0;
  double min_symplectic = 0.0;
};

std::vector<ConvergenceRow> convergence_study(const HessianOperators& ops,
                                              const std::vector<Index>& mode_counts);

// Trace of G_op A^{-1} G_op^T with 2 G_op = (A - B)/2, the Hilbert-Schmidt proxy.
double hilbert_schmidt_proxy(const ProjectedPair& perp);

}  // namespace bogolib
