#include "bogolib/bogoliubov.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <sstream>

namespace bogolib {

Matrix psd_sqrt(const Matrix& a, Index* floors, const char* name) {
  if (a.rows() != a.cols()) throw ContractError(std::string(name) + " is not square");
  if (a.rows() == 0) return a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  Vector ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev(0) < -1e-9 * scale) {
    std::ostringstream os;
    os << name << " is indefinite: eigenvalue " << ev(0);
    throw SolverError(os.str(), ev(0));
  }
  Index fl = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) < 0.0) {
      ev(i) = 0.0;
      ++fl;
    }
  if (floors) *floors += fl;
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

SymplecticResult symplectic_ground_energy(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw ContractError("symplectic_ground_energy: A and B must be square and of equal size");
  SymplecticResult r;
  const Index k = A.rows();
  r.eigs = Vector::Zero(k);
  if (k == 0) return r;
  // positivity of A is part of the contract even though only B is square-rooted
  psd_sqrt(A, &r.floor_count, "A");
  Matrix sb = psd_sqrt(B, &r.floor_count, "B");
  if (A == B) {
    // no pairing: the vacuum is the ground state, E_k are the eigenvalues of Q
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
    r.eigs = es.eigenvalues().reverse().cwiseMax(0.0);
    return r;
  }
  Matrix m = sb * A * sb;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  Vector ev = es.eigenvalues();
  for (Index i = 0; i < k; ++i) {
    if (ev(i) < 0.0) {
      ev(i) = 0.0;
      ++r.floor_count;
    }
  }
  Vector e = ev.cwiseSqrt();
  for (Index i = 0; i < k; ++i) r.eigs(i) = e(k - 1 - i);
  r.energy = 0.5 * (e.sum() - 0.5 * (A.trace() + B.trace()));
  return r;
}

CVector zero_mode_source(const ZeroModeCoupling& g, double y) {
  return (std::complex<double>(0.0, 4.0 * y) * g.g_perp.cast<std::complex<double>>()).eval();
}

CVector shift_vector(const ProjectedPair& perp, const ZeroModeCoupling& g, double y) {
  if (g.g_perp.size() != perp.size()) throw ContractError("shift_vector: coupling size mismatch");
  if (perp.size() == 0) return CVector();
  Eigen::LLT<Matrix> llt(perp.B);
  if (llt.info() != Eigen::Success)
    throw SolverError("shift_vector: B on the perpendicular complement is not positive definite", 0.0);
  Vector h = llt.solve(Vector(4.0 * y * g.g_perp));
  return std::complex<double>(0.0, -1.0) * h.cast<std::complex<double>>();
}

CVector apply_L(const ProjectedPair& perp, const CVector& w) {
  Matrix q = 0.5 * (perp.A + perp.B);
  Matrix g2 = 0.5 * (perp.A - perp.B);  // 2G
  return q.cast<std::complex<double>>() * w + g2.cast<std::complex<double>>() * w.conjugate();
}

double eta(const ProjectedPair& perp, const ZeroModeCoupling& g, double y) {
  double nu = -4.0 * g.g11 * y * y;
  if (perp.size() == 0) return nu;
  CVector w = shift_vector(perp, g, y);
  CVector u = zero_mode_source(g, y);
  return nu + w.dot(u).real();
}

BogoliubovSolution decouple_and_solve(const ProjectedPair& perp, const ZeroModeCoupling& g) {
  BogoliubovSolution s;
  SymplecticResult sym = symplectic_ground_energy(perp.A, perp.B);
  s.c0 = g.g11;
  s.symplectic_eigs = sym.eigs;
  s.e_perp = sym.energy;
  s.e_total = s.c0 + s.e_perp;
  s.mode_count = perp.size();
  s.floor_count = sym.floor_count;
  if (perp.size() > 0 && g.g_perp.size() == perp.size()) {
    for (double y : {0.25, 0.5, 1.0, 2.0}) s.eta_samples.push_back(eta(perp, g, y));
  }
  return s;
}

double hilbert_schmidt_proxy(const ProjectedPair& perp) {
  if (perp.size() == 0) return 0.0;
  Matrix gop = 0.25 * (perp.A - perp.B);
  Eigen::LLT<Matrix> llt(perp.A);
  if (llt.info() != Eigen::Success)
    throw SolverError("hilbert_schmidt_proxy: A is not positive definite", 0.0);
  Matrix x = llt.solve(gop);
  return (gop * x).trace();
}

std::vector<ConvergenceRow> convergence_study(const HessianOperators& ops,
                                              const std::vector<Index>& mode_counts) {
  std::vector<ConvergenceRow> rows;
  for (Index m : mode_counts) {
    if (m <= 0) throw ContractError("convergence_study: mode counts must be positive");
    ProjectedPair perp = project_perp(ops, true, m);
    ZeroModeCoupling g = zero_mode_coupling(ops, perp);
    BogoliubovSolution sol = decouple_and_solve(perp, g);
    ConvergenceRow r;
    r.n_mode = perp.size();
    r.c0 = sol.c0;
    r.e_perp = sol.e_perp;
    r.e_total = sol.e_total;
    r.floor_count = sol.floor_count;
    r.min_symplectic = sol.symplectic_eigs.size() ? sol.symplectic_eigs.minCoeff() : 0.0;
    r.extrapolated = r.e_total;
    if (!rows.empty()) {
      const ConvergenceRow& p = rows.back();
      r.delta_prev = r.e_total - p.e_total;
      r.rel_delta_prev = r.e_total != 0.0 ? std::abs(r.delta_prev / r.e_total) : std::abs(r.delta_prev);
      if (r.n_mode != p.n_mode) {
        double a = double(r.n_mode), b = double(p.n_mode);
        r.extrapolated = (a * r.e_total - b * p.e_total) / (a - b);
      }
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace bogolib
