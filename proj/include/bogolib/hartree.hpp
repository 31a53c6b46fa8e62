#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "bogolib/grid.hpp"

namespace bogolib {

struct HartreeState {
  std::shared_ptr<const Model> model;
  Vector u0;
  double e_H = 0.0;
  double mu_H = 0.0;
  double el_residual = 0.0;  // grid norm of T u0 + (v*u0^2) u0 - mu_H u0
  bool centered = false;
  bool converged = false;
  Index iterations = 0;
  std::vector<double> energy_trace;  // energy after every accepted step

  const Grid& grid() const { return model->grid; }
};

struct MinimizeConfig {
  Index max_iter = 20000;
  double tol = 1e-10;
  double tau = 1.0;       // initial step
  double tau_max = 50.0;  // accepted steps grow tau by 1.25 up to this
  double tau_min = 1e-12;
  double initial_width = 1.0;  // width of the Gaussian start
};

// Thrown by minimize; carries the last iterate.
struct HartreeNonConvergence : SolverError {
  HartreeNonConvergence(const std::string& what, HartreeState last)
      : SolverError(what, last.el_residual), last(std::move(last)) {}
  HartreeState last;
};

// Hartree functional <u,Tu> + 1/2 <|u|^2, v*|u|^2> with quadrature weight dx.
// Rejects |  ||u||^2 - 1 | > 1e-8.
double energy(const Model& model, const Vector& u);
double energy(const Model& model, const CVector& u);
// Same functional without the normalization guard.
double hartree_functional(const Model& model, const CVector& u);

// T u + (v*u^2) u.
Vector gradient(const Model& model, const Vector& u);

// Chemical potential <T>_u + <u^2, v*u^2>.
double chemical_potential(const Model& model, const Vector& u);

HartreeState minimize(std::shared_ptr<const Model> model, const MinimizeConfig& cfg = {});

// Circular shift to the density maximum, then a band-limited sub-grid shift
// putting the median of |u|^2 at x = 0; the sign is fixed so that sum u > 0.
Vector center(const Grid& grid, const Vector& u);
// x where the cell-based cumulative mass of |u|^2 crosses 1/2.
double mass_median(const Grid& grid, const Vector& u);

// Amplitude at the box edge relative to the maximum.
double edge_ratio(const Vector& u);

// McGuire ground state energy of N bosons with pair coupling lambda/(N-1).
double mcguire_exact(int N, double lambda);

void save_state(const std::filesystem::path& stem, const HartreeState& s);
// Loads a state written by save_state; model hash and library version must match.
HartreeState load_state(const std::filesystem::path& stem, std::shared_ptr<const Model> model);

}  // namespace bogolib
