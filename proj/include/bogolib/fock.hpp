#pragma once

#include <Eigen/Sparse>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bogolib/bogoliubov.hpp"
#include "bogolib/io.hpp"

namespace bogolib {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// ---------------------------------------------------------------- modes

enum class ModePolicy {
  lplus_ordered,     // u0, u1, then Fourier complement modes by increasing Lplus quotient
  natural_orbitals,  // u0, u1, then natural orbitals of the Bogoliubov vacuum on a mode pool
};

struct ModeCatalog {
  std::shared_ptr<const Model> model;
  Matrix modes;  // n x m grid functions, <u_i, u_j> = delta_ij with weight dx
  Matrix T;      // <u_i, T u_j>
  std::vector<double> V;  // v_{ij,kl} at ((i*m + j)*m + k)*m + l
  Matrix Q;      // excitation block (indices 1..m-1) of Lminus + K
  Matrix G;      // excitation block of K / 2
  Index zero_mode_count = 0;
  double e_H = 0.0;
  double mu = 0.0;

  Index size() const { return modes.cols(); }
  double v(Index i, Index j, Index k, Index l) const {
    const Index m = size();
    return V[static_cast<std::size_t>(((i * m + j) * m + k) * m + l)];
  }
};

ModeCatalog build_mode_catalog(const HartreeState& state, const HessianOperators& hess, Index m,
                               ModePolicy policy = ModePolicy::lplus_ordered,
                               Index natural_pool = 256);

// ---------------------------------------------------------------- basis

// Parity sector: states whose occupation summed over the masked modes has the given parity.
struct FockSector {
  std::vector<bool> mask;
  int parity = 0;
};

// All occupations (n_1..n_m) with sum <= M, in lexicographic order (n_1 most significant).
// An optional sector restricts the state vectors; single-mode tables always cover the
// whole truncated space so that intermediate states outside the sector stay reachable.
class FockBasis {
 public:
  FockBasis(Index m_exc, Index M, std::optional<FockSector> sector = std::nullopt);

  Index modes() const { return m_; }
  Index cutoff() const { return M_; }
  Index size() const { return static_cast<Index>(compact_to_full_.size()); }
  Index full_size() const { return full_size_; }
  bool has_sector() const { return sector_.has_value(); }

  // Occupation of mode i (0-based) in full state f.
  int occupation(Index f, Index i) const { return occ_[static_cast<std::size_t>(f * m_ + i)]; }
  int total(Index f) const { return total_[static_cast<std::size_t>(f)]; }
  std::vector<int> occupations(Index f) const;

  // Full index of an occupation vector, -1 outside the cutoff.
  Index full_index(const std::vector<int>& occ) const;
  // Compact (vector) index of a full state, -1 outside the sector.
  Index compact(Index f) const {
    return sector_ ? full_to_compact_[static_cast<std::size_t>(f)] : f;
  }
  Index full(Index c) const { return compact_to_full_[static_cast<std::size_t>(c)]; }
  Index index_of(const std::vector<int>& occ) const;

  // a_i^dagger |f> and a_i |f>: target full index or -1.
  Index create(Index f, Index i) const { return create_[static_cast<std::size_t>(i * full_size_ + f)]; }
  Index annihilate(Index f, Index i) const {
    return annihilate_[static_cast<std::size_t>(i * full_size_ + f)];
  }

  // C(M + m, m)
  static std::uint64_t count(Index m_exc, Index M);

 private:
  Index m_, M_, full_size_;
  std::optional<FockSector> sector_;
  std::vector<std::uint8_t> occ_;
  std::vector<std::uint8_t> total_;
  std::vector<std::int32_t> create_, annihilate_;
  std::vector<std::int32_t> full_to_compact_;
  std::vector<std::int32_t> compact_to_full_;
  std::vector<std::vector<std::uint64_t>> binom_;  // binom_[r][R] = C(R + r, r)
};

// ---------------------------------------------------------------- operators

// Normal-ordered monomial family sum W[I,K] a^dagger_I a_K f(N) with f on the right.
// With hermitize the term contributes (X + X^dagger)/2, otherwise X itself.
struct FockTerm {
  int n_create = 0;
  int n_annihilate = 0;
  std::vector<double> coeff;  // m^(n_create + n_annihilate), creators first, row-major
  Vector right_factor;        // f(N) for N = 0..M; empty means 1
  bool hermitize = false;
  std::string label;
};

class FockOperator {
 public:
  FockOperator() = default;
  FockOperator(std::shared_ptr<const FockBasis> basis, std::string label);

  void add_term(FockTerm term);
  const std::vector<FockTerm>& terms() const { return terms_; }
  const FockBasis& basis() const { return *basis_; }
  std::shared_ptr<const FockBasis> basis_ptr() const { return basis_; }
  const std::string& label() const { return label_; }
  Index dim() const { return basis_->size(); }

  // y = H x on the (possibly sector-restricted) state vectors.
  void apply(const Vector& x, Vector& y) const;
  Vector operator*(const Vector& x) const {
    Vector y;
    apply(x, y);
    return y;
  }
  SparseMatrix to_sparse() const;
  std::vector<Triplet> triplets() const;
  // alpha * this + beta * other over the same basis
  FockOperator combined(double alpha, const FockOperator& other, double beta,
                        const std::string& label) const;

 private:
  struct Compiled;
  std::shared_ptr<const FockBasis> basis_;
  std::string label_;
  std::vector<FockTerm> terms_;
  std::vector<std::shared_ptr<const Compiled>> compiled_;
  template <class Sink>
  void row(Index c, Sink&& sink) const;
};

// Per-mode creation and annihilation matrices on the full truncated space.
struct LadderOps {
  std::vector<SparseMatrix> create;
  std::vector<SparseMatrix> annihilate;
};
LadderOps creation_ops(const FockBasis& basis);

// a^dagger Q a + sum G_ij (a_i a_j + a_i^dagger a_j^dagger)
FockOperator bogoliubov_fock(std::shared_ptr<const FockBasis> basis, const Matrix& Q, const Matrix& G);
// Q, G from the catalog; use_perp drops the zero mode u1.
FockOperator build_bogoliubov_fock(const ModeCatalog& catalog, std::shared_ptr<const FockBasis> basis,
                                   bool use_perp);

// f_0..f_6 evaluated at x = N_exc / N.
double excitation_factor(int r, double x, int N);

// N * U N^{-1} H_N U^{-1} compressed to the basis; excitation modes are catalog indices 1..m_exc.
FockOperator build_excitation_hamiltonian(const ModeCatalog& catalog,
                                          std::shared_ptr<const FockBasis> basis, int N);

// sum_{j<=d} P_j^2 + a_{>d}^dagger (T + 1) a_{>d}; t_perp is the kinetic block of modes d..m-1
// (basis-local indices).
FockOperator build_A_operator(std::shared_ptr<const FockBasis> basis, const Matrix& t_perp, Index d);

struct LanczosResult {
  double energy = 0.0;
  Vector vector;
  Index iterations = 0;  // matrix-vector products
  double residual = 0.0;
};

struct LanczosConfig {
  double tol = 1e-9;  // Ritz residual relative to max(1, |theta|)
  Index max_iter = 5000;
  Index krylov_dim = 80;
  std::uint64_t seed = 12345;
};

// Restarted Lanczos with full reorthogonalization. The start vector is the given one
// (if non-empty) plus a small deterministic random component.
LanczosResult lanczos_ground(const FockOperator& op, const LanczosConfig& cfg = {},
                             const Vector& start = Vector());

// Lowest eigenvalue of a dense symmetric matrix by the same iteration (used by tests).
LanczosResult lanczos_ground(const Matrix& a, const LanczosConfig& cfg = {});

struct ExcitationMapReport {
  int N = 0;
  double unitarity = 0.0;       // max |U U^T - I|
  double vacuum = 0.0;          // |U (u0 x ... x u0) - vac|
  double law_condensate = 0.0;  // b0^dagger b0 -> 1 - L
  double law_transfer = 0.0;    // b1^dagger b0 -> b1^dagger sqrt(1 - L)
  double law_excited = 0.0;     // b1^dagger b1 -> b1^dagger b1
  bool passed = false;
};

// Explicit U_N between the symmetric subspace of (C^2)^{x N} and the one-mode Fock space.
ExcitationMapReport excitation_map_check(int N);

struct AsymptoticsRow {
  std::string model_hash;
  int N = 0;
  Index m_exc = 0;
  Index M = 0;
  double E_N = 0.0;
  double gap = 0.0;  // E_N - N e_H
  double mcguire = std::numeric_limits<double>::quiet_NaN();
  double bogoliubov_total = 0.0;
  Index basis_size = 0;
  Index iterations = 0;
};

struct MPolicy {
  Index cap = 14;
  bool fixed = false;  // fixed: M = cap (rejected if > N); otherwise M = min(N, cap)
  Index resolve(int N) const;
};

std::vector<AsymptoticsRow> energy_asymptotics_run(const ModeCatalog& catalog,
                                                   const std::vector<int>& N_list, Index m_exc,
                                                   const MPolicy& policy, double bogoliubov_total,
                                                   const LanczosConfig& cfg = {});

std::string asymptotics_csv(const std::vector<AsymptoticsRow>& rows);

// Ground energy of H_2 = T x 1 + 1 x T + v(x1 - x2) directly on the grid (all total-momentum
// sectors).
double two_body_grid_ground(const Model& model);

}  // namespace bogolib
