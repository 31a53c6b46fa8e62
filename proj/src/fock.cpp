#include <Eigen/Eigenvalues>

#include <algorithm>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "bogolib/fock.hpp"

namespace bogolib {

namespace {

// Symmetric inverse square root of a positive definite matrix.
Matrix inv_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw SolverError("natural orbitals: quadrature block is not positive definite",
                      es.eigenvalues().minCoeff());
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

// One-body density matrix <a_i^dagger a_j> of the quasi-free ground state of the pair (A, B).
Matrix vacuum_density(const Matrix& A, const Matrix& B) {
  Matrix sa = psd_sqrt(A, nullptr, "A"), sb = psd_sqrt(B, nullptr, "B");
  Matrix sx = sb * inv_sqrt(sb * A * sb) * sb;
  Matrix sp = sa * inv_sqrt(sa * B * sa) * sa;
  return 0.25 * (sx + sp) - 0.5 * Matrix::Identity(A.rows(), A.cols());
}

Vector factor_table(Index M, int N, const std::function<double(double)>& f) {
  Vector t(M + 1);
  for (Index n = 0; n <= M; ++n) t(n) = f(double(n) / double(N));
  return t;
}

}  // namespace

// ---------------------------------------------------------------- catalog

ModeCatalog build_mode_catalog(const HartreeState& state, const HessianOperators& hess, Index m,
                               ModePolicy policy, Index natural_pool) {
  const Grid& g = state.grid();
  const Index n = g.size();
  const double dx = g.spacing();
  if (m < 2 || m > n) throw ContractError("build_mode_catalog: need 2 <= m <= n");

  ModeCatalog cat;
  cat.model = state.model;
  cat.e_H = state.e_H;
  cat.mu = hess.mu;
  cat.zero_mode_count = hess.has_zero_mode() ? 1 : 0;

  // Euclidean frame throughout, converted to grid functions at the end
  Matrix E(n, m);
  E.col(0) = hess.u0_unit();
  Index fixed = 1;
  if (hess.has_zero_mode()) {
    Vector u1 = hess.u1_unit();
    u1 -= E.col(0).dot(u1) * E.col(0);
    E.col(1) = u1.normalized();
    fixed = 2;
  }
  const Index want = m - fixed;
  const Index cap = n - fixed;
  if (want > 0) {
    Index dropped = 0;
    Index pool_size = std::max(want, natural_pool);
    Matrix pool = complement_basis(hess, true, pool_size >= cap ? -1 : pool_size, &dropped);
    if (pool.cols() < want) throw SolverError("build_mode_catalog: complement lost rank", double(pool.cols()));
    Matrix A = pool.transpose() * hess.Lplus * pool;
    A = 0.5 * (A + A.transpose()).eval();
    Matrix rot;
    if (policy == ModePolicy::lplus_ordered) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(A);
      rot = es.eigenvectors().leftCols(want);
    } else {
      Matrix B = pool.transpose() * hess.Lminus * pool;
      B = 0.5 * (B + B.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> es(vacuum_density(A, B));
      // largest occupations first
      rot = es.eigenvectors().rightCols(want).rowwise().reverse();
    }
    E.rightCols(want) = pool * rot;
  }
  cat.modes = E / std::sqrt(dx);

  // one-body matrices
  Matrix TE(n, m);
  for (Index j = 0; j < m; ++j) TE.col(j) = apply_multiplier(g, state.model->kinetic, Vector(cat.modes.col(j)));
  cat.T = dx * cat.modes.transpose() * TE;
  cat.T = 0.5 * (cat.T + cat.T.transpose()).eval();
  if (m > 1) {
    Matrix Ex = E.rightCols(m - 1);
    Matrix Kx = Ex.transpose() * hess.K * Ex;
    cat.Q = Ex.transpose() * hess.Lminus * Ex + Kx;
    cat.Q = 0.5 * (cat.Q + cat.Q.transpose()).eval();
    cat.G = 0.25 * (Kx + Kx.transpose());
  }

  // two-body tensor through pair densities P_(ik)(x) = u_i(x) u_k(x)
  const auto& v = state.model->interaction;
  const Index m2 = m * m;
  Matrix P(n, m2);
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < m; ++k) P.col(i * m + k) = cat.modes.col(i).cwiseProduct(cat.modes.col(k));
  Matrix VP(n, m2);
  if (v.is_zero()) {
    VP.setZero();
  } else if (v.is_delta()) {
    VP = -v.coupling * P;
  } else {
    for (Index c = 0; c < m2; ++c) VP.col(c) = convolve(g, v, Vector(P.col(c)));
  }
  Matrix W = dx * P.transpose() * VP;  // W((i,k),(j,l)) = v_{ij,kl}
  W = 0.5 * (W + W.transpose()).eval();
  cat.V.assign(static_cast<std::size_t>(m2 * m2), 0.0);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < m; ++k)
        for (Index l = 0; l < m; ++l)
          cat.V[static_cast<std::size_t>(((i * m + j) * m + k) * m + l)] = W(i * m + k, j * m + l);
  return cat;
}

// ---------------------------------------------------------------- operators

FockOperator bogoliubov_fock(std::shared_ptr<const FockBasis> basis, const Matrix& Q, const Matrix& G) {
  const Index m = basis->modes();
  if (Q.rows() != m || Q.cols() != m || G.rows() != m || G.cols() != m)
    throw ContractError("bogoliubov_fock: Q and G must be m x m for the basis mode count");
  FockOperator op(basis, "bogoliubov");
  FockTerm one;
  one.n_create = 1;
  one.n_annihilate = 1;
  one.label = "Q";
  one.coeff.resize(static_cast<std::size_t>(m * m));
  FockTerm pair;
  pair.n_create = 2;
  pair.n_annihilate = 0;
  pair.hermitize = true;
  pair.label = "G";
  pair.coeff.resize(static_cast<std::size_t>(m * m));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      one.coeff[static_cast<std::size_t>(i * m + j)] = 0.5 * (Q(i, j) + Q(j, i));
      pair.coeff[static_cast<std::size_t>(i * m + j)] = G(i, j) + G(j, i);  // 2 G, symmetrized
    }
  op.add_term(std::move(one));
  op.add_term(std::move(pair));
  return op;
}

FockOperator build_bogoliubov_fock(const ModeCatalog& catalog, std::shared_ptr<const FockBasis> basis,
                                   bool use_perp) {
  const Index skip = (use_perp && catalog.zero_mode_count > 0) ? 1 : 0;
  const Index m = basis->modes();
  if (skip + m > catalog.Q.rows())
    throw ContractError("build_bogoliubov_fock: basis has more modes than the catalog provides");
  return bogoliubov_fock(basis, catalog.Q.block(skip, skip, m, m), catalog.G.block(skip, skip, m, m));
}

double excitation_factor(int r, double x, int N) {
  if (N < 2) throw ContractError("excitation_factor: need N >= 2");
  if (x < -1e-15 || x > 1.0 + 1e-15) throw ContractError("excitation_factor: x must lie in [0, 1]");
  x = std::clamp(x, 0.0, 1.0);
  const double c = double(N) / double(N - 1);
  const double h = 1.0 / double(N);
  switch (r) {
    case 0: return c * (1.0 - x) * (1.0 - x - h);
    case 1: return c * (1.0 - x - h) * std::sqrt(1.0 - x);
    case 2: return c * std::sqrt(std::max(0.0, 1.0 - x - h)) * std::sqrt(1.0 - x);
    case 3:
    case 4: return c * (1.0 - x);
    case 5: return c * std::sqrt(1.0 - x);
    case 6: return c;
    default: throw ContractError("excitation_factor: r must lie in 0..6");
  }
}

FockOperator build_excitation_hamiltonian(const ModeCatalog& catalog, std::shared_ptr<const FockBasis> basis,
                                          int N) {
  const Index m = basis->modes();
  const Index M = basis->cutoff();
  if (N < 2) throw ContractError("build_excitation_hamiltonian: need N >= 2");
  if (M > N) {
    std::ostringstream os;
    os << "build_excitation_hamiltonian: cutoff M = " << M << " exceeds N = " << N;
    throw ContractError(os.str());
  }
  if (m + 1 > catalog.size())
    throw ContractError("build_excitation_hamiltonian: catalog does not cover the excitation modes");
  const double Nd = N;
  const double sN = std::sqrt(Nd);
  auto f = [&](int r) { return factor_table(M, N, [&](double x) { return excitation_factor(r, x, N); }); };
  auto T = [&](Index i, Index j) { return catalog.T(i, j); };
  auto V = [&](Index i, Index j, Index k, Index l) { return catalog.v(i, j, k, l); };
  const auto sz = [](Index k) { return static_cast<std::size_t>(k); };

  FockOperator op(basis, "excitation_hamiltonian");

  FockTerm c0;
  c0.label = "A0+B0";
  c0.coeff = {1.0};
  c0.right_factor = factor_table(M, N, [&](double x) {
    return Nd * T(0, 0) * (1.0 - x) + Nd * 0.5 * V(0, 0, 0, 0) * excitation_factor(0, x, N);
  });
  op.add_term(std::move(c0));

  FockTerm a1;
  a1.label = "A1";
  a1.n_create = 1;
  a1.hermitize = true;
  a1.coeff.resize(sz(m));
  a1.right_factor = factor_table(M, N, [](double x) { return std::sqrt(std::max(0.0, 1.0 - x)); });
  FockTerm b1;
  b1.label = "B1";
  b1.n_create = 1;
  b1.hermitize = true;
  b1.coeff.resize(sz(m));
  b1.right_factor = f(1);
  for (Index i = 0; i < m; ++i) {
    a1.coeff[sz(i)] = 2.0 * sN * T(i + 1, 0);
    b1.coeff[sz(i)] = 2.0 * sN * V(i + 1, 0, 0, 0);
  }
  op.add_term(std::move(a1));
  op.add_term(std::move(b1));

  FockTerm a2;
  a2.label = "A2";
  a2.n_create = a2.n_annihilate = 1;
  a2.coeff.resize(sz(m * m));
  FockTerm b34;
  b34.label = "B3+B4";
  b34.n_create = b34.n_annihilate = 1;
  b34.coeff.resize(sz(m * m));
  b34.right_factor = f(3);
  FockTerm b2;
  b2.label = "B2";
  b2.n_create = 2;
  b2.hermitize = true;
  b2.coeff.resize(sz(m * m));
  b2.right_factor = f(2);
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < m; ++k) {
      a2.coeff[sz(i * m + k)] = T(i + 1, k + 1);
      b34.coeff[sz(i * m + k)] = V(i + 1, 0, k + 1, 0) + V(0, i + 1, k + 1, 0);
      b2.coeff[sz(i * m + k)] = V(i + 1, k + 1, 0, 0);
    }
  op.add_term(std::move(a2));
  op.add_term(std::move(b34));
  op.add_term(std::move(b2));

  FockTerm b5;
  b5.label = "B5";
  b5.n_create = 2;
  b5.n_annihilate = 1;
  b5.hermitize = true;
  b5.coeff.resize(sz(m * m * m));
  b5.right_factor = f(5);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < m; ++k) b5.coeff[sz((i * m + j) * m + k)] = 2.0 / sN * V(i + 1, j + 1, k + 1, 0);
  op.add_term(std::move(b5));

  FockTerm b6;
  b6.label = "B6";
  b6.n_create = b6.n_annihilate = 2;
  b6.coeff.resize(sz(m * m * m * m));
  const double s6 = 1.0 / (2.0 * (Nd - 1.0));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < m; ++k)
        for (Index l = 0; l < m; ++l)
          b6.coeff[sz(((i * m + j) * m + k) * m + l)] = s6 * V(i + 1, j + 1, k + 1, l + 1);
  op.add_term(std::move(b6));
  return op;
}

FockOperator build_A_operator(std::shared_ptr<const FockBasis> basis, const Matrix& t_perp, Index d) {
  const Index m = basis->modes();
  if (d < 0 || d > m) throw ContractError("build_A_operator: d must lie in 0..m");
  if (t_perp.rows() != m - d || t_perp.cols() != m - d)
    throw ContractError("build_A_operator: kinetic block must be (m - d) x (m - d)");
  FockOperator op(basis, "A");
  if (d > 0) {
    FockTerm c;
    c.label = "P^2 constant";
    c.coeff = {0.25 * double(d)};
    op.add_term(std::move(c));
    FockTerm pair;
    pair.label = "P^2 pair";
    pair.n_create = 2;
    pair.hermitize = true;
    pair.coeff.assign(static_cast<std::size_t>(m * m), 0.0);
    for (Index j = 0; j < d; ++j) pair.coeff[static_cast<std::size_t>(j * m + j)] = -0.5;
    op.add_term(std::move(pair));
  }
  FockTerm one;
  one.label = "one-body";
  one.n_create = one.n_annihilate = 1;
  one.coeff.assign(static_cast<std::size_t>(m * m), 0.0);
  for (Index j = 0; j < d; ++j) one.coeff[static_cast<std::size_t>(j * m + j)] = 0.5;
  for (Index i = d; i < m; ++i)
    for (Index k = d; k < m; ++k)
      one.coeff[static_cast<std::size_t>(i * m + k)] =
          0.5 * (t_perp(i - d, k - d) + t_perp(k - d, i - d)) + (i == k ? 1.0 : 0.0);
  op.add_term(std::move(one));
  return op;
}

// ---------------------------------------------------------------- Lanczos

namespace {

using MatVec = std::function<void(const Vector&, Vector&)>;

LanczosResult lanczos_impl(const MatVec& mv, Index n, const LanczosConfig& cfg, const Vector& start) {
  if (n <= 0) throw ContractError("lanczos_ground: empty operator");
  if (cfg.krylov_dim < 2) throw ContractError("lanczos_ground: krylov_dim must be at least 2");
  if (start.size() != 0 && start.size() != n) throw ContractError("lanczos_ground: start vector size mismatch");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss;
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = gauss(rng);
  x.normalize();
  if (start.size() != 0 && start.norm() > 0.0) x = start.normalized() + 1e-3 * x;
  x.normalize();

  LanczosResult res;
  const Index kdim = std::min(cfg.krylov_dim, n);
  std::vector<Vector> V;
  V.reserve(static_cast<std::size_t>(kdim + 1));
  Vector w(n);
  double theta = 0.0;
  double resid = std::numeric_limits<double>::infinity();

  while (res.iterations < cfg.max_iter) {
    V.clear();
    V.push_back(x);
    Vector alpha(kdim), beta(kdim);
    Index k = 0;
    for (; k < kdim && res.iterations < cfg.max_iter; ++k) {
      mv(V[static_cast<std::size_t>(k)], w);
      ++res.iterations;
      alpha(k) = V[static_cast<std::size_t>(k)].dot(w);
      // full reorthogonalization, two passes
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : V) w -= v.dot(w) * v;
      beta(k) = w.norm();
      if (k + 1 == kdim) break;
      double scale = std::max(1.0, std::abs(alpha(k)));
      if (beta(k) <= 1e-13 * scale) {
        ++k;
        break;  // invariant subspace
      }
      V.push_back(w / beta(k));
    }
    const Index dim = std::min<Index>(k == kdim ? kdim : k, static_cast<Index>(V.size()));
    Matrix Tm = Matrix::Zero(dim, dim);
    for (Index i = 0; i < dim; ++i) {
      Tm(i, i) = alpha(i);
      if (i + 1 < dim) Tm(i, i + 1) = Tm(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(Tm);
    theta = es.eigenvalues()(0);
    Vector s = es.eigenvectors().col(0);
    x.setZero();
    for (Index i = 0; i < dim; ++i) x += s(i) * V[static_cast<std::size_t>(i)];
    x.normalize();
    mv(x, w);
    ++res.iterations;
    resid = (w - theta * x).norm();
    if (resid <= cfg.tol * std::max(1.0, std::abs(theta))) {
      res.energy = theta;
      res.vector = x;
      res.residual = resid;
      return res;
    }
  }
  std::ostringstream os;
  os << "lanczos_ground: no convergence after " << res.iterations << " products, Ritz residual " << resid;
  throw SolverError(os.str(), resid);
}

}  // namespace

LanczosResult lanczos_ground(const FockOperator& op, const LanczosConfig& cfg, const Vector& start) {
  return lanczos_impl([&](const Vector& a, Vector& b) { op.apply(a, b); }, op.dim(), cfg, start);
}

LanczosResult lanczos_ground(const Matrix& a, const LanczosConfig& cfg) {
  if (a.rows() != a.cols()) throw ContractError("lanczos_ground: matrix must be square");
  return lanczos_impl([&](const Vector& x, Vector& y) { y.noalias() = a * x; }, a.rows(), cfg, Vector());
}

// ---------------------------------------------------------------- excitation map

ExcitationMapReport excitation_map_check(int N) {
  if (N < 1 || N > 4) throw ContractError("excitation_map_check: need 1 <= N <= 4");
  ExcitationMapReport rep;
  rep.N = N;
  const Index dimN = Index{1} << N;
  // rows: normalized symmetric states with n particles in mode 1
  Matrix U = Matrix::Zero(N + 1, dimN);
  for (Index b = 0; b < dimN; ++b) {
    int n = __builtin_popcountll(static_cast<unsigned long long>(b));
    U(n, b) = 1.0;
  }
  for (Index n = 0; n <= N; ++n) U.row(n).normalize();
  rep.unitarity = (U * U.transpose() - Matrix::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff();
  Vector cond = Vector::Zero(dimN);
  cond(0) = 1.0;
  Vector vac = Vector::Zero(N + 1);
  vac(0) = 1.0;
  rep.vacuum = (U * cond - vac).norm();

  // (1/N) sum_p |j><i|_p on the tensor space
  auto one_body = [&](int j, int i) {
    Matrix o = Matrix::Zero(dimN, dimN);
    for (Index b = 0; b < dimN; ++b)
      for (int p = 0; p < N; ++p) {
        if (((b >> p) & 1) != i) continue;
        Index c = (b & ~(Index{1} << p)) | (Index(j) << p);
        o(c, b) += 1.0;
      }
    return Matrix(o / double(N));
  };
  Matrix adag = Matrix::Zero(N + 1, N + 1), L = Matrix::Zero(N + 1, N + 1);
  for (Index n = 0; n < N; ++n) adag(n + 1, n) = std::sqrt(double(n + 1));
  for (Index n = 0; n <= N; ++n) L(n, n) = double(n) / double(N);
  Matrix one = Matrix::Identity(N + 1, N + 1);
  Matrix sq = (one - L).cwiseSqrt();
  const double sN = std::sqrt(double(N));

  rep.law_condensate = (U * one_body(0, 0) * U.transpose() - (one - L)).cwiseAbs().maxCoeff();
  rep.law_transfer = (U * one_body(1, 0) * U.transpose() - adag / sN * sq).cwiseAbs().maxCoeff();
  rep.law_excited =
      (U * one_body(1, 1) * U.transpose() - adag * adag.transpose() / double(N)).cwiseAbs().maxCoeff();
  const double tol = 1e-12;
  rep.passed = rep.unitarity <= tol && rep.vacuum <= tol && rep.law_condensate <= tol &&
               rep.law_transfer <= tol && rep.law_excited <= tol;
  return rep;
}

// ---------------------------------------------------------------- asymptotics

Index MPolicy::resolve(int N) const {
  if (cap < 0) throw ContractError("M policy: cap must be non-negative");
  if (fixed) {
    if (cap > N) {
      std::ostringstream os;
      os << "M policy: fixed cutoff " << cap << " exceeds N = " << N;
      throw ContractError(os.str());
    }
    return cap;
  }
  return std::min<Index>(N, cap);
}

std::vector<AsymptoticsRow> energy_asymptotics_run(const ModeCatalog& catalog, const std::vector<int>& N_list,
                                                   Index m_exc, const MPolicy& policy,
                                                   double bogoliubov_total, const LanczosConfig& cfg) {
  if (m_exc < 1 || m_exc + 1 > catalog.size())
    throw ContractError("energy_asymptotics_run: m_exc outside the catalog");
  // validate everything before computing
  for (int N : N_list) {
    if (N < 2) throw ContractError("energy_asymptotics_run: N must be at least 2");
    Index M = policy.resolve(N);
    if (FockBasis::count(m_exc, M) > 2000000u) {
      std::ostringstream os;
      os << "energy_asymptotics_run: basis for N = " << N << " has " << FockBasis::count(m_exc, M)
         << " states, more than 2e6";
      throw ContractError(os.str());
    }
  }
  const auto& inter = catalog.model->interaction;
  std::vector<AsymptoticsRow> rows;
  for (int N : N_list) {
    AsymptoticsRow r;
    r.model_hash = catalog.model->hash();
    r.N = N;
    r.m_exc = m_exc;
    r.M = policy.resolve(N);
    auto basis = std::make_shared<const FockBasis>(m_exc, r.M);
    FockOperator H = build_excitation_hamiltonian(catalog, basis, N);
    Vector start = Vector::Zero(basis->size());
    start(0) = 1.0;
    LanczosResult lr = lanczos_ground(H, cfg, start);
    r.E_N = lr.energy;
    r.gap = r.E_N - double(N) * catalog.e_H;
    if (inter.is_delta() && inter.coupling > 0.0) r.mcguire = mcguire_exact(N, inter.coupling);
    r.bogoliubov_total = bogoliubov_total;
    r.basis_size = basis->size();
    r.iterations = lr.iterations;
    rows.push_back(r);
  }
  return rows;
}

std::string asymptotics_csv(const std::vector<AsymptoticsRow>& rows) {
  std::ostringstream os;
  os << "model_hash,N,m_exc,M,E_N,E_N_minus_NeH,mcguire,bogoliubov_total\n";
  for (const auto& r : rows) {
    os << r.model_hash << ',' << r.N << ',' << r.m_exc << ',' << r.M << ',' << format_double(r.E_N) << ','
       << format_double(r.gap) << ',' << (std::isnan(r.mcguire) ? std::string("nan") : format_double(r.mcguire))
       << ',' << format_double(r.bogoliubov_total) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- two-body oracle

double two_body_grid_ground(const Model& model) {
  const Grid& g = model.grid;
  const Index n = g.size();
  const double L = g.box_length();
  Vector t = kinetic_symbol(g, model.kinetic);
  // vhat(q_d) = dx sum_j v(x_j) exp(-i q_d x_j) with separations in FFT order
  Vector vhat = Vector::Zero(n);
  const auto& v = model.interaction;
  if (v.is_delta()) {
    vhat.setConstant(-v.coupling);
  } else if (!v.is_zero()) {
    Vector k = v.kernel(g);
    CVector w(n);
    for (Index m = 0; m < n; ++m) w(m) = k((m + n / 2) % n);
    CVector wh = forward_transform(g, w);
    // forward_transform carries the (-1)^k phase of the node offset; undo it
    for (Index q = 0; q < n; ++q) vhat(q) = (q % 2 ? -1.0 : 1.0) * wh(q).real();
  }
  double best = std::numeric_limits<double>::infinity();
  for (Index K = 0; K < n; ++K) {
    // symmetric pair states {k, K - k}
    std::vector<std::pair<Index, Index>> pairs;
    for (Index k = 0; k < n; ++k) {
      Index k2 = ((K - k) % n + n) % n;
      if (k <= k2) pairs.push_back({k, k2});
    }
    const Index d = static_cast<Index>(pairs.size());
    Matrix H = Matrix::Zero(d, d);
    for (Index a = 0; a < d; ++a) {
      auto [k1, k2] = pairs[static_cast<std::size_t>(a)];
      H(a, a) += t(k1) + t(k2);
      double na = (k1 == k2) ? 1.0 : std::sqrt(2.0);
      for (Index b = 0; b < d; ++b) {
        auto [l1, l2] = pairs[static_cast<std::size_t>(b)];
        double nb = (l1 == l2) ? 1.0 : std::sqrt(2.0);
        // <l1 l2 | V | k1 k2> summed over both orderings of each pair
        double s = vhat(((l1 - k1) % n + n) % n);
        if (k1 != k2) s += vhat(((l1 - k2) % n + n) % n);
        if (l1 != l2) {
          s += vhat(((l2 - k1) % n + n) % n);
          if (k1 != k2) s += vhat(((l2 - k2) % n + n) % n);
        }
        H(b, a) += s / L / (na * nb);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
    best = std::min(best, es.eigenvalues()(0));
  }
  return best;
}

}  // namespace bogolib
