#include "bogolib/toolbox.hpp"

#include <numbers>
#include <random>

namespace bogolib {

MedianSpec::MedianSpec(Index N_, double k_) : N(N_), k(k_) {
  if (N < 1) throw ContractError("regularized median: N must be positive");
  double shifted = k + 0.5 * double(N);
  if (std::abs(shifted - std::round(shifted)) > 1e-12)
    throw ContractError("regularized median: k + N/2 must be an integer");
  if (k < 1.0 || k > 0.5 * double(N)) throw ContractError("regularized median: need 1 <= k <= N/2");
  if (lo() < 1 || hi() > N) throw ContractError("regularized median: window leaves 1..N");
}

Index MedianSpec::lo() const { return static_cast<Index>(std::llround(0.5 * double(N) - k)); }
Index MedianSpec::hi() const { return static_cast<Index>(std::llround(0.5 * double(N) + k)); }

std::vector<Vector> two_bump_partition(const Grid& grid) {
  const Index n = grid.size();
  Vector c(n), s(n);
  for (Index i = 0; i < n; ++i) {
    double phi = 0.25 * std::numbers::pi *
                 (1.0 + std::sin(2.0 * std::numbers::pi * grid.nodes()(i) / grid.box_length()));
    c(i) = std::cos(phi);
    s(i) = std::sin(phi);
  }
  return {c, s};
}

ImsReport ims_check(const Grid& grid, const KineticSpec& kin, const std::vector<Vector>& partition,
                    Index trials, std::uint64_t seed) {
  if (partition.empty()) throw ContractError("ims_check: empty partition");
  const Index n = grid.size();
  Vector sum_sq = Vector::Zero(n), grad_sq = Vector::Zero(n);
  for (const auto& chi : partition) {
    grid.check_length(chi.size(), "partition function");
    sum_sq += chi.cwiseProduct(chi);
    Vector d = spectral_derivative(grid, chi);
    grad_sq += d.cwiseProduct(d);
  }
  if ((sum_sq.array() - 1.0).abs().maxCoeff() > 1e-10)
    throw ContractError("ims_check: partition functions do not satisfy sum chi^2 = 1");

  ImsReport rep;
  rep.constant = kin.ims_constant();
  rep.grad_sup = grad_sq.maxCoeff();
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto tform = [&](const Vector& f) { return grid.inner(f, apply_multiplier(grid, kin, f)); };
  for (Index t = 0; t < trials; ++t) {
    // band-limited random state with a random spectral width
    double pc = (0.05 + 0.45 * uni(rng)) * std::numbers::pi / grid.spacing();
    CVector spec(n);
    for (Index k = 0; k < n; ++k) {
      double p = grid.frequencies()(k);
      spec(k) = std::complex<double>(gauss(rng), gauss(rng)) * std::exp(-0.5 * p * p / (pc * pc));
    }
    Vector u = inverse_transform(grid, spec).real();
    u /= grid.norm(u);
    double lhs = 0.0;
    for (const auto& chi : partition) lhs += tform(Vector(chi.cwiseProduct(u)));
    double rhs = tform(u) + rep.constant * rep.grad_sup;
    double margin = rhs - lhs;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -1e-9 * std::max(1.0, std::abs(rhs))) ++rep.violations;
    ++rep.trials;
  }
  return rep;
}

}  // namespace bogolib
