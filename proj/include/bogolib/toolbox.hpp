#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "bogolib/grid.hpp"

namespace bogolib {

// Window of the 2k+1 central order statistics; k + N/2 must be an integer.
struct MedianSpec {
  Index N = 0;
  double k = 0.0;

  MedianSpec(Index N, double k);
  Index lo() const;  // 1-based first index of the window
  Index hi() const;  // 1-based last index
};

template <class Derived>
double regularized_median(const MedianSpec& spec, const Eigen::DenseBase<Derived>& x) {
  if (x.size() != spec.N) throw ContractError("regularized_median: length does not match N");
  std::vector<double> v(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) v[static_cast<std::size_t>(i)] = x(i);
  std::stable_sort(v.begin(), v.end());
  double s = 0.0;
  for (Index i = spec.lo(); i <= spec.hi(); ++i) s += v[static_cast<std::size_t>(i - 1)];
  return s / double(spec.hi() - spec.lo() + 1);
}

struct ImsReport {
  Index trials = 0;
  Index violations = 0;
  double worst_margin = 0.0;  // min of rhs - lhs
  double constant = 0.0;      // m^{2(s-1)} s
  double grad_sup = 0.0;      // sup of sum |chi_i'|^2
};

// Checks sum_i <T>_{chi_i u} <= <T>_u + C sup sum_i |chi_i'|^2 on random normalized u.
ImsReport ims_check(const Grid& grid, const KineticSpec& kin, const std::vector<Vector>& partition,
                    Index trials, std::uint64_t seed = 3);

// Smooth two-function partition cos(phi), sin(phi) with phi = (pi/4)(1 + sin(2 pi x / L)).
std::vector<Vector> two_bump_partition(const Grid& grid);

}  // namespace bogolib
