#pragma once

// Independent reference computations used by the tests and the acceptance binary.

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "bhgs/field.hpp"
#include "bhgs/potential.hpp"

namespace bhgs::test {

// -lambda_min(eps Lap^2 + V) on the grid: the smallest constant C with
// eps ||Lap u||^2 + int V u^2 >= -C for every unit-mass grid field.
inline double sharp_sobolev_constant(const Potential& V, const Grid& g, double eps) {
  const std::size_t n = g.size();
  Eigen::MatrixXd A(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Field col = Field(g, e).bilap();
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) A(Eigen::Index(i), Eigen::Index(j)) = eps * col[i];
  }
  const Field v = V.sample(g);
  for (std::size_t i = 0; i < n; ++i) A(Eigen::Index(i), Eigen::Index(i)) += v[i];
  const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return -es.eigenvalues()(0);
}

// Global minimum of a 1-D function on [lo, hi]: coarse scan, then Brent on the best bracket.
template <class F>
double scan_minimum(F&& f, double lo, double hi, int samples = 4001) {
  double best = lo, fbest = f(lo);
  const double h = (hi - lo) / (samples - 1);
  for (int i = 1; i < samples; ++i) {
    const double x = lo + i * h;
    if (const double fx = f(x); fx < fbest) {
      fbest = fx;
      best = x;
    }
  }
  const auto r = boost::math::tools::brent_find_minima(f, std::max(lo, best - h), std::min(hi, best + h), 52);
  return std::min(fbest, r.second);
}

}  // namespace bhgs::test
