#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace xpm {

// Thrown when adaptive quadrature cannot certify the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod (G7,K15) integral of f over [a, b].
//
// abs_floor sets the absolute error level below which convergence is accepted
// regardless of the relative test; it keeps near-zero integrals (e.g. the real
// part of a nearly imaginary integral) from spuriously failing.
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-6,
                 double abs_floor = 0.0, unsigned max_depth = 20) {
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, max_depth, rel_tol, &error);
  if (!std::isfinite(value)) {
    throw QuadratureError("quadrature produced a non-finite value");
  }
  const double bound = std::max(rel_tol * std::abs(value), abs_floor);
  if (error > bound * 10.0) {
    throw QuadratureError("quadrature failed to reach relative tolerance " +
                          std::to_string(rel_tol));
  }
  return value;
}

// Integral over [a, b] split at interior breakpoints. Breakpoints outside
// (a, b) are ignored; they mark known peaks so the adaptive rule cannot step
// over a feature narrower than its initial node spacing.
template <typename F>
double integrate_split(F&& f, double a, double b, std::span<const double> breakpoints,
                       double rel_tol = 1e-6, double abs_floor = 0.0) {
  std::vector<double> edges{a};
  for (double x : breakpoints) {
    if (x > a && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += integrate(f, edges[i], edges[i + 1], rel_tol, abs_floor);
  }
  return total;
}

// Deterministic pairwise (cascade) summation; independent of how the values
// were produced, so parallel fills reduce to the same double.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Gauss-Legendre nodes and weights on [0, 1], by Newton iteration on the
// three-term recurrence. n up to a few thousand is fine.
inline void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th positive root.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = 0.5 * (1.0 - x);  // roots descend in x => nodes ascend in [0,1]
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = 0.5 * w;
    weights[n - 1 - i] = 0.5 * w;
  }
}

}  // namespace xpm
