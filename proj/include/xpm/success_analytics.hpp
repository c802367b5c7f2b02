#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "xpm/phase_noise.hpp"
#include "xpm/quadrature.hpp"
#include "xpm/random.hpp"

namespace xpm {

enum class BlochMethod { quadrature2d, monte_carlo };

// Bloch-sphere-averaged weights of the diagonal (C) and coherence (D)
// contributions to the success probabilities. C + D = 1/2 is an algebraic
// identity of the integrands and doubles as a convergence check.
struct BlochConstants {
  double c;
  double d;
  BlochMethod method;
  double error_estimate;
};

namespace detail {

// Integrands over (x, y) = (|beta|^2, |beta'|^2), both Uniform[0,1]. The
// denominator vanishes only at the corners (0,0) and (1,1), where both
// integrands extend continuously to 0.
inline double bloch_c_integrand(double x, double y) {
  const double a = (1.0 - x) * y;
  const double b = x * (1.0 - y);
  const double den = a + b;
  if (den < 1e-300) return 0.0;
  return (a * a + b * b) / den;
}

inline double bloch_d_integrand(double x, double y) {
  const double a = (1.0 - x) * y;
  const double b = x * (1.0 - y);
  const double den = a + b;
  if (den < 1e-300) return 0.0;
  return 2.0 * x * (1.0 - x) * y * (1.0 - y) / den;
}

inline void bloch_quadrature(int nodes_per_axis, double& c, double& d) {
  std::vector<double> xs, ws;
  gauss_legendre_01(nodes_per_axis, xs, ws);
  c = 0.0;
  d = 0.0;
  for (int i = 0; i < nodes_per_axis; ++i) {
    double ci = 0.0, di = 0.0;
    for (int j = 0; j < nodes_per_axis; ++j) {
      ci += ws[j] * bloch_c_integrand(xs[i], xs[j]);
      di += ws[j] * bloch_d_integrand(xs[i], xs[j]);
    }
    c += ws[i] * ci;
    d += ws[i] * di;
  }
}

}  // namespace detail

// Computes C and D. resolution is nodes per axis for quadrature2d (>= 100)
// and the sample count for monte_carlo (>= 1000).
inline BlochConstants bloch_constants(BlochMethod method = BlochMethod::quadrature2d,
                                      int resolution = 512,
                                      std::uint64_t seed = 0x5eedb10c5ULL) {
  if (method == BlochMethod::quadrature2d) {
    if (resolution < 100) {
      throw std::invalid_argument("bloch_constants: quadrature2d needs >= 100 nodes per axis");
    }
    double c = 0.0, d = 0.0, c_half = 0.0, d_half = 0.0;
    detail::bloch_quadrature(resolution, c, d);
    detail::bloch_quadrature(resolution / 2, c_half, d_half);
    const double err = std::max(std::abs(c - c_half), std::abs(d - d_half)) + 1e-12;
    return {c, d, method, err};
  }
  if (resolution < 1000) {
    throw std::invalid_argument("bloch_constants: monte_carlo needs >= 1000 samples");
  }
  RandomStream stream(seed);
  double sc = 0.0, sd = 0.0, sc2 = 0.0, sd2 = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const double x = stream.uniform();
    const double y = stream.uniform();
    const double ci = detail::bloch_c_integrand(x, y);
    const double di = detail::bloch_d_integrand(x, y);
    sc += ci;
    sd += di;
    sc2 += ci * ci;
    sd2 += di * di;
  }
  const double n = static_cast<double>(resolution);
  const double c = sc / n;
  const double d = sd / n;
  const double se_c = std::sqrt(std::max(0.0, sc2 / n - c * c) / (n - 1.0));
  const double se_d = std::sqrt(std::max(0.0, sd2 / n - d * d) / (n - 1.0));
  return {c, d, method, std::max(se_c, se_d)};
}

// Process-wide cached constants (512^2 quadrature).
inline const BlochConstants& default_bloch_constants() {
  static const BlochConstants cached = bloch_constants(BlochMethod::quadrature2d, 512);
  return cached;
}

// P_even = f0(alpha_p, 0) [C + D e^{-sigma_P^2 / 2}]. Independent of theta;
// the parameter is kept so the even and odd evaluations share a signature.
inline double p_even_analytic(double alpha_p, [[maybe_unused]] double theta, double sigma2_probe,
                              const BlochConstants& k, bool exact = false) {
  const double f0 = exact ? f0_exact(alpha_p, 0.0, sigma2_probe)
                          : f0_closed(alpha_p, 0.0, sigma2_probe);
  return f0 * (k.c + k.d * std::exp(-0.5 * sigma2_probe));
}

// P_odd = C [1 - f0(alpha_p, theta)]
//       + D e^{-sigma_P^2/2} [f0(sqrt(2) alpha_p, 0) - f0(alpha_p, 0)].
// The D term is never positive, so P_odd <= C.
inline double p_odd_analytic(double alpha_p, double theta, double sigma2_probe,
                             const BlochConstants& k, bool exact = false) {
  double fa, f2, f1;
  if (exact) {
    fa = f0_exact(alpha_p, theta, sigma2_probe);
    f2 = f0_exact(std::sqrt(2.0) * alpha_p, 0.0, sigma2_probe);
    f1 = f0_exact(alpha_p, 0.0, sigma2_probe);
  } else {
    fa = f0_closed(alpha_p, theta, sigma2_probe);
    f2 = f0_closed(std::sqrt(2.0) * alpha_p, 0.0, sigma2_probe);
    f1 = f0_closed(alpha_p, 0.0, sigma2_probe);
  }
  return k.c * (1.0 - fa) + k.d * std::exp(-0.5 * sigma2_probe) * (f2 - f1);
}

// The three operating conditions for a useful gate, with the paper-silent
// "much greater/less than" thresholds fixed at a factor of 10:
//   theta^2 |a|^2 > 1,  sigma_P^2 |a|^2 < 0.1,  sigma_P^2 < 0.1.
struct RegimeCheck {
  bool nonlinearity_strong;
  bool probe_noise_small;
  bool phase_noise_small;
};

inline RegimeCheck regime_check(double theta, double sigma2_probe, double alpha_p_mag) {
  const double a2 = alpha_p_mag * alpha_p_mag;
  return {theta * theta * a2 > 1.0, sigma2_probe * a2 < 0.1, sigma2_probe < 0.1};
}

}  // namespace xpm
