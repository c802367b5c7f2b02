#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "xpm/quadrature.hpp"
#include "xpm/random.hpp"
#include "xpm/response_kernel.hpp"

namespace xpm {

// Gaussian phase-noise statistics: each Kerr cell dephases the qubit passing
// through it with variance sigma2_cell and contributes the same variance to
// the probe; the probe traverses both cells, so sigma2_probe = 2*sigma2_cell.
struct NoiseModel {
  double theta;         // peak XPM phase per photon (rad, >= 0)
  double sigma2_cell;   // per-cell variance (rad^2)
  double sigma2_probe;  // probe variance (rad^2), always 2 * sigma2_cell

  // Free choice of (theta, sigma2_probe), for studies that vary the noise at
  // fixed nonlinearity.
  static NoiseModel independent(double theta, double sigma2_probe) {
    if (!(theta >= 0.0)) throw std::invalid_argument("NoiseModel: theta must be >= 0");
    if (!(sigma2_probe >= 0.0)) {
      throw std::invalid_argument("NoiseModel: sigma2_probe must be >= 0");
    }
    return NoiseModel{theta, 0.5 * sigma2_probe, sigma2_probe};
  }

  // Statistics implied by a physical kernel at the given temperature
  // (thermal_freq = k_B T / hbar in the kernel's frequency units). Here
  // sigma2_cell >= theta/2 always holds.
  static NoiseModel from_kernel(const TwoPoleKernel& k, double thermal_freq = 0.0) {
    const KernelSummary s = summarize(k, thermal_freq);
    return NoiseModel{s.theta, s.sigma2_cell, 2.0 * s.sigma2_cell};
  }

  // Mean reservoir occupation N from sigma2_cell = (2N + 1) theta / 2.
  double thermal_occupation() const {
    if (!(theta > 0.0)) throw std::domain_error("thermal_occupation: needs theta > 0");
    return sigma2_cell / theta - 0.5;
  }
};

// One draw of the three independent phase noises.
struct NoiseSample {
  double xi_a;  // Alice cell, Normal(0, sigma2_cell)
  double xi_b;  // Bob cell, Normal(0, sigma2_cell)
  double xi_p;  // probe, Normal(0, sigma2_probe)
};

inline NoiseSample sample_noise(const NoiseModel& model, RandomStream& stream) {
  const double s_cell = std::sqrt(model.sigma2_cell);
  const double s_probe = std::sqrt(model.sigma2_probe);
  const double a = s_cell * stream.normal();
  const double b = s_cell * stream.normal();
  const double p = s_probe * stream.normal();
  return {a, b, p};
}

// < e^{i lambda xi_S} e^{i eta xi_P} > for the non-commuting cell/probe noise
// pair: the operator ordering leaves the deterministic factor
// e^{-i lambda eta theta / 2} in front of the classical Gaussian averages.
inline std::complex<double> joint_phase_expectation(double lambda, double eta, double theta,
                                                    double sigma2) {
  const double mag = std::exp(-0.5 * (lambda * lambda + eta * eta) * sigma2);
  return std::polar(mag, -0.5 * lambda * eta * theta);
}

// Gaussian-averaged vacuum-overlap kernel in the small-phase closed form:
//   f0 = exp(-theta^2 |a|^2 / (1 + 2 s2 |a|^2)) / sqrt(1 + 2 s2 |a|^2).
inline double f0_closed(double alpha_p, double theta_eff, double sigma2_probe) {
  if (!(alpha_p >= 0.0)) throw std::invalid_argument("f0_closed: alpha_p must be >= 0");
  const double a2 = alpha_p * alpha_p;
  const double den = 1.0 + 2.0 * sigma2_probe * a2;
  return std::exp(-theta_eff * theta_eff * a2 / den) / std::sqrt(den);
}

// The same kernel without the small-phase approximation:
//   f0 = E_xi [ exp(-2 |a|^2 (1 - cos(xi + theta))) ],  xi ~ Normal(0, s2),
// by adaptive quadrature over +-8 sigma (tail mass < 1e-15). The integration
// domain is split at the maxima xi = 2 pi k - theta of the overlap factor so
// narrow peaks at large |a| cannot slip between quadrature nodes.
inline double f0_exact(double alpha_p, double theta_eff, double sigma2_probe) {
  if (!(alpha_p >= 0.0)) throw std::invalid_argument("f0_exact: alpha_p must be >= 0");
  if (!(sigma2_probe >= 0.0)) throw std::invalid_argument("f0_exact: sigma2_probe must be >= 0");
  const double a2 = alpha_p * alpha_p;
  if (sigma2_probe == 0.0) return std::exp(-2.0 * a2 * (1.0 - std::cos(theta_eff)));
  const double sigma = std::sqrt(sigma2_probe);
  const double lim = 8.0 * sigma;
  const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * sigma);
  const auto integrand = [&](double xi) {
    return norm * std::exp(-0.5 * xi * xi / sigma2_probe -
                           2.0 * a2 * (1.0 - std::cos(xi + theta_eff)));
  };
  std::vector<double> peaks;
  const int kmax = static_cast<int>(std::ceil((lim + std::abs(theta_eff)) / (2.0 * M_PI)));
  for (int kk = -kmax; kk <= kmax; ++kk) {
    peaks.push_back(2.0 * M_PI * kk - theta_eff);
  }
  return integrate_split(integrand, -lim, lim, peaks, 1e-9, 1e-14);
}

}  // namespace xpm
