#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "xpm/quadrature.hpp"

namespace xpm {

// Causal two-pole medium response. kappa * h(t) is the XPM phase (radians)
// imparted a time t after a unit photon-flux impulse; h integrates to 1 and
// its sine transform H_i is non-negative on Omega >= 0, which is what admits
// a consistent set of damping reservoirs.
struct TwoPoleKernel {
  double omega0;  // resonance angular frequency, > 0
  double gamma0;  // damping rate, 0 <= gamma0 < 2*omega0 (underdamped)
  double kappa;   // XPM coupling, >= 0, units of time

  TwoPoleKernel(double omega0_in, double gamma0_in, double kappa_in)
      : omega0(omega0_in), gamma0(gamma0_in), kappa(kappa_in) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("TwoPoleKernel: omega0 must be > 0");
    if (!(gamma0 >= 0.0 && gamma0 < 2.0 * omega0)) {
      throw std::invalid_argument("TwoPoleKernel: need 0 <= gamma0 < 2*omega0 (underdamped)");
    }
    if (!(kappa >= 0.0)) throw std::invalid_argument("TwoPoleKernel: kappa must be >= 0");
  }

  // Damped ring frequency sqrt(omega0^2 - gamma0^2/4).
  double ring_frequency() const {
    return std::sqrt(omega0 * omega0 - 0.25 * gamma0 * gamma0);
  }
};

// Unit-L2-norm Gaussian pulse envelope.
struct GaussianPulse {
  double tau0;      // duration, > 0
  double t_center;  // center time

  GaussianPulse(double tau0_in, double t_center_in = 0.0)
      : tau0(tau0_in), t_center(t_center_in) {
    if (!(tau0 > 0.0)) throw std::invalid_argument("GaussianPulse: tau0 must be > 0");
  }

  // phi(t) = (pi tau0^2)^(-1/4) exp(-(t - t0)^2 / (2 tau0^2))
  double amplitude(double t) const {
    const double u = (t - t_center) / tau0;
    return std::pow(M_PI * tau0 * tau0, -0.25) * std::exp(-0.5 * u * u);
  }

  double intensity(double t) const {
    const double u = (t - t_center) / tau0;
    return std::exp(-u * u) / (std::sqrt(M_PI) * tau0);
  }
};

// h(t); exactly 0 for t < 0 (causality).
inline double h_of_t(const TwoPoleKernel& k, double t) {
  if (t < 0.0) return 0.0;
  if (k.gamma0 == 0.0) return k.omega0 * std::sin(k.omega0 * t);
  const double w1 = k.ring_frequency();
  return k.omega0 * k.omega0 * std::exp(-0.5 * k.gamma0 * t) * std::sin(w1 * t) / w1;
}

// Sine transform H_i(Omega) = Im H(Omega); odd in Omega. For gamma0 = 0 the
// transform degenerates to a delta at the resonance and the pointwise value
// off resonance is 0.
inline double h_imag(const TwoPoleKernel& k, double omega) {
  if (k.gamma0 == 0.0) return 0.0;
  const double w0sq = k.omega0 * k.omega0;
  const double d = w0sq - omega * omega;
  return w0sq * k.gamma0 * omega / (d * d + k.gamma0 * k.gamma0 * omega * omega);
}

// First (global) maximum of h on t >= 0.
inline double t_peak(const TwoPoleKernel& k) {
  if (k.gamma0 == 0.0) return 0.5 * M_PI / k.omega0;
  const double w1 = k.ring_frequency();
  return std::atan2(2.0 * w1, k.gamma0) / w1;
}

// Peak single-photon XPM phase theta = kappa * h(t_peak). Single source of
// truth for theta wherever a kernel is in play.
inline double peak_phase(const TwoPoleKernel& k) {
  return k.kappa * h_of_t(k, t_peak(k));
}

namespace detail {

// coth with the small- and large-argument branches stabilized.
inline double coth(double y) {
  if (y > 20.0) return 1.0;
  if (y < 1e-4) return 1.0 / y + y / 3.0;
  return 1.0 / std::tanh(y);
}

}  // namespace detail

// Per-cell phase-noise variance
//   sigma^2 = (kappa / pi) Int_0^inf H_i(Omega) coth(Omega / (2 T)) dOmega,
// with thermal_freq = k_B T / hbar in the kernel's angular-frequency units;
// thermal_freq = 0 means coth -> 1. The integrand is evaluated in units of
// omega0 with a hard cutoff at 50 omega0 (the tail decays as 1/Omega^3) and a
// split at the resonance so the adaptive rule resolves narrow damping peaks.
// For gamma0 = 0 the undamped integral is taken in closed form.
inline double cell_phase_variance(const TwoPoleKernel& k, double thermal_freq = 0.0) {
  if (!(thermal_freq >= 0.0)) {
    throw std::invalid_argument("cell_phase_variance: thermal_freq must be >= 0");
  }
  if (k.kappa == 0.0) return 0.0;
  if (k.gamma0 == 0.0) {
    const double base = 0.5 * k.kappa * k.omega0;
    if (thermal_freq == 0.0) return base;
    return base * detail::coth(0.5 * k.omega0 / thermal_freq);
  }
  const double gbar = k.gamma0 / k.omega0;
  const double tbar = thermal_freq / k.omega0;
  const auto integrand = [&](double x) {
    const double d = 1.0 - x * x;
    const double hi = gbar * x / (d * d + gbar * gbar * x * x);
    if (tbar == 0.0) return hi;
    if (x == 0.0) return 2.0 * tbar * gbar;  // H_i ~ gbar*x cancels coth ~ 2T/x
    return hi * detail::coth(0.5 * x / tbar);
  };
  const double breakpoints[] = {1.0 - 5.0 * gbar, 1.0, 1.0 + 5.0 * gbar, 2.0};
  const double value = integrate_split(integrand, 0.0, 50.0, breakpoints, 1e-8);
  return k.kappa * k.omega0 * value / M_PI;
}

// Mean XPM phase factor < e^{i mu_P(t)} > = Int |phi(tau)|^2 e^{i kappa h(t - tau)} dtau
// for a single photon in the given pulse. Magnitude is <= 1 by construction.
inline std::complex<double> mean_xpm_factor(const TwoPoleKernel& k, const GaussianPulse& pulse,
                                            double t) {
  const double a = pulse.t_center - 10.0 * pulse.tau0;
  const double b = pulse.t_center + 10.0 * pulse.tau0;
  const auto re = [&](double tau) {
    return pulse.intensity(tau) * std::cos(k.kappa * h_of_t(k, t - tau));
  };
  const auto im = [&](double tau) {
    return pulse.intensity(tau) * std::sin(k.kappa * h_of_t(k, t - tau));
  };
  // Split where the kernel argument changes sign: h is not smooth at t = tau.
  const double breakpoints[] = {t};
  return {integrate_split(re, a, b, breakpoints, 1e-8, 1e-10),
          integrate_split(im, a, b, breakpoints, 1e-8, 1e-10)};
}

// Peak time, peak phase, and per-cell variance of a kernel in one record.
struct KernelSummary {
  double t_h;          // argmax of h
  double theta;        // kappa * h(t_h), radians
  double sigma2_cell;  // per-cell phase variance, rad^2
};

inline KernelSummary summarize(const TwoPoleKernel& k, double thermal_freq = 0.0) {
  const double th = t_peak(k);
  return {th, k.kappa * h_of_t(k, th), cell_phase_variance(k, thermal_freq)};
}

}  // namespace xpm
