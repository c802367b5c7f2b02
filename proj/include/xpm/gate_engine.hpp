#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "xpm/phase_noise.hpp"
#include "xpm/quadrature.hpp"
#include "xpm/random.hpp"

namespace xpm {

using complexd = std::complex<double>;

// Dual-rail qubit: a0 multiplies the rail that bypasses the Kerr cell, a1 the
// rail that imparts the XPM phase on the probe.
struct QubitAmplitudes {
  complexd a0;
  complexd a1;

  QubitAmplitudes(complexd a0_in, complexd a1_in) : a0(a0_in), a1(a1_in) {
    const double norm2 = std::norm(a0) + std::norm(a1);
    if (std::abs(norm2 - 1.0) > 1e-12) {
      throw std::invalid_argument("QubitAmplitudes: |a0|^2 + |a1|^2 must be 1");
    }
  }

  // Uniform over the Bloch sphere: |a1|^2 ~ Uniform[0,1] plus an independent
  // uniform relative phase (the overall phase is irrelevant).
  static QubitAmplitudes haar_sample(RandomStream& stream) {
    const double x = stream.uniform();
    const double phase = stream.uniform(0.0, 2.0 * M_PI);
    return QubitAmplitudes(std::sqrt(1.0 - x), std::polar(std::sqrt(x), phase));
  }
};

// Photon-count cutoff such that a Poisson tail of mean
// m = |2 alpha_p sin(phi_max/2)|^2 beyond the cutoff stays below tail_tol,
// where phi_max = theta + 6 sigma_P covers the noise excursions. Starts from
// 1 + ceil(m + 10 sqrt(m)) and bumps until the tail bound is certified.
inline int default_photon_cutoff(double alpha_p_mag, double theta, double sigma2_probe,
                                 double tail_tol = 1e-9) {
  const double phi_max = std::min(theta + 6.0 * std::sqrt(sigma2_probe), M_PI);
  const double m = std::norm(2.0 * alpha_p_mag * std::sin(0.5 * phi_max));
  if (m == 0.0) return 1;
  int n = 1 + static_cast<int>(std::ceil(m + 10.0 * std::sqrt(m)));
  // Poisson tail P(X > n; m) = gamma_p(n + 1, m).
  while (boost::math::gamma_p(static_cast<double>(n + 1), m) >= tail_tol) ++n;
  return n;
}

// Gate configuration: probe amplitude, per-photon phase, Fock cutoff.
struct GateParams {
  complexd alpha_p;  // probe amplitude; convention real >= 0
  double theta;      // per-photon XPM phase (rad)
  int n_max;         // photon-count cutoff
  double tail_tol;   // admissible probability mass beyond n_max

  static GateParams make(double alpha_p_mag, double theta, double sigma2_probe,
                         double tail_tol = 1e-9) {
    if (!(alpha_p_mag >= 0.0)) throw std::invalid_argument("GateParams: alpha_p must be >= 0");
    if (!(theta >= 0.0)) throw std::invalid_argument("GateParams: theta must be >= 0");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("GateParams: tail_tol must be > 0");
    return GateParams{complexd(alpha_p_mag, 0.0), theta,
                      default_photon_cutoff(alpha_p_mag, theta, sigma2_probe, tail_tol),
                      tail_tol};
  }
};

// coeff * |ket_amp><bra_amp| in the probe oscillator.
struct CoherentDyad {
  complexd coeff;
  complexd ket_amp;
  complexd bra_amp;
};

// One labeled term of an Alice x Bob x probe operator.
struct HybridTerm {
  std::uint8_t a_ket, a_bra, b_ket, b_bra;
  CoherentDyad dyad;

  bool diagonal_labels() const { return a_ket == a_bra && b_ket == b_bra; }
};

// <u|v> for coherent amplitudes u, v.
inline complexd coherent_overlap(complexd u, complexd v) {
  return std::exp(-0.5 * std::norm(u) - 0.5 * std::norm(v) + std::conj(u) * v);
}

// <n|ket><bra|n> for one dyad, coefficient excluded. Evaluated in log space so
// amplitudes of order 2|alpha_p| survive to n in the thousands.
inline complexd dyad_fock_weight(const CoherentDyad& d, int n) {
  if (n < 0) throw std::invalid_argument("dyad_fock_weight: n must be >= 0");
  const double g0 = -0.5 * (std::norm(d.ket_amp) + std::norm(d.bra_amp));
  if (n == 0) return std::exp(g0);
  const complexd s = d.ket_amp * std::conj(d.bra_amp);
  const double mag = std::abs(s);
  if (mag == 0.0) return 0.0;
  const double lg = g0 + n * std::log(mag) - std::lgamma(n + 1.0);
  if (lg < -745.0) return 0.0;
  return std::polar(std::exp(lg), n * std::arg(s));
}

// Alice x Bob x probe conditional operator as a finite dyad sum.
struct HybridState {
  std::vector<HybridTerm> terms;

  complexd trace() const {
    complexd t = 0.0;
    for (const HybridTerm& term : terms) {
      if (term.diagonal_labels()) {
        t += term.dyad.coeff * coherent_overlap(term.dyad.bra_amp, term.dyad.ket_amp);
      }
    }
    return t;
  }
};

namespace detail {

// The four branches of one qubit-probe interaction, in density-operator form:
// (ket, bra) labels and the probe phase advance in units of theta/2. The
// coherence branches ride at the half phase; that offset is the fingerprint
// of the non-commuting cell/probe noise pair and is absent from a naive
// single-mode treatment.
struct InteractionBranch {
  std::uint8_t ket, bra;
  int half_steps;
};

inline constexpr std::array<InteractionBranch, 4> kBranches{{
    {0, 0, 0},
    {1, 1, 2},
    {1, 0, 1},
    {0, 1, 1},
}};

inline complexd branch_coeff(const QubitAmplitudes& q, int branch, double xi_cell) {
  switch (branch) {
    case 0: return std::norm(q.a0);
    case 1: return std::norm(q.a1);
    case 2: return std::conj(q.a0) * q.a1 * std::polar(1.0, xi_cell);
    default: return q.a0 * std::conj(q.a1) * std::polar(1.0, -xi_cell);
  }
}

inline int ab_index(int a, int b) { return 2 * a + b; }

}  // namespace detail

// Conditional density operator of one qubit-probe XPM interaction with probe
// input |alpha_p>, at fixed noise values (xi_s, xi_p). The Bob labels of the
// returned state are unused (0). Zero-coefficient branches are dropped.
inline HybridState single_xpm_density(const QubitAmplitudes& qubit, complexd alpha_p,
                                      double theta, double xi_s, double xi_p) {
  HybridState state;
  for (int br = 0; br < 4; ++br) {
    const complexd coeff = detail::branch_coeff(qubit, br, xi_s);
    if (coeff == complexd(0.0, 0.0)) continue;
    const auto& b = detail::kBranches[br];
    const complexd amp = alpha_p * std::polar(1.0, xi_p + 0.5 * theta * b.half_steps);
    state.terms.push_back({b.ket, b.bra, 0, 0, {coeff, amp, amp}});
  }
  return state;
}

// Expands every term of `state` through one qubit-probe interaction acting on
// the (so far unused) qubit slot 'a' or 'b'. Building block for composing the
// two-cell gate out of single interactions.
inline HybridState apply_xpm_pass(const HybridState& state, const QubitAmplitudes& qubit,
                                  char slot, double theta, double xi_s, double xi_p) {
  if (slot != 'a' && slot != 'b') throw std::invalid_argument("apply_xpm_pass: slot is 'a' or 'b'");
  HybridState out;
  out.terms.reserve(state.terms.size() * 4);
  for (const HybridTerm& term : state.terms) {
    for (int br = 0; br < 4; ++br) {
      const complexd coeff = detail::branch_coeff(qubit, br, xi_s) * term.dyad.coeff;
      if (coeff == complexd(0.0, 0.0)) continue;
      const auto& b = detail::kBranches[br];
      const complexd rot = std::polar(1.0, xi_p + 0.5 * theta * b.half_steps);
      HybridTerm t = term;
      t.dyad = {coeff, term.dyad.ket_amp * rot, term.dyad.bra_amp * rot};
      if (slot == 'a') {
        t.a_ket = b.ket;
        t.a_bra = b.bra;
      } else {
        t.b_ket = b.ket;
        t.b_bra = b.bra;
      }
      out.terms.push_back(t);
    }
  }
  return out;
}

// The -theta phase shifter followed by the -alpha_p displacement:
// u -> u e^{-i theta} - alpha_p on both sides of every dyad, with the exact
// displacement phases (which cancel for diagonal dyads).
inline HybridState apply_probe_displacement(const HybridState& state, double theta,
                                            complexd alpha_p) {
  const complexd d = -alpha_p;
  const complexd rot = std::polar(1.0, -theta);
  HybridState out;
  out.terms.reserve(state.terms.size());
  for (const HybridTerm& term : state.terms) {
    const complexd u = term.dyad.ket_amp * rot;
    const complexd v = term.dyad.bra_amp * rot;
    const double phase = std::imag(d * std::conj(u)) - std::imag(d * std::conj(v));
    HybridTerm t = term;
    t.dyad = {term.dyad.coeff * std::polar(1.0, phase), u + d, v + d};
    out.terms.push_back(t);
  }
  return out;
}

// Noise-conditional Alice-Bob-probe output state of the distributed parity
// gate, displacement included: each branch pair carries the probe dyad
// |alpha_p (e^{i(gamma - theta)} - 1)> with gamma = xi_p + (sA + sB) theta/2,
// Alice coherences e^{+-i xi_a}, Bob coherences e^{+-i xi_b}. Trace is 1 for
// normalized inputs. Up to 16 terms; zero-coefficient branches are dropped.
inline HybridState parity_gate_state(const QubitAmplitudes& alice, const QubitAmplitudes& bob,
                                     const GateParams& params, const NoiseSample& sample) {
  HybridState state;
  state.terms.reserve(16);
  for (int ba = 0; ba < 4; ++ba) {
    const complexd ca = detail::branch_coeff(alice, ba, sample.xi_a);
    if (ca == complexd(0.0, 0.0)) continue;
    for (int bb = 0; bb < 4; ++bb) {
      const complexd coeff = ca * detail::branch_coeff(bob, bb, sample.xi_b);
      if (coeff == complexd(0.0, 0.0)) continue;
      const int steps = detail::kBranches[ba].half_steps + detail::kBranches[bb].half_steps;
      const double gamma = sample.xi_p + 0.5 * params.theta * steps;
      const complexd amp = params.alpha_p * (std::polar(1.0, gamma - params.theta) - 1.0);
      state.terms.push_back({detail::kBranches[ba].ket, detail::kBranches[ba].bra,
                             detail::kBranches[bb].ket, detail::kBranches[bb].bra,
                             {coeff, amp, amp}});
    }
  }
  return state;
}

// P(n): probability that the photon-number-resolving detector reads n.
inline double photon_count_prob(const HybridState& state, int n) {
  complexd p = 0.0;
  for (const HybridTerm& term : state.terms) {
    if (term.diagonal_labels()) {
      p += term.dyad.coeff * dyad_fock_weight(term.dyad, n);
    }
  }
  return p.real();
}

// Normalized Alice-Bob state conditioned on detecting n photons, in the
// occupation basis |ab> ordered {00, 01, 10, 11}. weight_out, when given,
// receives P(n). Throws std::domain_error when P(n) is too small to condition
// on.
inline Eigen::Matrix4cd conditional_ab_state(const HybridState& state, int n,
                                             double* weight_out = nullptr) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (const HybridTerm& term : state.terms) {
    const complexd w = term.dyad.coeff * dyad_fock_weight(term.dyad, n);
    m(detail::ab_index(term.a_ket, term.b_ket), detail::ab_index(term.a_bra, term.b_bra)) += w;
  }
  const double weight = m.trace().real();
  if (weight_out != nullptr) *weight_out = weight;
  if (!(weight > 1e-300)) {
    throw std::domain_error("conditional_ab_state: unconditionable, P(n) vanishes");
  }
  return m / weight;
}

// Heralded target state for count n: the even-parity combination for n = 0,
// the odd-parity one with the (-1)^n sign on the |00> component for n >= 1.
// Throws std::domain_error when the target has zero norm.
inline Eigen::Vector4cd parity_target(const QubitAmplitudes& alice, const QubitAmplitudes& bob,
                                      int n) {
  const complexd b0 = alice.a1 * bob.a0;  // |10>
  const complexd b1 = alice.a1 * bob.a1;  // |11>
  const complexd b2 = alice.a0 * bob.a0;  // |00>
  const complexd b3 = alice.a0 * bob.a1;  // |01>
  Eigen::Vector4cd t = Eigen::Vector4cd::Zero();
  if (n == 0) {
    const double norm2 = std::norm(b0) + std::norm(b3);
    if (norm2 == 0.0) throw std::domain_error("parity_target: even target has zero norm");
    const double s = 1.0 / std::sqrt(norm2);
    t(detail::ab_index(1, 0)) = b0 * s;
    t(detail::ab_index(0, 1)) = b3 * s;
  } else {
    const double norm2 = std::norm(b1) + std::norm(b2);
    if (norm2 == 0.0) throw std::domain_error("parity_target: odd target has zero norm");
    const double s = 1.0 / std::sqrt(norm2);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    t(detail::ab_index(1, 1)) = b1 * s;
    t(detail::ab_index(0, 0)) = sign * b2 * s;
  }
  return t;
}

// <psi_target | conditional | psi_target>.
inline double success_overlap(const Eigen::Matrix4cd& conditional, const QubitAmplitudes& alice,
                              const QubitAmplitudes& bob, int n) {
  const Eigen::Vector4cd t = parity_target(alice, bob, n);
  return t.dot(conditional * t).real();
}

// Single-mode baseline, no phase noise: P_even = 1/2 exactly and
// P_odd = (1 - e^{-theta^2 |alpha_p|^2}) / 2.
inline double single_mode_p_even() { return 0.5; }

inline double single_mode_p_odd(double theta, double alpha_p_mag) {
  if (!(theta >= 0.0) || !(alpha_p_mag >= 0.0) || !std::isfinite(theta) ||
      !std::isfinite(alpha_p_mag)) {
    throw std::invalid_argument("single_mode_p_odd: inputs must be finite and >= 0");
  }
  const double x = theta * alpha_p_mag;
  return 0.5 * (1.0 - std::exp(-x * x));
}

namespace detail {

// P(0)*overlap_0 and sum_{n>=1} P(n)*overlap_n for one noise-conditional
// state, i.e. the target-projected weights without normalizing per count.
// The n-sum walks the per-term Poisson recursions in log space and stops once
// the accumulated count probability is within tail_tol of 1 (the omitted
// overlap mass is bounded by the omitted count mass), capped at n_max.
inline std::pair<double, double> sample_success_values(const GateParams& params,
                                                       const QubitAmplitudes& alice,
                                                       const QubitAmplitudes& bob,
                                                       const NoiseSample& sample) {
  const HybridState state = parity_gate_state(alice, bob, params, sample);

  const complexd b0 = alice.a1 * bob.a0;
  const complexd b1 = alice.a1 * bob.a1;
  const complexd b2 = alice.a0 * bob.a0;
  const complexd b3 = alice.a0 * bob.a1;
  const double n0sq = std::norm(b0) + std::norm(b3);
  const double n1sq = std::norm(b1) + std::norm(b2);

  // Target vectors in the {00, 01, 10, 11} basis. A zero-norm target is a
  // measure-zero degenerate input: its branch contributes no success weight.
  std::array<complexd, 4> c_even{};
  if (n0sq > 0.0) {
    const double s = 1.0 / std::sqrt(n0sq);
    c_even[ab_index(1, 0)] = b0 * s;
    c_even[ab_index(0, 1)] = b3 * s;
  }
  std::array<complexd, 4> c_odd{};  // |00> sign handled per n below
  if (n1sq > 0.0) {
    const double s = 1.0 / std::sqrt(n1sq);
    c_odd[ab_index(1, 1)] = b1 * s;
    c_odd[ab_index(0, 0)] = b2 * s;
  }

  struct TermAccum {
    double log_w;      // log of the n-dependent dyad weight
    double log_x;      // log |ket * conj(bra)|
    double coeff_re;   // real(coeff) for diagonal-label terms, else 0
    complexd odd_c;    // coeff * conj(c_odd[ket]) * c_odd[bra]
    bool sign_flips;   // whether the (-1)^n of the |00> component applies
    bool alive;
  };

  double even = 0.0;
  double p0 = 0.0;
  std::array<TermAccum, 16> acc{};
  std::size_t n_acc = 0;
  for (const HybridTerm& term : state.terms) {
    const int ket = ab_index(term.a_ket, term.b_ket);
    const int bra = ab_index(term.a_bra, term.b_bra);
    const double g0 = -0.5 * (std::norm(term.dyad.ket_amp) + std::norm(term.dyad.bra_amp));
    const double w0 = std::exp(g0);
    even += (term.dyad.coeff * std::conj(c_even[ket]) * c_even[bra]).real() * w0;
    const bool diag = term.diagonal_labels();
    if (diag) p0 += term.dyad.coeff.real() * w0;

    TermAccum a{};
    a.odd_c = term.dyad.coeff * std::conj(c_odd[ket]) * c_odd[bra];
    a.coeff_re = diag ? term.dyad.coeff.real() : 0.0;
    if (a.odd_c == complexd(0.0, 0.0) && a.coeff_re == 0.0) continue;
    const double x = std::abs(term.dyad.ket_amp * std::conj(term.dyad.bra_amp));
    if (x == 0.0) continue;  // only n = 0 contributes
    a.log_w = g0;
    a.log_x = std::log(x);
    a.sign_flips = (ket == 0) != (bra == 0);
    a.alive = true;
    acc[n_acc++] = a;
  }

  double odd = 0.0;
  double cum = p0;
  std::size_t n_alive = n_acc;
  for (int n = 1; n <= params.n_max && n_alive > 0 && 1.0 - cum > params.tail_tol; ++n) {
    const double log_n = std::log(static_cast<double>(n));
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n_acc; ++i) {
      TermAccum& a = acc[i];
      if (!a.alive) continue;
      a.log_w += a.log_x - log_n;
      if (a.log_w < -745.0) {
        if (a.log_x < log_n) {
          // Past the Poisson mode and below double range: dead forever.
          a.alive = false;
          --n_alive;
        }
        continue;
      }
      const double w = std::exp(a.log_w);
      cum += a.coeff_re * w;
      const double flip = a.sign_flips ? sign : 1.0;
      odd += a.odd_c.real() * flip * w;
    }
  }
  return {even, odd};
}

}  // namespace detail

struct McResult {
  double p_even = 0.0;
  double p_odd = 0.0;
  double se_even = 0.0;
  double se_odd = 0.0;
  std::size_t n_samples = 0;
};

namespace detail {

inline std::pair<double, double> mean_and_se(std::span<const double> values) {
  const std::size_t n = values.size();
  const double mean = pairwise_sum(values) / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace detail

// Monte Carlo P_even / P_odd over Haar-random input qubits and Gaussian phase
// noise. Per-sample counter streams plus slot-array accumulation and pairwise
// reduction make the result a function of (seed, n_samples) only - the thread
// count does not change a single bit.
inline McResult mc_success_probabilities(const GateParams& params, const NoiseModel& model,
                                         std::size_t n_samples, std::uint64_t seed,
                                         int n_threads = 0) {
  if (n_samples < 1) throw std::invalid_argument("mc_success_probabilities: n_samples >= 1");
  std::vector<double> vals_even(n_samples), vals_odd(n_samples);

  const auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RandomStream stream = RandomStream::for_sample(seed, i);
      const QubitAmplitudes alice = QubitAmplitudes::haar_sample(stream);
      const QubitAmplitudes bob = QubitAmplitudes::haar_sample(stream);
      const NoiseSample noise = sample_noise(model, stream);
      const auto [even, odd] = detail::sample_success_values(params, alice, bob, noise);
      vals_even[i] = even;
      vals_odd[i] = odd;
    }
  };

  std::size_t workers = n_threads > 0 ? static_cast<std::size_t>(n_threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_samples);
  if (workers <= 1) {
    worker(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n_samples + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n_samples, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (std::thread& t : pool) t.join();
  }

  const auto [p_even, se_even] = detail::mean_and_se(vals_even);
  const auto [p_odd, se_odd] = detail::mean_and_se(vals_odd);
  return {p_even, p_odd, se_even, se_odd, n_samples};
}

}  // namespace xpm
