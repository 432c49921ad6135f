#ifndef MEMORYPORT_SHAPING_HPP
#define MEMORYPORT_SHAPING_HPP

#include <algorithm>
#include <optional>
#include <vector>

#include "memoryport/dynamics.hpp"

namespace memoryport {

// Inverse coupling shaping: given a target output mode g(t) on a window T and
// a requested efficiency, reconstruct k(t) algebraically from the cavity
// equation. With a(t) = sqrt(eta/C) g(t) and a_in = 0,
//
//   -i k(t) b(t) = da/dt + (C/2) a(t)  =:  s(t),
//
// and energy conservation fixes the spin energy
//
//   |b(t)|^2 = E_b(t) = 1 - eta (Phi(t) + |g(t)|^2 / C),   Phi = int_0^t |g|^2.
//
// Branches: b(t) = eps(t) sqrt(E_b(t)) with a piecewise sign eps. A sign flip
// requires b to cross zero, which pins the efficiency of that branch to the
// depletion value 1 / h(t*) at the flip point, h = Phi + |g|^2 / C. Nearby
// shallow minima of E_b therefore generate a discrete family of coupling
// profiles with almost equal efficiencies.

struct ShapingProblem {
  CavityParams params;
  TimeGrid grid;
  TemporalMode target;
  double eta_target;
  std::vector<int> branch_spec;  // per-segment signs; empty means all +1
  double branch_minimum_threshold = 2e-2;
};

struct ShapingSolution {
  CouplingSchedule schedule;
  double achieved_eta;
  double residual_spin;
  double residual_cavity;
  std::vector<int> branch_spec;
};

namespace detail {

// h(t) = Phi(t) + |g(t)|^2 / C on bin midpoints, Phi cumulative to the midpoint.
inline VectorXd depletion_profile(const TemporalMode& g, double dt, double C) {
  const int n = g.size();
  VectorXd h(n);
  double phi = 0.0;
  for (int i = 0; i < n; ++i) {
    double gi2 = std::norm(g.samples[i]);
    h[i] = phi + 0.5 * gi2 * dt + gi2 / C;
    phi += gi2 * dt;
  }
  return h;
}

/// Interior local minima of E_b = 1 - eta * h below the flip threshold.
inline std::vector<int> flip_candidates(const VectorXd& h, double eta, double threshold) {
  std::vector<int> out;
  const int n = static_cast<int>(h.size());
  for (int i = 1; i + 1 < n; ++i) {
    double e = 1.0 - eta * h[i];
    if (e >= threshold) continue;
    double el = 1.0 - eta * h[i - 1];
    double er = 1.0 - eta * h[i + 1];
    if (e <= el && e <= er && (e < el || e < er)) out.push_back(i);
  }
  return out;
}

// Second-order derivative on midpoints, one-sided at the window edges.
inline VectorXcd derivative(const VectorXcd& a, double dt) {
  const int n = static_cast<int>(a.size());
  VectorXcd d(n);
  if (n < 3) throw DimensionMismatch("shaping: grid too coarse");
  d[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * dt);
  d[n - 1] = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * dt);
  for (int i = 1; i + 1 < n; ++i) d[i] = (a[i + 1] - a[i - 1]) / (2.0 * dt);
  return d;
}

}  // namespace detail

inline ShapingSolution shape_readout_coupling(const ShapingProblem& problem) {
  const double C = problem.params.decay_rate_C;
  const double dt = problem.grid.dt;
  const TemporalMode& g = problem.target;
  const int n = g.size();
  if (n != problem.grid.n_steps)
    throw DimensionMismatch("shape_readout_coupling: target length != grid");
  if (!(problem.eta_target > 0.0) || problem.eta_target > 1.0)
    throw InfeasibleTarget("shape_readout_coupling: eta_target must lie in (0, 1]");
  if (std::norm(g.samples[0]) * dt >= 1e-4)
    throw InfeasibleTarget("shape_readout_coupling: g(0) too large for empty-cavity start");

  const VectorXd h = detail::depletion_profile(g, dt, C);

  // Candidates are located at the requested efficiency; a flip raises the
  // branch efficiency to the depletion value at its deepest flip point.
  std::vector<int> candidates =
      detail::flip_candidates(h, problem.eta_target, problem.branch_minimum_threshold);

  std::vector<int> signs(candidates.size() + 1, 1);
  for (std::size_t j = 0; j < signs.size() && j < problem.branch_spec.size(); ++j) {
    if (problem.branch_spec[j] != 1 && problem.branch_spec[j] != -1)
      throw ConfigError("branch_spec entries must be +1 or -1");
    signs[j] = problem.branch_spec[j];
  }

  double eta = problem.eta_target;
  for (std::size_t j = 0; j + 1 < signs.size(); ++j)
    if (signs[j] != signs[j + 1]) eta = std::max(eta, 1.0 / h[candidates[j]]);
  if (eta > 1.0) throw InfeasibleTarget("shape_readout_coupling: flip requires eta > 1");

  // Design curves at the (possibly raised) branch efficiency.
  VectorXcd a = std::sqrt(eta / C) * g.samples;
  VectorXcd s = detail::derivative(a, dt) + (0.5 * C) * a;
  VectorXd e_b = (1.0 - eta * h.array()).matrix();
  const double min_e = e_b.minCoeff();
  if (min_e < -1e-9)
    throw InfeasibleTarget("shape_readout_coupling: eta_target exceeds the impedance bound");

  VectorXcd k(n);
  constexpr double eps_b = 1e-6;
  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    while (seg < candidates.size() && i > candidates[seg]) ++seg;
    double b = signs[seg] * std::sqrt(std::max(e_b[i], 0.0));
    if (std::abs(b) < eps_b) {
      // Depleted spin: legitimate only in the immediate vicinity of a flip
      // point, where s crosses finite while b passes through zero.
      bool near_candidate = false;
      for (int c : candidates)
        if (std::abs(i - c) <= 1) near_candidate = true;
      if (!near_candidate && std::abs(s[i]) > eps_b * C)
        throw SpinDepletion("shape_readout_coupling: spin depleted while transfer is required");
      k[i] = 0.0;
    } else {
      k[i] = I_UNIT * s[i] / b;
    }
  }

  ShapingSolution sol{CouplingSchedule::single_wave(k), 0.0, 0.0, 0.0, signs};
  sol.achieved_eta = eta;  // g is unit-normalized on the window
  sol.residual_cavity = eta * std::norm(g.samples[n - 1]) / C;
  sol.residual_spin = 1.0 - sol.achieved_eta - sol.residual_cavity;
  return sol;
}

/// Largest feasible eta for the exact reconstruction, by bisection on the
/// sign of min_t E_b. Monotone under zero-padding of g.
inline double max_readout_efficiency(const CavityParams& params, const TimeGrid& grid,
                                     const TemporalMode& g) {
  if (g.size() != grid.n_steps) throw DimensionMismatch("max_readout_efficiency: target length");
  const VectorXd h = detail::depletion_profile(g, grid.dt, params.decay_rate_C);
  const double h_max = h.maxCoeff();
  auto feasible = [&](double eta) { return 1.0 - eta * h_max >= 0.0; };
  if (feasible(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-4) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Write-in shaping by time reversal: k_w(t) = conj(k_r(T - t)) for the
/// readout problem with target g(t) = conj(f(T - t)).
inline ShapingSolution shape_writein_coupling(const CavityParams& params, const TimeGrid& grid,
                                              const TemporalMode& f, double eta_target,
                                              const std::vector<int>& branch_spec = {}) {
  ShapingProblem reversed{params, grid, f.reversed_conjugated(), eta_target, branch_spec};
  ShapingSolution sol = shape_readout_coupling(reversed);
  VectorXcd k = sol.schedule.samples.row(0).reverse().conjugate();
  sol.schedule = CouplingSchedule::single_wave(k);
  return sol;
}

/// The discrete Fig.-2-style family: all sign patterns over the global sign
/// and the admissible flip points, deduplicated, in deterministic order.
inline std::vector<ShapingSolution> enumerate_readout_branches(const ShapingProblem& base) {
  const VectorXd h =
      detail::depletion_profile(base.target, base.grid.dt, base.params.decay_rate_C);
  const auto candidates =
      detail::flip_candidates(h, base.eta_target, base.branch_minimum_threshold);
  const std::size_t n_seg = candidates.size() + 1;

  std::vector<ShapingSolution> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n_seg); ++mask) {
    ShapingProblem p = base;
    p.branch_spec.assign(n_seg, 1);
    for (std::size_t j = 0; j < n_seg; ++j)
      if (mask & (std::size_t{1} << j)) p.branch_spec[j] = -1;
    try {
      out.push_back(shape_readout_coupling(p));
    } catch (const SpinDepletion&) {
      // branch invalid; skip
    } catch (const InfeasibleTarget&) {
      // flip at a non-extremal minimum would overdrive eta; skip
    }
  }
  return out;
}

}  // namespace memoryport

#endif  // MEMORYPORT_SHAPING_HPP
