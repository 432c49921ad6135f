#ifndef MEMORYPORT_DYNAMICS_HPP
#define MEMORYPORT_DYNAMICS_HPP

#include <unsupported/Eigen/MatrixFunctions>

#include "memoryport/core.hpp"

namespace memoryport {

// The integrated system, in rotating-frame amplitudes x = (a, b_1..b_N):
//
//   da/dt   = -C/2 a - i sum_m k_m(t) b_m + sqrt(C) a_in(t)
//   db_m/dt = -i conj(k_m(t)) a
//   a_out   = sqrt(C) a - a_in
//
// k is piecewise constant per bin, so each bin has an exact propagator
// exp(M dt) plus an exact inhomogeneous response to the bin's constant input.

namespace detail {

/// Exact per-bin step operators: x' = E x + w * a_in_bin.
struct BinPropagators {
  std::vector<MatrixXcd> E;  // (N+1)x(N+1), one per bin
  std::vector<VectorXcd> w;  // (N+1), input response, one per bin
  int n_waves;
  int n_steps;
};

inline MatrixXcd coupling_generator(double C, const Eigen::Ref<const VectorXcd>& k) {
  const int N = static_cast<int>(k.size());
  MatrixXcd M = MatrixXcd::Zero(N + 1, N + 1);
  M(0, 0) = -0.5 * C;
  for (int m = 0; m < N; ++m) {
    M(0, m + 1) = -I_UNIT * k[m];
    M(m + 1, 0) = -I_UNIT * std::conj(k[m]);
  }
  return M;
}

inline BinPropagators make_propagators(const CavityParams& params, const TimeGrid& grid,
                                       const CouplingSchedule& schedule) {
  if (schedule.n_steps() != grid.n_steps)
    throw DimensionMismatch("make_propagators: schedule length != grid n_steps");
  if (!schedule.samples.allFinite()) throw NonFiniteInput("make_propagators: schedule");

  const int N = schedule.n_waves();
  BinPropagators props;
  props.n_waves = N;
  props.n_steps = grid.n_steps;
  props.E.reserve(grid.n_steps);
  props.w.reserve(grid.n_steps);

  // Augment with a constant slot driving the cavity at rate sqrt(C); the top
  // right block of exp(A dt) is then the exact integral of the input term.
  const double sqrtC = std::sqrt(params.decay_rate_C);
  MatrixXcd A = MatrixXcd::Zero(N + 2, N + 2);
  for (int i = 0; i < grid.n_steps; ++i) {
    A.topLeftCorner(N + 1, N + 1) = coupling_generator(params.decay_rate_C, schedule.samples.col(i));
    A(0, N + 1) = sqrtC;
    MatrixXcd Ead = (A * grid.dt).exp();
    props.E.push_back(Ead.topLeftCorner(N + 1, N + 1));
    props.w.push_back(Ead.topRightCorner(N + 1, 1).col(0));
  }
  return props;
}

inline VectorXcd pack_state(const SimState& s) {
  VectorXcd x(s.spins_b.size() + 1);
  x[0] = s.cavity_a;
  x.tail(s.spins_b.size()) = s.spins_b;
  return x;
}

inline SimState unpack_state(const Eigen::Ref<const VectorXcd>& x) {
  SimState s;
  s.cavity_a = x[0];
  s.spins_b = x.tail(x.size() - 1);
  return s;
}

/// Core stepper reused by the single-shot and sequence simulators. Output per
/// bin uses the trapezoid of the node cavity amplitudes (second order against
/// midpoint-sampled k).
inline Trajectory run(const BinPropagators& props, double C, double dt, const VectorXcd& input,
                      const SimState& initial) {
  const int n = props.n_steps;
  const bool has_input = input.size() > 0;
  if (has_input && input.size() != n) throw DimensionMismatch("simulate: input length != n_steps");
  if (initial.spins_b.size() != props.n_waves)
    throw DimensionMismatch("simulate: initial spin count != schedule n_waves");
  if (has_input) require_finite(input, "simulate input");
  if (!std::isfinite(initial.cavity_a.real()) || !std::isfinite(initial.cavity_a.imag()) ||
      !initial.spins_b.allFinite())
    throw NonFiniteInput("simulate: initial state");

  const double sqrtC = std::sqrt(C);
  Trajectory traj;
  traj.states.reserve(n + 1);
  traj.output_samples.resize(n);

  VectorXcd x = pack_state(initial);
  traj.states.push_back(initial);
  for (int i = 0; i < n; ++i) {
    Complex a_in = has_input ? input[i] : Complex{0.0, 0.0};
    Complex a_prev = x[0];
    x = props.E[i] * x;
    if (a_in != Complex{0.0, 0.0}) x += props.w[i] * a_in;
    traj.output_samples[i] = sqrtC * 0.5 * (a_prev + x[0]) - a_in;
    traj.states.push_back(unpack_state(x));
  }
  return traj;
}

}  // namespace detail

/// Integrate the cavity/spin-wave equations. `input` may be empty (vacuum /
/// zero drive) or hold one flux amplitude per bin.
inline Trajectory simulate_dynamics(const CavityParams& params, const TimeGrid& grid,
                                    const CouplingSchedule& schedule, const VectorXcd& input,
                                    const SimState& initial) {
  auto props = detail::make_propagators(params, grid, schedule);
  return detail::run(props, params.decay_rate_C, grid.dt, input, initial);
}

struct WriteInResult {
  Complex K_W;
  double efficiency;  // |K_W|^2
  Trajectory trajectory;
};

/// Drive the cavity with a unit-energy classical pulse f(t) from vacuum and
/// read off the stored spin amplitude: b(T) = K_W for unit input.
inline WriteInResult write_in_coefficient(const CavityParams& params, const TimeGrid& grid,
                                          const CouplingSchedule& schedule, const TemporalMode& f) {
  if (schedule.n_waves() != 1)
    throw DimensionMismatch("write_in_coefficient: expected a single-wave schedule");
  Trajectory traj = simulate_dynamics(params, grid, schedule, f.samples, SimState::vacuum(1));
  Complex K = traj.final_state().spins_b[0];
  return WriteInResult{K, std::norm(K), std::move(traj)};
}

struct ReadoutResult {
  Complex K_R;         // projection of the output on the target mode
  double efficiency;   // total emitted energy
  VectorXcd output_samples;
};

/// Release a unit spin excitation and project the emitted pulse on g(t).
inline ReadoutResult readout_profile(const CavityParams& params, const TimeGrid& grid,
                                     const CouplingSchedule& schedule, const TemporalMode& g) {
  if (schedule.n_waves() != 1)
    throw DimensionMismatch("readout_profile: expected a single-wave schedule");
  Trajectory traj =
      simulate_dynamics(params, grid, schedule, VectorXcd(), SimState::single_spin_excited(1));
  ReadoutResult r;
  r.efficiency = traj.emitted_energy(grid.dt);
  r.K_R = traj.project_output(g, grid.dt);
  r.output_samples = std::move(traj.output_samples);
  return r;
}

/// Discretized Green's function of the full dynamics, as a matrix from
/// (input bins + cavity + N spins) to (output bins + cavity + N spins).
/// Bin slots carry amplitude * sqrt(dt) so each bin is a unit-norm mode and
/// unitarity of the continuous map becomes a row/column-norm check.
struct LinearMap {
  MatrixXcd matrix;
  int n_steps;
  int n_waves;

  int dim() const { return n_steps + 1 + n_waves; }
  double max_row_norm_deviation() const {
    return (matrix.rowwise().norm().array() - 1.0).abs().maxCoeff();
  }
  double max_col_norm_deviation() const {
    return (matrix.colwise().norm().array() - 1.0).abs().maxCoeff();
  }
};

inline LinearMap build_linear_map(const CavityParams& params, const TimeGrid& grid,
                                  const CouplingSchedule& schedule) {
  auto props = detail::make_propagators(params, grid, schedule);
  const int n = grid.n_steps;
  const int N = schedule.n_waves();
  const int dim = n + 1 + N;
  const double sqrt_dt = std::sqrt(grid.dt);
  const double sqrtC = std::sqrt(params.decay_rate_C);

  LinearMap map;
  map.n_steps = n;
  map.n_waves = N;
  map.matrix = MatrixXcd::Zero(dim, dim);

  // Column j < n: unit amplitude in input bin j, i.e. flux 1/sqrt(dt) on that
  // bin. Columns n .. n+N: unit initial cavity / spin amplitude. Propagation
  // from bin j onward reuses the cached per-bin operators.
  VectorXcd x(N + 1);
  for (int j = 0; j < dim; ++j) {
    int start_bin;
    Complex drive{0.0, 0.0};
    if (j < n) {
      x.setZero();
      start_bin = j;
      drive = 1.0 / sqrt_dt;
    } else {
      x.setZero();
      x[j - n] = 1.0;
      start_bin = 0;
    }
    for (int i = start_bin; i < n; ++i) {
      Complex a_in = (j < n && i == j) ? drive : Complex{0.0, 0.0};
      Complex a_prev = x[0];
      x = props.E[i] * x;
      if (a_in != Complex{0.0, 0.0}) x += props.w[i] * a_in;
      map.matrix(i, j) = (sqrtC * 0.5 * (a_prev + x[0]) - a_in) * sqrt_dt;
    }
    map.matrix.block(n, j, N + 1, 1) = x;
  }
  return map;
}

/// Apply a linear map to a sampled input pulse over vacuum initial state;
/// returns the (output bins + cavity + spins) image with flux normalization
/// undone for the field bins.
inline VectorXcd apply_linear_map_to_input(const LinearMap& map, const VectorXcd& input, double dt) {
  if (input.size() != map.n_steps) throw DimensionMismatch("apply_linear_map_to_input: length");
  VectorXcd in_vec = VectorXcd::Zero(map.dim());
  in_vec.head(map.n_steps) = input * std::sqrt(dt);
  VectorXcd out = map.matrix * in_vec;
  out.head(map.n_steps) /= std::sqrt(dt);
  return out;
}

}  // namespace memoryport

#endif  // MEMORYPORT_DYNAMICS_HPP
