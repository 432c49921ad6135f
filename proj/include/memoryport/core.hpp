#ifndef MEMORYPORT_CORE_HPP
#define MEMORYPORT_CORE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace memoryport {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr Complex I_UNIT{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonFiniteInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InfeasibleTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SpinDepletion : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonUnitary : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ScheduleOverlap : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonPassive : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedPartition : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Basic domain types

/// Cavity decay rate C (energy decay rate of the empty cavity).
struct CavityParams {
  double decay_rate_C;

  explicit CavityParams(double c) : decay_rate_C(c) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw NonFiniteInput("CavityParams: decay rate must be positive and finite");
  }
};

/// Uniform sampling grid. Samples of time-dependent quantities (coupling,
/// temporal modes, input/output flux) live on bin midpoints.
struct TimeGrid {
  double t_start;
  double dt;
  int n_steps;

  TimeGrid(double start, double step, int n) : t_start(start), dt(step), n_steps(n) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw NonFiniteInput("TimeGrid: dt must be positive");
    if (n_steps < 1) throw DimensionMismatch("TimeGrid: n_steps must be >= 1");
  }

  static TimeGrid over_span(double span, double dt, double start = 0.0) {
    int n = static_cast<int>(std::lround(span / dt));
    return TimeGrid(start, dt, n);
  }

  double span() const { return n_steps * dt; }
  double t_end() const { return t_start + span(); }
  /// Midpoint of bin i; coupling and mode samples are taken here.
  double midpoint(int i) const { return t_start + (i + 0.5) * dt; }
  /// Grid node i, i = 0..n_steps; trajectory states are stored here.
  double node(int i) const { return t_start + i * dt; }
};

namespace detail {

inline void require_finite(const VectorXcd& v, const char* what) {
  if (!v.allFinite()) throw NonFiniteInput(std::string(what) + ": non-finite sample");
}

}  // namespace detail

/// Normalized temporal mode f(t) or g(t): sum |f_i|^2 dt = 1.
struct TemporalMode {
  VectorXcd samples;

  /// Checks normalization (1e-9 tolerance); see normalized() to enforce it.
  static TemporalMode from_samples(const VectorXcd& s, double dt) {
    detail::require_finite(s, "TemporalMode");
    double norm2 = s.squaredNorm() * dt;
    if (std::abs(norm2 - 1.0) > 1e-9)
      throw NonFiniteInput("TemporalMode: samples not normalized (got " + std::to_string(norm2) + ")");
    return TemporalMode{s};
  }

  static TemporalMode normalized(const VectorXcd& s, double dt) {
    detail::require_finite(s, "TemporalMode");
    double norm2 = s.squaredNorm() * dt;
    if (!(norm2 > 0.0)) throw NonFiniteInput("TemporalMode: zero mode cannot be normalized");
    return TemporalMode{s / std::sqrt(norm2)};
  }

  /// Gaussian pulse centered at `center` with intensity std deviation `sigma`,
  /// renormalized on the grid.
  static TemporalMode gaussian(const TimeGrid& grid, double center, double sigma) {
    VectorXcd s(grid.n_steps);
    for (int i = 0; i < grid.n_steps; ++i) {
      double t = grid.midpoint(i) - center;
      s[i] = std::exp(-t * t / (4.0 * sigma * sigma));
    }
    return normalized(s, grid.dt);
  }

  /// sqrt(Gamma) exp(-Gamma t / 2) truncated to the grid window.
  static TemporalMode decaying_exponential(const TimeGrid& grid, double gamma) {
    VectorXcd s(grid.n_steps);
    for (int i = 0; i < grid.n_steps; ++i)
      s[i] = std::exp(-0.5 * gamma * (grid.midpoint(i) - grid.t_start));
    return normalized(s, grid.dt);
  }

  /// sqrt(Gamma) exp(+Gamma (t - T) / 2), the time reverse of the decaying one.
  static TemporalMode rising_exponential(const TimeGrid& grid, double gamma) {
    VectorXcd s(grid.n_steps);
    for (int i = 0; i < grid.n_steps; ++i)
      s[i] = std::exp(0.5 * gamma * (grid.midpoint(i) - grid.t_end()));
    return normalized(s, grid.dt);
  }

  TemporalMode reversed_conjugated() const {
    VectorXcd s = samples.reverse().conjugate();
    return TemporalMode{s};
  }

  int size() const { return static_cast<int>(samples.size()); }
};

/// Sampled coupling k_m(t), one row per spin wave, piecewise constant per bin.
struct CouplingSchedule {
  MatrixXcd samples;  // n_waves x n_steps

  CouplingSchedule(int n_waves, int n_steps) : samples(MatrixXcd::Zero(n_waves, n_steps)) {
    if (n_waves < 1) throw DimensionMismatch("CouplingSchedule: need at least one wave");
  }
  explicit CouplingSchedule(MatrixXcd s) : samples(std::move(s)) {
    if (samples.rows() < 1) throw DimensionMismatch("CouplingSchedule: need at least one wave");
    if (!samples.allFinite()) throw NonFiniteInput("CouplingSchedule: non-finite sample");
  }

  static CouplingSchedule constant(int n_waves, int n_steps, Complex k) {
    CouplingSchedule s(n_waves, n_steps);
    s.samples.setConstant(k);
    return s;
  }
  static CouplingSchedule single_wave(const VectorXcd& k) {
    CouplingSchedule s(1, static_cast<int>(k.size()));
    s.samples.row(0) = k.transpose();
    return s;
  }

  int n_waves() const { return static_cast<int>(samples.rows()); }
  int n_steps() const { return static_cast<int>(samples.cols()); }
};

/// Cavity plus spin-wave amplitudes at one instant.
struct SimState {
  Complex cavity_a{0.0, 0.0};
  VectorXcd spins_b;

  static SimState vacuum(int n_waves) {
    SimState s;
    s.spins_b = VectorXcd::Zero(n_waves);
    return s;
  }
  static SimState single_spin_excited(int n_waves, int which = 0) {
    SimState s = vacuum(n_waves);
    s.spins_b[which] = 1.0;
    return s;
  }

  double excitation() const { return std::norm(cavity_a) + spins_b.squaredNorm(); }
};

/// Result of one integration: states on grid nodes (n_steps + 1 of them) and
/// the output flux amplitude per bin.
struct Trajectory {
  std::vector<SimState> states;
  VectorXcd output_samples;

  const SimState& final_state() const { return states.back(); }
  double emitted_energy(double dt) const { return output_samples.squaredNorm() * dt; }

  /// Projection of the output on a target mode: sum conj(g_i) a_out_i dt.
  Complex project_output(const TemporalMode& g, double dt) const {
    if (g.size() != output_samples.size())
      throw DimensionMismatch("project_output: mode length mismatch");
    return (g.samples.conjugate().array() * output_samples.array()).sum() * dt;
  }
};

}  // namespace memoryport

#endif  // MEMORYPORT_CORE_HPP
