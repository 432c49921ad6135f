// memoryport: config-driven batch front-end for the memory simulator.
//
//   memoryport <command> --config <file> [--out <dir>] [--dt <value>] [--hard-reset]
//
// Commands: simulate, shape, channel, gaussian, spatial, sweep. Outputs are
// summary.json plus timeseries.csv / sweep.csv in the output directory.
// Exit codes: 2 config error, 3 infeasible shaping, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include <memoryport/memoryport.hpp>

using json = nlohmann::ordered_json;
using namespace memoryport;
namespace fs = std::filesystem;

namespace {

struct CliOptions {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  double dt_override = 0.0;
  bool hard_reset = false;
};

struct RunOutput {
  json summary;
  std::string timeseries;  // CSV text; empty when the command emits none
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex parse_complex(const json& j, const char* what) {
  if (j.is_number()) return Complex{j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex{j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(std::string(what) + ": expected a number or [re, im] pair");
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field: ") + key);
  return j.at(key);
}

double require_number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw ConfigError(std::string(key) + ": expected a number");
  return v.get<double>();
}

CavityParams parse_cavity(const json& cfg) {
  return CavityParams(require_number(require(cfg, "cavity"), "decay_rate"));
}

TimeGrid parse_grid(const json& cfg, double dt_override) {
  const json& g = require(cfg, "grid");
  double dt = dt_override > 0.0 ? dt_override : require_number(g, "dt");
  double t_start = g.value("t_start", 0.0);
  double span = require_number(g, "span");
  return TimeGrid::over_span(span, dt, t_start);
}

TemporalMode parse_mode(const json& m, const TimeGrid& grid) {
  std::string form = require(m, "form").get<std::string>();
  if (form == "gaussian")
    return TemporalMode::gaussian(grid, require_number(m, "center"), require_number(m, "sigma"));
  if (form == "decaying_exponential")
    return TemporalMode::decaying_exponential(grid, require_number(m, "gamma"));
  if (form == "rising_exponential")
    return TemporalMode::rising_exponential(grid, require_number(m, "gamma"));
  if (form == "samples") {
    const json& vals = require(m, "values");
    if (static_cast<int>(vals.size()) != grid.n_steps)
      throw ConfigError("mode samples: length != grid n_steps");
    VectorXcd s(grid.n_steps);
    for (int i = 0; i < grid.n_steps; ++i) s[i] = parse_complex(vals[i], "mode sample");
    return TemporalMode::normalized(s, grid.dt);
  }
  throw ConfigError("unknown mode form: " + form);
}

UnitarySpec parse_unitary(const json& u, int n) {
  if (u.is_string()) {
    std::string name = u.get<std::string>();
    if (name == "identity") return UnitarySpec::identity(n);
    if (name == "swap" || name == "cyclic") return UnitarySpec::cyclic_shift(n);
    if (name == "bs50") {
      if (n != 2) throw ConfigError("bs50 unitary requires n_signals = 2");
      return UnitarySpec::beamsplitter_50_50();
    }
    throw ConfigError("unknown unitary name: " + name);
  }
  if (u.is_array()) {
    if (static_cast<int>(u.size()) != n) throw ConfigError("unitary rows != n_signals");
    MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(u[i].size()) != n) throw ConfigError("unitary row length != n_signals");
      for (int j = 0; j < n; ++j) m(i, j) = parse_complex(u[i][j], "unitary entry");
    }
    try {
      return UnitarySpec(m);
    } catch (const NonUnitary& e) {
      throw ConfigError(std::string("unitary check failed at load: ") + e.what());
    }
  }
  throw ConfigError("unitary: expected a name or a row-major matrix");
}

json matrix_to_json(const MatrixXcd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

std::string timeseries_csv(const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& columns) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c)
    out += (c ? "," : "") + header[c];
  out += "\n";
  for (std::size_t r = 0; r < columns.front().size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out += (c ? "," : "") + format_double(columns[c][r]);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

RunOutput run_simulate(const json& cfg, const CliOptions& opt) {
  auto params = parse_cavity(cfg);
  auto grid = parse_grid(cfg, opt.dt_override);

  const json& cj = require(cfg, "coupling");
  std::string form = require(cj, "form").get<std::string>();
  int n_waves = cj.value("n_waves", 1);
  CouplingSchedule schedule(n_waves, grid.n_steps);
  if (form == "constant") {
    schedule.samples.setConstant(parse_complex(require(cj, "value"), "coupling value"));
  } else if (form == "samples") {
    const json& waves = require(cj, "waves");
    if (static_cast<int>(waves.size()) != n_waves) throw ConfigError("coupling waves != n_waves");
    for (int m = 0; m < n_waves; ++m) {
      if (static_cast<int>(waves[m].size()) != grid.n_steps)
        throw ConfigError("coupling samples: length != grid n_steps");
      for (int i = 0; i < grid.n_steps; ++i)
        schedule.samples(m, i) = parse_complex(waves[m][i], "coupling sample");
    }
  } else {
    throw ConfigError("unknown coupling form: " + form);
  }

  VectorXcd input;
  if (cfg.contains("input") && !cfg.at("input").is_null())
    input = parse_mode(cfg.at("input"), grid).samples;

  SimState initial = SimState::vacuum(n_waves);
  if (cfg.contains("initial")) {
    const json& ij = cfg.at("initial");
    if (ij.contains("cavity")) initial.cavity_a = parse_complex(ij.at("cavity"), "initial cavity");
    if (ij.contains("spins")) {
      const json& sp = ij.at("spins");
      if (static_cast<int>(sp.size()) != n_waves) throw ConfigError("initial spins != n_waves");
      for (int m = 0; m < n_waves; ++m) initial.spins_b[m] = parse_complex(sp[m], "initial spin");
    }
  }

  auto traj = simulate_dynamics(params, grid, schedule, input, initial);

  RunOutput out;
  out.summary["emitted_energy"] = traj.emitted_energy(grid.dt);
  out.summary["final_cavity"] = complex_to_json(traj.final_state().cavity_a);
  json spins = json::array();
  for (int m = 0; m < n_waves; ++m) spins.push_back(complex_to_json(traj.final_state().spins_b[m]));
  out.summary["final_spins"] = spins;
  out.summary["initial_excitation"] = initial.excitation();
  out.summary["final_excitation"] = traj.final_state().excitation();

  if (cfg.value("emit_timeseries", true)) {
    std::vector<std::string> header{"t", "re_a", "im_a", "out_intensity"};
    for (int m = 0; m < n_waves; ++m) {
      header.push_back("re_k_" + std::to_string(m));
      header.push_back("im_k_" + std::to_string(m));
    }
    std::vector<std::vector<double>> cols(header.size());
    for (int i = 0; i < grid.n_steps; ++i) {
      cols[0].push_back(grid.midpoint(i));
      Complex a_mid = 0.5 * (traj.states[i].cavity_a + traj.states[i + 1].cavity_a);
      cols[1].push_back(a_mid.real());
      cols[2].push_back(a_mid.imag());
      cols[3].push_back(std::norm(traj.output_samples[i]));
      for (int m = 0; m < n_waves; ++m) {
        cols[4 + 2 * m].push_back(schedule.samples(m, i).real());
        cols[5 + 2 * m].push_back(schedule.samples(m, i).imag());
      }
    }
    out.timeseries = timeseries_csv(header, cols);
  }
  return out;
}

RunOutput run_shape(const json& cfg, const CliOptions& opt) {
  auto params = parse_cavity(cfg);
  auto grid = parse_grid(cfg, opt.dt_override);
  auto target = parse_mode(require(cfg, "target"), grid);

  double eta_max = max_readout_efficiency(params, grid, target);
  double eta_target;
  const json& ej = require(cfg, "eta_target");
  if (ej.is_string() && ej.get<std::string>() == "max")
    eta_target = eta_max;
  else if (ej.is_number())
    eta_target = ej.get<double>();
  else
    throw ConfigError("eta_target: expected a number or \"max\"");

  ShapingProblem base{params, grid, target, eta_target, {}};
  std::vector<ShapingSolution> solutions;
  const json& bj = cfg.contains("branches") ? cfg.at("branches") : json("single");
  if (bj.is_string() && bj.get<std::string>() == "enumerate") {
    solutions = enumerate_readout_branches(base);
  } else if (bj.is_string() && bj.get<std::string>() == "single") {
    solutions.push_back(shape_readout_coupling(base));
  } else if (bj.is_array()) {
    for (const json& spec : bj) {
      ShapingProblem p = base;
      for (const json& s : spec) p.branch_spec.push_back(s.get<int>());
      solutions.push_back(shape_readout_coupling(p));
    }
  } else {
    throw ConfigError("branches: expected \"enumerate\", \"single\" or a list of sign patterns");
  }
  if (solutions.empty()) throw InfeasibleTarget("shape: no valid branch");

  RunOutput out;
  out.summary["eta_max"] = eta_max;
  out.summary["eta_target"] = eta_target;
  json branches = json::array();
  for (auto& sol : solutions) {
    auto res = readout_profile(params, grid, sol.schedule, target);
    json b;
    b["branch_spec"] = sol.branch_spec;
    b["achieved_eta"] = sol.achieved_eta;
    b["residual_spin"] = sol.residual_spin;
    b["residual_cavity"] = sol.residual_cavity;
    b["simulated_eta"] = res.efficiency;
    b["mode_overlap"] = std::norm(res.K_R) / res.efficiency;
    branches.push_back(b);
  }
  out.summary["branches"] = branches;

  if (cfg.value("emit_timeseries", true)) {
    std::vector<std::string> header{"t", "target_out_intensity"};
    for (std::size_t b = 0; b < solutions.size(); ++b) {
      header.push_back("re_k_" + std::to_string(b));
      header.push_back("im_k_" + std::to_string(b));
    }
    std::vector<std::vector<double>> cols(header.size());
    for (int i = 0; i < grid.n_steps; ++i) {
      cols[0].push_back(grid.midpoint(i));
      cols[1].push_back(eta_target * std::norm(target.samples[i]));
      for (std::size_t b = 0; b < solutions.size(); ++b) {
        cols[2 + 2 * b].push_back(solutions[b].schedule.samples(0, i).real());
        cols[3 + 2 * b].push_back(solutions[b].schedule.samples(0, i).imag());
      }
    }
    out.timeseries = timeseries_csv(header, cols);
  }
  return out;
}

RunOutput run_channel(const json& cfg, const CliOptions& opt) {
  auto params = parse_cavity(cfg);
  int n = static_cast<int>(require_number(cfg, "n_signals"));
  auto U_W = parse_unitary(require(cfg, "U_W"), n);
  auto U_R = parse_unitary(require(cfg, "U_R"), n);

  RunOutput out;
  Complex K_W, K_R;
  if (cfg.contains("simulate")) {
    const json& sj = cfg.at("simulate");
    double dt = opt.dt_override > 0.0 ? opt.dt_override : require_number(sj, "dt");
    double window = require_number(sj, "window_span");
    double guard = require_number(sj, "guard_gap");
    TimeGrid wgrid = TimeGrid::over_span(window, dt);
    auto f = parse_mode(require(sj, "write_mode"), wgrid);
    auto g = parse_mode(require(sj, "read_mode"), wgrid);
    double eta_target = require_number(sj, "eta_target");

    auto wsol = shape_writein_coupling(params, wgrid, f, eta_target);
    auto rsol = shape_readout_coupling({params, wgrid, g, eta_target, {}});
    K_W = write_in_coefficient(params, wgrid, wsol.schedule, f).K_W;
    K_R = readout_profile(params, wgrid, rsol.schedule, g).K_R;

    auto schedule = SignalSchedule::regular(n, window, window, guard);
    VectorXcd k_write = wsol.schedule.samples.row(0).transpose();
    VectorXcd k_read = rsol.schedule.samples.row(0).transpose();
    auto seq = simulate_sequence(params, dt, schedule, U_W, U_R, k_write, f,
                                 k_read, g, opt.hard_reset);
    auto composed = compose_channel(U_W, U_R, K_W, K_R);
    out.summary["measured_transfer"] = matrix_to_json(seq.measured);
    out.summary["composed_transfer"] = matrix_to_json(composed.transfer);
    out.summary["max_discrepancy"] =
        (seq.measured - composed.transfer).cwiseAbs().maxCoeff();
    out.summary["mean_column_energy"] = seq.mean_column_energy;
    out.summary["total_efficiency"] = composed.total_efficiency;
  } else {
    const json& kj = require(cfg, "coefficients");
    K_W = parse_complex(require(kj, "K_W"), "K_W");
    K_R = parse_complex(require(kj, "K_R"), "K_R");
    auto composed = compose_channel(U_W, U_R, K_W, K_R);
    out.summary["composed_transfer"] = matrix_to_json(composed.transfer);
    out.summary["total_efficiency"] = composed.total_efficiency;
  }
  out.summary["K_W"] = complex_to_json(K_W);
  out.summary["K_R"] = complex_to_json(K_R);
  return out;
}

RunOutput run_gaussian(const json& cfg, const CliOptions&) {
  const json& rj = require(cfg, "r");
  const json& aj = require(cfg, "angles");
  if (rj.size() != aj.size()) throw ConfigError("r and angles must have equal length");
  const int n = static_cast<int>(rj.size());
  VectorXd r(n), angles(n);
  for (int i = 0; i < n; ++i) {
    r[i] = rj[i].get<double>();
    angles[i] = aj[i].get<double>();
  }
  auto input = make_squeezed_inputs(r, angles);

  const json& chj = require(cfg, "channel");
  MatrixXcd transfer;
  if (chj.contains("transfer")) {
    const json& tj = chj.at("transfer");
    transfer.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) transfer(i, j) = parse_complex(tj[i][j], "transfer entry");
  } else {
    double eff = require_number(chj, "efficiency");
    auto u = parse_unitary(require(chj, "unitary"), n);
    transfer = std::sqrt(eff) * u.matrix;
  }

  auto output = apply_channel(input, transfer_to_quadratures(transfer));
  RunOutput out;
  out.summary["min_symplectic_eigenvalue"] = symplectic_eigenvalues(output.covariance).minCoeff();
  if (n == 2) {
    out.summary["log_negativity"] = log_negativity(output);
    out.summary["duan_value"] = duan_value(output);
  }
  json cov = json::array();
  for (int i = 0; i < 2 * n; ++i) {
    json row = json::array();
    for (int j = 0; j < 2 * n; ++j) row.push_back(output.covariance(i, j));
    cov.push_back(row);
  }
  out.summary["output_covariance"] = cov;
  return out;
}

RunOutput run_spatial(const json& cfg, const CliOptions&) {
  const json& pj = require(cfg, "profile");
  std::string kind = require(pj, "kind").get<std::string>();
  DensityProfile profile =
      kind == "uniform"  ? DensityProfile::uniform(require_number(pj, "length"))
      : kind == "gaussian" ? DensityProfile::gaussian(require_number(pj, "sigma"))
                           : throw ConfigError("unknown profile kind: " + kind);

  const json& oj = require(cfg, "offsets");
  std::vector<double> offsets;
  for (const json& o : oj) offsets.push_back(o.get<double>());
  auto G = gram_matrix(profile, SpinWaveBasis(offsets));

  RunOutput out;
  out.summary["gram"] = matrix_to_json(G);
  out.summary["crosstalk"] = crosstalk_metric(G);
  return out;
}

RunOutput run_command(const std::string& command, const json& cfg, const CliOptions& opt);

RunOutput run_sweep(const json& cfg, const CliOptions& opt) {
  const json& values = require(cfg, "values");
  if (!values.is_array() || values.size() < 2)
    throw ConfigError("sweep: values must list at least 2 grid points");
  std::string pointer = require(cfg, "parameter").get<std::string>();
  json base = require(cfg, "base");
  std::string sub = require(base, "command").get<std::string>();
  if (sub == "sweep") throw ConfigError("sweep: nested sweeps are not supported");

  json::json_pointer ptr{pointer};
  if (!base.contains(ptr) || !base.at(ptr).is_number())
    throw ConfigError("sweep: parameter must name an existing scalar field");

  std::vector<std::string> header{"parameter"};
  std::vector<std::vector<double>> cols{{}};
  bool first = true;
  json rows = json::array();
  for (const json& v : values) {
    if (!v.is_number()) throw ConfigError("sweep: values must be numbers");
    json point = base;
    point[ptr] = v;
    RunOutput r = run_command(sub, point, opt);
    // flatten top-level scalar summary fields into sweep columns
    if (first) {
      for (auto& [key, val] : r.summary.items())
        if (val.is_number()) header.push_back(key);
      cols.resize(header.size());
      first = false;
    }
    cols[0].push_back(v.get<double>());
    std::size_t c = 1;
    for (auto& [key, val] : r.summary.items())
      if (val.is_number()) {
        if (c < header.size() && header[c] == key) cols[c++].push_back(val.get<double>());
      }
    rows.push_back({{"parameter", v.get<double>()}, {"summary", r.summary}});
  }
  RunOutput out;
  out.summary["rows"] = rows;
  out.timeseries = timeseries_csv(header, cols);
  return out;
}

RunOutput run_command(const std::string& command, const json& cfg, const CliOptions& opt) {
  if (cfg.value("schema_version", 1) != 1) throw ConfigError("unsupported schema_version");
  if (cfg.contains("command") && cfg.at("command").get<std::string>() != command)
    throw ConfigError("config command does not match the CLI command");
  if (command == "simulate") return run_simulate(cfg, opt);
  if (command == "shape") return run_shape(cfg, opt);
  if (command == "channel") return run_channel(cfg, opt);
  if (command == "gaussian") return run_gaussian(cfg, opt);
  if (command == "spatial") return run_spatial(cfg, opt);
  if (command == "sweep") return run_sweep(cfg, opt);
  throw ConfigError("unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cavity-assisted multivariate quantum memory simulator"};
  CliOptions opt;
  app.require_subcommand(1);
  for (const char* name : {"simulate", "shape", "channel", "gaussian", "spatial", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "JSON config file")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--dt", opt.dt_override, "override the grid step");
    sub->add_flag("--hard-reset", opt.hard_reset, "zero the cavity between windows");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opt.command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot read config file: " + opt.config_path);
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }

    RunOutput result = run_command(opt.command, cfg, opt);
    json summary;
    summary["command"] = opt.command;
    summary.update(result.summary);

    fs::create_directories(opt.out_dir);
    std::ofstream(fs::path(opt.out_dir) / "summary.json") << summary.dump(2) << "\n";
    if (!result.timeseries.empty()) {
      const char* name = opt.command == "sweep" ? "sweep.csv" : "timeseries.csv";
      std::ofstream(fs::path(opt.out_dir) / name) << result.timeseries;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionMismatch& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleTarget& e) {
    std::cerr << "infeasible shaping target: " << e.what() << "\n";
    return 3;
  } catch (const SpinDepletion& e) {
    std::cerr << "infeasible shaping branch: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
}
