#include "gphase/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "gphase/devices.hpp"
#include "gphase/experiments.hpp"
#include "gphase/gates.hpp"
#include "gphase/kvconfig.hpp"
#include "gphase/noise.hpp"
#include "gphase/phases.hpp"

namespace gphase {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"e_c_kelvin", "1.35", "charging energy E_c (K)"},
      {"e_j_kelvin", "0.6", "Josephson energy E_J (K)"},
      {"gamma", "300", "noise correlation time dt = 1/(4 E_c gamma)"},
      {"dt", "", "explicit noise correlation time (overrides gamma)"},
      {"noise_axes", "xz", "noisy field axes for aa/dynamic gates"},
      {"identical_xy", "false", "use one draw for the x and y fluctuations"},
      {"fixed_steps", "", "noise steps per segment instead of a shared dt"},
      {"realizations", "600", "Monte Carlo realizations per cell"},
      {"seed", "1", "master seed"},
      {"kind", "aa", "sweep gate kind: aa, dynamic or berry"},
      {"theta_values", "0.25pi,0.5pi,0.75pi,1pi,1.25pi,1.5pi,1.75pi,2pi", "sweep angles"},
      {"db_values", "0.02,0.056,0.092,0.128,0.164,0.2",
       "noise half-widths in units of B_z (berry: of delta)"},
      {"b_x", "", "R_x field of the AA gate (default 2 E_J)"},
      {"b_z", "", "R_z field of the dynamic gate (default 4 E_c)"},
      {"b_n", "", "R_n field of the AA gate (default: device maximum)"},
      {"theta", "0.5pi", "gate angle for path, compile and phase-decompose"},
      {"state", "0", "initial state: 0, 1, +, -, +i, -i or bloch:<polar>,<azimuth>"},
      {"steps", "1000", "samples per schedule segment"},
      {"delta", "1", "Berry loop splitting"},
      {"omega1_max", "1", "Berry loop maximal transverse field"},
      {"t_tilt", "100", "tilt duration"},
      {"t_sweep", "100", "sweep duration"},
      {"n_tilt", "1000", "tilt staircase steps"},
      {"n_sweep", "1000", "sweep staircase steps"},
      {"noisy_ry", "false", "apply noise to the refocusing R_y(pi) pulses"},
      {"berry_noise_axes", "xyz", "noisy field axes for the Berry loop"},
      {"berry_db", "0.01", "Berry noise half-width in units of delta"},
  };
  return keys;
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string valid_keys_text() {
  std::string s = "valid keys:";
  for (const auto& k : config_keys()) s += std::string(" ") + k.name;
  return s;
}

// Resolved configuration: defaults < config file < command-line flags.
struct Resolved {
  KvConfig kv;
  std::string command;

  bool set(const std::string& key) const { return kv.has(key) && !trim(kv.get(key)).empty(); }

  ChargeQubitParams device() const {
    ChargeQubitParams p{kv.get_double("e_c_kelvin"), kv.get_double("e_j_kelvin")};
    p.validate();
    return p;
  }

  FieldAssignment fields() const {
    FieldAssignment f = FieldAssignment::from_device(device());
    if (set("b_x")) f.b_x = kv.get_double("b_x");
    if (set("b_z")) f.b_z = kv.get_double("b_z");
    if (set("b_n")) f.b_n = kv.get_double("b_n");
    return f;
  }

  NoiseConfig noise(const std::string& axes_key) const {
    NoiseConfig n;
    n.axes[0] = NoiseAxes::parse(kv.get(axes_key));
    n.identical_xy = kv.get_bool("identical_xy");
    n.dt = set("dt") ? kv.get_double("dt")
                     : NoiseConfig::dt_from_gamma(device().e_c, kv.get_double("gamma"));
    return n;
  }

  McOptions mc(int workers) const {
    McOptions o;
    o.realizations = static_cast<int>(kv.get_int("realizations"));
    if (o.realizations < 0) throw ConfigError("realizations must be >= 0");
    o.seed = static_cast<std::uint64_t>(kv.get_int("seed"));
    o.workers = workers;
    if (set("fixed_steps")) o.fixed_steps = kv.get_int("fixed_steps");
    return o;
  }

  BerryParams berry() const {
    BerryParams b;
    b.delta = kv.get_double("delta");
    b.omega1_max = kv.get_double("omega1_max");
    b.t_tilt = kv.get_double("t_tilt");
    b.t_sweep = kv.get_double("t_sweep");
    b.n_tilt = static_cast<int>(kv.get_int("n_tilt"));
    b.n_sweep = static_cast<int>(kv.get_int("n_sweep"));
    b.noisy_ry = kv.get_bool("noisy_ry");
    b.validate();
    return b;
  }

  std::vector<std::pair<std::string, std::string>> header() const {
    std::vector<std::pair<std::string, std::string>> h;
    h.emplace_back("command", command);
    for (const auto& k : config_keys()) h.emplace_back(k.name, kv.get(k.name));
    return h;
  }
};

State parse_state(const std::string& spec) {
  const double r = 1.0 / std::sqrt(2.0);
  const std::string s = trim(spec);
  auto make = [](cplx a, cplx b) {
    const cplx v[] = {a, b};
    return State::normalized(v);
  };
  if (s == "0") return State::basis(2, 0);
  if (s == "1") return State::basis(2, 1);
  if (s == "+") return make(r, r);
  if (s == "-") return make(r, -r);
  if (s == "+i") return make(r, cplx(0, r));
  if (s == "-i") return make(r, cplx(0, -r));
  if (s.rfind("bloch:", 0) == 0) {
    const std::vector<double> a = parse_list(s.substr(6), true);
    if (a.size() != 2) throw UsageError("bloch state needs <polar>,<azimuth>");
    return make(std::cos(a[0] / 2), std::polar(std::sin(a[0] / 2), a[1]));
  }
  throw UsageError("malformed state \"" + spec + "\"; use 0, 1, +, -, +i, -i or bloch:<polar>,<azimuth>");
}

void write_header(std::ostream& os, const Resolved& cfg) {
  for (const auto& [k, v] : cfg.header()) os << "#@ " << k << " = " << v << '\n';
}

int cmd_path(const Resolved& cfg, std::ostream& out, std::ostream& err) {
  const double theta = cfg.kv.get_angle("theta");
  const State psi0 = parse_state(cfg.kv.get("state"));
  const long steps = cfg.kv.get_int("steps");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  const AaDeviceSchedule dev = aa_schedule_for(theta, cfg.device());
  const Trajectory traj = simulate_trajectory(dev.schedule, psi0, static_cast<int>(steps));
  write_header(out, cfg);
  out << "t,bx,by,bz\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const BlochVector b = bloch_vector(traj.states[k]);
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", traj.times[k], b.bx, b.by, b.bz);
  }
  const BlochVector a = bloch_vector(traj.states.front()), z = bloch_vector(traj.states.back());
  const double gap = (a.as_vec() - z.as_vec()).norm();
  err << fmt::format("path {} (endpoint gap {:.3e}, total time {:.6g} = {:.4f} ps)\n",
                     gap < 1e-9 ? "closed" : "open", gap, dev.total_time,
                     to_picoseconds(dev.total_time));
  return kExitOk;
}

int cmd_compile(const Resolved& cfg, std::ostream& out) {
  const double theta = cfg.kv.get_angle("theta");
  const GateSequence seq = controlled_aa_sequence(theta);
  const CompileResult res = compile_with_log(seq);
  out << "# original\n" << format_sequence(seq) << "\n# compiled\n"
      << format_sequence(res.sequence) << '\n';
  for (const auto& m : res.merges) {
    out << fmt::format("merged gates {} and {} -> angle {:.6f}pi{}\n", m.first, m.second,
                       m.merged_angle / kPi, m.dropped ? " (dropped)" : "");
  }
  const Unitary before = evaluate(seq), after = evaluate(res.sequence);
  const double exact = trace_distance(before, after);
  const std::array<cplx, 4> d = {1.0, 1.0, std::polar(1.0, -theta), std::polar(1.0, theta)};
  const Unitary target(ComplexMatrix::diagonal(d));
  const double to_target = phase_aligned_distance(after, target);
  out << fmt::format("gate count: {} -> {}\n", seq.size(), res.sequence.size());
  out << fmt::format("distance(original, compiled) = {:.3e}\n", exact);
  out << fmt::format("phase-aligned distance(compiled, diag(1,1,e^-i theta,e^i theta)) = {:.3e}\n",
                     to_target);
  const bool ok = exact < 1e-10 && to_target < 1e-10;
  out << (ok ? "verification: ok\n" : "verification: FAILED\n");
  return ok ? kExitOk : kExitVerification;
}

int cmd_sweep(const Resolved& cfg, std::ostream& out, int workers) {
  const MeasuredGate kind = parse_measured_gate(cfg.kv.get("kind"));
  SweepGrid grid;
  grid.theta_values = cfg.kv.get_list("theta_values", true);
  grid.db_values = cfg.kv.get_list("db_values");
  grid.realizations = static_cast<int>(cfg.kv.get_int("realizations"));
  const bool berry = kind == MeasuredGate::kBerry;
  grid.noise = cfg.noise(berry ? "berry_noise_axes" : "noise_axes");
  const McOptions o = cfg.mc(workers);
  if (o.fixed_steps) throw ConfigError("fixed_steps is not supported by sweep; use the library API");
  const auto rows = run_sweep(grid, kind, cfg.fields(), berry ? cfg.berry() : BerryParams{},
                              o.seed, workers);
  write_csv(out, rows, cfg.header());
  return kExitOk;
}

std::string pi_units(double a) { return fmt::format("{:.3f}π", a / kPi); }

int cmd_bound(const Resolved& cfg, std::ostream& out) {
  auto report = [&](const std::string& label, double bz, double bx, double bn) {
    const double tb = theta_bound(bz, bx, bn);
    out << fmt::format("{}: B_z = {:.6g}, B_x = {:.6g}, B_n = {:.6g}\n", label, bz, bx, bn);
    out << fmt::format("  θ_b = {} ({:.6f} rad)\n", pi_units(tb), tb);
    return tb;
  };
  const bool explicit_fields = cfg.set("b_x") || cfg.set("b_z") || cfg.set("b_n");
  if (explicit_fields) {
    const FieldAssignment f = cfg.fields();
    const double bn = f.b_n_for(0.5 * cfg.kv.get_angle("theta"));
    const double tb = report("fields", f.b_z, f.b_x, bn);
    out << fmt::format("  the AA gate can only win for rotation angles θ > {}\n", pi_units(tb));
    return kExitOk;
  }
  const ChargeQubitParams p = cfg.device();
  const double bx = p.max_bx(), bz = p.max_bz();
  struct Candidate {
    std::string label;
    double bz, bx, bn;
  };
  const std::vector<Candidate> candidates = {
      {"maximal fields, B_n = |(B_x, B_z)|", bz, bx, std::hypot(bx, bz)},
      {"maximal fields, B_n = B_z", bz, bx, bz},
      {"maximal fields, B_n = B_x", bz, bx, bx},
      {"half gate-charge range (B_z = 2 E_c), B_n = |(B_x, B_z)|", 0.5 * bz, bx,
       std::hypot(bx, 0.5 * bz)},
      {"quarter gate-charge range (B_z = E_c), B_n = |(B_x, B_z)|", 0.25 * bz, bx,
       std::hypot(bx, 0.25 * bz)},
  };
  out << fmt::format("charge qubit E_c = {:.6g} K, E_J = {:.6g} K{}\n", p.e_c, p.e_j,
                     p.charge_regime_warning() ? " (warning: E_c/E_J < 2)" : "");
  for (const auto& c : candidates) {
    const double tb = report(c.label, c.bz, c.bx, c.bn);
    out << fmt::format("  {} the reported lower bound 2.5π\n",
                       tb >= 2.5 * kPi ? "at or above" : "below");
  }
  return kExitOk;
}

int cmd_berry(const Resolved& cfg, std::ostream& out, int workers) {
  const BerryParams bp = cfg.berry();
  const BerryMeasurement m = measure_berry_phase(bp);
  out << fmt::format("theta_cone = {:.6f} rad, adiabaticity = {:.4g}\n", berry_cone_angle(bp),
                     bp.adiabaticity());
  out << fmt::format("ideal relative phase 4pi(1 - cos theta_cone) = {:.6f} (wrapped {:.6f})\n",
                     m.ideal_phase, wrap_angle(m.ideal_phase));
  out << fmt::format("measured relative phase = {:.6f}, error = {:.3e} ({:.3f}%)\n",
                     m.relative_phase, m.phase_error, 100.0 * m.phase_error / m.ideal_phase);
  const McOptions o = cfg.mc(workers);
  if (o.realizations == 0) return kExitOk;
  NoiseConfig base = cfg.noise("berry_noise_axes");
  base.db_max = cfg.kv.get_double("berry_db") * bp.delta;
  const MonteCarloResult r = mc_distance_berry(bp, berry_noise_model(bp, base), o);
  McOptions od = o;
  od.cell_index = 1;
  const MonteCarloResult d = mc_distance_berry_dynamic_equivalent(bp, base, od);
  out << fmt::format("berry MC: mean_D = {:.6g} +- {:.2g}, prediction = {:.6g}, rel_err = {:.4f}\n",
                     r.mean_d, r.std_err, r.prediction, r.rel_err);
  out << fmt::format("dynamic R_z(gamma) MC: mean_D = {:.6g} +- {:.2g}\n", d.mean_d, d.std_err);
  return kExitOk;
}

int cmd_phase_decompose(const Resolved& cfg, std::ostream& out) {
  const double theta = cfg.kv.get_angle("theta");
  const State psi0 = parse_state(cfg.kv.get("state"));
  const long steps = cfg.kv.get_int("steps");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  const AaDeviceSchedule dev = aa_schedule_for(theta, cfg.device());
  const Trajectory traj = simulate_trajectory(dev.schedule, psi0, static_cast<int>(steps));
  const PhaseDecomposition d = decompose_reporting(traj, 1e-9);
  out << fmt::format("cyclic = {} (defect {:.3e})\n", d.cyclic ? "yes" : "no", d.cyclicity_defect);
  out << fmt::format("dynamic phase = {:.10f}\n", d.dynamic_phase);
  if (!d.cyclic) {
    out << "total and geometric phase undefined for a non-cyclic evolution\n";
    return kExitOk;
  }
  out << fmt::format("total phase = {:.10f}\n", d.total_phase);
  out << fmt::format("geometric phase = {:.10f}\n", d.geometric_phase);
  const auto path = bloch_path(traj);
  const double omega = solid_angle(path, 1e-6);
  const double mismatch = std::abs(wrap_angle(d.geometric_phase + 0.5 * omega));
  out << fmt::format("solid angle = {:.10f}, -solid/2 = {:.10f}, mismatch = {:.3e}\n", omega,
                     -0.5 * omega, mismatch);
  return mismatch < 1e-4 ? kExitOk : kExitVerification;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric and dynamic phase gates under control-field noise"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path;
  int workers = 1;
  app.add_option("--config", config_path, "flat key = value file (or a previous output)");
  app.add_option("--out", out_path, "write the result to this file instead of stdout");
  app.add_option("--workers", workers, "worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  std::map<std::string, std::string> flags;
  for (const auto& k : config_keys()) {
    app.add_option_function<std::string>(
        std::string("--") + k.name, [&flags, name = std::string(k.name)](const std::string& v) {
          flags[name] = v;
        },
        k.help);
  }

  auto* path = app.add_subcommand("path", "Bloch trajectory of the AA pulse program (CSV)");
  auto* compile_cmd = app.add_subcommand("compile", "controlled-AA circuit before and after merging");
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo distance grid (CSV)");
  std::string kind_arg;
  sweep->add_option("kind", kind_arg, "aa, dynamic or berry");
  auto* bound = app.add_subcommand("bound", "crossover angle above which the AA gate can win");
  auto* berry = app.add_subcommand("berry", "adiabatic loop phase and noise");
  auto* decompose = app.add_subcommand("phase-decompose", "total, dynamic and geometric phases");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << valid_keys_text() << '\n';
    return kExitUsage;
  }

  try {
    Resolved cfg;
    for (const auto& k : config_keys()) cfg.kv.set(k.name, k.default_value);
    if (!config_path.empty()) {
      const KvConfig file = KvConfig::load(config_path);
      for (const auto& [key, value] : file.values()) {
        if (key == "command") continue;
        bool known = false;
        for (const auto& k : config_keys()) known = known || key == k.name;
        if (!known) throw UsageError("unknown config key \"" + key + "\"; " + valid_keys_text());
        cfg.kv.set(key, value);
      }
    }
    for (const auto& [key, value] : flags) cfg.kv.set(key, value);
    if (!kind_arg.empty()) cfg.kv.set("kind", kind_arg);

    std::ofstream file_out;
    std::ostream* os = &out;
    if (!out_path.empty()) {
      file_out.open(out_path);
      if (!file_out) throw UsageError("cannot open output file " + out_path);
      os = &file_out;
    }

    if (path->parsed()) {
      cfg.command = "path";
      return cmd_path(cfg, *os, err);
    }
    if (compile_cmd->parsed()) {
      cfg.command = "compile";
      return cmd_compile(cfg, *os);
    }
    if (sweep->parsed()) {
      cfg.command = "sweep";
      return cmd_sweep(cfg, *os, workers);
    }
    if (bound->parsed()) {
      cfg.command = "bound";
      return cmd_bound(cfg, *os);
    }
    if (berry->parsed()) {
      cfg.command = "berry";
      return cmd_berry(cfg, *os, workers);
    }
    if (decompose->parsed()) {
      cfg.command = "phase-decompose";
      return cmd_phase_decompose(cfg, *os);
    }
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerification;
  }
}

}  // namespace gphase
