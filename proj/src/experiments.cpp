#include "gphase/experiments.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace gphase {

std::string to_string(MeasuredGate g) {
  switch (g) {
    case MeasuredGate::kAa: return "aa";
    case MeasuredGate::kDynamic: return "dynamic";
    case MeasuredGate::kBerry: return "berry";
  }
  return "?";
}

MeasuredGate parse_measured_gate(const std::string& s) {
  if (s == "aa") return MeasuredGate::kAa;
  if (s == "dynamic") return MeasuredGate::kDynamic;
  if (s == "berry") return MeasuredGate::kBerry;
  throw std::invalid_argument("gate kind must be aa, dynamic or berry, got \"" + s + "\"");
}

std::string to_string(Winner w) {
  switch (w) {
    case Winner::kAa: return "aa";
    case Winner::kDynamic: return "dynamic";
    case Winner::kTie: return "tie";
  }
  return "?";
}

FieldAssignment FieldAssignment::from_device(const ChargeQubitParams& p) {
  p.validate();
  FieldAssignment f;
  f.device = p;
  f.b_x = p.max_bx();
  f.b_z = p.max_bz();
  return f;
}

FieldAssignment FieldAssignment::matched(double b) {
  FieldAssignment f;
  f.b_x = f.b_z = b;
  f.b_n = b;
  return f;
}

double FieldAssignment::b_n_for(double axis_angle) const {
  if (b_n) return *b_n;
  return max_field_along(device, axis_angle);
}

double predict_aa(double b_x, double b_n, double db_max, double n_x) {
  if (!(b_x > 0.0) || !(b_n > 0.0)) throw std::invalid_argument("predict_aa: fields must be positive");
  if (!(n_x > 0.0)) throw std::invalid_argument("predict_aa: N_x must be positive");
  const double pi3 = kPi * kPi * kPi;
  return std::sqrt(pi3 / 12.0 * (1.0 / (b_x * b_x) + 1.0 / (b_x * b_n))) * db_max / std::sqrt(n_x);
}

double predict_dynamic(double theta, double b_z, double db_max, double n_z) {
  if (!(b_z > 0.0)) throw std::invalid_argument("predict_dynamic: B_z must be positive");
  if (!(n_z > 0.0)) throw std::invalid_argument("predict_dynamic: N_z must be positive");
  return std::sqrt(kPi / 6.0) * std::abs(theta) * (db_max / b_z) / std::sqrt(n_z);
}

double predict_berry(double db_max, double t_tilt, double n_tilt, double t_sweep, double n_sweep) {
  if (!(n_tilt > 0.0) || !(n_sweep > 0.0)) {
    throw std::invalid_argument("predict_berry: step counts must be positive");
  }
  return 4.0 / std::sqrt(3.0 * kPi) * db_max *
         std::sqrt(t_tilt * t_tilt / n_tilt + t_sweep * t_sweep / n_sweep);
}

double theta_bound(double b_z, double b_x, double b_n) {
  if (!(b_z > 0.0) || !(b_x > 0.0) || !(b_n > 0.0)) {
    throw std::invalid_argument("theta_bound: fields must be positive");
  }
  return kPi * (b_z / b_x + b_z / b_n);
}

namespace {

void finish_statistics(MonteCarloResult& r) {
  const std::size_t n = r.samples.size();
  r.n = static_cast<int>(n);
  double sum = 0.0;
  for (double s : r.samples) sum += s;
  r.mean_d = n ? sum / static_cast<double>(n) : 0.0;
  double ss = 0.0;
  for (double s : r.samples) ss += (s - r.mean_d) * (s - r.mean_d);
  r.std_err = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  r.rel_err = r.prediction > 0.0 ? std::abs(r.mean_d - r.prediction) / r.prediction : 0.0;
}

template <class F>
void parallel_for(int n, int workers, F&& body) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t stream_of(std::uint64_t cell, int realization) {
  return (cell << 32) | static_cast<std::uint32_t>(realization);
}

NoiseModel single_channel(const NoiseConfig& noise) { return NoiseModel(noise); }

}  // namespace

MonteCarloResult mc_distance(const Schedule& schedule, const Unitary& target,
                             const NoiseModel& model, const McOptions& opts) {
  if (opts.realizations < 1) throw std::invalid_argument("mc_distance: realizations must be >= 1");
  MonteCarloResult r;
  r.seed = opts.seed;
  r.samples.assign(static_cast<std::size_t>(opts.realizations), 0.0);
  std::vector<long> steps(static_cast<std::size_t>(opts.realizations), 0);

  NoisyOptions nopts;
  nopts.fixed_steps = opts.fixed_steps;
  parallel_for(opts.realizations, opts.workers, [&](int i) {
    RngStream rng(opts.seed, stream_of(opts.cell_index, i));
    const NoisyRun run = noisy_propagator(schedule, model, rng, nopts);
    r.samples[i] = trace_distance(run.propagator, target);
    steps[i] = run.steps;
  });
  r.steps_per_realization = steps.front();

  if (opts.record_from) {
    RngStream rng(opts.seed, stream_of(opts.cell_index, 0));
    NoisyOptions rec = nopts;
    rec.record_from = opts.record_from;
    const NoisyRun run = noisy_propagator(schedule, model, rng, rec);
    for (const auto& s : run.trajectory->states) r.sample_path.push_back(bloch_vector(s));
  }
  finish_statistics(r);
  return r;
}

long aa_rx_steps(double theta, const NoiseConfig& noise, const FieldAssignment& fields,
                 const McOptions& opts) {
  (void)theta;
  if (opts.fixed_steps) return *opts.fixed_steps;
  return step_count(0.5 * kPi / fields.b_x, noise.dt).n;
}

long dynamic_steps(double theta, const NoiseConfig& noise, const FieldAssignment& fields,
                   const McOptions& opts) {
  if (opts.fixed_steps) return *opts.fixed_steps;
  return step_count(std::abs(theta) / fields.b_z, noise.dt).n;
}

MonteCarloResult mc_distance_aa(double theta, const NoiseConfig& noise,
                                const FieldAssignment& fields, const McOptions& opts) {
  const double axis = 0.5 * theta;
  const double bn = fields.b_n_for(axis);
  const Schedule s = aa_schedule_with_fields(axis, fields.b_x, bn);
  MonteCarloResult r = mc_distance(s, rotation({0, 0, 1}, theta), single_channel(noise), opts);
  r.gate = MeasuredGate::kAa;
  r.theta = theta;
  r.db_max = noise.db_max;
  r.prediction = predict_aa(fields.b_x, bn, noise.db_max,
                            static_cast<double>(aa_rx_steps(theta, noise, fields, opts)));
  finish_statistics(r);
  return r;
}

MonteCarloResult mc_distance_dynamic(double theta, const NoiseConfig& noise,
                                     const FieldAssignment& fields, const McOptions& opts) {
  const Schedule s = dynamic_schedule(theta, fields.b_z);
  MonteCarloResult r = mc_distance(s, rotation({0, 0, 1}, theta), single_channel(noise), opts);
  r.gate = MeasuredGate::kDynamic;
  r.theta = theta;
  r.db_max = noise.db_max;
  r.prediction = theta == 0.0 ? 0.0
                              : predict_dynamic(theta, fields.b_z, noise.db_max,
                                                static_cast<double>(dynamic_steps(theta, noise, fields, opts)));
  finish_statistics(r);
  return r;
}

NoiseModel berry_noise_model(const BerryParams& bp, const NoiseConfig& base) {
  bp.validate();
  NoiseConfig tilt = base, sweep = base;
  tilt.dt = bp.t_tilt / bp.n_tilt;
  sweep.dt = bp.t_sweep / bp.n_sweep;
  NoiseModel m;
  m.channels.resize(2);
  m.channels[kBerryTiltChannel] = tilt;
  m.channels[kBerrySweepChannel] = sweep;
  return m;
}

MonteCarloResult mc_distance_berry(const BerryParams& bp, const NoiseModel& model,
                                   const McOptions& opts) {
  const Schedule s = berry_schedule(bp);
  MonteCarloResult r = mc_distance(s, evaluate(s), model, opts);
  r.gate = MeasuredGate::kBerry;
  r.theta = berry_phase_ideal(berry_cone_angle(bp));
  r.db_max = model.channel(kBerryTiltChannel).db_max;
  r.prediction = predict_berry(r.db_max, bp.t_tilt, bp.n_tilt, bp.t_sweep, bp.n_sweep);
  r.berry = bp;
  finish_statistics(r);
  return r;
}

MonteCarloResult mc_distance_berry_dynamic_equivalent(const BerryParams& bp,
                                                      const NoiseConfig& base,
                                                      const McOptions& opts) {
  bp.validate();
  NoiseConfig noise = base;
  noise.dt = bp.t_sweep / bp.n_sweep;
  FieldAssignment f;
  f.b_z = bp.delta;
  return mc_distance_dynamic(berry_phase_ideal(berry_cone_angle(bp)), noise, f, opts);
}

WelchInterval welch_interval(const MonteCarloResult& a, const MonteCarloResult& b,
                             double confidence) {
  WelchInterval w;
  w.difference = a.mean_d - b.mean_d;
  const double va = a.std_err * a.std_err, vb = b.std_err * b.std_err;
  w.combined_stderr = std::sqrt(va + vb);
  if (w.combined_stderr == 0.0 || a.n < 2 || b.n < 2) {
    w.low = w.high = w.difference;
    w.dof = std::numeric_limits<double>::infinity();
    return w;
  }
  w.dof = (va + vb) * (va + vb) / (va * va / (a.n - 1) + vb * vb / (b.n - 1));
  const boost::math::students_t dist(w.dof);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - confidence)));
  w.low = w.difference - t * w.combined_stderr;
  w.high = w.difference + t * w.combined_stderr;
  return w;
}

CriterionReport criterion_check(double theta, const NoiseConfig& noise,
                                const FieldAssignment& fields, const McOptions& opts) {
  CriterionReport c;
  c.theta = theta;
  McOptions dyn_opts = opts;
  dyn_opts.cell_index = opts.cell_index + 1;  // independent streams for the second gate
  c.aa = mc_distance_aa(theta, noise, fields, opts);
  c.dynamic = mc_distance_dynamic(theta, noise, fields, dyn_opts);
  c.welch = welch_interval(c.aa, c.dynamic);
  if (c.welch.low > 0.0) {
    c.winner = Winner::kDynamic;
  } else if (c.welch.high < 0.0) {
    c.winner = Winner::kAa;
  } else {
    c.winner = Winner::kTie;
  }
  c.separation = c.welch.combined_stderr > 0.0 ? c.welch.difference / c.welch.combined_stderr : 0.0;
  c.theta_bound = theta_bound(fields.b_z, fields.b_x, fields.b_n_for(0.5 * theta));
  return c;
}

CrossoverReport crossover_scan(const std::vector<double>& thetas, const NoiseConfig& noise,
                               const FieldAssignment& fields, const McOptions& opts) {
  CrossoverReport rep;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    McOptions o = opts;
    o.cell_index = opts.cell_index + 2 * i;
    rep.points.push_back(criterion_check(thetas[i], noise, fields, o));
  }
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    const double d0 = rep.points[i - 1].welch.difference;
    const double d1 = rep.points[i].welch.difference;
    if (d0 > 0.0 && d1 <= 0.0) {
      const double t0 = rep.points[i - 1].theta, t1 = rep.points[i].theta;
      rep.crossover = t0 + (t1 - t0) * d0 / (d0 - d1);
      break;
    }
  }
  return rep;
}

void SweepGrid::validate() const {
  if (db_values.empty()) throw std::invalid_argument("sweep grid: db_values must be non-empty");
  if (realizations < 2) throw std::invalid_argument("sweep grid: realizations must be >= 2");
  for (double d : db_values) {
    if (!(d >= 0.0)) throw std::invalid_argument("sweep grid: db values must be >= 0");
  }
  noise.validate();
}

std::vector<MonteCarloResult> run_sweep(const SweepGrid& grid, MeasuredGate kind,
                                        const FieldAssignment& fields, const BerryParams& berry,
                                        std::uint64_t seed, int workers) {
  grid.validate();
  std::vector<MonteCarloResult> rows;
  McOptions opts;
  opts.realizations = grid.realizations;
  opts.seed = seed;
  opts.workers = workers;

  if (kind == MeasuredGate::kBerry) {
    for (std::size_t j = 0; j < grid.db_values.size(); ++j) {
      NoiseConfig base = grid.noise;
      base.db_max = grid.db_values[j] * berry.delta;
      opts.cell_index = j;
      rows.push_back(mc_distance_berry(berry, berry_noise_model(berry, base), opts));
    }
    return rows;
  }

  if (grid.theta_values.empty()) throw std::invalid_argument("sweep grid: theta_values must be non-empty");
  const double unit = fields.b_z;
  for (std::size_t i = 0; i < grid.theta_values.size(); ++i) {
    for (std::size_t j = 0; j < grid.db_values.size(); ++j) {
      NoiseConfig noise = grid.noise;
      noise.db_max = grid.db_values[j] * unit;
      opts.cell_index = i * grid.db_values.size() + j;
      const double theta = grid.theta_values[i];
      rows.push_back(kind == MeasuredGate::kAa ? mc_distance_aa(theta, noise, fields, opts)
                                               : mc_distance_dynamic(theta, noise, fields, opts));
    }
  }
  return rows;
}

std::vector<std::string> csv_columns(bool berry) {
  std::vector<std::string> c = {"gate_kind", "theta",  "db_max",   "n_real", "mean_D",
                                "stderr",    "prediction", "rel_err", "seed"};
  if (berry) {
    for (const char* k : {"t_tilt", "t_sweep", "n_tilt", "n_sweep", "theta_cone"}) c.emplace_back(k);
  }
  return c;
}

void write_csv(std::ostream& os, const std::vector<MonteCarloResult>& rows,
               const std::vector<std::pair<std::string, std::string>>& header) {
  for (const auto& [k, v] : header) os << "#@ " << k << " = " << v << '\n';
  const bool berry = !rows.empty() && rows.front().berry.has_value();
  const auto cols = csv_columns(berry);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rows) {
    os << fmt::format("{},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{}", to_string(r.gate),
                      r.theta, r.db_max, r.n, r.mean_d, r.std_err, r.prediction, r.rel_err, r.seed);
    if (berry) {
      const BerryParams& b = r.berry.value();
      os << fmt::format(",{:.17g},{:.17g},{},{},{:.17g}", b.t_tilt, b.t_sweep, b.n_tilt, b.n_sweep,
                        berry_cone_angle(b));
    }
    os << '\n';
  }
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_power_law: need at least two (x, y) pairs");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_power_law: data must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_power_law: x values must differ");
  PowerLawFit f;
  f.exponent = (n * sxy - sx * sy) / denom;
  f.prefactor = std::exp((sy - f.exponent * sx) / n);
  return f;
}

}  // namespace gphase
