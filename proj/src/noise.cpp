#include "gphase/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gphase {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 2x2 row-major block used on the single-qubit hot path.
struct M2 {
  cplx a, b, c, d;
};

inline M2 mul(const M2& x, const M2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

inline M2 step2(const Vec3& b, double dt) {
  const double n = b.norm();
  if (n == 0.0) return {1.0, 0.0, 0.0, 1.0};
  const double half = 0.5 * n * dt;
  const double c = std::cos(half);
  const double s = std::sin(half) / n;
  // cos I - i sin (b.sigma)/|b|
  return {cplx(c, -s * b.z), cplx(-s * b.y, -s * b.x), cplx(s * b.y, -s * b.x), cplx(c, s * b.z)};
}

inline double drift2(const M2& u) {
  const double d00 = std::norm(u.a) + std::norm(u.c) - 1.0;
  const double d11 = std::norm(u.b) + std::norm(u.d) - 1.0;
  const double off = std::abs(std::conj(u.a) * u.b + std::conj(u.c) * u.d);
  return std::max({std::abs(d00), std::abs(d11), off});
}

M2 to_m2(const ComplexMatrix& m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

ComplexMatrix from_m2(const M2& u) {
  const cplx e[] = {u.a, u.b, u.c, u.d};
  return ComplexMatrix(2, e);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : seed_(master_seed), stream_(stream_index) {}

void RngStream::refill() {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(block_),
                                   static_cast<std::uint32_t>(block_ >> 32),
                                   static_cast<std::uint32_t>(stream_),
                                   static_cast<std::uint32_t>(stream_ >> 32)};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_),
                               static_cast<std::uint32_t>(seed_ >> 32)};
  buf_ = Philox4x32::block(ctr, key);
  ++block_;
  used_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (used_ > 2) refill();
  const std::uint64_t v = (static_cast<std::uint64_t>(buf_[used_ + 1]) << 32) | buf_[used_];
  used_ += 2;
  ++draws_;
  return v;
}

double RngStream::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::symmetric(double half_width) { return half_width * (2.0 * uniform01() - 1.0); }

NoiseAxes NoiseAxes::parse(const std::string& spec) {
  NoiseAxes a;
  if (spec.empty() || spec == "none") return a;
  for (char ch : spec) {
    switch (ch) {
      case 'x': a.x = true; break;
      case 'y': a.y = true; break;
      case 'z': a.z = true; break;
      default:
        throw std::invalid_argument("noise axes must be a subset of \"xyz\", got \"" + spec + "\"");
    }
  }
  return a;
}

std::string NoiseAxes::str() const {
  std::string s;
  if (x) s += 'x';
  if (y) s += 'y';
  if (z) s += 'z';
  return s.empty() ? "none" : s;
}

double NoiseConfig::dt_from_gamma(double e_c, double gamma) {
  if (!(e_c > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("dt_from_gamma: E_c and gamma must be positive");
  }
  return 1.0 / (4.0 * e_c * gamma);
}

void NoiseConfig::validate() const {
  if (!(db_max >= 0.0) || !std::isfinite(db_max)) {
    throw std::invalid_argument("noise amplitude db_max must be finite and >= 0");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("noise correlation time dt must be positive");
  }
  if (identical_xy) {
    for (const auto& a : axes) {
      if (a.x != a.y) {
        throw std::invalid_argument("identical_xy requires x and y noise enabled together");
      }
    }
  }
}

const NoiseConfig& NoiseModel::channel(int c) const {
  if (c < 0 || static_cast<std::size_t>(c) >= channels.size()) {
    throw std::out_of_range("noise channel " + std::to_string(c) + " not configured");
  }
  return channels[c];
}

Vec3 draw_fluctuation(const NoiseConfig& cfg, RngStream& rng, int qubit) {
  const NoiseAxes& a = cfg.axes.at(qubit);
  Vec3 v;
  if (cfg.identical_xy && a.x && a.y) {
    v.x = v.y = rng.symmetric(cfg.db_max);
  } else {
    if (a.x) v.x = rng.symmetric(cfg.db_max);
    if (a.y) v.y = rng.symmetric(cfg.db_max);
  }
  if (a.z) v.z = rng.symmetric(cfg.db_max);
  return v;
}

std::vector<Vec3> sample_noise(const NoiseConfig& cfg, int n_steps, RngStream& rng, int qubit) {
  if (n_steps < 0) throw std::invalid_argument("sample_noise: negative step count");
  cfg.validate();
  std::vector<Vec3> out;
  out.reserve(n_steps);
  for (int k = 0; k < n_steps; ++k) out.push_back(draw_fluctuation(cfg, rng, qubit));
  return out;
}

StepCount step_count(double segment_duration, double target_dt) {
  if (!(segment_duration >= 0.0)) throw std::invalid_argument("step_count: negative duration");
  if (!(target_dt > 0.0)) throw std::invalid_argument("step_count: dt must be positive");
  const long n = std::max(1L, std::lround(segment_duration / target_dt));
  return {n, segment_duration / static_cast<double>(n)};
}

NoisyRun noisy_propagator(const Schedule& schedule, const NoiseModel& model, RngStream& rng,
                          const NoisyOptions& opts) {
  if (schedule.qubits != 1 && schedule.qubits != 2) {
    throw std::invalid_argument("noisy_propagator: 1 or 2 qubits");
  }
  for (const auto& c : model.channels) c.validate();
  const int dim = schedule.qubits == 1 ? 2 : 4;

  NoisyRun run;
  run.segment_steps.reserve(schedule.segments.size());
  if (opts.record_from) {
    if (opts.record_from->dim() != dim) {
      throw std::invalid_argument("noisy_propagator: recording state has the wrong dimension");
    }
    Trajectory t;
    t.qubits = schedule.qubits;
    t.times.push_back(0.0);
    t.states.push_back(*opts.record_from);
    run.trajectory = std::move(t);
  }

  auto record = [&](const Unitary& step, const IntervalField& f, double t_end) {
    Trajectory& tr = *run.trajectory;
    tr.states.push_back(apply(step, tr.states.back()));
    tr.fields.push_back(f);
    tr.times.push_back(t_end);
  };

  if (opts.fixed_steps && *opts.fixed_steps < 1) {
    throw std::invalid_argument("noisy_propagator: fixed_steps must be >= 1");
  }
  auto steps_for = [&](const PulseSegment& seg, const NoiseConfig& cfg) {
    if (opts.fixed_steps) return StepCount{*opts.fixed_steps, seg.duration / *opts.fixed_steps};
    return step_count(seg.duration, cfg.dt);
  };

  double t = 0.0;
  if (dim == 2 && !opts.record_from) {
    // Hot path for Monte Carlo sampling.
    M2 u{1.0, 0.0, 0.0, 1.0};
    for (const auto& seg : schedule.segments) {
      if (!(seg.duration > 0.0)) {
        run.segment_steps.push_back(0);
        continue;
      }
      if (!seg.noisy) {
        u = mul(step2(seg.fields[0], seg.duration), u);
        run.segment_steps.push_back(1);
        ++run.steps;
      } else {
        const NoiseConfig& cfg = model.channel(seg.noise_channel);
        const StepCount sc = steps_for(seg, cfg);
        for (long k = 0; k < sc.n; ++k) {
          u = mul(step2(seg.fields[0] + draw_fluctuation(cfg, rng, 0), sc.dt), u);
        }
        run.segment_steps.push_back(sc.n);
        run.steps += sc.n;
      }
      if (drift2(u) > opts.unitarity_tol) {
        u = to_m2(polar_unitary(from_m2(u)));
        ++run.reunitarizations;
      }
    }
    run.propagator = unchecked_unitary(from_m2(u)).with_phase(schedule.global_phase);
    return run;
  }

  Unitary u = Unitary::identity(dim);
  std::array<Vec3, 2> offsets{};
  for (const auto& seg : schedule.segments) {
    if (!(seg.duration > 0.0)) {
      run.segment_steps.push_back(0);
      continue;
    }
    if (!seg.noisy) {
      const Unitary step = segment_propagator(seg, schedule.qubits, seg.duration);
      u = step * u;
      t += seg.duration;
      if (run.trajectory) record(step, {seg.fields, seg.coupling}, t);
      run.segment_steps.push_back(1);
      ++run.steps;
    } else {
      const NoiseConfig& cfg = model.channel(seg.noise_channel);
      const StepCount sc = steps_for(seg, cfg);
      for (long k = 0; k < sc.n; ++k) {
        for (int q = 0; q < schedule.qubits; ++q) offsets[q] = draw_fluctuation(cfg, rng, q);
        const std::span<const Vec3> off(offsets.data(), schedule.qubits);
        const Unitary step = segment_propagator(seg, schedule.qubits, sc.dt, off);
        u = step * u;
        t += sc.dt;
        if (run.trajectory) {
          IntervalField f{seg.fields, seg.coupling};
          for (int q = 0; q < schedule.qubits; ++q) f.fields[q] = f.fields[q] + offsets[q];
          record(step, f, t);
        }
      }
      run.segment_steps.push_back(sc.n);
      run.steps += sc.n;
    }
    if (u.unitarity_error() > opts.unitarity_tol) {
      u = unchecked_unitary(polar_unitary(u.matrix()));
      ++run.reunitarizations;
    }
  }
  run.propagator = u.with_phase(schedule.global_phase);
  return run;
}

}  // namespace gphase
