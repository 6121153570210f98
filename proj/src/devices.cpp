#include "gphase/devices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gphase {

namespace {

double fold_2pi(double a) {
  double r = std::fmod(a, 2.0 * kPi);
  if (r < 0) r += 2.0 * kPi;
  if (r >= 2.0 * kPi) r = 0.0;
  return r;
}

PulseSegment field_segment(const Vec3& b, double duration) {
  PulseSegment s;
  s.fields[0] = b;
  s.duration = duration;
  return s;
}

}  // namespace

void ChargeQubitParams::validate() const {
  if (!(e_c > 0.0) || !(e_j > 0.0) || !std::isfinite(e_c) || !std::isfinite(e_j)) {
    throw std::invalid_argument("charge qubit energies E_c and E_J must be positive");
  }
}

ChargeFields charge_fields(const ChargeQubitParams& p, const ControlPoint& c) {
  return {2.0 * p.e_j * std::cos(kPi * c.f), 4.0 * p.e_c * (1.0 - 2.0 * c.n_g)};
}

double theta_of(const ChargeQubitParams& p, const ControlPoint& c) {
  const double num = 2.0 * p.e_c * (2.0 * c.n_g - 1.0);
  const double den = p.e_j * std::cos(kPi * c.f);
  // cos(pi f) at f = 1/2 is ~6e-17 in floating point; treat that as zero.
  const double tiny = 1e-12 * (p.e_c + p.e_j);
  if (std::abs(num) < tiny && std::abs(den) < tiny) {
    throw std::domain_error("theta undefined: both field components vanish");
  }
  return fold_2pi(std::atan2(num, den));
}

double axis_angle_of(const ChargeQubitParams& p, const ControlPoint& c) {
  return fold_2pi(theta_of(p, c) - kPi);
}

double b_n(const ChargeQubitParams& p, const ControlPoint& c) {
  const ChargeFields f = charge_fields(p, c);
  return std::hypot(f.b_x, f.b_z);
}

double max_field_along(const ChargeQubitParams& p, double axis_angle) {
  p.validate();
  const double cx = std::abs(std::cos(axis_angle));
  const double sz = std::abs(std::sin(axis_angle));
  double b = std::numeric_limits<double>::infinity();
  if (cx > 0.0) b = std::min(b, p.max_bx() / cx);
  if (sz > 0.0) b = std::min(b, p.max_bz() / sz);
  return b;
}

AaDeviceSchedule aa_schedule_for(double theta, const ChargeQubitParams& p) {
  p.validate();
  if (!std::isfinite(theta)) throw std::domain_error("aa_schedule_for: theta must be finite");
  const Vec3 n = aa_axis(theta);
  const double bn = max_field_along(p, theta);
  if (!std::isfinite(bn) || !(bn > 0.0)) {
    throw std::domain_error("aa_schedule_for: no control point realizes the requested axis");
  }
  // Field B = bn * n must satisfy |B_x| <= 2 E_J and |B_z| <= 4 E_c.
  const double bx_n = bn * n.x;
  const double bz_n = bn * n.z;
  const double cos_pf = std::clamp(bx_n / p.max_bx(), -1.0, 1.0);
  ControlPoint cp;
  cp.f = std::acos(cos_pf) / kPi;
  cp.n_g = 0.5 * (1.0 - bz_n / p.max_bz());
  if (!cp.in_nominal_range()) {
    throw std::domain_error("aa_schedule_for: control point outside n_g, f in [0, 1]");
  }

  AaDeviceSchedule out;
  out.r_x_point = {0.5, 0.0};
  out.r_n_point = cp;
  out.b_x = p.max_bx();
  out.b_n = bn;
  out.schedule = aa_schedule_with_fields(theta, out.b_x, out.b_n);
  out.total_time = out.schedule.total_time();
  return out;
}

Schedule aa_schedule_with_fields(double theta, double b_x, double b_n) {
  if (!(b_x > 0.0) || !(b_n > 0.0)) {
    throw std::invalid_argument("aa schedule: fields must be positive");
  }
  Schedule s;
  s.qubits = 1;
  const double tx = 0.5 * kPi / b_x;
  s.segments.push_back(field_segment({b_x, 0, 0}, tx));
  s.segments.push_back(field_segment(aa_axis(theta) * b_n, kPi / b_n));
  s.segments.push_back(field_segment({b_x, 0, 0}, tx));
  return s;
}

Schedule dynamic_schedule(double theta, double b_z) {
  if (!(b_z > 0.0)) throw std::invalid_argument("dynamic schedule: B_z must be positive");
  Schedule s;
  s.qubits = 1;
  if (theta != 0.0) {
    const double sign = theta > 0 ? 1.0 : -1.0;
    s.segments.push_back(field_segment({0, 0, sign * b_z}, std::abs(theta) / b_z));
  }
  return s;
}

void BerryParams::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("berry: delta must be positive");
  if (!(omega1_max >= 0.0)) throw std::invalid_argument("berry: omega1_max must be >= 0");
  if (!(t_tilt > 0.0) || !(t_sweep > 0.0)) {
    throw std::invalid_argument("berry: tilt and sweep durations must be positive");
  }
  if (n_tilt < 1 || n_sweep < 1) throw std::invalid_argument("berry: step counts must be >= 1");
}

double BerryParams::adiabaticity() const {
  const double cone = std::atan2(omega1_max, delta);
  const double tilt = cone / (t_tilt * delta);
  const double sweep = 2.0 * kPi * std::sin(cone) / (t_sweep * std::hypot(delta, omega1_max));
  return std::max(tilt, sweep);
}

double berry_cone_angle(const BerryParams& bp) {
  return std::acos(bp.delta / std::hypot(bp.delta, bp.omega1_max));
}

double berry_phase_ideal(double theta_cone) { return 4.0 * kPi * (1.0 - std::cos(theta_cone)); }

Schedule berry_schedule(const BerryParams& bp) {
  bp.validate();
  std::vector<PulseSegment> loop;
  loop.reserve(static_cast<std::size_t>(bp.n_tilt) + bp.n_sweep);

  const double dt_tilt = bp.t_tilt / bp.n_tilt;
  for (int k = 0; k < bp.n_tilt; ++k) {
    const double w = bp.omega1_max * (k + 0.5) / bp.n_tilt;
    PulseSegment s = field_segment({w, 0, bp.delta}, dt_tilt);
    s.noise_channel = kBerryTiltChannel;
    loop.push_back(s);
  }
  const double dt_sweep = bp.t_sweep / bp.n_sweep;
  for (int k = 0; k < bp.n_sweep; ++k) {
    const double phi = 2.0 * kPi * (k + 0.5) / bp.n_sweep;
    const double w = bp.omega1_max;
    PulseSegment s = field_segment({w * std::cos(phi), w * std::sin(phi), bp.delta}, dt_sweep);
    s.noise_channel = kBerrySweepChannel;
    loop.push_back(s);
  }

  const double fast = 100.0 * std::max(bp.delta, bp.omega1_max);
  PulseSegment ry = field_segment({0, fast, 0}, kPi / fast);
  ry.noisy = bp.noisy_ry;
  ry.noise_channel = kBerryTiltChannel;

  Schedule s;
  s.qubits = 1;
  s.segments.reserve(2 * loop.size() + 2);
  s.segments.insert(s.segments.end(), loop.begin(), loop.end());
  s.segments.push_back(ry);
  s.segments.insert(s.segments.end(), loop.rbegin(), loop.rend());
  s.segments.push_back(ry);
  return s;
}

BerryMeasurement measure_berry_phase(const BerryParams& bp) {
  BerryMeasurement m;
  m.propagator = evaluate(berry_schedule(bp));
  m.relative_phase = std::arg(m.propagator(1, 1) / m.propagator(0, 0));
  m.ideal_phase = berry_phase_ideal(berry_cone_angle(bp));
  m.phase_error = std::abs(wrap_angle(m.relative_phase - m.ideal_phase));
  m.off_diagonal = std::max(std::abs(m.propagator(0, 1)), std::abs(m.propagator(1, 0)));
  return m;
}

}  // namespace gphase
