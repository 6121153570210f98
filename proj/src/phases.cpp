#include "gphase/phases.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gphase {

void Trajectory::validate() const {
  if (qubits != 1 && qubits != 2) throw std::invalid_argument("trajectory: 1 or 2 qubits");
  if (times.empty() || states.size() != times.size()) {
    throw std::invalid_argument("trajectory: one state per sample time is required");
  }
  if (fields.size() + 1 != times.size()) {
    throw std::invalid_argument("trajectory: one field record per interval is required");
  }
  const int dim = qubits == 1 ? 2 : 4;
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].dim() != dim) throw std::invalid_argument("trajectory: state dimension");
    if (std::abs(states[k].norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("trajectory: state " + std::to_string(k) + " not normalized");
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw std::invalid_argument("trajectory: times must be strictly increasing");
    }
  }
}

Trajectory simulate_trajectory(const Schedule& schedule, const State& psi0,
                               int steps_per_segment) {
  if (steps_per_segment < 1) throw std::invalid_argument("steps_per_segment must be >= 1");
  const int dim = schedule.qubits == 1 ? 2 : 4;
  if (psi0.dim() != dim) throw std::invalid_argument("initial state dimension mismatch");

  Trajectory traj;
  traj.qubits = schedule.qubits;
  const std::size_t n = schedule.segments.size() * static_cast<std::size_t>(steps_per_segment) + 1;
  traj.times.reserve(n);
  traj.states.reserve(n);
  traj.fields.reserve(n - 1);
  traj.times.push_back(0.0);
  traj.states.push_back(psi0);

  double t0 = 0.0;
  for (const auto& seg : schedule.segments) {
    if (!(seg.duration > 0.0)) continue;
    const double h = seg.duration / steps_per_segment;
    const Unitary step = segment_propagator(seg, schedule.qubits, h);
    const IntervalField f{seg.fields, seg.coupling};
    for (int k = 1; k <= steps_per_segment; ++k) {
      traj.fields.push_back(f);
      traj.states.push_back(apply(step, traj.states.back()));
      traj.times.push_back(t0 + h * k);
    }
    t0 += seg.duration;
  }
  return traj;
}

double energy(const State& psi, const IntervalField& f, int qubits) {
  if (qubits == 1) {
    const BlochVector b = bloch_vector(psi);
    return 0.5 * f.fields[0].dot(b.as_vec());
  }
  PulseSegment seg;
  seg.fields = f.fields;
  seg.coupling = f.coupling;
  return psi.expectation(segment_hamiltonian(seg, qubits)).real();
}

double dynamic_phase(const Trajectory& traj) {
  double delta = 0.0;
  for (std::size_t k = 0; k < traj.fields.size(); ++k) {
    delta -= energy(traj.states[k], traj.fields[k], traj.qubits) *
             (traj.times[k + 1] - traj.times[k]);
  }
  return delta;
}

CyclicityCheck is_cyclic(const State& psi0, const State& psi_t, double tol) {
  const double defect = 1.0 - std::abs(psi0.inner(psi_t));
  return {defect < tol, defect};
}

double total_phase(const State& psi0, const State& psi_t, double tol) {
  const CyclicityCheck c = is_cyclic(psi0, psi_t, tol);
  if (!c.cyclic) {
    throw CyclicityError(c.defect, "evolution is not cyclic: 1 - |<psi0|psiT>| = " +
                                       std::to_string(c.defect));
  }
  return std::arg(psi0.inner(psi_t));
}

namespace {

void track_total_phase(const Trajectory& traj, PhaseDecomposition& d) {
  const State& psi0 = traj.states.front();
  double acc = 0.0;
  cplx prev = 1.0;
  d.tracked_valid = true;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const cplx ov = psi0.inner(traj.states[k]);
    if (std::abs(ov) < 1e-6) {
      d.tracked_valid = false;
      return;
    }
    const double inc = std::arg(ov / prev);
    if (std::abs(inc) >= kPi / 2) {
      d.tracked_valid = false;
      return;
    }
    acc += inc;
    prev = ov;
  }
  d.tracked_total_phase = acc;
}

}  // namespace

PhaseDecomposition decompose_reporting(const Trajectory& traj, double tol) {
  traj.validate();
  PhaseDecomposition d;
  const CyclicityCheck c = is_cyclic(traj.states.front(), traj.states.back(), tol);
  d.cyclic = c.cyclic;
  d.cyclicity_defect = c.defect;
  d.dynamic_phase = dynamic_phase(traj);
  if (!c.cyclic) return d;
  d.total_phase = std::arg(traj.states.front().inner(traj.states.back()));
  d.geometric_raw = d.total_phase - d.dynamic_phase;
  d.geometric_phase = wrap_angle(d.geometric_raw);
  track_total_phase(traj, d);
  return d;
}

PhaseDecomposition aa_phase(const Trajectory& traj, double tol) {
  PhaseDecomposition d = decompose_reporting(traj, tol);
  if (!d.cyclic) {
    throw CyclicityError(d.cyclicity_defect,
                         "AA phase undefined for a non-cyclic evolution: defect = " +
                             std::to_string(d.cyclicity_defect));
  }
  return d;
}

PhaseDecomposition decompose_schedule(const Schedule& schedule, const State& psi0, double tol) {
  int steps = 1000;
  Trajectory traj = simulate_trajectory(schedule, psi0, steps);
  double delta = dynamic_phase(traj);
  for (int doubling = 0; doubling < 6; ++doubling) {
    Trajectory finer = simulate_trajectory(schedule, psi0, steps * 2);
    const double d2 = dynamic_phase(finer);
    traj = std::move(finer);
    steps *= 2;
    const bool converged = std::abs(d2 - delta) < 1e-8;
    delta = d2;
    if (converged) break;
  }
  return aa_phase(traj, tol);
}

double parallel_transport_defect(const Trajectory& traj) {
  double m = 0.0;
  for (std::size_t k = 0; k < traj.fields.size(); ++k) {
    m = std::max(m, std::abs(energy(traj.states[k], traj.fields[k], traj.qubits)));
  }
  if (!traj.fields.empty()) {
    m = std::max(m, std::abs(energy(traj.states.back(), traj.fields.back(), traj.qubits)));
  }
  return m;
}

std::vector<BlochVector> bloch_path(const Trajectory& traj) {
  std::vector<BlochVector> path;
  path.reserve(traj.states.size());
  for (const auto& s : traj.states) path.push_back(bloch_vector(s));
  return path;
}

double signed_triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double triple = a.dot(b.cross(c));
  const double denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(triple, denom);
}

double solid_angle(std::span<const BlochVector> path, double close_tol) {
  if (path.size() < 3) return 0.0;
  auto unit = [](const BlochVector& b) {
    const double n = b.norm();
    if (n == 0.0) throw std::invalid_argument("solid_angle: zero Bloch vector on path");
    return b.as_vec() * (1.0 / n);
  };
  const Vec3 start = unit(path.front());
  const double gap = (unit(path.back()) - start).norm();
  if (gap > close_tol) {
    throw std::invalid_argument("solid_angle: path is not closed (gap " + std::to_string(gap) +
                                ")");
  }

  // The fan apex must stay away from the antipode of every vertex; pick the
  // best of a few candidates. Different apexes agree modulo 4 pi.
  const Vec3 candidates[] = {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  Vec3 apex = candidates[0];
  double best = -1.0;
  for (const auto& c : candidates) {
    double worst = 4.0;
    for (const auto& p : path) worst = std::min(worst, (c + unit(p)).norm());
    if (worst > best) {
      best = worst;
      apex = c;
    }
  }

  double omega = 0.0;
  Vec3 prev = start;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vec3 cur = unit(path[i]);
    omega += signed_triangle_solid_angle(apex, prev, cur);
    prev = cur;
  }
  omega += signed_triangle_solid_angle(apex, prev, start);
  // Fold into (-4 pi, 4 pi); the sum is only defined modulo 4 pi.
  omega = std::fmod(omega, 4.0 * kPi);
  return omega;
}

CancellationReport dynamic_phase_cancellation_check(const GateSequence& seq,
                                                    int steps_per_segment) {
  const GateSequence compiled = compile(seq);
  std::vector<double> mags;
  for (const auto& g : compiled.gates()) mags.push_back(g.field_magnitude > 0 ? g.field_magnitude : 1.0);
  const Schedule schedule = to_schedule(compiled, mags);
  const int dim = seq.qubits() == 1 ? 2 : 4;

  CancellationReport r;
  for (int b = 0; b < dim; ++b) {
    const State psi0 = State::basis(dim, b);
    const Trajectory traj = simulate_trajectory(schedule, psi0, steps_per_segment);
    const PhaseDecomposition d = decompose_reporting(traj, 1e-9);
    r.dynamic_phase.push_back(d.dynamic_phase);
    r.total_phase.push_back(d.total_phase);
    r.geometric_phase.push_back(d.geometric_phase);
    r.cyclicity_defect.push_back(d.cyclicity_defect);
  }
  return r;
}

}  // namespace gphase
