#include "gphase/gates.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace gphase {

namespace {

constexpr Vec3 kX{1, 0, 0};
constexpr Vec3 kZ{0, 0, 1};

void validate_gate(const GateSpec& g, int qubits) {
  if (!std::isfinite(g.angle)) throw std::invalid_argument("gate angle must be finite");
  if (g.kind == GateKind::kZZ) {
    if (qubits != 2) throw std::invalid_argument("C_P gate requires a two-qubit register");
    return;
  }
  if (g.target < 1 || g.target > qubits) {
    throw std::invalid_argument("gate target " + std::to_string(g.target) + " outside a " +
                                std::to_string(qubits) + "-qubit register");
  }
  if (!(g.axis.norm() > 0.0)) throw std::invalid_argument("rotation axis must be nonzero");
}

Vec3 unit(const Vec3& v) { return v * (1.0 / v.norm()); }

/// +1 / -1 when the unit axes are parallel / antiparallel, 0 otherwise.
int axis_relation(const Vec3& a, const Vec3& b, double tol) {
  const Vec3 ua = unit(a), ub = unit(b);
  if (ua.cross(ub).norm() > tol) return 0;
  return ua.dot(ub) > 0 ? 1 : -1;
}

/// k if angle = 2 pi k within tol, nullopt otherwise.
std::optional<long> full_turns(double angle, double tol) {
  const double k = std::round(angle / (2.0 * kPi));
  if (std::abs(angle - 2.0 * kPi * k) <= tol) return static_cast<long>(k);
  return std::nullopt;
}

}  // namespace

GateSequence::GateSequence(int qubits, std::vector<GateSpec> gates, double global_phase)
    : qubits_(qubits), gates_(std::move(gates)), global_phase_(global_phase) {
  if (qubits != 1 && qubits != 2) throw std::invalid_argument("only 1 or 2 qubits are supported");
  if (gates_.empty()) throw std::invalid_argument("gate sequence must be non-empty");
  for (const auto& g : gates_) validate_gate(g, qubits_);
}

GateSequence GateSequence::identity(int qubits, double global_phase) {
  if (qubits != 1 && qubits != 2) throw std::invalid_argument("only 1 or 2 qubits are supported");
  GateSequence s;
  s.qubits_ = qubits;
  s.global_phase_ = global_phase;
  return s;
}

GateSequence GateSequence::then(const GateSequence& other) const {
  const int q = std::max(qubits_, other.qubits_);
  GateSequence s = identity(q, global_phase_ + other.global_phase_);
  s.gates_ = gates_;
  s.gates_.insert(s.gates_.end(), other.gates_.begin(), other.gates_.end());
  return s;
}

GateSequence GateSequence::on_qubit(int target) const {
  GateSequence s = *this;
  s.qubits_ = std::max(qubits_, target);
  for (auto& g : s.gates_)
    if (g.kind == GateKind::kRotation) g.target = target;
  for (const auto& g : s.gates_) validate_gate(g, s.qubits_);
  return s;
}

Unitary gate_unitary(const GateSpec& g, int qubits) {
  validate_gate(g, qubits);
  if (g.kind == GateKind::kZZ) return cphase(g.angle);
  const Unitary r = rotation(g.axis, g.angle);
  if (qubits == 1) return r;
  return g.target == 1 ? tensor(r, Unitary::identity(2)) : tensor(Unitary::identity(2), r);
}

Unitary evaluate(const GateSequence& seq) {
  const int dim = seq.qubits() == 1 ? 2 : 4;
  Unitary u = Unitary::identity(dim);
  for (const auto& g : seq.gates()) u = gate_unitary(g, seq.qubits()) * u;
  return u.with_phase(seq.global_phase());
}

Vec3 aa_axis(double theta) { return {-std::cos(theta), 0.0, std::sin(theta)}; }

GateSequence aa_sequence(double theta) { return perturbed_aa_sequence(theta, 0.0); }

GateSequence dynamic_z(double theta) { return GateSequence(1, {GateSpec::rot(1, kZ, theta)}); }

GateSequence perturbed_aa_sequence(double theta, double epsilon) {
  return GateSequence(1, {GateSpec::rot(1, kX, kPi / 2 + epsilon),
                          GateSpec::rot(1, aa_axis(theta), kPi),
                          GateSpec::rot(1, kX, kPi / 2)});
}

Unitary cphase(double gamma) {
  const cplx m = std::polar(1.0, -gamma / 2), p = std::polar(1.0, gamma / 2);
  return unchecked_unitary(ComplexMatrix::diagonal(std::array<cplx, 4>{m, p, p, m}));
}

GateSequence cnot_sequence() {
  // C_NOT = e^{-i 3pi/4} R_x2(3pi/2) C_P(3pi/2) R_z2(pi/2) R_x2(pi/2) R_z2(pi/2) R_z1(pi/2) C_P(3pi/2)
  return GateSequence(2,
                      {GateSpec::zz(3 * kPi / 2), GateSpec::rot(1, kZ, kPi / 2),
                       GateSpec::rot(2, kZ, kPi / 2), GateSpec::rot(2, kX, kPi / 2),
                       GateSpec::rot(2, kZ, kPi / 2), GateSpec::zz(3 * kPi / 2),
                       GateSpec::rot(2, kX, 3 * kPi / 2)},
                      -3 * kPi / 4);
}

Unitary canonical_cnot() {
  ComplexMatrix m(4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return Unitary(m);
}

GateSequence controlled_aa_sequence(double theta) {
  const GateSequence first = aa_sequence(theta / 2).on_qubit(2);
  const GateSequence second = aa_sequence(-theta / 2).on_qubit(2);
  return first.then(cnot_sequence()).then(second).then(cnot_sequence());
}

CompileResult compile_with_log(const GateSequence& seq, double angle_tol) {
  struct Slot {
    GateSpec gate;
    std::size_t first_source;
  };
  std::vector<Slot> out;
  CompileResult result{GateSequence::identity(seq.qubits()), {}, {}};
  double phase = seq.global_phase();

  const auto& in = seq.gates();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const GateSpec& g = in[i];
    if (!out.empty()) {
      GateSpec& top = out.back().gate;
      int rel = 0;
      if (top.kind == GateKind::kZZ && g.kind == GateKind::kZZ) {
        rel = 1;
      } else if (top.kind == GateKind::kRotation && g.kind == GateKind::kRotation &&
                 top.target == g.target) {
        rel = axis_relation(top.axis, g.axis, 1e-12);
      }
      if (rel != 0) {
        const double merged = top.angle + rel * g.angle;
        const auto turns = full_turns(merged, angle_tol);
        result.merges.push_back({out.back().first_source, i, merged, turns.has_value()});
        if (turns) {
          // R(2 pi k) = C_P(2 pi k) = (-1)^k I
          phase += kPi * static_cast<double>(*turns);
          out.pop_back();
        } else {
          top.angle = merged;
        }
        continue;
      }
    }
    if (const auto turns = full_turns(g.angle, angle_tol)) {
      phase += kPi * static_cast<double>(*turns);
      result.dropped.push_back(i);
      continue;
    }
    out.push_back({g, i});
  }

  if (out.empty()) {
    result.sequence = GateSequence::identity(seq.qubits(), phase);
  } else {
    std::vector<GateSpec> gates;
    gates.reserve(out.size());
    for (const auto& s : out) gates.push_back(s.gate);
    result.sequence = GateSequence(seq.qubits(), std::move(gates), phase);
  }
  return result;
}

GateSequence compile(const GateSequence& seq) { return compile_with_log(seq).sequence; }

// ---------------------------------------------------------------------------
// Schedules

double Schedule::total_time() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

ComplexMatrix segment_hamiltonian(const PulseSegment& seg, int qubits,
                                  std::span<const Vec3> offsets) {
  auto field = [&](int q) {
    Vec3 b = seg.fields[q];
    if (static_cast<std::size_t>(q) < offsets.size()) b = b + offsets[q];
    return b;
  };
  auto single = [](const Vec3& b) {
    return (pauli_x() * b.x + pauli_y() * b.y + pauli_z() * b.z) * 0.5;
  };
  if (qubits == 1) return single(field(0));
  ComplexMatrix h = kron(single(field(0)), identity2()) + kron(identity2(), single(field(1)));
  if (seg.coupling != 0.0) h = h + kron(pauli_z(), pauli_z()) * (0.5 * seg.coupling);
  return h;
}

Unitary segment_propagator(const PulseSegment& seg, int qubits, double t,
                           std::span<const Vec3> offsets) {
  if (t < 0.0) throw std::invalid_argument("segment_propagator: negative time");
  auto field = [&](int q) {
    Vec3 b = seg.fields[q];
    if (static_cast<std::size_t>(q) < offsets.size()) b = b + offsets[q];
    return b;
  };
  if (qubits == 1) return propagator_step(field(0), t);
  const Vec3 b1 = field(0), b2 = field(1);
  if (seg.coupling == 0.0) return tensor(propagator_step(b1, t), propagator_step(b2, t));
  const bool z_only = b1.x == 0.0 && b1.y == 0.0 && b2.x == 0.0 && b2.y == 0.0;
  if (z_only) {
    std::array<cplx, 4> d{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double sa = a == 0 ? 1.0 : -1.0, sb = b == 0 ? 1.0 : -1.0;
        const double e = 0.5 * (b1.z * sa + b2.z * sb + seg.coupling * sa * sb);
        d[2 * a + b] = std::polar(1.0, -e * t);
      }
    return unchecked_unitary(ComplexMatrix::diagonal(d));
  }
  return unchecked_unitary(
      polar_unitary(hermitian_propagator(segment_hamiltonian(seg, qubits, offsets), t)));
}

Schedule to_schedule(const GateSequence& seq, std::span<const double> field_magnitudes) {
  if (field_magnitudes.size() != seq.size()) {
    throw std::invalid_argument("to_schedule: one field magnitude per gate is required");
  }
  Schedule s;
  s.qubits = seq.qubits();
  s.global_phase = seq.global_phase();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const GateSpec& g = seq.gates()[i];
    const double mag = field_magnitudes[i];
    if (!(mag > 0.0)) {
      throw std::invalid_argument("to_schedule: field magnitude must be positive (gate " +
                                  std::to_string(i) + ")");
    }
    if (g.angle == 0.0) continue;
    const double sign = g.angle > 0 ? 1.0 : -1.0;
    PulseSegment seg;
    seg.duration = std::abs(g.angle) / mag;
    if (g.kind == GateKind::kZZ) {
      seg.coupling = sign * mag;
    } else {
      seg.fields[g.target - 1] = unit(g.axis) * (sign * mag);
    }
    s.segments.push_back(seg);
  }
  return s;
}

Schedule to_schedule(const GateSequence& seq) {
  std::vector<double> mags;
  mags.reserve(seq.size());
  for (const auto& g : seq.gates()) mags.push_back(g.field_magnitude);
  return to_schedule(seq, mags);
}

Unitary evaluate(const Schedule& schedule) {
  const int dim = schedule.qubits == 1 ? 2 : 4;
  Unitary u = Unitary::identity(dim);
  for (const auto& seg : schedule.segments)
    u = segment_propagator(seg, schedule.qubits, seg.duration) * u;
  return u.with_phase(schedule.global_phase);
}

std::string format_sequence(const GateSequence& seq) {
  std::string out = fmt::format("{:>3}  {:<6} {:<26} {:>12} {:>12}\n", "#", "target", "axis",
                                "angle/pi", "duration");
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const GateSpec& g = seq.gates()[i];
    const std::string target = g.kind == GateKind::kZZ ? "zz" : fmt::format("q{}", g.target);
    const std::string axis = g.kind == GateKind::kZZ
                                 ? std::string("sigma_z sigma_z")
                                 : fmt::format("({:+.4f},{:+.4f},{:+.4f})", g.axis.x, g.axis.y,
                                               g.axis.z);
    const std::string duration = g.field_magnitude > 0
                                     ? fmt::format("{:.6f}", std::abs(g.angle) / g.field_magnitude)
                                     : std::string("-");
    out += fmt::format("{:>3}  {:<6} {:<26} {:>12.6f} {:>12}\n", i, target, axis, g.angle / kPi,
                       duration);
  }
  out += fmt::format("global phase/pi = {:.6f}, gates = {}\n", seq.global_phase() / kPi, seq.size());
  return out;
}

}  // namespace gphase
