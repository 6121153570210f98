#pragma once

// Gate sequences and their piecewise-constant pulse schedules.
//
// Storage order is APPLICATION order: gates()[0] acts first. Operator products
// written right-to-left, e.g. R_x(pi/2) R_n(pi) R_x(pi/2 + eps), are therefore
// stored reversed: {R_x(pi/2 + eps), R_n(pi), R_x(pi/2)}.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gphase/su2core.hpp"

namespace gphase {

enum class GateKind {
  kRotation,  // single-qubit rotation about `axis`
  kZZ,        // C_P(angle) = exp(-i angle sigma_z (x) sigma_z / 2)
};

struct GateSpec {
  GateKind kind = GateKind::kRotation;
  int target = 1;  // 1 or 2; ignored for kZZ
  Vec3 axis{0, 0, 1};
  double angle = 0.0;
  /// Field (or coupling) magnitude used for timed execution; 0 means unset.
  double field_magnitude = 0.0;

  static GateSpec rot(int target, const Vec3& axis, double angle, double field = 0.0) {
    return {GateKind::kRotation, target, axis, angle, field};
  }
  static GateSpec zz(double angle, double coupling = 0.0) {
    return {GateKind::kZZ, 0, {0, 0, 1}, angle, coupling};
  }
};

class GateSequence {
 public:
  /// Throws std::invalid_argument if `gates` is empty or a target is out of range.
  GateSequence(int qubits, std::vector<GateSpec> gates, double global_phase = 0.0);

  /// Empty sequence (identity); produced by compilation when everything cancels.
  static GateSequence identity(int qubits, double global_phase = 0.0);

  int qubits() const { return qubits_; }
  const std::vector<GateSpec>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  /// Global phase factor e^{i global_phase} multiplying the gate product.
  double global_phase() const { return global_phase_; }

  /// Concatenation: `other` is applied after `*this`.
  GateSequence then(const GateSequence& other) const;
  /// Returns a copy with all single-qubit gates retargeted to `target`.
  GateSequence on_qubit(int target) const;

 private:
  GateSequence() = default;
  int qubits_ = 1;
  std::vector<GateSpec> gates_;
  double global_phase_ = 0.0;
};

/// Unitary of one gate embedded in a `qubits`-qubit register.
Unitary gate_unitary(const GateSpec& g, int qubits);

/// Ordered product of the sequence including its global phase.
Unitary evaluate(const GateSequence& seq);

/// R_x(pi/2), R_n(pi), R_x(pi/2) with n = (-cos theta, 0, sin theta);
/// evaluates to diag(e^{-i theta}, e^{+i theta}).
GateSequence aa_sequence(double theta);
Vec3 aa_axis(double theta);

/// Single R_z(theta).
GateSequence dynamic_z(double theta);

/// aa_sequence with the first-applied R_x angle replaced by pi/2 + epsilon.
GateSequence perturbed_aa_sequence(double theta, double epsilon);

/// diag(e^{-i g/2}, e^{i g/2}, e^{i g/2}, e^{-i g/2}).
Unitary cphase(double gamma);

/// Seven-gate C_NOT decomposition with global phase e^{-i 3 pi / 4}; control
/// is qubit 1. Exact (no residual phase) against the canonical CNOT.
GateSequence cnot_sequence();
Unitary canonical_cnot();

/// C_NOT, R^AA_{z2}(-theta/2), C_NOT, R^AA_{z2}(theta/2) written as an operator
/// product; the rightmost factor acts first. 2 x (7 + 3) = 20 gates.
GateSequence controlled_aa_sequence(double theta);

struct MergeRecord {
  std::size_t first;   // index in the input sequence
  std::size_t second;  // index in the input sequence
  double merged_angle;
  bool dropped;  // merged gate was a multiple of 2 pi and removed
};

struct CompileResult {
  GateSequence sequence;
  std::vector<MergeRecord> merges;
  std::vector<std::size_t> dropped;  // input indices removed as zero angle
};

/// Merges adjacent rotations on the same target about parallel or
/// antiparallel axes (and adjacent C_P gates), then removes gates whose angle
/// is a multiple of 2 pi, folding the resulting +-1 into the global phase.
/// The evaluated unitary is unchanged, including its phase.
CompileResult compile_with_log(const GateSequence& seq, double angle_tol = 1e-12);
GateSequence compile(const GateSequence& seq);

// ---------------------------------------------------------------------------
// Schedules

struct PulseSegment {
  std::array<Vec3, 2> fields{};  // per-qubit effective field B; H = B.sigma/2
  double coupling = 0.0;         // J in J sigma_z (x) sigma_z / 2
  double duration = 0.0;
  bool noisy = true;             // false: the segment is ideal and never perturbed
  int noise_channel = 0;         // selects a NoiseConfig in a multi-channel model
};

struct Schedule {
  int qubits = 1;
  std::vector<PulseSegment> segments;
  double global_phase = 0.0;

  double total_time() const;
};

/// Hamiltonian of a segment with extra per-qubit field offsets.
ComplexMatrix segment_hamiltonian(const PulseSegment& seg, int qubits,
                                  std::span<const Vec3> offsets = {});

/// exp(-i H t) for a segment; closed form where the terms commute.
Unitary segment_propagator(const PulseSegment& seg, int qubits, double t,
                           std::span<const Vec3> offsets = {});

/// Realizes every gate as a constant-field segment: B = magnitude * axis,
/// duration = |angle| / magnitude (field reversed for negative angles).
/// Zero-angle gates are dropped. Throws on a non-positive magnitude.
Schedule to_schedule(const GateSequence& seq, std::span<const double> field_magnitudes);
/// Uses each gate's own field_magnitude.
Schedule to_schedule(const GateSequence& seq);

/// Noiseless replay of a schedule, including its global phase.
Unitary evaluate(const Schedule& schedule);

/// One gate per line: index, target, axis, angle, duration.
std::string format_sequence(const GateSequence& seq);

}  // namespace gphase
