#pragma once

// Total / dynamic / geometric phase decomposition of simulated evolutions,
// and Bloch-sphere solid angles as an independent geometric route.

#include <span>
#include <stdexcept>
#include <vector>

#include "gphase/gates.hpp"
#include "gphase/su2core.hpp"

namespace gphase {

/// Effective Hamiltonian parameters on one trajectory interval.
struct IntervalField {
  std::array<Vec3, 2> fields{};
  double coupling = 0.0;
};

/// Sampled evolution. states[k] is the state at times[k]; fields[k] is the
/// (constant) Hamiltonian on [times[k], times[k+1]).
struct Trajectory {
  int qubits = 1;
  std::vector<double> times;
  std::vector<State> states;
  std::vector<IntervalField> fields;

  /// Throws std::invalid_argument if the invariants do not hold.
  void validate() const;
};

/// Thrown when a phase is requested for a non-cyclic evolution.
class CyclicityError : public std::runtime_error {
 public:
  CyclicityError(double defect, const std::string& what)
      : std::runtime_error(what), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

struct CyclicityCheck {
  bool cyclic = false;
  double defect = 0.0;  // 1 - |<psi0|psiT>|
};

struct PhaseDecomposition {
  double total_phase = 0.0;      // arg<psi(0)|psi(tau)>, (-pi, pi]
  double dynamic_phase = 0.0;    // -int <H> dt, not wrapped
  double geometric_phase = 0.0;  // total - dynamic, wrapped to (-pi, pi]
  double geometric_raw = 0.0;    // total - dynamic, unwrapped
  /// Total phase followed continuously along the trajectory (sum of per-step
  /// increments of arg<psi(0)|psi(t)>); meaningful only if `tracked_valid`.
  double tracked_total_phase = 0.0;
  bool tracked_valid = false;
  bool cyclic = false;
  double cyclicity_defect = 0.0;
};

/// Replays a schedule from `psi0` recording `steps_per_segment` samples per segment.
Trajectory simulate_trajectory(const Schedule& schedule, const State& psi0,
                               int steps_per_segment);

/// <psi|H|psi> for the given interval parameters.
double energy(const State& psi, const IntervalField& f, int qubits);

/// -sum_k <H_k> (t_{k+1} - t_k). The energy is conserved on each interval
/// (H_k is constant there), so this equals the midpoint rule of the integral.
double dynamic_phase(const Trajectory& traj);

CyclicityCheck is_cyclic(const State& psi0, const State& psi_t, double tol = 1e-9);

/// arg<psi0|psiT> in (-pi, pi]; defined modulo 2 pi. Throws CyclicityError.
double total_phase(const State& psi0, const State& psi_t, double tol = 1e-9);

/// phi, delta and beta = phi - delta. Throws CyclicityError when the endpoint
/// is not cyclic within `tol`.
PhaseDecomposition aa_phase(const Trajectory& traj, double tol = 1e-9);

/// Like aa_phase but reports a non-cyclic endpoint instead of throwing; the
/// phase fields are then left at zero except the dynamic phase.
PhaseDecomposition decompose_reporting(const Trajectory& traj, double tol = 1e-9);

/// Simulates the schedule starting at 1000 samples per segment, doubling
/// until the dynamic phase changes by less than 1e-8, then decomposes.
PhaseDecomposition decompose_schedule(const Schedule& schedule, const State& psi0,
                                      double tol = 1e-9);

/// max_k |<psi_k|H_k|psi_k>| over the samples (including the final state).
double parallel_transport_defect(const Trajectory& traj);

std::vector<BlochVector> bloch_path(const Trajectory& traj);

/// Oriented area enclosed by a closed polyline on the unit sphere, as a sum of
/// signed spherical triangles fanned from the first vertex. The polyline must
/// end within `close_tol` of its start. Result lies in (-4 pi, 4 pi).
double solid_angle(std::span<const BlochVector> path, double close_tol = 1e-6);

/// Signed solid angle of the spherical triangle (a, b, c).
double signed_triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c);

struct CancellationReport {
  std::vector<double> dynamic_phase;    // one per computational basis state
  std::vector<double> total_phase;      // arg<b|U|b>
  std::vector<double> geometric_phase;  // total - dynamic, wrapped
  std::vector<double> cyclicity_defect;
};

/// Runs the compiled sequence (as a schedule at unit field magnitude unless the
/// gates carry their own) from every computational basis state and reports
/// the per-state phase decomposition.
CancellationReport dynamic_phase_cancellation_check(const GateSequence& seq,
                                                    int steps_per_segment = 10000);

}  // namespace gphase
