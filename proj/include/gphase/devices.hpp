#pragma once

// Device-level parameter mappings: the symmetric charge qubit and the
// rotating-field (NMR style) adiabatic loop used for Berry phase gates.

#include <string>
#include <vector>

#include "gphase/gates.hpp"
#include "gphase/su2core.hpp"

namespace gphase {

struct ChargeQubitParams {
  double e_c = 1.35;  // charging energy, k_B K
  double e_j = 0.6;   // Josephson energy, k_B K

  /// Throws std::invalid_argument unless both energies are positive.
  void validate() const;
  /// The two-level reduction needs E_c >> E_J; flagged below a ratio of 2.
  bool charge_regime_warning() const { return e_c / e_j < 2.0; }

  double max_bx() const { return 2.0 * e_j; }
  double max_bz() const { return 4.0 * e_c; }
};

struct ControlPoint {
  double n_g = 0.5;  // gate charge C_g V_g / 2e
  double f = 0.0;    // flux ratio Phi_x / Phi_0

  bool in_nominal_range() const { return n_g >= 0.0 && n_g <= 1.0 && f >= 0.0 && f <= 1.0; }
};

struct ChargeFields {
  double b_x = 0.0;
  double b_z = 0.0;
};

/// B_z = 4 E_c (1 - 2 n_g), B_x = 2 E_J cos(pi f).
ChargeFields charge_fields(const ChargeQubitParams& p, const ControlPoint& c);

/// atan2(2 E_c (2 n_g - 1), E_J cos(pi f)) folded into [0, 2 pi).
/// Throws std::domain_error when both arguments vanish.
double theta_of(const ChargeQubitParams& p, const ControlPoint& c);

/// Angle a with the effective field along n(a) = (-cos a, 0, sin a), the axis
/// convention of aa_sequence. Equals theta_of - pi, folded into [0, 2 pi).
double axis_angle_of(const ChargeQubitParams& p, const ControlPoint& c);

/// sqrt(B_x^2 + B_z^2).
double b_n(const ChargeQubitParams& p, const ControlPoint& c);

/// Largest field magnitude available along n(a) inside n_g, f in [0, 1].
double max_field_along(const ChargeQubitParams& p, double axis_angle);

struct AaDeviceSchedule {
  Schedule schedule;
  ControlPoint r_x_point;  // n_g = 0.5, f = 0
  ControlPoint r_n_point;
  double b_x = 0.0;
  double b_n = 0.0;
  double total_time = 0.0;  // natural units; see to_picoseconds
};

/// R_x(pi/2) at B_x = 2 E_J, R_n(pi) at the fastest control point whose field
/// points along n(theta), R_x(pi/2). Replays to diag(e^{-i theta}, e^{i theta}).
/// Throws std::domain_error if no control point realizes the axis.
AaDeviceSchedule aa_schedule_for(double theta, const ChargeQubitParams& p);

/// Same pulse program with explicit field magnitudes instead of a device.
Schedule aa_schedule_with_fields(double theta, double b_x, double b_n);

/// R_z(theta) at field magnitude b_z.
Schedule dynamic_schedule(double theta, double b_z);

// ---------------------------------------------------------------------------
// Adiabatic loop, H = Delta/2 sigma_z + omega1/2 (cos phi sigma_x + sin phi sigma_y)

struct BerryParams {
  double delta = 1.0;
  double omega1_max = 1.0;
  double t_tilt = 100.0;
  double t_sweep = 100.0;
  int n_tilt = 1000;
  int n_sweep = 1000;
  /// Make the two R_y(pi) refocusing pulses subject to noise (channel 0).
  bool noisy_ry = false;

  void validate() const;
  /// max over the loop of |d(field direction)/dt| / |field|; << 1 is adiabatic.
  double adiabaticity() const;
};

double berry_cone_angle(const BerryParams& bp);
/// 4 pi (1 - cos theta_cone): relative phase after the refocused double loop.
double berry_phase_ideal(double theta_cone);

/// Segment noise channels: 0 for the tilt ramps, 1 for the phi sweeps.
inline constexpr int kBerryTiltChannel = 0;
inline constexpr int kBerrySweepChannel = 1;

/// Staircase tilt, phi sweep, R_y(pi), reversed sweep, reversed tilt, R_y(pi).
/// The R_y(pi) pulses are short pure sigma_y segments.
Schedule berry_schedule(const BerryParams& bp);

struct BerryMeasurement {
  Unitary propagator = Unitary::identity(2);
  double relative_phase = 0.0;  // arg(U_11 / U_00), in (-pi, pi]
  double ideal_phase = 0.0;     // berry_phase_ideal, unwrapped
  double phase_error = 0.0;     // |wrap(relative - ideal)|
  double off_diagonal = 0.0;    // max(|U_01|, |U_10|)
};

BerryMeasurement measure_berry_phase(const BerryParams& bp);

}  // namespace gphase
