#pragma once

// Monte Carlo estimates of the averaged trace distance between noisy and
// ideal gates, the first-order analytic predictions they are checked against,
// and the geometric-versus-dynamic ordering criterion.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gphase/devices.hpp"
#include "gphase/gates.hpp"
#include "gphase/noise.hpp"
#include "gphase/su2core.hpp"

namespace gphase {

enum class MeasuredGate { kAa, kDynamic, kBerry };

std::string to_string(MeasuredGate g);
/// "aa", "dynamic" or "berry"; throws std::invalid_argument otherwise.
MeasuredGate parse_measured_gate(const std::string& s);

/// Control fields used to realize the gates. With b_n unset, the R_n(pi)
/// rotation runs at the device's largest field along its axis.
struct FieldAssignment {
  ChargeQubitParams device;
  double b_x = 1.2;  // R_x(pi/2) field of the AA gate
  double b_z = 5.4;  // R_z field of the dynamic gate
  std::optional<double> b_n;

  static FieldAssignment from_device(const ChargeQubitParams& p);
  /// Same magnitude b for every field.
  static FieldAssignment matched(double b);
  double b_n_for(double axis_angle) const;
};

struct McOptions {
  int realizations = 600;
  std::uint64_t seed = 1;
  int workers = 1;
  /// High 32 bits of every realization's stream index; distinct per grid cell.
  std::uint64_t cell_index = 0;
  /// Per-gate alternative to the shared correlation time: every noisy
  /// segment gets exactly this many noise steps.
  std::optional<long> fixed_steps;
  /// Record realization 0's Bloch path from this state.
  std::optional<State> record_from;
};

struct MonteCarloResult {
  MeasuredGate gate = MeasuredGate::kAa;
  double theta = 0.0;   // gate angle (Berry: ideal relative phase)
  double db_max = 0.0;  // absolute noise half-width
  int n = 0;
  double mean_d = 0.0;
  double std_err = 0.0;  // sample standard deviation / sqrt(n)
  double prediction = 0.0;
  double rel_err = 0.0;  // |mean - prediction| / prediction, 0 when prediction = 0
  std::uint64_t seed = 0;
  long steps_per_realization = 0;
  std::vector<double> samples;  // in realization order
  std::vector<BlochVector> sample_path;
  std::optional<BerryParams> berry;
};

/// sqrt(pi^3/12 (1/B_x^2 + 1/(B_x B_n))) db_max / sqrt(N_x).
double predict_aa(double b_x, double b_n, double db_max, double n_x);
/// sqrt(pi/6) theta (db_max / B_z) / sqrt(N_z).
double predict_dynamic(double theta, double b_z, double db_max, double n_z);
/// 4/sqrt(3 pi) db_max sqrt(T_T^2/N_T + T_phi^2/N_phi), noise on x, y and z.
double predict_berry(double db_max, double t_tilt, double n_tilt, double t_sweep, double n_sweep);
/// pi (B_z/B_x + B_z/B_n).
double theta_bound(double b_z, double b_x, double b_n);

/// Generic estimator: mean over realizations of D(noisy(schedule), target).
MonteCarloResult mc_distance(const Schedule& schedule, const Unitary& target,
                             const NoiseModel& model, const McOptions& opts);

/// Noisy R^AA(theta/2) against the ideal R_z(theta).
MonteCarloResult mc_distance_aa(double theta, const NoiseConfig& noise,
                                const FieldAssignment& fields, const McOptions& opts);
/// Noisy R_z(theta) against the ideal R_z(theta).
MonteCarloResult mc_distance_dynamic(double theta, const NoiseConfig& noise,
                                     const FieldAssignment& fields, const McOptions& opts);
/// Noisy refocused Berry loop against its noiseless counterpart.
MonteCarloResult mc_distance_berry(const BerryParams& bp, const NoiseModel& model,
                                   const McOptions& opts);

/// The dynamic gate producing the same relative phase: R_z(gamma) at B_z =
/// delta under `base`, with the correlation time of one sweep step.
MonteCarloResult mc_distance_berry_dynamic_equivalent(const BerryParams& bp,
                                                      const NoiseConfig& base,
                                                      const McOptions& opts);

/// Two channels sharing `base`'s axes and amplitude, with the correlation
/// time equal to one staircase step of the tilt and sweep respectively.
NoiseModel berry_noise_model(const BerryParams& bp, const NoiseConfig& base);

/// Noise steps the AA / dynamic schedule uses under `noise` (for the predictions).
long aa_rx_steps(double theta, const NoiseConfig& noise, const FieldAssignment& fields,
                 const McOptions& opts);
long dynamic_steps(double theta, const NoiseConfig& noise, const FieldAssignment& fields,
                   const McOptions& opts);

struct WelchInterval {
  double difference = 0.0;  // mean_a - mean_b
  double low = 0.0;
  double high = 0.0;
  double dof = 0.0;
  double combined_stderr = 0.0;
};

/// Two-sided Welch interval for mean_a - mean_b.
WelchInterval welch_interval(const MonteCarloResult& a, const MonteCarloResult& b,
                             double confidence = 0.95);

enum class Winner { kAa, kDynamic, kTie };
std::string to_string(Winner w);

struct CriterionReport {
  double theta = 0.0;
  MonteCarloResult aa;
  MonteCarloResult dynamic;
  WelchInterval welch;
  /// Which gate has the smaller distance, decided by the Welch interval.
  Winner winner = Winner::kTie;
  /// mean_aa - mean_dyn in units of the combined stderr.
  double separation = 0.0;
  double theta_bound = 0.0;  // for the fields actually used at this theta
};

CriterionReport criterion_check(double theta, const NoiseConfig& noise,
                                const FieldAssignment& fields, const McOptions& opts);

struct CrossoverReport {
  std::vector<CriterionReport> points;
  /// Linear interpolation of the first sign change of mean_aa - mean_dyn.
  std::optional<double> crossover;
};

CrossoverReport crossover_scan(const std::vector<double>& thetas, const NoiseConfig& noise,
                               const FieldAssignment& fields, const McOptions& opts);

struct SweepGrid {
  std::vector<double> theta_values;
  /// AA / dynamic: in units of B_z. Berry: in units of delta.
  std::vector<double> db_values;
  int realizations = 600;
  NoiseConfig noise;

  void validate() const;
};

/// Full grid, one cell per (theta, db). Cell c = i_theta * n_db + i_db uses
/// stream indices (c << 32) | realization. Berry grids ignore theta_values.
std::vector<MonteCarloResult> run_sweep(const SweepGrid& grid, MeasuredGate kind,
                                        const FieldAssignment& fields, const BerryParams& berry,
                                        std::uint64_t seed, int workers);

/// Header lines "#@ key = value" followed by the CSV table.
void write_csv(std::ostream& os, const std::vector<MonteCarloResult>& rows,
               const std::vector<std::pair<std::string, std::string>>& header);

std::vector<std::string> csv_columns(bool berry);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
};

/// Least-squares fit of log y = log c + p log x.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gphase
