#pragma once

// Piecewise-constant random control-field fluctuations and the time-ordered
// noisy propagator U = prod_n exp(-i H(n) dt_n), later times on the left.

#include <array>
#include <cstdint>
#include <string>
#include <optional>
#include <vector>

#include "gphase/gates.hpp"
#include "gphase/phases.hpp"
#include "gphase/su2core.hpp"

namespace gphase {

/// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
/// Known-answer vectors are checked in tests/test_noise.cpp.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter ctr, Key key);
};

/// Counter-based stream: key = master seed, counter = (block, stream index).
/// Draw j of stream s depends only on (seed, s, j).
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on [-half_width, +half_width).
  double symmetric(double half_width);
  std::uint64_t draws() const { return draws_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;  // 32-bit words consumed from buf_
  std::uint64_t draws_ = 0;
};

struct NoiseAxes {
  bool x = false;
  bool y = false;
  bool z = false;

  static NoiseAxes parse(const std::string& spec);  // e.g. "xz"; "" or "none" = no axes
  std::string str() const;
};

struct NoiseConfig {
  std::array<NoiseAxes, 2> axes{};  // per qubit
  double db_max = 0.0;              // half-width of the uniform distribution
  double dt = 1.0;                  // noise correlation time
  /// x and y fluctuations use the same draw (enabled x and y required).
  bool identical_xy = false;

  /// Delta t = hbar / (4 E_c gamma).
  static double dt_from_gamma(double e_c, double gamma);

  /// Throws std::invalid_argument on negative amplitude or non-positive dt.
  void validate() const;
};

/// One NoiseConfig per segment noise channel.
struct NoiseModel {
  std::vector<NoiseConfig> channels;

  NoiseModel() = default;
  NoiseModel(NoiseConfig cfg) : channels{std::move(cfg)} {}  // NOLINT(implicit)
  explicit NoiseModel(std::vector<NoiseConfig> cfgs) : channels(std::move(cfgs)) {}

  const NoiseConfig& channel(int c) const;
};

/// Draws n_steps fluctuation vectors for `qubit` (0-based). Each enabled axis
/// is an independent uniform(-db_max, db_max) variable; disabled axes are 0.
std::vector<Vec3> sample_noise(const NoiseConfig& cfg, int n_steps, RngStream& rng, int qubit = 0);

/// Draws the fluctuation of one step for `qubit`.
Vec3 draw_fluctuation(const NoiseConfig& cfg, RngStream& rng, int qubit = 0);

struct StepCount {
  long n = 1;
  double dt = 0.0;  // duration / n
};

/// N = max(1, round(duration / target_dt)), and the exact subdivision duration / N.
StepCount step_count(double segment_duration, double target_dt);

struct NoisyRun {
  Unitary propagator = Unitary::identity(2);
  std::optional<Trajectory> trajectory;
  long steps = 0;
  int reunitarizations = 0;
  std::vector<long> segment_steps;
};

struct NoisyOptions {
  /// Record the state trajectory starting from this state.
  std::optional<State> record_from;
  /// Project back to the unitary group when |U^dagger U - I| exceeds this.
  double unitarity_tol = 1e-10;
  /// Cut every noisy segment into exactly this many steps instead of using
  /// the channel's correlation time.
  std::optional<long> fixed_steps;
};

/// Trotterized noisy propagator. Each noisy segment is cut into step_count
/// pieces with one fluctuation draw per piece; noiseless segments are a
/// single exact exponential. Coupling terms are never perturbed.
NoisyRun noisy_propagator(const Schedule& schedule, const NoiseModel& model, RngStream& rng,
                          const NoisyOptions& opts = {});

}  // namespace gphase
