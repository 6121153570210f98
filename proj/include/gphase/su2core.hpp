#pragma once

// Small dense complex linear algebra for one- and two-qubit problems.
//
// Conventions used throughout the library:
//   * hbar = 1; energies are in units of k_B * 1 K and times in hbar / (k_B * 1 K).
//   * R_n(phi) = exp(-i phi n.sigma / 2).
//   * Two-qubit basis ordering is |q1 q2>, with qubit 1 the most significant
//     (Kronecker factor on the left).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace gphase {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// hbar / k_B in picosecond-kelvin, from the exact SI values of hbar and k_B.
inline constexpr double kHbarJouleSecond = 1.054571817e-34;
inline constexpr double kBoltzmannJoulePerKelvin = 1.380649e-23;
inline constexpr double kHbarOverKbPicosecondKelvin =
    kHbarJouleSecond / kBoltzmannJoulePerKelvin * 1e12;

/// Converts a time in natural units (hbar / (k_B K)) to picoseconds.
inline double to_picoseconds(double natural_time) {
  return natural_time * kHbarOverKbPicosecondKelvin;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Square complex matrix of dimension 2 or 4, row-major.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(int dim);
  ComplexMatrix(int dim, std::span<const cplx> row_major);

  static ComplexMatrix identity(int dim);
  static ComplexMatrix diagonal(std::span<const cplx> diag);

  int dim() const { return dim_; }

  cplx& operator()(int row, int col) { return a_[row * dim_ + col]; }
  const cplx& operator()(int row, int col) const { return a_[row * dim_ + col]; }

  ComplexMatrix adjoint() const;
  cplx trace() const;
  /// Largest absolute entry.
  double max_abs() const;
  double frobenius_norm() const;

  ComplexMatrix operator*(const ComplexMatrix& o) const;
  ComplexMatrix operator+(const ComplexMatrix& o) const;
  ComplexMatrix operator-(const ComplexMatrix& o) const;
  ComplexMatrix operator*(cplx s) const;

 private:
  int dim_;
  std::array<cplx, 16> a_{};
};

inline ComplexMatrix operator*(cplx s, const ComplexMatrix& m) { return m * s; }

/// Pauli matrices and the 2x2 identity.
const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();
const ComplexMatrix& identity2();

/// Unitary matrix. Construction verifies U^dagger U = I elementwise within `tol`.
class Unitary {
 public:
  explicit Unitary(ComplexMatrix m, double tol = 1e-12);

  static Unitary identity(int dim) { return Unitary(ComplexMatrix::identity(dim)); }

  int dim() const { return m_.dim(); }
  const ComplexMatrix& matrix() const { return m_; }
  cplx operator()(int row, int col) const { return m_(row, col); }

  Unitary adjoint() const;
  /// Operator product: (*this) applied after `o`.
  Unitary operator*(const Unitary& o) const;
  Unitary with_phase(double phase) const;

  /// Largest elementwise deviation of U^dagger U from the identity.
  double unitarity_error() const;

 private:
  struct Unchecked {};
  Unitary(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}
  friend Unitary unchecked_unitary(ComplexMatrix m);

  ComplexMatrix m_;
};

/// Wraps a matrix that is unitary by construction (products of closed-form
/// exponentials) without re-verifying it.
Unitary unchecked_unitary(ComplexMatrix m);

/// Normalized pure state of dimension 2 or 4.
class State {
 public:
  /// Throws std::invalid_argument unless the norm is 1 within 1e-12.
  explicit State(std::span<const cplx> amplitudes);

  /// Normalizes the given amplitudes; throws on a zero vector.
  static State normalized(std::span<const cplx> amplitudes);
  static State basis(int dim, int index);

  int dim() const { return dim_; }
  cplx operator[](int i) const { return amp_[i]; }
  std::span<const cplx> amplitudes() const { return {amp_.data(), static_cast<std::size_t>(dim_)}; }

  double norm() const;
  /// <this|other>
  cplx inner(const State& other) const;
  /// <this|M|this>
  cplx expectation(const ComplexMatrix& m) const;

 private:
  State() = default;
  friend State apply(const Unitary& u, const State& s);

  int dim_ = 0;
  std::array<cplx, 4> amp_{};
};

State apply(const Unitary& u, const State& s);

struct BlochVector {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;

  double norm() const { return std::sqrt(bx * bx + by * by + bz * bz); }
  Vec3 as_vec() const { return {bx, by, bz}; }
};

/// R_n(angle) = cos(angle/2) I - i sin(angle/2) n.sigma with n = axis/|axis|.
Unitary rotation(const Vec3& axis, double angle);

/// exp(-i (B.sigma/2) dt); identity when B = 0. Throws on dt < 0.
Unitary propagator_step(const Vec3& field, double dt);

/// Bloch vector b_i = <psi|sigma_i|psi> of a single-qubit state.
BlochVector bloch_vector(const State& s);

/// Sum of singular values of U - V.
double trace_distance(const Unitary& u, const Unitary& v);

/// Trace distance after multiplying V by the phase of Tr(V^dagger U).
double phase_aligned_distance(const Unitary& u, const Unitary& v);

/// (d + |Tr(U^dagger V)|^2) / (d (d + 1)).
double avg_fidelity(const Unitary& u, const Unitary& v);

/// Kronecker product; `a` acts on qubit 1.
Unitary tensor(const Unitary& a, const Unitary& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
struct HermitianEigen {
  std::array<double, 4> values{};
  ComplexMatrix vectors{2};  // columns are eigenvectors
  int sweeps = 0;
};
HermitianEigen hermitian_eigen(const ComplexMatrix& h, double off_tol = 1e-14);

/// Sum of singular values of an arbitrary 2x2 or 4x4 matrix.
double nuclear_norm(const ComplexMatrix& m);

/// exp(-i H t) for Hermitian H via its eigen-decomposition.
ComplexMatrix hermitian_propagator(const ComplexMatrix& h, double t);

/// Closest unitary in Frobenius norm, U (U^dagger U)^{-1/2}.
ComplexMatrix polar_unitary(const ComplexMatrix& m);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace gphase
