#include "gphase/su2core.hpp"

#include <algorithm>
#include <utility>

namespace gphase {

namespace {

void require_dim(int dim) {
  if (dim != 2 && dim != 4) {
    throw std::invalid_argument("matrix dimension must be 2 or 4, got " + std::to_string(dim));
  }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) { require_dim(dim); }

ComplexMatrix::ComplexMatrix(int dim, std::span<const cplx> row_major) : dim_(dim) {
  require_dim(dim);
  if (row_major.size() != static_cast<std::size_t>(dim * dim)) {
    throw std::invalid_argument("entry count does not match dimension");
  }
  std::copy(row_major.begin(), row_major.end(), a_.begin());
}

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(static_cast<int>(diag.size()));
  for (int i = 0; i < m.dim(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r(i, j) = std::conj((*this)(j, i));
  return r;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < dim_ * dim_; ++i) m = std::max(m, std::abs(a_[i]));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (int i = 0; i < dim_ * dim_; ++i) s += std::norm(a_[i]);
  return std::sqrt(s);
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& o) const {
  require_same_dim(*this, o, "matrix product");
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int k = 0; k < dim_; ++k) {
      const cplx aik = (*this)(i, k);
      if (aik == cplx{}) continue;
      for (int j = 0; j < dim_; ++j) r(i, j) += aik * o(k, j);
    }
  return r;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& o) const {
  require_same_dim(*this, o, "matrix sum");
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_ * dim_; ++i) r.a_[i] = a_[i] + o.a_[i];
  return r;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& o) const {
  require_same_dim(*this, o, "matrix difference");
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_ * dim_; ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

ComplexMatrix ComplexMatrix::operator*(cplx s) const {
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_ * dim_; ++i) r.a_[i] = a_[i] * s;
  return r;
}

const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m(2, std::array<cplx, 4>{0.0, 1.0, 1.0, 0.0});
  return m;
}

const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m(2, std::array<cplx, 4>{0.0, cplx(0, -1), cplx(0, 1), 0.0});
  return m;
}

const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m(2, std::array<cplx, 4>{1.0, 0.0, 0.0, -1.0});
  return m;
}

const ComplexMatrix& identity2() {
  static const ComplexMatrix m = ComplexMatrix::identity(2);
  return m;
}

// ---------------------------------------------------------------------------
// Unitary

Unitary::Unitary(ComplexMatrix m, double tol) : m_(std::move(m)) {
  const double err = unitarity_error();
  if (!(err <= tol)) {
    throw std::invalid_argument("matrix is not unitary: max |U^dagger U - I| = " +
                                std::to_string(err));
  }
}

Unitary unchecked_unitary(ComplexMatrix m) { return Unitary(std::move(m), Unitary::Unchecked{}); }

Unitary Unitary::adjoint() const { return unchecked_unitary(m_.adjoint()); }

Unitary Unitary::operator*(const Unitary& o) const { return unchecked_unitary(m_ * o.m_); }

Unitary Unitary::with_phase(double phase) const {
  return unchecked_unitary(m_ * std::polar(1.0, phase));
}

double Unitary::unitarity_error() const {
  return (m_.adjoint() * m_ - ComplexMatrix::identity(m_.dim())).max_abs();
}

// ---------------------------------------------------------------------------
// State

State::State(std::span<const cplx> amplitudes) {
  require_dim(static_cast<int>(amplitudes.size()));
  dim_ = static_cast<int>(amplitudes.size());
  std::copy(amplitudes.begin(), amplitudes.end(), amp_.begin());
  if (std::abs(norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("state is not normalized: |psi| = " + std::to_string(norm()));
  }
}

State State::normalized(std::span<const cplx> amplitudes) {
  require_dim(static_cast<int>(amplitudes.size()));
  double n = 0.0;
  for (const auto& a : amplitudes) n += std::norm(a);
  n = std::sqrt(n);
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  State s;
  s.dim_ = static_cast<int>(amplitudes.size());
  for (int i = 0; i < s.dim_; ++i) s.amp_[i] = amplitudes[i] / n;
  return s;
}

State State::basis(int dim, int index) {
  require_dim(dim);
  if (index < 0 || index >= dim) throw std::invalid_argument("basis index out of range");
  std::array<cplx, 4> a{};
  a[index] = 1.0;
  return State(std::span<const cplx>(a.data(), dim));
}

double State::norm() const {
  double n = 0.0;
  for (int i = 0; i < dim_; ++i) n += std::norm(amp_[i]);
  return std::sqrt(n);
}

cplx State::inner(const State& other) const {
  if (dim_ != other.dim_) throw std::invalid_argument("inner product: dimension mismatch");
  cplx r = 0.0;
  for (int i = 0; i < dim_; ++i) r += std::conj(amp_[i]) * other.amp_[i];
  return r;
}

cplx State::expectation(const ComplexMatrix& m) const {
  if (dim_ != m.dim()) throw std::invalid_argument("expectation: dimension mismatch");
  cplx r = 0.0;
  for (int i = 0; i < dim_; ++i) {
    cplx row = 0.0;
    for (int j = 0; j < dim_; ++j) row += m(i, j) * amp_[j];
    r += std::conj(amp_[i]) * row;
  }
  return r;
}

State apply(const Unitary& u, const State& s) {
  if (u.dim() != s.dim()) throw std::invalid_argument("apply: dimension mismatch");
  State r;
  r.dim_ = s.dim_;
  for (int i = 0; i < s.dim_; ++i) {
    cplx acc = 0.0;
    for (int j = 0; j < s.dim_; ++j) acc += u(i, j) * s.amp_[j];
    r.amp_[i] = acc;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Single-qubit primitives

Unitary rotation(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw std::invalid_argument("rotation axis must be nonzero");
  const double nx = axis.x / n, ny = axis.y / n, nz = axis.z / n;
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  const std::array<cplx, 4> m{cplx(c, -s * nz), cplx(-s * ny, -s * nx), cplx(s * ny, -s * nx),
                              cplx(c, s * nz)};
  return unchecked_unitary(ComplexMatrix(2, m));
}

Unitary propagator_step(const Vec3& field, double dt) {
  if (dt < 0.0) throw std::invalid_argument("propagator_step: negative time step");
  const double b = field.norm();
  if (b == 0.0 || dt == 0.0) return Unitary::identity(2);
  return rotation(field, b * dt);
}

BlochVector bloch_vector(const State& s) {
  if (s.dim() != 2) throw std::invalid_argument("Bloch vector is defined for a single qubit only");
  const cplx a = s[0], b = s[1];
  const cplx ab = std::conj(a) * b;
  return {2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b)};
}

// ---------------------------------------------------------------------------
// Metrics

double nuclear_norm(const ComplexMatrix& m) {
  if (m.dim() == 2) {
    // sigma_1 + sigma_2 = sqrt(|M|_F^2 + 2 |det M|)
    const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double f2 = std::norm(m(0, 0)) + std::norm(m(0, 1)) + std::norm(m(1, 0)) +
                      std::norm(m(1, 1));
    return std::sqrt(f2 + 2.0 * std::abs(det));
  }
  const HermitianEigen e = hermitian_eigen(m.adjoint() * m);
  double s = 0.0;
  for (int i = 0; i < m.dim(); ++i) s += std::sqrt(std::max(0.0, e.values[i]));
  return s;
}

double trace_distance(const Unitary& u, const Unitary& v) {
  if (u.dim() != v.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  return nuclear_norm(u.matrix() - v.matrix());
}

double phase_aligned_distance(const Unitary& u, const Unitary& v) {
  if (u.dim() != v.dim()) throw std::invalid_argument("phase_aligned_distance: dimension mismatch");
  const cplx t = (v.matrix().adjoint() * u.matrix()).trace();
  if (std::abs(t) == 0.0) return trace_distance(u, v);
  return trace_distance(u, v.with_phase(std::arg(t)));
}

double avg_fidelity(const Unitary& u, const Unitary& v) {
  if (u.dim() != v.dim()) throw std::invalid_argument("avg_fidelity: dimension mismatch");
  const double d = u.dim();
  const cplx t = (u.matrix().adjoint() * v.matrix()).trace();
  return (d + std::norm(t)) / (d * (d + 1.0));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != 2 || b.dim() != 2) throw std::invalid_argument("tensor: both factors must be 2x2");
  ComplexMatrix r(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) r(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return r;
}

Unitary tensor(const Unitary& a, const Unitary& b) {
  return unchecked_unitary(kron(a.matrix(), b.matrix()));
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver (cyclic Jacobi)

HermitianEigen hermitian_eigen(const ComplexMatrix& h, double off_tol) {
  const int n = h.dim();
  ComplexMatrix a = h;
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = std::max(1.0, a.frobenius_norm());
  auto off_norm = [&] {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (p != q) s += std::norm(a(p, q));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < 64 && off_norm() > off_tol * scale; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0) continue;
        const cplx phase = a(p, q) / mag;  // e^{i alpha}
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G = diag(1, e^{-i alpha}) * [[c, s], [-s, c]] on the (p, q) plane.
        const cplx gpp = c, gpq = s;
        const cplx gqp = -s * std::conj(phase), gqq = c * std::conj(phase);
        // a <- G^dagger a G
        for (int k = 0; k < n; ++k) {  // columns
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (int k = 0; k < n; ++k) {  // rows
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }

  HermitianEigen out;
  out.vectors = v;
  out.sweeps = sweep;
  for (int i = 0; i < n; ++i) out.values[i] = a(i, i).real();
  return out;
}

ComplexMatrix hermitian_propagator(const ComplexMatrix& h, double t) {
  const HermitianEigen e = hermitian_eigen(h);
  const int n = h.dim();
  std::array<cplx, 4> phases{};
  for (int i = 0; i < n; ++i) phases[i] = std::polar(1.0, -e.values[i] * t);
  ComplexMatrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < n; ++k) acc += e.vectors(i, k) * phases[k] * std::conj(e.vectors(j, k));
      r(i, j) = acc;
    }
  return r;
}

ComplexMatrix polar_unitary(const ComplexMatrix& m) {
  const HermitianEigen e = hermitian_eigen(m.adjoint() * m);
  const int n = m.dim();
  ComplexMatrix inv_sqrt(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += e.vectors(i, k) * (1.0 / std::sqrt(e.values[k])) * std::conj(e.vectors(j, k));
      inv_sqrt(i, j) = acc;
    }
  return m * inv_sqrt;
}

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

}  // namespace gphase
