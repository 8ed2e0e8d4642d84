#include "qntk/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qntk/error.hpp"

namespace qntk {

namespace {

void check_qubits(std::size_t n) {
  if (n == 0 || n > kMaxQubits)
    throw DimensionError("qubit count " + std::to_string(n) + " outside [1, " +
                         std::to_string(kMaxQubits) + "]");
}

Complex dot_range(const Complex* a, const Complex* b, std::size_t n) {
  if (n <= 8) {
    Complex s{};
    for (std::size_t i = 0; i < n; ++i) s += std::conj(a[i]) * b[i];
    return s;
  }
  const std::size_t h = n / 2;
  return dot_range(a, b, h) + dot_range(a + h, b + h, n - h);
}

double sq_range(const Complex* a, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(a[i]);
    return s;
  }
  const std::size_t h = n / 2;
  return sq_range(a, h) + sq_range(a + h, n - h);
}

}  // namespace

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
  check_qubits(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Complex{});
  amps_[0] = 1.0;
}

StateVector StateVector::basis(std::size_t n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dimension())
    throw DimensionError("basis index " + std::to_string(index) + " out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
  const std::size_t len = amplitudes.size();
  if (len < 2 || !std::has_single_bit(len))
    throw DimensionError("amplitude count " + std::to_string(len) + " is not 2^n with n >= 1");
  StateVector s;
  s.n_qubits_ = static_cast<std::size_t>(std::countr_zero(len));
  check_qubits(s.n_qubits_);
  s.amps_ = std::move(amplitudes);
  return s;
}

StateVector StateVector::zeros(std::size_t n_qubits) {
  StateVector s(n_qubits);
  s.amps_[0] = 0.0;
  return s;
}

double StateVector::norm() const { return std::sqrt(sq_range(amps_.data(), amps_.size())); }

StateVector& StateVector::operator*=(Complex s) {
  for (auto& a : amps_) a *= s;
  return *this;
}

StateVector& StateVector::operator+=(const StateVector& other) { return axpy(1.0, other); }

StateVector& StateVector::operator-=(const StateVector& other) { return axpy(-1.0, other); }

StateVector& StateVector::axpy(Complex s, const StateVector& other) {
  require_same_dimension(*this, other);
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += s * other.amps_[i];
  return *this;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  require_same_dimension(a, b);
  return dot_range(a.amplitudes().data(), b.amplitudes().data(), a.dimension());
}

double max_abs_diff(const StateVector& a, const StateVector& b) {
  require_same_dimension(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void require_same_dimension(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits())
    throw DimensionError("state qubit counts differ: " + std::to_string(a.n_qubits()) + " vs " +
                         std::to_string(b.n_qubits()));
}

}  // namespace qntk
