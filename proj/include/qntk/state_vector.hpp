#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qntk/numeric.hpp"

namespace qntk {

inline constexpr std::size_t kMaxQubits = 12;

/// Dense amplitude vector. Qubit q is bit q of the basis index (little-endian).
class StateVector {
 public:
  StateVector() = default;
  /// |0...0> on `n_qubits` qubits.
  explicit StateVector(std::size_t n_qubits);

  static StateVector basis(std::size_t n_qubits, std::uint64_t index);
  /// Throws DimensionError unless the length is 2^n with 1 <= n <= kMaxQubits.
  static StateVector from_amplitudes(std::vector<Complex> amplitudes);
  /// All-zero vector, useful as an accumulator.
  static StateVector zeros(std::size_t n_qubits);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return amps_.size(); }

  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  std::span<Complex> amplitudes() noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  Complex& operator[](std::size_t i) { return amps_[i]; }

  double norm() const;

  StateVector& operator*=(Complex s);
  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  /// this += s * other
  StateVector& axpy(Complex s, const StateVector& other);

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<Complex> amps_;
};

/// <a|b>, conjugate-linear in `a`. Pairwise-summed.
Complex inner_product(const StateVector& a, const StateVector& b);

/// Largest entrywise |a_i - b_i|.
double max_abs_diff(const StateVector& a, const StateVector& b);

void require_same_dimension(const StateVector& a, const StateVector& b);

}  // namespace qntk
