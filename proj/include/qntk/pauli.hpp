#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qntk/state_vector.hpp"

namespace qntk {

enum class Pauli : std::uint8_t { I, X, Y, Z };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

/// phase * P_0 (x) P_1 (x) ... with letter k acting on qubit k.
///
/// Text form is an optional sign followed by one letter per qubit, leftmost
/// letter on qubit 0: "XYZ" puts X on qubit 0 and Z on qubit 2.
class PauliString {
 public:
  PauliString() = default;
  PauliString(std::vector<Pauli> letters, double phase = 1.0);

  static PauliString parse(std::string_view text);
  static PauliString identity(std::size_t n_qubits, double phase = 1.0);
  static PauliString single(std::size_t n_qubits, std::size_t qubit, Pauli p, double phase = 1.0);

  std::size_t n_qubits() const noexcept { return letters_.size(); }
  const std::vector<Pauli>& letters() const noexcept { return letters_; }
  double phase() const noexcept { return phase_; }
  double operator_norm() const noexcept;
  bool is_identity() const noexcept { return x_mask_ == 0 && z_mask_ == 0; }

  std::uint64_t x_mask() const noexcept { return x_mask_; }
  std::uint64_t z_mask() const noexcept { return z_mask_; }

  PauliString with_phase(double phase) const;

  StateVector apply(const StateVector& state) const;
  /// out += scale * (this * in)
  void apply_add(const StateVector& in, Complex scale, StateVector& out) const;
  /// <a| this |b> without materializing this*b.
  Complex matrix_element(const StateVector& a, const StateVector& b) const;

  /// Letters only, with a leading '-' when phase is negative and '+' never.
  /// Non-unit magnitudes are written as "<coef>*LETTERS".
  std::string to_string() const;

  bool commutes_with(const PauliString& other) const;
  bool same_letters(const PauliString& other) const { return letters_ == other.letters_; }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.letters_ == b.letters_ && a.phase_ == b.phase_;
  }

 private:
  Complex letter_phase() const noexcept;  // i^{#Y}

  std::vector<Pauli> letters_;
  double phase_ = 1.0;
  std::uint64_t x_mask_ = 0;
  std::uint64_t z_mask_ = 0;
};

/// Real-weighted sum of Pauli strings; each term's phase is its coefficient.
class PauliObservable {
 public:
  PauliObservable() = default;
  explicit PauliObservable(std::vector<PauliString> terms);
  PauliObservable(PauliString term);  // NOLINT(google-explicit-constructor)

  /// Accepts "ZZI", "-0.5*XY + 2*ZZ", "1.5*ZI - IZ".
  static PauliObservable parse(std::string_view text);

  const std::vector<PauliString>& terms() const noexcept { return terms_; }
  std::size_t n_qubits() const noexcept { return n_qubits_; }
  /// Sum of |coefficients|, an upper bound on the operator 2-norm.
  double norm_bound() const;
  bool is_identity() const;

  StateVector apply(const StateVector& state) const;
  std::string to_string() const;

 private:
  std::vector<PauliString> terms_;
  std::size_t n_qubits_ = 0;
};

/// <state|obs|state>, with the imaginary part discarded.
double expectation(const StateVector& state, const PauliObservable& obs);
/// Raw complex value of <state|obs|state>.
Complex expectation_complex(const StateVector& state, const PauliObservable& obs);

/// exp(i * angle * g) state = cos(angle) state + i sin(angle) g state. Requires |phase| = 1.
StateVector apply_pauli_rotation(const StateVector& state, const PauliString& g, double angle);
void apply_pauli_rotation_inplace(StateVector& state, const PauliString& g, double angle);

/// tr(A B) / 2^n for Pauli strings: product of phases when letters match, else 0.
double normalized_trace_inner(const PauliString& a, const PauliString& b);

}  // namespace qntk
