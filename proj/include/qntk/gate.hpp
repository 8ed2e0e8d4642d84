#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qntk/pauli.hpp"
#include "qntk/state_vector.hpp"

namespace qntk {

/// Unitary on one or two qubits. Row-major 2^k x 2^k matrix whose local basis
/// index is bit(targets[0]) + 2*bit(targets[1]).
class DenseGate {
 public:
  /// Throws ValidationError for repeated targets, k > 2, or a non-unitary matrix.
  DenseGate(std::vector<std::size_t> targets, std::vector<Complex> matrix, std::string label = {});

  const std::vector<std::size_t>& targets() const noexcept { return targets_; }
  const std::vector<Complex>& matrix() const noexcept { return matrix_; }
  std::size_t arity() const noexcept { return targets_.size(); }
  const std::string& label() const noexcept { return label_; }

  DenseGate adjoint() const;

 private:
  std::vector<std::size_t> targets_;
  std::vector<Complex> matrix_;
  std::string label_;
};

DenseGate hadamard(std::size_t qubit);
DenseGate pauli_x_gate(std::size_t qubit);
/// diag(1, e^{i lambda})
DenseGate phase_gate(std::size_t qubit, double lambda);
DenseGate cx(std::size_t control, std::size_t target);

StateVector apply_dense_gate(const StateVector& state, const DenseGate& gate);
void apply_dense_gate_inplace(StateVector& state, const DenseGate& gate);

/// exp(i * angle * generator) with a fixed angle, used for reference-frame absorption.
struct PauliRotation {
  PauliString generator;
  double angle = 0.0;
};

/// Element of a fixed (non-trainable) gate sequence.
using FixedOp = std::variant<DenseGate, PauliRotation>;

void apply_fixed_op(const FixedOp& op, StateVector& state);
void apply_fixed_op_adjoint(const FixedOp& op, StateVector& state);
/// Applies ops front to back.
void apply_fixed_ops(const std::vector<FixedOp>& ops, StateVector& state);
/// Applies the adjoint of the whole sequence (reverse order, each op inverted).
void apply_fixed_ops_adjoint(const std::vector<FixedOp>& ops, StateVector& state);

}  // namespace qntk
