#include "qntk/gate.hpp"

#include <cmath>

#include "qntk/error.hpp"

namespace qntk {

DenseGate::DenseGate(std::vector<std::size_t> targets, std::vector<Complex> matrix, std::string label)
    : targets_(std::move(targets)), matrix_(std::move(matrix)), label_(std::move(label)) {
  const std::size_t k = targets_.size();
  if (k < 1 || k > 2) throw ValidationError("dense gate must act on 1 or 2 qubits");
  if (k == 2 && targets_[0] == targets_[1]) throw ValidationError("dense gate targets repeat");
  const std::size_t d = std::size_t{1} << k;
  if (matrix_.size() != d * d)
    throw ValidationError("dense gate matrix has " + std::to_string(matrix_.size()) +
                          " entries, expected " + std::to_string(d * d));
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      Complex s{};
      for (std::size_t m = 0; m < d; ++m) s += std::conj(matrix_[m * d + r]) * matrix_[m * d + c];
      if (std::abs(s - (r == c ? 1.0 : 0.0)) > kDefaultTolerance)
        throw ValidationError("dense gate '" + label_ + "' is not unitary");
    }
}

DenseGate DenseGate::adjoint() const {
  const std::size_t d = std::size_t{1} << arity();
  std::vector<Complex> m(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) m[r * d + c] = std::conj(matrix_[c * d + r]);
  return DenseGate(targets_, std::move(m), label_.empty() ? label_ : label_ + "^dg");
}

DenseGate hadamard(std::size_t qubit) {
  const double h = 1.0 / std::sqrt(2.0);
  return DenseGate({qubit}, {h, h, h, -h}, "h");
}

DenseGate pauli_x_gate(std::size_t qubit) { return DenseGate({qubit}, {0.0, 1.0, 1.0, 0.0}, "x"); }

DenseGate phase_gate(std::size_t qubit, double lambda) {
  return DenseGate({qubit}, {1.0, 0.0, 0.0, std::polar(1.0, lambda)}, "p");
}

DenseGate cx(std::size_t control, std::size_t target) {
  // local index = bit(target) + 2*bit(control); flip target when control is set
  return DenseGate({target, control},
                   {1, 0, 0, 0,
                    0, 1, 0, 0,
                    0, 0, 0, 1,
                    0, 0, 1, 0},
                   "cx");
}

void apply_dense_gate_inplace(StateVector& state, const DenseGate& gate) {
  const auto& t = gate.targets();
  const auto& m = gate.matrix();
  for (std::size_t q : t)
    if (q >= state.n_qubits())
      throw DimensionError("gate target " + std::to_string(q) + " out of range for " +
                           std::to_string(state.n_qubits()) + " qubits");
  if (gate.arity() == 1) {
    const std::uint64_t bit = std::uint64_t{1} << t[0];
    for (std::uint64_t b = 0; b < state.dimension(); ++b) {
      if (b & bit) continue;
      const Complex a0 = state[b], a1 = state[b | bit];
      state[b] = m[0] * a0 + m[1] * a1;
      state[b | bit] = m[2] * a0 + m[3] * a1;
    }
    return;
  }
  const std::uint64_t b0 = std::uint64_t{1} << t[0], b1 = std::uint64_t{1} << t[1];
  const std::uint64_t idx[4] = {0, b0, b1, b0 | b1};
  for (std::uint64_t b = 0; b < state.dimension(); ++b) {
    if (b & (b0 | b1)) continue;
    Complex in[4], out[4];
    for (int k = 0; k < 4; ++k) in[k] = state[b | idx[k]];
    for (int r = 0; r < 4; ++r) {
      out[r] = 0.0;
      for (int c = 0; c < 4; ++c) out[r] += m[r * 4 + c] * in[c];
    }
    for (int k = 0; k < 4; ++k) state[b | idx[k]] = out[k];
  }
}

StateVector apply_dense_gate(const StateVector& state, const DenseGate& gate) {
  StateVector out = state;
  apply_dense_gate_inplace(out, gate);
  return out;
}

void apply_fixed_op(const FixedOp& op, StateVector& state) {
  if (const auto* g = std::get_if<DenseGate>(&op)) {
    apply_dense_gate_inplace(state, *g);
  } else {
    const auto& r = std::get<PauliRotation>(op);
    apply_pauli_rotation_inplace(state, r.generator, r.angle);
  }
}

void apply_fixed_op_adjoint(const FixedOp& op, StateVector& state) {
  if (const auto* g = std::get_if<DenseGate>(&op)) {
    apply_dense_gate_inplace(state, g->adjoint());
  } else {
    const auto& r = std::get<PauliRotation>(op);
    apply_pauli_rotation_inplace(state, r.generator, -r.angle);
  }
}

void apply_fixed_ops(const std::vector<FixedOp>& ops, StateVector& state) {
  for (const auto& op : ops) apply_fixed_op(op, state);
}

void apply_fixed_ops_adjoint(const std::vector<FixedOp>& ops, StateVector& state) {
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) apply_fixed_op_adjoint(*it, state);
}

}  // namespace qntk
