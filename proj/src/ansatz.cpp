#include "qntk/ansatz.hpp"

#include <cmath>

#include "qntk/error.hpp"

namespace qntk {

LayeredAnsatz::LayeredAnsatz(std::size_t n_qubits, std::vector<Layer> layers)
    : n_qubits_(n_qubits), layers_(std::move(layers)) {
  if (n_qubits_ == 0 || n_qubits_ > kMaxQubits) throw DimensionError("ansatz qubit count out of range");
  if (layers_.empty()) throw ValidationError("ansatz needs at least one layer");
  std::vector<bool> seen(layers_.size(), false);
  for (const auto& l : layers_) {
    if (l.generator.n_qubits() != n_qubits_)
      throw DimensionError("layer generator acts on " + std::to_string(l.generator.n_qubits()) +
                           " qubits, ansatz has " + std::to_string(n_qubits_));
    if (std::abs(std::abs(l.generator.phase()) - 1.0) > kDefaultTolerance)
      throw ValidationError("layer generator phase must be +1 or -1");
    if (l.angle_index >= layers_.size() || seen[l.angle_index])
      throw ValidationError("angle indices must be a permutation of 0..L-1");
    seen[l.angle_index] = true;
    for (const auto& op : l.fixed) {
      if (const auto* g = std::get_if<DenseGate>(&op)) {
        for (std::size_t q : g->targets())
          if (q >= n_qubits_) throw DimensionError("fixed gate target out of range");
      } else if (std::get<PauliRotation>(op).generator.n_qubits() != n_qubits_) {
        throw DimensionError("fixed rotation qubit count mismatch");
      }
    }
  }
}

void LayeredAnsatz::check_angles(std::span<const double> angles) const {
  if (angles.size() != layers_.size())
    throw ValidationError("expected " + std::to_string(layers_.size()) + " angles, got " +
                          std::to_string(angles.size()));
}

void LayeredAnsatz::apply_layer(std::size_t k, std::span<const double> angles, StateVector& state) const {
  const Layer& l = layers_[k];
  apply_pauli_rotation_inplace(state, l.generator, angles[l.angle_index]);
  apply_fixed_ops(l.fixed, state);
}

void LayeredAnsatz::apply_layer_adjoint(std::size_t k, std::span<const double> angles,
                                        StateVector& state) const {
  const Layer& l = layers_[k];
  apply_fixed_ops_adjoint(l.fixed, state);
  apply_pauli_rotation_inplace(state, l.generator, -angles[l.angle_index]);
}

void LayeredAnsatz::apply_range(std::size_t begin, std::size_t end, std::span<const double> angles,
                                StateVector& state) const {
  for (std::size_t k = begin; k < end; ++k) apply_layer(k, angles, state);
}

void LayeredAnsatz::apply_range_adjoint(std::size_t begin, std::size_t end,
                                        std::span<const double> angles, StateVector& state) const {
  for (std::size_t k = end; k > begin; --k) apply_layer_adjoint(k - 1, angles, state);
}

std::vector<double> ParameterVector::angles() const {
  if (!reference) return values;
  if (reference->size() != values.size())
    throw ValidationError("reference length differs from parameter length");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (*reference)[i] + scale * values[i];
  return out;
}

StateVector prepare(const LayeredAnsatz& ansatz, std::span<const double> angles, const StateVector& input) {
  ansatz.check_angles(angles);
  if (input.n_qubits() != ansatz.n_qubits()) throw DimensionError("input state qubit count mismatch");
  StateVector s = input;
  ansatz.apply_range(0, ansatz.size(), angles, s);
  return s;
}

StateVector prepare(const LayeredAnsatz& ansatz, const ParameterVector& params, const StateVector& input) {
  return prepare(ansatz, params.angles(), input);
}

CircuitSegment::CircuitSegment(const LayeredAnsatz& ansatz, std::vector<double> angles,
                               std::size_t begin, std::size_t end)
    : ansatz_(&ansatz), angles_(std::move(angles)), begin_(begin), end_(end) {}

StateVector CircuitSegment::apply(const StateVector& state) const {
  StateVector s = state;
  ansatz_->apply_range(begin_, end_, angles_, s);
  return s;
}

PartialProducts partial_products(const LayeredAnsatz& ansatz, std::span<const double> angles,
                                 std::size_t layer) {
  ansatz.check_angles(angles);
  if (layer >= ansatz.size())
    throw DimensionError("layer " + std::to_string(layer) + " out of range for L=" +
                         std::to_string(ansatz.size()));
  std::vector<double> a(angles.begin(), angles.end());
  return {CircuitSegment(ansatz, a, 0, layer), CircuitSegment(ansatz, a, layer + 1, ansatz.size())};
}

LayeredAnsatz absorb_reference(const LayeredAnsatz& ansatz, std::span<const double> reference) {
  ansatz.check_angles(reference);
  std::vector<Layer> layers = ansatz.layers();
  for (auto& l : layers)
    l.fixed.insert(l.fixed.begin(), PauliRotation{l.generator, reference[l.angle_index]});
  return LayeredAnsatz(ansatz.n_qubits(), std::move(layers));
}

namespace {

std::vector<Layer> y_block(std::size_t n_qubits, std::size_t first_index) {
  std::vector<Layer> block;
  for (std::size_t q = 0; q < n_qubits; ++q)
    block.push_back({{}, PauliString::single(n_qubits, q, Pauli::Y), first_index + q});
  return block;
}

}  // namespace

LayeredAnsatz real_amplitudes(std::size_t n_qubits, std::size_t reps) {
  if (n_qubits < 2) throw ValidationError("real_amplitudes needs at least 2 qubits");
  if (reps < 1) throw ValidationError("real_amplitudes needs reps >= 1");
  std::vector<Layer> layers;
  for (std::size_t r = 0; r <= reps; ++r) {
    auto block = y_block(n_qubits, layers.size());
    if (r < reps)
      for (std::size_t q = 0; q + 1 < n_qubits; ++q) block.back().fixed.emplace_back(cx(q, q + 1));
    layers.insert(layers.end(), block.begin(), block.end());
  }
  return LayeredAnsatz(n_qubits, std::move(layers));
}

LayeredAnsatz ry_layers(std::size_t n_qubits, std::size_t reps) {
  if (reps < 1) throw ValidationError("ry_layers needs reps >= 1");
  std::vector<Layer> layers;
  for (std::size_t r = 0; r < reps; ++r) {
    auto block = y_block(n_qubits, layers.size());
    layers.insert(layers.end(), block.begin(), block.end());
  }
  return LayeredAnsatz(n_qubits, std::move(layers));
}

}  // namespace qntk
