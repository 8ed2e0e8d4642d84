#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qntk/gate.hpp"
#include "qntk/pauli.hpp"
#include "qntk/state_vector.hpp"

namespace qntk {

/// One trainable layer: state -> W exp(i theta X) state, rotation first.
struct Layer {
  std::vector<FixedOp> fixed;  ///< W, applied front to back after the rotation
  PauliString generator;       ///< X, phase +1 or -1
  std::size_t angle_index = 0;
};

/// Ordered layers; layer 0 acts first on the input state.
class LayeredAnsatz {
 public:
  LayeredAnsatz() = default;
  /// Throws on empty layers, qubit mismatch, or angle indices that are not a permutation of 0..L-1.
  LayeredAnsatz(std::size_t n_qubits, std::vector<Layer> layers);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t size() const noexcept { return layers_.size(); }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Layer& layer(std::size_t k) const { return layers_.at(k); }

  /// Layer k with rotation angle taken from `angles[angle_index]`.
  void apply_layer(std::size_t k, std::span<const double> angles, StateVector& state) const;
  void apply_layer_adjoint(std::size_t k, std::span<const double> angles, StateVector& state) const;

  /// Layers [begin, end) in time order.
  void apply_range(std::size_t begin, std::size_t end, std::span<const double> angles,
                   StateVector& state) const;
  /// Adjoint of layers [begin, end): undoes apply_range.
  void apply_range_adjoint(std::size_t begin, std::size_t end, std::span<const double> angles,
                           StateVector& state) const;

  void check_angles(std::span<const double> angles) const;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<Layer> layers_;
};

/// Trainable angles. With a reference, the circuit angle is theta = theta* + scale * value.
struct ParameterVector {
  std::vector<double> values;
  std::optional<std::vector<double>> reference;
  double scale = 1.0;

  /// Angles fed to the circuit, indexed by angle_index.
  std::vector<double> angles() const;
};

StateVector prepare(const LayeredAnsatz& ansatz, std::span<const double> angles, const StateVector& input);
StateVector prepare(const LayeredAnsatz& ansatz, const ParameterVector& params, const StateVector& input);

/// A contiguous run of layers with frozen angles.
class CircuitSegment {
 public:
  CircuitSegment(const LayeredAnsatz& ansatz, std::vector<double> angles, std::size_t begin,
                 std::size_t end);
  StateVector apply(const StateVector& state) const;
  bool is_identity() const noexcept { return begin_ == end_; }

 private:
  const LayeredAnsatz* ansatz_;
  std::vector<double> angles_;
  std::size_t begin_, end_;
};

struct PartialProducts {
  CircuitSegment below;  ///< layers before `layer`
  CircuitSegment above;  ///< layers after `layer`
};

/// Splits the circuit around 0-based layer position `layer`.
/// The returned segments reference `ansatz`, which must outlive them.
PartialProducts partial_products(const LayeredAnsatz& ansatz, std::span<const double> angles,
                                 std::size_t layer);

/// Replaces each W_l by W_l exp(i theta*_l X_l), so that evaluating the result at
/// scale*phi reproduces the original circuit at theta* + scale*phi.
LayeredAnsatz absorb_reference(const LayeredAnsatz& ansatz, std::span<const double> reference);

/// Y-generated layer on every qubit, (reps + 1) blocks, linear CX chain between blocks.
LayeredAnsatz real_amplitudes(std::size_t n_qubits, std::size_t reps);
/// Y-generated layer on every qubit, `reps` blocks, no entanglers.
LayeredAnsatz ry_layers(std::size_t n_qubits, std::size_t reps);

/// Line-oriented text form; see README for the grammar.
std::string describe(const LayeredAnsatz& ansatz);
/// Inverse of describe(). The qubit count is the generator length.
/// Throws ParseError with the offending line number.
LayeredAnsatz parse_ansatz(std::string_view text);

}  // namespace qntk
