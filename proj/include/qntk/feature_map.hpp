#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qntk/gate.hpp"
#include "qntk/state_vector.hpp"

namespace qntk {

/// Deterministic rule x -> gate sequence, applied to |0...0>.
class FeatureMap {
 public:
  using Builder = std::function<std::vector<FixedOp>(std::span<const double>)>;

  FeatureMap(std::size_t n_qubits, std::size_t input_dim, Builder builder, std::string name);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  const std::string& name() const noexcept { return name_; }

  std::vector<FixedOp> circuit(std::span<const double> x) const;
  StateVector encode(std::span<const double> x) const;

 private:
  std::size_t n_qubits_;
  std::size_t input_dim_;
  Builder builder_;
  std::string name_;
};

/// Per repetition: H on all qubits, P(2 x_i) on qubit i, then for each i < j
/// CX(i,j), P(2 (pi - x_i)(pi - x_j)) on j, CX(i,j).
FeatureMap zz_feature_map(std::size_t n_qubits, std::size_t reps);
StateVector zz_feature_map(std::span<const double> x, std::size_t reps);

}  // namespace qntk
