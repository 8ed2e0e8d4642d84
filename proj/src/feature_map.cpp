#include "qntk/feature_map.hpp"

#include "qntk/error.hpp"
#include "qntk/numeric.hpp"

namespace qntk {

FeatureMap::FeatureMap(std::size_t n_qubits, std::size_t input_dim, Builder builder, std::string name)
    : n_qubits_(n_qubits), input_dim_(input_dim), builder_(std::move(builder)), name_(std::move(name)) {
  if (n_qubits_ == 0 || n_qubits_ > kMaxQubits) throw DimensionError("feature map qubit count out of range");
  if (!builder_) throw ValidationError("feature map needs a builder");
}

std::vector<FixedOp> FeatureMap::circuit(std::span<const double> x) const {
  if (x.size() != input_dim_)
    throw DimensionError("feature map '" + name_ + "' expects " + std::to_string(input_dim_) +
                         " inputs, got " + std::to_string(x.size()));
  return builder_(x);
}

StateVector FeatureMap::encode(std::span<const double> x) const {
  StateVector s(n_qubits_);
  apply_fixed_ops(circuit(x), s);
  return s;
}

FeatureMap zz_feature_map(std::size_t n_qubits, std::size_t reps) {
  if (reps < 1) throw ValidationError("zz feature map needs reps >= 1");
  auto builder = [n_qubits, reps](std::span<const double> x) {
    std::vector<FixedOp> ops;
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t q = 0; q < n_qubits; ++q) ops.emplace_back(hadamard(q));
      for (std::size_t q = 0; q < n_qubits; ++q) ops.emplace_back(phase_gate(q, 2.0 * x[q]));
      for (std::size_t i = 0; i < n_qubits; ++i)
        for (std::size_t j = i + 1; j < n_qubits; ++j) {
          ops.emplace_back(cx(i, j));
          ops.emplace_back(phase_gate(j, 2.0 * (kPi - x[i]) * (kPi - x[j])));
          ops.emplace_back(cx(i, j));
        }
    }
    return ops;
  };
  return FeatureMap(n_qubits, n_qubits, builder, "zz-reps" + std::to_string(reps));
}

StateVector zz_feature_map(std::span<const double> x, std::size_t reps) {
  return zz_feature_map(x.size(), reps).encode(x);
}

}  // namespace qntk
