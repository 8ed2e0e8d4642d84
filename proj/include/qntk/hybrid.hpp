#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qntk/ansatz.hpp"
#include "qntk/feature_map.hpp"
#include "qntk/pauli.hpp"

namespace qntk {

enum class Activation { Identity, Tanh, Relu };

double activate(Activation a, double x);
std::string_view activation_name(Activation a);
/// "identity", "tanh" or "relu".
Activation parse_activation(std::string_view name);

/// Feature map -> ansatz -> observable expectations z^Q -> preactivation
/// z^C = W z^Q + b -> activation w.
struct HybridLayer {
  FeatureMap feature_map;
  LayeredAnsatz ansatz;
  std::vector<double> angles;
  std::vector<PauliObservable> observables;
  Eigen::MatrixXd weights;  ///< out_dim x width
  Eigen::VectorXd biases;   ///< out_dim
  Activation activation = Activation::Identity;
  bool orthogonal = false;  ///< require pairwise trace-orthogonal observables

  std::size_t width() const noexcept { return observables.size(); }
  std::size_t out_dim() const noexcept { return static_cast<std::size_t>(weights.rows()); }
  /// Throws DimensionError / ValidationError; width is capped at 4^n.
  void validate() const;
};

struct HybridPass {
  std::vector<Eigen::VectorXd> quantum;        ///< z^Q per layer
  std::vector<Eigen::VectorXd> preactivation;  ///< z^C per layer
  std::vector<Eigen::VectorXd> activation;     ///< w per layer
};

HybridPass hybrid_trace(std::span<const HybridLayer> layers, std::span<const double> x);
/// Final-layer preactivation z^C.
Eigen::VectorXd hybrid_forward(std::span<const HybridLayer> layers, std::span<const double> x);

/// tr(A B) / 2^n for real-weighted Pauli sums.
double observable_trace_inner(const PauliObservable& a, const PauliObservable& b);

enum class AnsatzDistribution { RandomAngles, RandomPauliLayers };

std::string_view distribution_name(AnsatzDistribution d);
/// "random-angles" or "random-pauli-layers".
AnsatzDistribution parse_distribution(std::string_view name);

struct EnsembleSpec {
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  double c_w = 1.0;
  double c_b = 0.0;
  AnsatzDistribution ansatz_distribution = AnsatzDistribution::RandomPauliLayers;
};

/// splitmix64 of (master, stream); independent seeds for parallel samples.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

struct ClassicalInit {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
};

/// W_jk ~ N(0, C_W / width), b_j ~ N(0, C_b), drawn from `rng`.
ClassicalInit sample_classical_init(double c_w, double c_b, std::size_t out_dim, std::size_t width,
                                    std::mt19937_64& rng);
/// Same, seeded by derive_seed(spec.seed, stream).
ClassicalInit sample_classical_init(const EnsembleSpec& spec, std::size_t out_dim, std::size_t width,
                                    std::uint64_t stream = 0);

struct SampledAnsatz {
  LayeredAnsatz ansatz;
  std::vector<double> angles;  ///< uniform in [0, 2 pi)
};

/// `depth` blocks; each block rotates every qubit about a uniformly random
/// X/Y/Z axis and ends with Haar-random two-qubit entanglers in a brickwork
/// pattern. Under RandomAngles the structure depends on spec.seed only and the
/// angles on the stream; under RandomPauliLayers both depend on the stream.
SampledAnsatz sample_random_ansatz(const EnsembleSpec& spec, std::size_t n_qubits, std::size_t depth,
                                   std::uint64_t stream = 0);

/// First `count` non-identity Pauli strings on n qubits in a seeded shuffled
/// order; prefixes of one order are nested.
std::vector<PauliObservable> distinct_paulis(std::size_t n_qubits, std::size_t count, std::uint64_t seed);

struct FourPointEstimate {
  std::size_t width = 0;
  double connected_value = 0.0;
  double standard_error = 0.0;
  double two_point_scale = 0.0;  ///< sum of the three Wick pairings E(zz)E(zz)
  std::size_t n_samples = 0;

  double normalized() const { return connected_value / two_point_scale; }
  double normalized_error() const { return standard_error / std::abs(two_point_scale); }
};

/// E(z1z2z3z4) - E(z1z2)E(z3z4) - E(z1z3)E(z2z4) - E(z1z4)E(z2z3) with a
/// delete-one-block jackknife standard error. Needs >= 1000 samples.
FourPointEstimate connected_four_point(std::span<const std::array<double, 4>> samples, std::size_t blocks = 100);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;
  double ci_low = 0.0;   ///< 95% interval
  double ci_high = 0.0;
  bool reliable = false;
  std::string note;  ///< reason when unreliable
};

/// Weighted least squares of log|normalized E_conn| on log(width).
ScalingFit fit_scaling(std::span<const FourPointEstimate> points);

struct WidthScanConfig {
  std::vector<std::size_t> widths{4, 16, 64, 256};
  std::size_t n_qubits = 5;
  std::size_t depth = 8;
  std::size_t out_dim = 128;       ///< preactivation neurons per ensemble member
  std::size_t feature_reps = 2;
  std::vector<std::vector<double>> data_points;  ///< four points; empty repeats one seeded point
  bool gaussian_control = false;   ///< replace the network by Gaussian tuples of matched covariance
};

struct WidthScanResult {
  std::vector<FourPointEstimate> points;
  ScalingFit fit;
};

/// One independent ensemble per width; every member contributes out_dim tuples
/// (z^C_j(x1), ..., z^C_j(x4)).
WidthScanResult width_scan(const WidthScanConfig& config, const EnsembleSpec& spec);

/// `width, e_conn, se, e2_norm, n_samples` rows.
void write_width_scan_csv(std::ostream& out, const WidthScanResult& result);

}  // namespace qntk
