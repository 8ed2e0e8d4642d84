#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "qntk/ansatz.hpp"
#include "qntk/kernels.hpp"

namespace qntk {

enum class Mode { Optimization, Learning };

/// Square loss over compound indices, with residual z - target (optimization)
/// or target - z (learning). Trainable coordinates are theta, or phi with
/// theta = reference + delta * phi once a reference is set.
class Problem {
 public:
  Problem(LayeredAnsatz ansatz, std::vector<StateVector> inputs, std::vector<PauliObservable> observables,
          std::vector<double> targets, Mode mode);

  Problem with_reference(std::vector<double> reference, double delta) const;

  const LayeredAnsatz& ansatz() const noexcept { return ansatz_; }
  const std::vector<StateVector>& inputs() const noexcept { return inputs_; }
  const std::vector<PauliObservable>& observables() const noexcept { return observables_; }
  const std::vector<double>& targets() const noexcept { return targets_; }
  Mode mode() const noexcept { return mode_; }
  Residual convention() const noexcept;
  const std::optional<std::vector<double>>& reference() const noexcept { return reference_; }
  double delta() const noexcept { return delta_; }
  std::size_t n_params() const noexcept { return ansatz_.size(); }
  std::size_t n_indices() const noexcept { return targets_.size(); }

  std::vector<double> angles(std::span<const double> coords) const;
  /// Coordinates that reproduce the given circuit angles.
  std::vector<double> coords_for(std::span<const double> angles) const;
  ParameterVector parameters(std::span<const double> coords) const;

  Eigen::VectorXd outputs(std::span<const double> coords) const;
  Eigen::VectorXd residuals(std::span<const double> coords) const;
  /// dz_a / dcoord_l, L x N.
  Eigen::MatrixXd jacobian(std::span<const double> coords) const;
  /// Dynamical kernel in the trainable coordinates.
  KernelMatrix kernel(std::span<const double> coords) const;
  /// 0.5 * sum eps^2
  double loss(std::span<const double> coords) const;
  Eigen::VectorXd loss_gradient(std::span<const double> coords) const;

 private:
  LayeredAnsatz ansatz_;
  std::vector<StateVector> inputs_;
  std::vector<PauliObservable> observables_;
  std::vector<double> targets_;
  Mode mode_;
  std::optional<std::vector<double>> reference_;
  double delta_ = 1.0;
};

struct DescentConfig {
  double learning_rate = 0.1;
  std::size_t steps = 100;
  std::size_t record_kernel_every = 0;  ///< 0 disables kernel snapshots
  double grad_tolerance = 0.0;          ///< stop early when ||dL/dcoord|| falls below; 0 disables
  double divergence_factor = 10.0;      ///< abort when ||eps|| exceeds this multiple of ||eps(0)||
};

struct TraceStep {
  std::size_t t = 0;
  std::vector<double> coords;
  std::vector<double> theta;
  Eigen::VectorXd z;
  Eigen::VectorXd eps;
  double loss = 0.0;
  double eta_lambda_max = 0.0;
  std::vector<double> kernel_eigenvalues;  ///< descending; empty when not recorded
};

struct TrainingTrace {
  std::vector<TraceStep> steps;
  bool stability_warning = false;   ///< eta * lambda_max(K^E(0)) >= 2
  bool monotone = true;             ///< loss never increased
  bool monotone_check_applies = true;  ///< eta * lambda_max(K^E(t)) < 1 at every step
  bool early_stopped = false;
};

/// coords - eta * dL/dcoords
std::vector<double> gd_step(const Problem& problem, std::span<const double> coords, double eta);

/// Records t = 0..T (T + 1 rows unless stopped early). Throws DivergenceError.
TrainingTrace train(const Problem& problem, std::vector<double> initial_coords, const DescentConfig& config);

struct KernelSnapshot {
  std::size_t t = 0;
  std::vector<double> eigenvalues;  ///< descending
};

/// Dynamical-kernel eigenvalues per step of `trace`: stored snapshots where
/// recorded, otherwise recomputed at that step's coordinates.
std::vector<KernelSnapshot> dynamical_kernel_trace(const TrainingTrace& trace, const Problem& problem);

struct Validity {
  double eta_lambda_max = 0.0;
  double delta = 0.0;
  double spectral_radius = 0.0;  ///< max |1 - eta lambda| over the signal eigenspace
};

struct FrozenOptimizationPrediction {
  std::vector<double> eps;         ///< t = 0..T
  double convergence_rate = 0.0;   ///< -log(1 - eta K); +inf when eta K == 1, NaN beyond
  bool oscillatory = false;        ///< eta K >= 1
};

FrozenOptimizationPrediction predict_frozen_optimization(double k, double eps0, double eta, std::size_t steps);

struct LearningPrediction {
  Eigen::MatrixXd eps;  ///< (T + 1) x N
  Validity validity;
};

/// (1 - eta K)^t eps0 in the eigenbasis; nullspace modes are held fixed.
LearningPrediction predict_frozen_learning(const Eigen::MatrixXd& k, const Eigen::VectorXd& eps0, double eta,
                                           std::size_t steps);

struct DqntkOptimizationPrediction {
  std::vector<double> free;
  std::vector<double> interacting;
  std::vector<double> total;
};

/// eps^F(t) = (1 - eta K)^t eps0, eps^I(t) = -eta t (1 - eta K)^{t-1} K^Delta eps0.
DqntkOptimizationPrediction predict_dqntk_optimization(double k, double k_delta, double eps0, double eta,
                                                       std::size_t steps);

struct DqntkLearningPrediction {
  Eigen::MatrixXd free;
  Eigen::MatrixXd interacting;
  Eigen::MatrixXd total;
  bool norm_bound_holds = true;
  Validity validity;
};

/// eps^I(t) = -eta sum_s (1 - eta K)^{t-1-s} K^Delta (1 - eta K)^s eps0, summed in the K eigenbasis.
DqntkLearningPrediction predict_dqntk_learning(const Eigen::MatrixXd& k, const Eigen::MatrixXd& k_delta,
                                               const Eigen::VectorXd& eps0, double eta, std::size_t steps);

struct AsymptoticPrediction {
  Eigen::VectorXd z;                 ///< over all indices of K_full
  Eigen::VectorXd residual_limit;    ///< training residual left in the kernel nullspace
  std::vector<bool> nonconvergent;   ///< per training index
};

/// z(inf) = z0 + K_full[:, train] K~^+ eps0 under the eps = y - z convention.
/// The first eps0.size() indices of K_full are the training set.
AsymptoticPrediction asymptotic_output(const Eigen::MatrixXd& k_full, const Eigen::VectorXd& eps0,
                                       const Eigen::VectorXd& z0);

/// Rank-4 tensor over training indices.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(std::size_t n) : n_(n), data_(n * n * n * n, 0.0) {}
  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return data_[((a * n_ + b) * n_ + c) * n_ + d];
  }
  double operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return data_[((a * n_ + b) * n_ + c) * n_ + d];
  }
  double max_abs() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct AlgorithmProjectors {
  double eta = 0.0;
  Eigen::MatrixXd k_inverse;   ///< pseudo-inverse of K~
  Tensor4 x_parallel;          ///< sum_s [(1-eta K)^s]_{13} [(1-eta K)^s]_{24} on the signal space
  Tensor4 x_relation;          ///< eta * x_parallel, the normalization solving the defining relation
  Tensor4 z_a;
  Tensor4 z_b;
  double relation_residual = 0.0;  ///< max entry of sum X (K d + d K - eta K K) - P (x) P
};

/// Throws NumericalError when some signal eigenvalue has |1 - eta lambda| >= 1.
AlgorithmProjectors algorithm_projectors(const Eigen::MatrixXd& k_train, double eta);

/// Second-order asymptotic output under eps = y - z. `mu` spans all indices of
/// K_full; the first eps0.size() of them are the training set.
Eigen::VectorXd dqntk_asymptotic_output(const Eigen::MatrixXd& k_full, const MetaKernel& mu,
                                        const AlgorithmProjectors& projectors, const Eigen::VectorXd& eps0,
                                        const Eigen::VectorXd& z0);

}  // namespace qntk
