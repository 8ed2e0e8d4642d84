#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "qntk/ansatz.hpp"
#include "qntk/pauli.hpp"
#include "qntk/state_vector.hpp"

namespace qntk {

/// dz/dtheta = kBracketSign * i<[X_l, M_l]>, where M_l is the observable pulled
/// back to just after rotation l. Fixed by finite differences.
inline constexpr double kBracketSign = -1.0;

enum class Residual { OutputMinusTarget, TargetMinusOutput };

/// z = <U(theta) input | obs | U(theta) input>.
double output_value(const LayeredAnsatz& ansatz, std::span<const double> angles,
                    const StateVector& input, const PauliObservable& obs);

/// z - target by default; target - z under TargetMinusOutput.
double residual_error(const LayeredAnsatz& ansatz, std::span<const double> angles,
                      const StateVector& input, const PauliObservable& obs, double target,
                      Residual convention = Residual::OutputMinusTarget);

/// dz/dtheta indexed by parameter (angle_index), by one adjoint sweep.
std::vector<double> grad_z(const LayeredAnsatz& ansatz, std::span<const double> angles,
                           const StateVector& input, const PauliObservable& obs);

/// d^2 z / dtheta_a dtheta_b indexed by parameter. Symmetric.
Eigen::MatrixXd hessian_z(const LayeredAnsatz& ansatz, std::span<const double> angles,
                          const StateVector& input, const PauliObservable& obs);

/// Second derivative for layers at time positions `later` >= `earlier`, from the
/// nested commutator with the inner bracket taken at the later layer.
double nested_commutator_expectation(const LayeredAnsatz& ansatz, std::span<const double> angles,
                                     const StateVector& input, const PauliObservable& obs,
                                     std::size_t later, std::size_t earlier);

/// G(l1, l2) in time positions: dispatches so the inner bracket sits at max(l1, l2).
double g_entry(const LayeredAnsatz& ansatz, std::span<const double> angles, const StateVector& input,
               const PauliObservable& obs, std::size_t l1, std::size_t l2);

/// Sum over layers of (dz/dtheta)^2.
double qntk_optimization(const LayeredAnsatz& ansatz, std::span<const double> angles,
                         const StateVector& input, const PauliObservable& obs);

struct FrozenKernelValue {
  double value = 0.0;
  bool zero_scale = false;  ///< set when delta == 0
};

/// delta^2 sum (dz/dtheta)^2 on the circuit with theta* absorbed into W, at phi = 0.
FrozenKernelValue frozen_qntk_optimization(const LayeredAnsatz& ansatz, const ParameterVector& params,
                                           const StateVector& input, const PauliObservable& obs);

/// 2 eta delta^2 L ||O||^2 max ||X_l||^2, with ||O|| bounded by the coefficient 1-norm.
double frozen_bound(const LayeredAnsatz& ansatz, const PauliObservable& obs, double delta, double eta);

/// delta^4 sum Theta_l1 Theta_l2 G_l1l2 at theta*.
double meta_kernel_optimization(const LayeredAnsatz& ansatz, const ParameterVector& params,
                                const StateVector& input, const PauliObservable& obs);

/// 2 delta^3 sum Theta_l G_ll' phi0_l' at theta*.
double k_delta_optimization(const LayeredAnsatz& ansatz, const ParameterVector& params,
                            const StateVector& input, const PauliObservable& obs,
                            std::span<const double> phi0);

/// (sample, observable) pair; flat index = sample * n_observables + observable.
struct CompoundIndex {
  std::size_t sample = 0;
  std::size_t observable = 0;
  friend bool operator==(const CompoundIndex&, const CompoundIndex&) = default;
};

std::vector<CompoundIndex> compound_indices(std::size_t n_samples, std::size_t n_observables);

/// Symmetric PSD matrix over compound indices.
struct KernelMatrix {
  Eigen::MatrixXd entries;
  std::vector<CompoundIndex> indices;
  double delta_scale = 0.0;  ///< 0 means raw-theta coordinates

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  double max_asymmetry() const;
  /// Descending.
  Eigen::VectorXd eigenvalues() const;
  /// Eigenvalues above rel * lambda_max.
  std::size_t rank(double rel = kRankCutoff) const;
  /// min eigenvalue >= -rel * lambda_max
  bool is_psd(double rel = kRankCutoff) const;
};

/// J(l, a) = dz_a / dtheta_l over all compound indices a.
Eigen::MatrixXd jacobian(const LayeredAnsatz& ansatz, std::span<const double> angles,
                         std::span<const StateVector> inputs, std::span<const PauliObservable> observables);

/// J^T J.
KernelMatrix qntk_learning(const LayeredAnsatz& ansatz, std::span<const double> angles,
                           std::span<const StateVector> inputs, std::span<const PauliObservable> observables);

/// delta^2 J^T J with J taken on the circuit with theta* absorbed, at phi = 0.
KernelMatrix frozen_qntk_learning(const LayeredAnsatz& ansatz, const ParameterVector& params,
                                  std::span<const StateVector> inputs,
                                  std::span<const PauliObservable> observables);

/// First and second theta-derivatives of every z_a at theta*, with the scale delta.
struct DerivativeTensors {
  Eigen::MatrixXd theta;        ///< L x N, dz_a/dtheta_l
  std::vector<Eigen::MatrixXd> g;  ///< N matrices L x L, d^2 z_a / dtheta dtheta
  double delta = 1.0;
  std::vector<CompoundIndex> indices;
};

DerivativeTensors derivative_tensors(const LayeredAnsatz& ansatz, const ParameterVector& params,
                                     std::span<const StateVector> inputs,
                                     std::span<const PauliObservable> observables);

/// Dense N x N x N tensor, mu(a0, a1, a2) symmetric in (a1, a2).
class MetaKernel {
 public:
  MetaKernel() = default;
  explicit MetaKernel(std::size_t n) : n_(n), data_(n * n * n, 0.0) {}
  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t a0, std::size_t a1, std::size_t a2) { return data_[(a0 * n_ + a1) * n_ + a2]; }
  double operator()(std::size_t a0, std::size_t a1, std::size_t a2) const {
    return data_[(a0 * n_ + a1) * n_ + a2];
  }
  double max_abs() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// mu(a0,a1,a2) = delta^4 sum Theta_l1^a1 Theta_l2^a2 G_l1l2^a0.
MetaKernel meta_kernel_learning(const DerivativeTensors& t);

/// delta^3 [(G^a phi0) . Theta^b + (G^b phi0) . Theta^a].
KernelMatrix k_delta_learning(const DerivativeTensors& t, std::span<const double> phi0);

/// Header row and column labels s<k>:o<j>.
void write_kernel_csv(std::ostream& out, const KernelMatrix& k);
/// index,eigenvalue rows, index 1-based, descending.
void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& eigenvalues);

}  // namespace qntk
