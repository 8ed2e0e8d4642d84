#include "qntk/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qntk/error.hpp"
#include "qntk/linalg.hpp"
#include "qntk/parallel.hpp"

namespace qntk {

namespace {

double max_eigenvalue(const Eigen::MatrixXd& k) {
  if (k.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (k + k.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

std::vector<double> descending(const Eigen::MatrixXd& k) {
  const Eigen::VectorXd v = symmetric_eigen(k).values;
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(v.size() - 1 - i);
  return out;
}

// Per-mode multipliers (1 - eta lambda); nullspace modes are pinned to 1.
Eigen::VectorXd mode_factors(const SymmetricSpectrum& s, double eta) {
  Eigen::VectorXd u(s.values.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = s.is_signal(i) ? 1.0 - eta * s.values(i) : 1.0;
  return u;
}

Validity make_validity(const SymmetricSpectrum& s, double eta) {
  Validity v;
  v.eta_lambda_max = s.values.size() ? eta * s.values.maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    if (s.is_signal(i)) v.spectral_radius = std::max(v.spectral_radius, std::abs(1.0 - eta * s.values(i)));
  return v;
}

void require_square(const Eigen::MatrixXd& k, Eigen::Index n, const char* what) {
  if (k.rows() != n || k.cols() != n) throw DimensionError(std::string(what) + ": size mismatch");
}

}  // namespace

Problem::Problem(LayeredAnsatz ansatz, std::vector<StateVector> inputs, std::vector<PauliObservable> observables,
                 std::vector<double> targets, Mode mode)
    : ansatz_(std::move(ansatz)),
      inputs_(std::move(inputs)),
      observables_(std::move(observables)),
      targets_(std::move(targets)),
      mode_(mode) {
  if (inputs_.empty() || observables_.empty()) throw ValidationError("problem needs a sample and an observable");
  if (targets_.size() != inputs_.size() * observables_.size())
    throw DimensionError("targets must cover every compound index");
  const std::size_t dim = std::size_t{1} << ansatz_.n_qubits();
  for (const auto& in : inputs_)
    if (in.dimension() != dim) throw DimensionError("input register does not match the ansatz");
}

Problem Problem::with_reference(std::vector<double> reference, double delta) const {
  if (reference.size() != n_params()) throw DimensionError("reference length must equal the parameter count");
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  Problem p = *this;
  p.reference_ = std::move(reference);
  p.delta_ = delta;
  return p;
}

Residual Problem::convention() const noexcept {
  return mode_ == Mode::Optimization ? Residual::OutputMinusTarget : Residual::TargetMinusOutput;
}

std::vector<double> Problem::angles(std::span<const double> coords) const {
  if (coords.size() != n_params()) throw DimensionError("coordinate length must equal the parameter count");
  std::vector<double> out(coords.begin(), coords.end());
  if (reference_)
    for (std::size_t l = 0; l < out.size(); ++l) out[l] = (*reference_)[l] + delta_ * coords[l];
  return out;
}

std::vector<double> Problem::coords_for(std::span<const double> theta) const {
  if (theta.size() != n_params()) throw DimensionError("angle length must equal the parameter count");
  std::vector<double> out(theta.begin(), theta.end());
  if (reference_)
    for (std::size_t l = 0; l < out.size(); ++l) out[l] = (theta[l] - (*reference_)[l]) / delta_;
  return out;
}

ParameterVector Problem::parameters(std::span<const double> coords) const {
  ParameterVector p;
  p.values.assign(coords.begin(), coords.end());
  p.reference = reference_;
  p.scale = reference_ ? delta_ : 1.0;
  return p;
}

Eigen::VectorXd Problem::outputs(std::span<const double> coords) const {
  const std::vector<double> theta = angles(coords);
  const std::size_t n_obs = observables_.size();
  Eigen::VectorXd z(static_cast<Eigen::Index>(n_indices()));
  parallel_for(inputs_.size(), [&](std::size_t s) {
    const StateVector psi = prepare(ansatz_, theta, inputs_[s]);
    for (std::size_t o = 0; o < n_obs; ++o) z(static_cast<Eigen::Index>(s * n_obs + o)) = expectation(psi, observables_[o]);
  });
  return z;
}

Eigen::VectorXd Problem::residuals(std::span<const double> coords) const {
  const Eigen::VectorXd z = outputs(coords);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets_.data(), z.size());
  return mode_ == Mode::Optimization ? Eigen::VectorXd(z - y) : Eigen::VectorXd(y - z);
}

Eigen::MatrixXd Problem::jacobian(std::span<const double> coords) const {
  const std::vector<double> theta = angles(coords);
  Eigen::MatrixXd j = qntk::jacobian(ansatz_, theta, inputs_, observables_);
  if (reference_) j *= delta_;
  return j;
}

KernelMatrix Problem::kernel(std::span<const double> coords) const {
  const Eigen::MatrixXd j = jacobian(coords);
  return {j.transpose() * j, compound_indices(inputs_.size(), observables_.size()), reference_ ? delta_ : 0.0};
}

double Problem::loss(std::span<const double> coords) const { return 0.5 * residuals(coords).squaredNorm(); }

Eigen::VectorXd Problem::loss_gradient(std::span<const double> coords) const {
  const Eigen::VectorXd eps = residuals(coords);
  const Eigen::MatrixXd j = jacobian(coords);
  return mode_ == Mode::Optimization ? Eigen::VectorXd(j * eps) : Eigen::VectorXd(-(j * eps));
}

std::vector<double> gd_step(const Problem& problem, std::span<const double> coords, double eta) {
  const Eigen::VectorXd g = problem.loss_gradient(coords);
  std::vector<double> out(coords.begin(), coords.end());
  for (std::size_t l = 0; l < out.size(); ++l) out[l] -= eta * g(static_cast<Eigen::Index>(l));
  return out;
}

TrainingTrace train(const Problem& problem, std::vector<double> coords, const DescentConfig& config) {
  if (coords.size() != problem.n_params()) throw DimensionError("initial coordinates have the wrong length");
  if (!(config.learning_rate >= 0.0)) throw ValidationError("learning rate must be nonnegative");
  const double eta = config.learning_rate;
  const Eigen::Map<const Eigen::VectorXd> y(problem.targets().data(), static_cast<Eigen::Index>(problem.n_indices()));
  const bool optimization = problem.mode() == Mode::Optimization;

  TrainingTrace trace;
  trace.steps.reserve(config.steps + 1);
  double eps0_norm = 0.0;
  for (std::size_t t = 0;; ++t) {
    TraceStep step;
    step.t = t;
    step.coords = coords;
    step.theta = problem.angles(coords);
    step.z = problem.outputs(coords);
    step.eps = optimization ? Eigen::VectorXd(step.z - y) : Eigen::VectorXd(y - step.z);
    step.loss = 0.5 * step.eps.squaredNorm();
    const Eigen::MatrixXd j = problem.jacobian(coords);
    const Eigen::MatrixXd k = j.transpose() * j;
    step.eta_lambda_max = eta * max_eigenvalue(k);
    if (config.record_kernel_every > 0 && t % config.record_kernel_every == 0) step.kernel_eigenvalues = descending(k);

    const double norm = step.eps.norm();
    if (t == 0) {
      eps0_norm = norm;
      trace.stability_warning = step.eta_lambda_max >= 2.0;
    } else {
      if (step.loss > trace.steps.back().loss) trace.monotone = false;
      if (eps0_norm > 0.0 && norm > config.divergence_factor * eps0_norm)
        throw DivergenceError("residual norm grew to " + std::to_string(norm / eps0_norm) + "x its initial value at step " +
                                  std::to_string(t),
                              t, norm / eps0_norm);
      if (!std::isfinite(norm)) throw DivergenceError("residual is not finite at step " + std::to_string(t), t, norm);
    }
    if (step.eta_lambda_max >= 1.0) trace.monotone_check_applies = false;

    const Eigen::VectorXd grad = optimization ? Eigen::VectorXd(j * step.eps) : Eigen::VectorXd(-(j * step.eps));
    trace.steps.push_back(std::move(step));
    if (t == config.steps) break;
    if (config.grad_tolerance > 0.0 && grad.norm() < config.grad_tolerance) {
      trace.early_stopped = true;
      break;
    }
    for (std::size_t l = 0; l < coords.size(); ++l) coords[l] -= eta * grad(static_cast<Eigen::Index>(l));
  }
  return trace;
}

std::vector<KernelSnapshot> dynamical_kernel_trace(const TrainingTrace& trace, const Problem& problem) {
  std::vector<KernelSnapshot> out(trace.steps.size());
  parallel_for(trace.steps.size(), [&](std::size_t i) {
    const TraceStep& s = trace.steps[i];
    out[i].t = s.t;
    out[i].eigenvalues = s.kernel_eigenvalues.empty() ? descending(problem.kernel(s.coords).entries) : s.kernel_eigenvalues;
  });
  return out;
}

FrozenOptimizationPrediction predict_frozen_optimization(double k, double eps0, double eta, std::size_t steps) {
  FrozenOptimizationPrediction p;
  const double u = 1.0 - eta * k;
  p.eps.resize(steps + 1);
  double value = eps0;
  for (std::size_t t = 0; t <= steps; ++t) {
    p.eps[t] = value;
    value *= u;
  }
  p.oscillatory = eta * k >= 1.0;
  if (u > 0.0)
    p.convergence_rate = -std::log(u);
  else if (u == 0.0)
    p.convergence_rate = std::numeric_limits<double>::infinity();
  else
    p.convergence_rate = std::numeric_limits<double>::quiet_NaN();
  return p;
}

LearningPrediction predict_frozen_learning(const Eigen::MatrixXd& k, const Eigen::VectorXd& eps0, double eta,
                                           std::size_t steps) {
  require_square(k, eps0.size(), "predict_frozen_learning");
  const SymmetricSpectrum s = symmetric_eigen(k);
  const Eigen::VectorXd u = mode_factors(s, eta);
  LearningPrediction p;
  p.validity = make_validity(s, eta);
  p.eps.resize(static_cast<Eigen::Index>(steps + 1), eps0.size());
  Eigen::VectorXd c = s.vectors.transpose() * eps0;
  for (std::size_t t = 0; t <= steps; ++t) {
    if (t == 0)
      p.eps.row(0) = eps0.transpose();
    else
      p.eps.row(static_cast<Eigen::Index>(t)) = (s.vectors * c).transpose();
    c = c.cwiseProduct(u);
  }
  return p;
}

DqntkOptimizationPrediction predict_dqntk_optimization(double k, double k_delta, double eps0, double eta,
                                                       std::size_t steps) {
  DqntkOptimizationPrediction p;
  const double u = 1.0 - eta * k;
  p.free = predict_frozen_optimization(k, eps0, eta, steps).eps;
  p.interacting.assign(steps + 1, 0.0);
  p.total.resize(steps + 1);
  double u_prev = 1.0;  // u^{t-1}
  for (std::size_t t = 0; t <= steps; ++t) {
    if (t >= 1) {
      p.interacting[t] = -eta * static_cast<double>(t) * u_prev * k_delta * eps0;
      u_prev *= u;
    }
    p.total[t] = p.free[t] + p.interacting[t];
  }
  return p;
}

DqntkLearningPrediction predict_dqntk_learning(const Eigen::MatrixXd& k, const Eigen::MatrixXd& k_delta,
                                               const Eigen::VectorXd& eps0, double eta, std::size_t steps) {
  const Eigen::Index n = eps0.size();
  require_square(k, n, "predict_dqntk_learning");
  require_square(k_delta, n, "predict_dqntk_learning");
  const SymmetricSpectrum s = symmetric_eigen(k);
  const Eigen::VectorXd u = mode_factors(s, eta);
  const Eigen::MatrixXd b = s.vectors.transpose() * k_delta * s.vectors;
  const Eigen::VectorXd e0 = s.vectors.transpose() * eps0;

  DqntkLearningPrediction p;
  p.validity = make_validity(s, eta);
  const auto rows = static_cast<Eigen::Index>(steps + 1);
  p.free = predict_frozen_learning(k, eps0, eta, steps).eps;
  p.interacting = Eigen::MatrixXd::Zero(rows, n);

  // c_ij(t) = sum_{s<t} u_i^{t-1-s} u_j^s, advanced as c(t+1) = u_i c(t) + u_j^t.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd u_pow = Eigen::VectorXd::Ones(n);
  const double op_norm_u = n ? u.cwiseAbs().maxCoeff() : 0.0;
  const double op_norm_kd = n ? Eigen::JacobiSVD<Eigen::MatrixXd>(k_delta).singularValues()(0) : 0.0;
  const double e0_norm = eps0.norm();
  for (std::size_t t = 1; t <= steps; ++t) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) c(i, j) = u(i) * c(i, j) + u_pow(j);
    u_pow = u_pow.cwiseProduct(u);
    const Eigen::VectorXd mode = -eta * (c.cwiseProduct(b) * e0);
    const Eigen::VectorXd inter = s.vectors * mode;
    p.interacting.row(static_cast<Eigen::Index>(t)) = inter.transpose();
    const double bound = eta * static_cast<double>(t) * std::pow(op_norm_u, static_cast<double>(t - 1)) * op_norm_kd * e0_norm;
    if (inter.norm() > bound * (1.0 + 1e-9) + 1e-300) p.norm_bound_holds = false;
  }
  p.total = p.free + p.interacting;
  return p;
}

}  // namespace qntk
