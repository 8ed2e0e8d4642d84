#include "qntk/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "qntk/error.hpp"
#include "qntk/linalg.hpp"
#include "qntk/parallel.hpp"

namespace qntk {

namespace {

void check_problem(const LayeredAnsatz& ansatz, std::span<const double> angles, const StateVector& input,
                   const PauliObservable& obs) {
  ansatz.check_angles(angles);
  if (input.n_qubits() != ansatz.n_qubits()) throw DimensionError("input state qubit count mismatch");
  if (obs.n_qubits() != ansatz.n_qubits()) throw DimensionError("observable qubit count mismatch");
}

// Identity terms commute with every generator and drop out of all derivatives.
std::optional<PauliObservable> traceless_part(const PauliObservable& obs) {
  std::vector<PauliString> terms;
  for (const auto& t : obs.terms())
    if (!t.is_identity() && t.phase() != 0.0) terms.push_back(t);
  if (terms.empty()) return std::nullopt;
  return PauliObservable(std::move(terms));
}

const std::vector<double>& require_reference(const ParameterVector& params) {
  if (!params.reference) throw ValidationError("parameter vector has no reference angles");
  if (params.reference->size() != params.values.size())
    throw ValidationError("reference length differs from parameter length");
  return *params.reference;
}

// Circuit evaluation context with the states just after each rotation cached.
class Sweep {
 public:
  Sweep(const LayeredAnsatz& ansatz, std::span<const double> angles, const StateVector& input,
        const PauliObservable& obs)
      : ansatz_(ansatz), angles_(angles), obs_(obs) {
    check_problem(ansatz, angles, input, obs);
    StateVector s = input;
    after_rotation_.reserve(ansatz.size());
    for (std::size_t k = 0; k < ansatz.size(); ++k) {
      const Layer& l = ansatz.layer(k);
      apply_pauli_rotation_inplace(s, l.generator, angles[l.angle_index]);
      after_rotation_.push_back(s);
      apply_fixed_ops(l.fixed, s);
    }
  }

  const StateVector& phi(std::size_t k) const { return after_rotation_[k]; }

  // M_k s: propagate to the output, apply O, propagate back.
  StateVector apply_m(std::size_t k, const StateVector& s) const {
    StateVector t = s;
    apply_fixed_ops(ansatz_.layer(k).fixed, t);
    ansatz_.apply_range(k + 1, ansatz_.size(), angles_, t);
    t = obs_.apply(t);
    ansatz_.apply_range_adjoint(k + 1, ansatz_.size(), angles_, t);
    apply_fixed_ops_adjoint(ansatz_.layer(k).fixed, t);
    return t;
  }

  // H(a, b) for every b <= a, in time positions, written to row[b].
  void hessian_row(std::size_t a, std::vector<double>& row) const {
    row.assign(a + 1, 0.0);
    const PauliString& xa = ansatz_.layer(a).generator;
    const StateVector& phia = after_rotation_[a];
    const StateVector x_phi = xa.apply(phia);
    StateVector kappa = apply_m(a, x_phi);  // i (M X - X M) phi
    kappa -= xa.apply(apply_m(a, phia));
    kappa *= Complex(0.0, 1.0);
    row[a] = 2.0 * inner_product(x_phi, kappa).imag();
    StateVector s = kappa;
    apply_pauli_rotation_inplace(s, xa, -angles_[ansatz_.layer(a).angle_index]);
    for (std::size_t b = a; b-- > 0;) {
      const Layer& lb = ansatz_.layer(b);
      apply_fixed_ops_adjoint(lb.fixed, s);
      row[b] = 2.0 * lb.generator.matrix_element(after_rotation_[b], s).imag();
      apply_pauli_rotation_inplace(s, lb.generator, -angles_[lb.angle_index]);
    }
  }

 private:
  const LayeredAnsatz& ansatz_;
  std::span<const double> angles_;
  const PauliObservable& obs_;
  std::vector<StateVector> after_rotation_;
};

}  // namespace

double output_value(const LayeredAnsatz& ansatz, std::span<const double> angles, const StateVector& input,
                    const PauliObservable& obs) {
  check_problem(ansatz, angles, input, obs);
  return expectation(prepare(ansatz, angles, input), obs);
}

double residual_error(const LayeredAnsatz& ansatz, std::span<const double> angles, const StateVector& input,
                      const PauliObservable& obs, double target, Residual convention) {
  const double z = output_value(ansatz, angles, input, obs);
  return convention == Residual::OutputMinusTarget ? z - target : target - z;
}

std::vector<double> grad_z(const LayeredAnsatz& ansatz, std::span<const double> angles,
                           const StateVector& input, const PauliObservable& obs) {
  check_problem(ansatz, angles, input, obs);
  const auto traceless = traceless_part(obs);
  if (!traceless) return std::vector<double>(ansatz.size(), 0.0);
  StateVector psi = prepare(ansatz, angles, input);
  StateVector lambda = traceless->apply(psi);
  std::vector<double> grad(ansatz.size(), 0.0);
  for (std::size_t k = ansatz.size(); k-- > 0;) {
    const Layer& l = ansatz.layer(k);
    apply_fixed_ops_adjoint(l.fixed, psi);
    apply_fixed_ops_adjoint(l.fixed, lambda);
    // i<[X, M]> = i (<X psi|M psi> - c.c.) = -2 Im <X psi|M psi>
    const double bracket = -2.0 * l.generator.matrix_element(psi, lambda).imag();
    grad[l.angle_index] = kBracketSign * bracket;
    apply_pauli_rotation_inplace(psi, l.generator, -angles[l.angle_index]);
    apply_pauli_rotation_inplace(lambda, l.generator, -angles[l.angle_index]);
  }
  return grad;
}

Eigen::MatrixXd hessian_z(const LayeredAnsatz& ansatz, std::span<const double> angles,
                          const StateVector& input, const PauliObservable& obs) {
  check_problem(ansatz, angles, input, obs);
  const std::size_t n = ansatz.size();
  const auto traceless = traceless_part(obs);
  if (!traceless) return Eigen::MatrixXd::Zero(n, n);
  const Sweep sweep(ansatz, angles, input, *traceless);
  Eigen::MatrixXd h(n, n);
  std::vector<double> row;
  for (std::size_t a = 0; a < n; ++a) {
    sweep.hessian_row(a, row);
    const std::size_t pa = ansatz.layer(a).angle_index;
    for (std::size_t b = 0; b <= a; ++b) {
      const std::size_t pb = ansatz.layer(b).angle_index;
      h(pa, pb) = row[b];
      h(pb, pa) = row[b];
    }
  }
  return h;
}

double nested_commutator_expectation(const LayeredAnsatz& ansatz, std::span<const double> angles,
                                     const StateVector& input, const PauliObservable& obs,
                                     std::size_t later, std::size_t earlier) {
  if (later >= ansatz.size() || earlier > later) throw DimensionError("need earlier <= later < L");
  check_problem(ansatz, angles, input, obs);
  const auto traceless = traceless_part(obs);
  if (!traceless) return 0.0;
  const Sweep sweep(ansatz, angles, input, *traceless);
  std::vector<double> row;
  sweep.hessian_row(later, row);
  return row[earlier];
}

double g_entry(const LayeredAnsatz& ansatz, std::span<const double> angles, const StateVector& input,
               const PauliObservable& obs, std::size_t l1, std::size_t l2) {
  return l1 >= l2 ? nested_commutator_expectation(ansatz, angles, input, obs, l1, l2)
                  : nested_commutator_expectation(ansatz, angles, input, obs, l2, l1);
}

double qntk_optimization(const LayeredAnsatz& ansatz, std::span<const double> angles,
                         const StateVector& input, const PauliObservable& obs) {
  const auto g = grad_z(ansatz, angles, input, obs);
  return pairwise_reduce<double>(0, g.size(), [&](std::size_t i) { return g[i] * g[i]; });
}

FrozenKernelValue frozen_qntk_optimization(const LayeredAnsatz& ansatz, const ParameterVector& params,
                                           const StateVector& input, const PauliObservable& obs) {
  const auto& ref = require_reference(params);
  if (params.scale == 0.0) return {0.0, true};
  const LayeredAnsatz absorbed = absorb_reference(ansatz, ref);
  const std::vector<double> zero(ansatz.size(), 0.0);
  const double d2 = params.scale * params.scale;
  return {d2 * qntk_optimization(absorbed, zero, input, obs), false};
}

double frozen_bound(const LayeredAnsatz& ansatz, const PauliObservable& obs, double delta, double eta) {
  double xmax = 0.0;
  for (const auto& l : ansatz.layers()) xmax = std::max(xmax, l.generator.operator_norm());
  const double o = obs.norm_bound();
  return 2.0 * eta * delta * delta * static_cast<double>(ansatz.size()) * o * o * xmax * xmax;
}

double meta_kernel_optimization(const LayeredAnsatz& ansatz, const ParameterVector& params,
                                const StateVector& input, const PauliObservable& obs) {
  const auto t = derivative_tensors(ansatz, params, std::span<const StateVector>(&input, 1),
                                    std::span<const PauliObservable>(&obs, 1));
  return meta_kernel_learning(t)(0, 0, 0);
}

double k_delta_optimization(const LayeredAnsatz& ansatz, const ParameterVector& params,
                            const StateVector& input, const PauliObservable& obs,
                            std::span<const double> phi0) {
  const auto t = derivative_tensors(ansatz, params, std::span<const StateVector>(&input, 1),
                                    std::span<const PauliObservable>(&obs, 1));
  return k_delta_learning(t, phi0).entries(0, 0);
}

std::vector<CompoundIndex> compound_indices(std::size_t n_samples, std::size_t n_observables) {
  std::vector<CompoundIndex> out;
  out.reserve(n_samples * n_observables);
  for (std::size_t s = 0; s < n_samples; ++s)
    for (std::size_t o = 0; o < n_observables; ++o) out.push_back({s, o});
  return out;
}

double KernelMatrix::max_asymmetry() const {
  return entries.size() ? (entries - entries.transpose()).cwiseAbs().maxCoeff() : 0.0;
}

Eigen::VectorXd KernelMatrix::eigenvalues() const {
  return symmetric_eigen(entries).values.reverse();
}

std::size_t KernelMatrix::rank(double rel) const {
  const auto s = symmetric_eigen(entries);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    if (s.is_signal(i, rel)) ++r;
  return r;
}

bool KernelMatrix::is_psd(double rel) const {
  const auto s = symmetric_eigen(entries);
  if (s.values.size() == 0) return true;
  return s.values.minCoeff() >= -rel * s.values.maxCoeff();
}

Eigen::MatrixXd jacobian(const LayeredAnsatz& ansatz, std::span<const double> angles,
                         std::span<const StateVector> inputs, std::span<const PauliObservable> observables) {
  if (inputs.empty() || observables.empty()) throw ValidationError("need at least one sample and observable");
  const std::size_t n_obs = observables.size();
  const std::size_t n = inputs.size() * n_obs;
  Eigen::MatrixXd j(ansatz.size(), n);
  parallel_for(n, [&](std::size_t a) {
    const auto g = grad_z(ansatz, angles, inputs[a / n_obs], observables[a % n_obs]);
    for (std::size_t l = 0; l < g.size(); ++l) j(l, a) = g[l];
  });
  return j;
}

KernelMatrix qntk_learning(const LayeredAnsatz& ansatz, std::span<const double> angles,
                           std::span<const StateVector> inputs, std::span<const PauliObservable> observables) {
  const Eigen::MatrixXd j = jacobian(ansatz, angles, inputs, observables);
  return {j.transpose() * j, compound_indices(inputs.size(), observables.size()), 0.0};
}

KernelMatrix frozen_qntk_learning(const LayeredAnsatz& ansatz, const ParameterVector& params,
                                  std::span<const StateVector> inputs,
                                  std::span<const PauliObservable> observables) {
  const auto& ref = require_reference(params);
  const LayeredAnsatz absorbed = absorb_reference(ansatz, ref);
  const std::vector<double> zero(ansatz.size(), 0.0);
  const Eigen::MatrixXd j = params.scale * jacobian(absorbed, zero, inputs, observables);
  return {j.transpose() * j, compound_indices(inputs.size(), observables.size()), params.scale};
}

DerivativeTensors derivative_tensors(const LayeredAnsatz& ansatz, const ParameterVector& params,
                                     std::span<const StateVector> inputs,
                                     std::span<const PauliObservable> observables) {
  const auto& ref = require_reference(params);
  if (inputs.empty() || observables.empty()) throw ValidationError("need at least one sample and observable");
  const LayeredAnsatz absorbed = absorb_reference(ansatz, ref);
  const std::vector<double> zero(ansatz.size(), 0.0);
  const std::size_t n_obs = observables.size();
  const std::size_t n = inputs.size() * n_obs;
  DerivativeTensors t;
  t.theta.resize(ansatz.size(), n);
  t.g.resize(n);
  t.delta = params.scale;
  t.indices = compound_indices(inputs.size(), n_obs);
  parallel_for(n, [&](std::size_t a) {
    const StateVector& in = inputs[a / n_obs];
    const PauliObservable& o = observables[a % n_obs];
    const auto g = grad_z(absorbed, zero, in, o);
    for (std::size_t l = 0; l < g.size(); ++l) t.theta(l, a) = g[l];
    t.g[a] = hessian_z(absorbed, zero, in, o);
  });
  return t;
}

double MetaKernel::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

MetaKernel meta_kernel_learning(const DerivativeTensors& t) {
  const std::size_t n = static_cast<std::size_t>(t.theta.cols());
  const double d4 = std::pow(t.delta, 4);
  MetaKernel mu(n);
  for (std::size_t a0 = 0; a0 < n; ++a0) {
    // (G^{a0} Theta)_{l, a2}
    const Eigen::MatrixXd gt = t.g[a0] * t.theta;
    const Eigen::MatrixXd m = d4 * (t.theta.transpose() * gt);
    for (std::size_t a1 = 0; a1 < n; ++a1)
      for (std::size_t a2 = 0; a2 < n; ++a2) mu(a0, a1, a2) = m(a1, a2);
  }
  return mu;
}

KernelMatrix k_delta_learning(const DerivativeTensors& t, std::span<const double> phi0) {
  const std::size_t n = static_cast<std::size_t>(t.theta.cols());
  const Eigen::Index l = t.theta.rows();
  if (phi0.size() != static_cast<std::size_t>(l)) throw ValidationError("phi0 length differs from L");
  const Eigen::Map<const Eigen::VectorXd> phi(phi0.data(), l);
  Eigen::MatrixXd gphi(l, n);
  for (std::size_t a = 0; a < n; ++a) gphi.col(a) = t.g[a] * phi;
  const Eigen::MatrixXd cross = gphi.transpose() * t.theta;
  const double d3 = std::pow(t.delta, 3);
  return {d3 * (cross + cross.transpose()), t.indices, t.delta};
}

void write_kernel_csv(std::ostream& out, const KernelMatrix& k) {
  auto label = [&](std::size_t a) {
    return "s" + std::to_string(k.indices[a].sample) + ":o" + std::to_string(k.indices[a].observable);
  };
  char buf[32];
  out << "index";
  for (std::size_t a = 0; a < k.size(); ++a) out << ',' << label(a);
  out << '\n';
  for (std::size_t r = 0; r < k.size(); ++r) {
    out << label(r);
    for (std::size_t c = 0; c < k.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", k.entries(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& eigenvalues) {
  char buf[32];
  out << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", eigenvalues(i));
    out << (i + 1) << ',' << buf << '\n';
  }
}

}  // namespace qntk
