#include <cmath>
#include <string>

#include "qntk/dynamics.hpp"
#include "qntk/error.hpp"
#include "qntk/linalg.hpp"

namespace qntk {

namespace {

void check_blocks(const Eigen::MatrixXd& k_full, const Eigen::VectorXd& eps0, const Eigen::VectorXd& z0) {
  if (k_full.rows() != k_full.cols()) throw DimensionError("kernel must be square");
  if (z0.size() != k_full.rows()) throw DimensionError("z0 must span every kernel index");
  if (eps0.size() > k_full.rows()) throw DimensionError("more training residuals than kernel indices");
}

}  // namespace

double Tensor4::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

AsymptoticPrediction asymptotic_output(const Eigen::MatrixXd& k_full, const Eigen::VectorXd& eps0,
                                       const Eigen::VectorXd& z0) {
  check_blocks(k_full, eps0, z0);
  const Eigen::Index n = eps0.size();
  const Eigen::MatrixXd k_train = k_full.topLeftCorner(n, n);
  const Eigen::MatrixXd k_inv = pseudo_inverse(k_train);
  AsymptoticPrediction p;
  p.z = z0 + k_full.leftCols(n) * (k_inv * eps0);
  p.residual_limit = eps0 - signal_projector(k_train) * eps0;
  const double scale = eps0.size() ? eps0.cwiseAbs().maxCoeff() : 0.0;
  p.nonconvergent.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    p.nonconvergent[static_cast<std::size_t>(i)] = std::abs(p.residual_limit(i)) > 1e-9 * scale;
  return p;
}

AlgorithmProjectors algorithm_projectors(const Eigen::MatrixXd& k_train, double eta) {
  if (k_train.rows() != k_train.cols()) throw DimensionError("kernel must be square");
  if (!(eta > 0.0)) throw ValidationError("learning rate must be positive");
  const SymmetricSpectrum s = symmetric_eigen(k_train);
  const auto n = static_cast<std::size_t>(k_train.rows());

  std::vector<Eigen::Index> signal;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    if (!s.is_signal(i)) continue;
    const double radius = std::abs(1.0 - eta * s.values(i));
    if (radius >= 1.0)
      throw NumericalError("|1 - eta*lambda| = " + std::to_string(radius) + " >= 1 for lambda = " +
                           std::to_string(s.values(i)));
    signal.push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(signal.size());
  Eigen::MatrixXd v(k_train.rows(), r);
  Eigen::VectorXd lam(r);
  for (Eigen::Index a = 0; a < r; ++a) {
    v.col(a) = s.vectors.col(signal[static_cast<std::size_t>(a)]);
    lam(a) = s.values(signal[static_cast<std::size_t>(a)]);
  }
  Eigen::MatrixXd c(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) c(i, j) = 1.0 / (eta * (lam(i) + lam(j)) - eta * eta * lam(i) * lam(j));

  AlgorithmProjectors p;
  p.eta = eta;
  p.k_inverse = v * lam.cwiseInverse().asDiagonal() * v.transpose();
  p.x_parallel = Tensor4(n);
  p.x_relation = Tensor4(n);
  for (std::size_t a1 = 0; a1 < n; ++a1) {
    for (std::size_t a3 = 0; a3 < n; ++a3) {
      const Eigen::VectorXd w = v.row(static_cast<Eigen::Index>(a1)).transpose().cwiseProduct(
          v.row(static_cast<Eigen::Index>(a3)).transpose());
      const Eigen::VectorXd weights = c.transpose() * w;
      const Eigen::MatrixXd block = v * weights.asDiagonal() * v.transpose();
      for (std::size_t a2 = 0; a2 < n; ++a2)
        for (std::size_t a4 = 0; a4 < n; ++a4) {
          const double x = block(static_cast<Eigen::Index>(a2), static_cast<Eigen::Index>(a4));
          p.x_parallel(a1, a2, a3, a4) = x;
          p.x_relation(a1, a2, a3, a4) = eta * x;
        }
    }
  }

  // Residual of sum_34 X(1,2,3,4) [K35 d46 + d35 K46 - eta K35 K46] = P15 P26.
  const Eigen::MatrixXd proj = v * v.transpose();
  const Eigen::MatrixXd& k = k_train;
  Eigen::MatrixXd m(k.rows(), k.cols());
  for (std::size_t a1 = 0; a1 < n; ++a1)
    for (std::size_t a2 = 0; a2 < n; ++a2) {
      for (std::size_t a3 = 0; a3 < n; ++a3)
        for (std::size_t a4 = 0; a4 < n; ++a4)
          m(static_cast<Eigen::Index>(a3), static_cast<Eigen::Index>(a4)) = p.x_relation(a1, a2, a3, a4);
      const Eigen::MatrixXd lhs = k * m + m * k - eta * k * m * k;
      const Eigen::MatrixXd rhs =
          proj.col(static_cast<Eigen::Index>(a1)) * proj.row(static_cast<Eigen::Index>(a2));
      p.relation_residual = std::max(p.relation_residual, (lhs - rhs).cwiseAbs().maxCoeff());
    }

  const Eigen::MatrixXd& ki = p.k_inverse;
  p.z_a = Tensor4(n);
  p.z_b = Tensor4(n);
  for (std::size_t a1 = 0; a1 < n; ++a1)
    for (std::size_t a2 = 0; a2 < n; ++a2)
      for (std::size_t a3 = 0; a3 < n; ++a3)
        for (std::size_t a4 = 0; a4 < n; ++a4) {
          double value = ki(static_cast<Eigen::Index>(a1), static_cast<Eigen::Index>(a3)) *
                         ki(static_cast<Eigen::Index>(a2), static_cast<Eigen::Index>(a4));
          for (std::size_t a5 = 0; a5 < n; ++a5)
            value -= ki(static_cast<Eigen::Index>(a2), static_cast<Eigen::Index>(a5)) * p.x_relation(a1, a5, a3, a4);
          p.z_a(a1, a2, a3, a4) = value;
          p.z_b(a1, a2, a3, a4) = value + 0.5 * eta * p.x_relation(a1, a2, a3, a4);
        }
  return p;
}

Eigen::VectorXd dqntk_asymptotic_output(const Eigen::MatrixXd& k_full, const MetaKernel& mu,
                                        const AlgorithmProjectors& projectors, const Eigen::VectorXd& eps0,
                                        const Eigen::VectorXd& z0) {
  check_blocks(k_full, eps0, z0);
  const auto n = static_cast<std::size_t>(eps0.size());
  const auto n_all = static_cast<std::size_t>(k_full.rows());
  if (mu.size() != n_all) throw DimensionError("meta-kernel must span every kernel index");
  if (projectors.z_a.size() != n || projectors.k_inverse.rows() != eps0.size())
    throw DimensionError("projectors must span the training indices");

  // A_12 = sum_34 Z_A(1,2,3,4) eps3 eps4, likewise B with Z_B.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(eps0.size(), eps0.size());
  Eigen::MatrixXd b = a;
  for (std::size_t i1 = 0; i1 < n; ++i1)
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      double sa = 0.0, sb = 0.0;
      for (std::size_t i3 = 0; i3 < n; ++i3)
        for (std::size_t i4 = 0; i4 < n; ++i4) {
          const double ee = eps0(static_cast<Eigen::Index>(i3)) * eps0(static_cast<Eigen::Index>(i4));
          sa += projectors.z_a(i1, i2, i3, i4) * ee;
          sb += projectors.z_b(i1, i2, i3, i4) * ee;
        }
      a(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i2)) = sa;
      b(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i2)) = sb;
    }

  // alpha_k = sum_12 mu(1,k,2) A_12, beta_k = sum_12 mu(k,1,2) B_12.
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_all));
  Eigen::VectorXd beta = alpha;
  for (std::size_t k = 0; k < n_all; ++k)
    for (std::size_t i1 = 0; i1 < n; ++i1)
      for (std::size_t i2 = 0; i2 < n; ++i2) {
        alpha(static_cast<Eigen::Index>(k)) += mu(i1, k, i2) * a(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i2));
        beta(static_cast<Eigen::Index>(k)) += mu(k, i1, i2) * b(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i2));
      }

  const Eigen::MatrixXd coupling = k_full.leftCols(eps0.size()) * projectors.k_inverse;
  const Eigen::VectorXd correction = alpha + beta;
  return z0 + coupling * eps0 + correction - coupling * correction.head(eps0.size());
}

}  // namespace qntk
