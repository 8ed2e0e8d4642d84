#pragma once

#include <Eigen/Dense>

#include "qntk/numeric.hpp"

namespace qntk {

/// Eigenpairs of (A + A^T)/2, eigenvalues ascending.
struct SymmetricSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  double max_abs() const;
  /// values(i) > rel * max|values|
  bool is_signal(Eigen::Index i, double rel = kRankCutoff) const;
};

SymmetricSpectrum symmetric_eigen(const Eigen::MatrixXd& a);

/// Inverse on eigenvalues above rel * lambda_max, zero on the rest.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rel = kRankCutoff);

/// Projector onto the signal eigenspace.
Eigen::MatrixXd signal_projector(const Eigen::MatrixXd& a, double rel = kRankCutoff);

}  // namespace qntk
