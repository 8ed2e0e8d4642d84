#include "qntk/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace qntk {

double SymmetricSpectrum::max_abs() const {
  return values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
}

bool SymmetricSpectrum::is_signal(Eigen::Index i, double rel) const {
  const double m = max_abs();
  return m > 0.0 && values(i) > rel * m;
}

SymmetricSpectrum symmetric_eigen(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rel) {
  const auto s = symmetric_eigen(a);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.values.size());
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    if (s.is_signal(i, rel)) inv(i) = 1.0 / s.values(i);
  return s.vectors * inv.asDiagonal() * s.vectors.transpose();
}

Eigen::MatrixXd signal_projector(const Eigen::MatrixXd& a, double rel) {
  const auto s = symmetric_eigen(a);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(s.values.size());
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    if (s.is_signal(i, rel)) d(i) = 1.0;
  return s.vectors * d.asDiagonal() * s.vectors.transpose();
}

}  // namespace qntk
