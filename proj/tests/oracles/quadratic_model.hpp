#pragma once

// Exact gradient descent on a quadratic output model
//   z_a(phi) = z0_a + J_a . phi + 0.5 phi^T H_a phi,
// whose kernel, meta-kernel and training trajectory are known in closed form.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "qntk/kernels.hpp"

namespace oracle {

struct QuadraticModel {
  Eigen::VectorXd z0;                // N
  Eigen::MatrixXd j;                 // L x N
  std::vector<Eigen::MatrixXd> h;    // N symmetric L x L

  Eigen::Index n() const { return z0.size(); }
  Eigen::Index l() const { return j.rows(); }

  double z(Eigen::Index a, const Eigen::VectorXd& phi) const {
    return z0(a) + j.col(a).dot(phi) + 0.5 * phi.dot(h[static_cast<std::size_t>(a)] * phi);
  }
  Eigen::VectorXd grad(Eigen::Index a, const Eigen::VectorXd& phi) const {
    return j.col(a) + h[static_cast<std::size_t>(a)] * phi;
  }
  Eigen::MatrixXd kernel() const { return j.transpose() * j; }
  qntk::MetaKernel mu() const {
    qntk::MetaKernel m(static_cast<std::size_t>(n()));
    for (Eigen::Index a0 = 0; a0 < n(); ++a0)
      for (Eigen::Index a1 = 0; a1 < n(); ++a1)
        for (Eigen::Index a2 = 0; a2 < n(); ++a2)
          m(a0, a1, a2) = j.col(a1).dot(h[static_cast<std::size_t>(a0)] * j.col(a2));
    return m;
  }

  // Learning-mode GD on the first y.size() indices with eps = y - z; returns z over all indices.
  Eigen::VectorXd train(const Eigen::VectorXd& y, double eta, std::size_t steps) const {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(l());
    for (std::size_t t = 0; t < steps; ++t) {
      Eigen::VectorXd step = Eigen::VectorXd::Zero(l());
      for (Eigen::Index a = 0; a < y.size(); ++a) step += (y(a) - z(a, phi)) * grad(a, phi);
      phi += eta * step;
    }
    Eigen::VectorXd out(n());
    for (Eigen::Index a = 0; a < n(); ++a) out(a) = z(a, phi);
    return out;
  }
};

inline QuadraticModel random_quadratic_model(Eigen::Index l, Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  QuadraticModel m;
  m.z0.resize(n);
  m.j.resize(l, n);
  for (Eigen::Index a = 0; a < n; ++a) m.z0(a) = 0.3 * g(rng);
  for (Eigen::Index r = 0; r < l; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m.j(r, c) = g(rng) / std::sqrt(static_cast<double>(l));
  for (Eigen::Index a = 0; a < n; ++a) {
    Eigen::MatrixXd h(l, l);
    for (Eigen::Index r = 0; r < l; ++r)
      for (Eigen::Index c = 0; c < l; ++c) h(r, c) = g(rng);
    m.h.push_back(0.5 * (h + h.transpose()) / static_cast<double>(l));
  }
  return m;
}

}  // namespace oracle
