#pragma once

// Brute-force reference for direct-detection noise: assemble the real
// quadrature transfer matrix of every input mode, push the vacuum covariance
// through it, and project onto the detected amplitude direction. Dense
// linear algebra only, no pull-backs; meant for grids of a few dozen points.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "soliton_squeeze/interferometer.hpp"

namespace oracle {

// x = a + a^dag, p = -i (a - a^dag); vacuum covariance is I / dt.
inline double covariance_fano(const soliton_squeeze::DetectedField& d) {
  using Eigen::MatrixXd;
  const Eigen::Index m = static_cast<Eigen::Index>(d.mean.amplitude.size());
  const Eigen::Index n_in = m * static_cast<Eigen::Index>(d.arm_maps.size());
  const double dt = d.mean.grid.dt();

  // a_out_j = sum_k c_jk x_k + e_jk p_k over all input modes of all arms.
  Eigen::MatrixXcd c(m, n_in);
  Eigen::MatrixXcd e(m, n_in);
  for (std::size_t arm = 0; arm < d.arm_maps.size(); ++arm) {
    const Eigen::MatrixXcd mu = d.arm_maps[arm].mu();
    const Eigen::MatrixXcd nu = d.arm_maps[arm].nu();
    const Eigen::Index off = static_cast<Eigen::Index>(arm) * m;
    c.middleCols(off, m) = 0.5 * (mu + nu);
    e.middleCols(off, m) = std::complex<double>(0.0, 0.5) * (mu - nu);
  }
  MatrixXd s(2 * m, 2 * n_in);
  s.topLeftCorner(m, n_in) = 2.0 * c.real();
  s.topRightCorner(m, n_in) = 2.0 * e.real();
  s.bottomLeftCorner(m, n_in) = 2.0 * c.imag();
  s.bottomRightCorner(m, n_in) = 2.0 * e.imag();
  const MatrixXd v_out = s * s.transpose() / dt;

  // delta n = dt sum_j (Re A_j x_j + Im A_j p_j)
  Eigen::VectorXd g(2 * m);
  double shot = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto a = d.mean.amplitude[static_cast<std::size_t>(j)];
    g[j] = dt * a.real();
    g[m + j] = dt * a.imag();
    shot += std::norm(a) * dt;
  }
  return g.dot(v_out * g) / shot;
}

}  // namespace oracle
