#pragma once

// Linearized quantum fluctuations around a classical trajectory.
//
// With U = <U> + u, first order in u gives
//   du/dz = i(2|U|^2 u + U^2 u^dag) + (i/2) d^2u/dt^2.
// The solution is a Bogoliubov map u_out = mu u_in + nu u_in^dag with the
// discrete commutator [u_j, u_k^dag] = delta_jk / dt. Each split step is
// applied exactly: dispersion as a Fourier-diagonal phase, the Kerr term as
// the closed-form exponential of a 2x2 generator per time bin, frozen at the
// step-centre field.

#include <Eigen/Core>
#include <span>

#include "soliton_squeeze/field.hpp"
#include "soliton_squeeze/nlse.hpp"

namespace soliton_squeeze {

class FluctuationPropagator {
 public:
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXcd>;
  using MatrixMap = Eigen::Map<Eigen::MatrixXcd>;

  static FluctuationPropagator identity(const TimeGrid& grid);
  static FluctuationPropagator from_matrices(const TimeGrid& grid, const Eigen::MatrixXcd& mu,
                                             const Eigen::MatrixXcd& nu);

  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }

  ConstMatrixMap mu() const { return {data_.data(), dim(), dim()}; }
  ConstMatrixMap nu() const { return {data_.data() + dim() * dim(), dim(), dim()}; }
  MatrixMap mu() { return {data_.data(), dim(), dim()}; }
  MatrixMap nu() { return {data_.data() + dim() * dim(), dim(), dim()}; }

  /// Column-major [mu | nu] block, size x 2*size.
  std::span<const cplx> storage() const { return data_; }
  std::span<cplx> storage() { return data_; }

  /// Coefficients r on the input annihilators of the output functional
  ///   sum_j p_j u_j + h.c.   ->   sum_k r_k u_k + h.c.,
  /// i.e. r = mu^T p + conj(nu^T p).
  ComplexVector pull_back(std::span<const cplx> p) const;

 private:
  explicit FluctuationPropagator(const TimeGrid& grid);
  Eigen::Index dim() const { return static_cast<Eigen::Index>(grid_.size()); }

  TimeGrid grid_;
  ComplexVector data_;
};

/// Per-bin transfer matrix [[e11, e12], [conj(e12), conj(e11)]] of the
/// linearized Kerr step of length dz, for the mean field `field` at the step
/// midpoint. Over a nonlinear substep |U| is constant and U only rotates, so in
/// the frame co-rotating with U the generator
///   [[i|U|^2, iU^2], [-i conj(U)^2, -i|U|^2]]
/// is nilpotent and its exponential is exact:
///   e11 = e^{i g dz} (1 + i g dz),  e12 = i U^2 dz,  g = |U|^2.
void kerr_step_coefficients(std::span<const cplx> field, double dz, std::span<cplx> e11,
                            std::span<cplx> e12);

/// Dense propagator over the whole trajectory. Throws NumericalError if the
/// result violates the commutator relations by more than 1e-6.
FluctuationPropagator propagate_fluctuations(const Trajectory& traj);

/// Adjoint route: pulls covector columns (size x K, column-major) from the
/// fiber output back to the input through the same step sequence, without
/// forming mu and nu. Equals FluctuationPropagator::pull_back column by column.
ComplexVector pull_back_through(const Trajectory& traj, std::span<const cplx> covectors);

/// `second` after `first`: mu = mu2 mu1 + nu2 conj(nu1), nu = mu2 nu1 + nu2 conj(mu1).
FluctuationPropagator compose(const FluctuationPropagator& second,
                              const FluctuationPropagator& first);

/// max(|mu mu^dag - nu nu^dag - I|_max, |mu nu^T - nu mu^T|_max)
double symplectic_defect(const FluctuationPropagator& prop);

/// Minimum quadrature variance of a single-mode linearized Kerr state with
/// nonlinear phase Phi, vacuum = 1: 1 + 2 Phi^2 - 2 Phi sqrt(Phi^2 + 1).
double kerr_min_variance(double phi);

/// Minimum over quadrature angle of the output variance of the temporal mode
/// `mode` (any normalization), relative to vacuum.
double min_quadrature_variance(const FluctuationPropagator& prop, std::span<const cplx> mode);

}  // namespace soliton_squeeze
