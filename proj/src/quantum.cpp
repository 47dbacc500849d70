#include "soliton_squeeze/quantum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <optional>

#include "soliton_squeeze/error.hpp"
#include "soliton_squeeze/simd/kernels.hpp"

namespace soliton_squeeze {

FluctuationPropagator::FluctuationPropagator(const TimeGrid& grid)
    : grid_(grid), data_(2 * grid.size() * grid.size()) {}

FluctuationPropagator FluctuationPropagator::identity(const TimeGrid& grid) {
  FluctuationPropagator prop(grid);
  const std::size_t m = grid.size();
  for (std::size_t k = 0; k < m; ++k) prop.data_[k * m + k] = 1.0;
  return prop;
}

FluctuationPropagator FluctuationPropagator::from_matrices(const TimeGrid& grid,
                                                           const Eigen::MatrixXcd& mu,
                                                           const Eigen::MatrixXcd& nu) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  if (mu.rows() != m || mu.cols() != m || nu.rows() != m || nu.cols() != m) {
    throw std::invalid_argument("FluctuationPropagator: matrices must be square and match the grid");
  }
  FluctuationPropagator prop(grid);
  prop.mu() = mu;
  prop.nu() = nu;
  return prop;
}

ComplexVector FluctuationPropagator::pull_back(std::span<const cplx> p) const {
  const std::size_t m = size();
  if (p.size() != m) throw std::invalid_argument("pull_back: covector size mismatch");
  ComplexVector r(m);
  ComplexVector s(m);
  const std::span<const cplx> all(data_);
  simd::dot_columns(p, all.first(m * m), r);
  simd::dot_columns(p, all.subspan(m * m), s);
  for (std::size_t k = 0; k < m; ++k) r[k] += std::conj(s[k]);
  return r;
}

void kerr_step_coefficients(std::span<const cplx> field, double dz, std::span<cplx> e11,
                            std::span<cplx> e12) {
  for (std::size_t j = 0; j < field.size(); ++j) {
    const double phase = std::norm(field[j]) * dz;
    const cplx u2 = field[j] * field[j];
    e11[j] = std::polar(1.0, phase) * cplx(1.0, phase);
    e12[j] = cplx(-u2.imag(), u2.real()) * dz;
  }
}

namespace {

// Applies exp(-i omega^2 h/2) to every column: transform, scale, invert.
struct Disperser {
  Disperser(const TimeGrid& grid, std::size_t columns, double dz)
      : fft(grid.size(), columns),
        half(dispersion_multiplier(grid, 0.5 * dz)),
        full(dispersion_multiplier(grid, dz)) {}

  // L x
  void apply(std::span<cplx> data, const ComplexVector& factor) const {
    fft.forward(data);
    simd::scale_columns(data, factor);
    fft.backward(data);
  }
  // L^T x; the DFT matrices are symmetric, so L^T = F diag B.
  void apply_transpose(std::span<cplx> data, const ComplexVector& factor) const {
    fft.backward(data);
    simd::scale_columns(data, factor);
    fft.forward(data);
  }

  BatchFft fft;
  ComplexVector half;
  ComplexVector full;
};

}  // namespace

FluctuationPropagator propagate_fluctuations(const Trajectory& traj) {
  const TimeGrid& grid = traj.grid();
  FluctuationPropagator prop = FluctuationPropagator::identity(grid);
  const std::size_t steps = traj.n_steps();
  if (steps == 0) return prop;

  const FiberSpec& fiber = traj.fiber();
  const std::size_t m = grid.size();
  const double dz = traj.step();
  const std::span<cplx> all = prop.storage();
  const std::span<cplx> mu = all.first(m * m);
  const std::span<cplx> nu = all.subspan(m * m);

  std::optional<Disperser> disperser;
  if (fiber.dispersion) disperser.emplace(grid, 2 * m, dz);
  ComplexVector e11(m);
  ComplexVector e12(m);

  if (disperser) disperser->apply(all, disperser->half);
  for (std::size_t n = 0; n < steps; ++n) {
    if (fiber.nonlinearity) {
      kerr_step_coefficients(traj.midpoint(n), dz, e11, e12);
      simd::kerr_mix(mu, nu, e11, e12);
    }
    if (disperser) disperser->apply(all, n + 1 < steps ? disperser->full : disperser->half);
  }

  if (const double defect = symplectic_defect(prop); !(defect <= 1e-6)) {
    throw NumericalError(fmt::format(
        "fluctuation propagator violates the commutator relations by {:.3g} (limit 1e-6)",
        defect));
  }
  return prop;
}

ComplexVector pull_back_through(const Trajectory& traj, std::span<const cplx> covectors) {
  const TimeGrid& grid = traj.grid();
  const std::size_t m = grid.size();
  if (covectors.empty() || covectors.size() % m != 0) {
    throw std::invalid_argument("pull_back_through: covectors must be whole grid columns");
  }
  ComplexVector p(covectors.begin(), covectors.end());
  const std::size_t steps = traj.n_steps();
  if (steps == 0) return p;

  const FiberSpec& fiber = traj.fiber();
  const double dz = traj.step();
  std::optional<Disperser> disperser;
  if (fiber.dispersion) disperser.emplace(grid, p.size() / m, dz);
  ComplexVector e11(m);
  ComplexVector e12(m);

  if (disperser) disperser->apply_transpose(p, disperser->half);
  for (std::size_t n = steps; n-- > 0;) {
    if (fiber.nonlinearity) {
      kerr_step_coefficients(traj.midpoint(n), dz, e11, e12);
      simd::kerr_pull_back(p, e11, e12);
    }
    if (disperser) disperser->apply_transpose(p, n > 0 ? disperser->full : disperser->half);
  }
  return p;
}

FluctuationPropagator compose(const FluctuationPropagator& second,
                              const FluctuationPropagator& first) {
  if (!(second.grid() == first.grid())) throw std::invalid_argument("compose: grid mismatch");
  const Eigen::MatrixXcd mu1 = first.mu();
  const Eigen::MatrixXcd nu1 = first.nu();
  const Eigen::MatrixXcd mu2 = second.mu();
  const Eigen::MatrixXcd nu2 = second.nu();
  const Eigen::MatrixXcd mu = mu2 * mu1 + nu2 * nu1.conjugate();
  const Eigen::MatrixXcd nu = mu2 * nu1 + nu2 * mu1.conjugate();
  return FluctuationPropagator::from_matrices(first.grid(), mu, nu);
}

double symplectic_defect(const FluctuationPropagator& prop) {
  const Eigen::MatrixXcd mu = prop.mu();
  const Eigen::MatrixXcd nu = prop.nu();
  const auto m = mu.rows();
  const Eigen::MatrixXcd unitarity =
      mu * mu.adjoint() - nu * nu.adjoint() - Eigen::MatrixXcd::Identity(m, m);
  const Eigen::MatrixXcd symmetry = mu * nu.transpose() - nu * mu.transpose();
  return std::max(unitarity.cwiseAbs().maxCoeff(), symmetry.cwiseAbs().maxCoeff());
}

double kerr_min_variance(double phi) {
  if (!(phi >= 0.0)) throw ConfigError(fmt::format("Kerr phase must be >= 0, got {}", phi));
  // (sqrt(Phi^2+1) - Phi)^2, written without the cancellation.
  const double root = std::sqrt(phi * phi + 1.0) + phi;
  return 1.0 / (root * root);
}

double min_quadrature_variance(const FluctuationPropagator& prop, std::span<const cplx> mode) {
  const std::size_t m = prop.size();
  if (mode.size() != m) throw std::invalid_argument("min_quadrature_variance: mode size mismatch");
  const double dt = prop.grid().dt();
  double vacuum = 0.0;
  ComplexVector in_phase(m);
  ComplexVector quadrature(m);
  for (std::size_t j = 0; j < m; ++j) {
    vacuum += std::norm(mode[j]) * dt;
    in_phase[j] = std::conj(mode[j]) * dt;
    quadrature[j] = cplx(0.0, -1.0) * in_phase[j];
  }
  if (vacuum == 0.0) throw NumericalError("min_quadrature_variance: zero mode");
  // X(theta) pulls back to cos(theta) r1 + sin(theta) r2.
  const ComplexVector r1 = prop.pull_back(in_phase);
  const ComplexVector r2 = prop.pull_back(quadrature);
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    a += std::norm(r1[k]);
    c += std::norm(r2[k]);
    b += (std::conj(r1[k]) * r2[k]).real();
  }
  const double lowest = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return lowest / dt / vacuum;
}

}  // namespace soliton_squeeze
