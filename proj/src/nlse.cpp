#include "soliton_squeeze/nlse.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "soliton_squeeze/error.hpp"
#include "soliton_squeeze/simd/kernels.hpp"

namespace soliton_squeeze {

Trajectory::Trajectory(Envelope initial, FiberSpec fiber)
    : initial_(initial), final_(std::move(initial)), fiber_(fiber) {}

std::span<const cplx> Trajectory::midpoint(std::size_t n) const {
  if (n >= n_steps_) throw std::out_of_range("Trajectory::midpoint: step out of range");
  const std::size_t m = grid().size();
  return std::span<const cplx>(midpoints_).subspan(n * m, m);
}

Envelope Trajectory::midpoint_envelope(std::size_t n) const {
  const auto mid = midpoint(n);
  return Envelope(grid(), ComplexVector(mid.begin(), mid.end()));
}

ComplexVector dispersion_multiplier(const TimeGrid& grid, double h) {
  ComplexVector out(grid.size());
  const double scale = 1.0 / static_cast<double>(grid.size());
  const auto omega = grid.omega();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = std::polar(scale, -0.5 * omega[k] * omega[k] * h);
  }
  return out;
}

double soliton_phase(double soliton_number, double zeta) {
  return 0.5 * soliton_number * soliton_number * zeta;
}

Trajectory propagate_classical(const Envelope& input, const FiberSpec& fiber) {
  fiber.validate();
  Trajectory traj(input, fiber);
  if (fiber.normalized_length() == 0.0) return traj;

  const TimeGrid& grid = input.grid;
  const std::size_t m = grid.size();
  const std::size_t steps = fiber.n_steps;
  const double dz = fiber.step();
  traj.n_steps_ = steps;
  traj.midpoints_.resize(steps * m);

  ComplexVector field = input.amplitude;
  std::span<cplx> u(field);

  const BatchFft fft(m, 1);
  const ComplexVector half = dispersion_multiplier(grid, 0.5 * dz);
  const ComplexVector full = dispersion_multiplier(grid, dz);
  auto disperse = [&](const ComplexVector& factor) {
    if (!fiber.dispersion) return;
    fft.forward(u);
    simd::scale_columns(u, factor);
    fft.backward(u);
  };

  const double e0 = energy(input);
  double drift = 0.0;
  auto track = [&](std::span<const cplx> snapshot) {
    if (e0 == 0.0) return;
    double e = 0.0;
    for (const cplx& v : snapshot) e += std::norm(v);
    drift = std::max(drift, std::abs(e * grid.dt() - e0) / e0);
  };

  disperse(half);
  for (std::size_t n = 0; n < steps; ++n) {
    cplx* mid = traj.midpoints_.data() + n * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double kerr = fiber.nonlinearity ? std::norm(u[j]) * dz : 0.0;
      mid[j] = u[j] * std::polar(1.0, 0.5 * kerr);
      u[j] *= std::polar(1.0, kerr);
    }
    track({mid, m});
    disperse(n + 1 < steps ? full : half);
  }
  track(u);

  traj.final_.amplitude = std::move(field);
  traj.energy_drift_ = drift;
  if (drift > 1e-6) {
    throw NumericalError(fmt::format(
        "classical propagation drifted by {:.3g} in energy (limit 1e-6); reduce dz (now {})",
        drift, dz));
  }
  return traj;
}

}  // namespace soliton_squeeze
