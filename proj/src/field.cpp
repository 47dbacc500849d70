#include "soliton_squeeze/field.hpp"

#include <cmath>
#include <fmt/format.h>

#include "soliton_squeeze/error.hpp"

namespace soliton_squeeze {

TimeGrid::TimeGrid(std::size_t n_points, double t_window)
    : window_(t_window), dt_(t_window / static_cast<double>(n_points)), omega_(n_points) {
  const auto n = static_cast<std::ptrdiff_t>(n_points);
  const double base = 2.0 * std::numbers::pi / t_window;
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::ptrdiff_t wrapped = k < (n + 1) / 2 ? k : k - n;
    omega_[static_cast<std::size_t>(k)] = base * static_cast<double>(wrapped);
  }
}

TimeGrid make_grid(std::size_t n_points, double t_window) {
  if (n_points < 8) throw ConfigError(fmt::format("grid needs at least 8 points, got {}", n_points));
  if (!(t_window > 0.0) || !std::isfinite(t_window)) {
    throw ConfigError(fmt::format("time window must be positive and finite, got {}", t_window));
  }
  return TimeGrid(n_points, t_window);
}

Envelope::Envelope(TimeGrid g, ComplexVector a) : grid(std::move(g)), amplitude(std::move(a)) {
  if (amplitude.size() != grid.size()) {
    throw std::invalid_argument(fmt::format("envelope has {} samples for a {}-point grid",
                                            amplitude.size(), grid.size()));
  }
}

Envelope::Envelope(TimeGrid g) : grid(std::move(g)), amplitude(grid.size()) {}

double energy(const Envelope& env) {
  double sum = 0.0;
  for (const cplx& u : env.amplitude) sum += std::norm(u);
  return sum * env.grid.dt();
}

double boundary_energy_fraction(const Envelope& env) {
  const double total = energy(env);
  if (total == 0.0) return 0.0;
  const double edge = std::norm(env.amplitude.front()) + std::norm(env.amplitude.back());
  return edge * env.grid.dt() / total;
}

Envelope sech_pulse(const TimeGrid& grid, const PulseSpec& spec) {
  if (!(spec.soliton_number >= 0.0) || !std::isfinite(spec.soliton_number)) {
    throw ConfigError(fmt::format("soliton number must be >= 0, got {}", spec.soliton_number));
  }
  Envelope env(grid);
  const cplx carrier = std::polar(1.0, spec.carrier_phase);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.time(j) - spec.center_time;
    env.amplitude[j] = spec.soliton_number / std::cosh(t) * carrier;
  }
  if (const double leak = boundary_energy_fraction(env); leak > 1e-10) {
    warn(fmt::format("sech pulse leaks {:.3g} of its energy into the window edges; "
                     "enlarge t_window",
                     leak));
  }
  return env;
}

FiberSpec FiberSpec::with_max_step(double length_periods, double max_step) {
  if (!(max_step > 0.0)) throw ConfigError(fmt::format("dz must be positive, got {}", max_step));
  FiberSpec fiber;
  fiber.length_periods = length_periods;
  const double zeta = fiber.normalized_length();
  fiber.n_steps = zeta > 0.0 ? static_cast<std::size_t>(std::ceil(zeta / max_step - 1e-9)) : 1;
  if (fiber.n_steps == 0) fiber.n_steps = 1;
  fiber.validate();
  return fiber;
}

void FiberSpec::validate() const {
  if (!(length_periods >= 0.0) || !std::isfinite(length_periods)) {
    throw ConfigError(fmt::format("fiber length must be >= 0, got {}", length_periods));
  }
  if (n_steps < 1) throw ConfigError("fiber needs at least one step");
}

double meters_to_soliton_periods(double length_m) {
  if (!(length_m >= 0.0) || !std::isfinite(length_m)) {
    throw ConfigError(fmt::format("fiber length must be >= 0 m, got {}", length_m));
  }
  return length_m / kMetersPerSolitonPeriod;
}

}  // namespace soliton_squeeze
