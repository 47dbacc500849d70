#pragma once

// Time/frequency meshes, sech pulses and the soliton-unit conventions used by
// every other module.
//
// Units: time in soliton-width units, distance z in the normalized units of
//   dU/dz = i|U|^2 U + (i/2) d^2U/dt^2,
// where one soliton period is pi/2. Energies are sum |U|^2 dt, so a sech
// pulse of soliton number N carries 2 N^2.

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "soliton_squeeze/fft.hpp"

namespace soliton_squeeze {

inline constexpr double kSolitonPeriod = std::numbers::pi / 2.0;

namespace detail {
// Fiber lengths (m) and the soliton periods they were quoted as.
inline constexpr double kLengthCalibration[3][2] = {{3.4, 2.5}, {6.0, 4.3}, {9.0, 6.5}};

// Least-squares slope of periods against meters, inverted.
constexpr double fit_meters_per_period() {
  double mp = 0.0;
  double mm = 0.0;
  for (const auto& pair : kLengthCalibration) {
    mp += pair[0] * pair[1];
    mm += pair[0] * pair[0];
  }
  return mm / mp;
}
}  // namespace detail

/// Soliton period z0 of the fiber in meters (about 1.385 m).
inline constexpr double kMetersPerSolitonPeriod = detail::fit_meters_per_period();

/// Uniform periodic time mesh and its FFT-ordered angular frequencies.
class TimeGrid {
 public:
  std::size_t size() const { return omega_.size(); }
  double window() const { return window_; }
  double dt() const { return dt_; }
  /// t_j = (j - n/2) dt, so t = 0 sits on bin n/2.
  double time(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(size() / 2)) * dt_;
  }
  std::span<const double> omega() const { return omega_; }

  bool operator==(const TimeGrid& other) const {
    return size() == other.size() && window_ == other.window_;
  }

 private:
  friend TimeGrid make_grid(std::size_t n_points, double t_window);
  TimeGrid(std::size_t n_points, double t_window);

  double window_;
  double dt_;
  std::vector<double> omega_;
};

/// Throws ConfigError for n_points < 8 or a non-positive / non-finite window.
TimeGrid make_grid(std::size_t n_points, double t_window);

/// Classical field samples on a grid.
struct Envelope {
  Envelope(TimeGrid grid, ComplexVector amplitude);
  explicit Envelope(TimeGrid grid);  // all zero

  TimeGrid grid;
  ComplexVector amplitude;
};

/// sum |U_j|^2 dt
double energy(const Envelope& env);

enum class PulseShape { sech };

struct PulseSpec {
  double soliton_number = 1.0;
  PulseShape shape = PulseShape::sech;
  double center_time = 0.0;
  double carrier_phase = 0.0;
};

/// N sech(t - t_c) exp(i phase). Warns when the boundary bins carry more than
/// 1e-10 of the pulse energy (window too small).
Envelope sech_pulse(const TimeGrid& grid, const PulseSpec& spec);

/// Fraction of the energy that sits in the first and last bin.
double boundary_energy_fraction(const Envelope& env);

struct FiberSpec {
  double length_periods = 0.0;
  std::size_t n_steps = 1;
  // Diagnostic switches; both on for physical runs.
  bool dispersion = true;
  bool nonlinearity = true;

  /// zeta = periods * pi/2
  double normalized_length() const { return length_periods * kSolitonPeriod; }
  double step() const { return normalized_length() / static_cast<double>(n_steps); }

  /// Smallest step count with dz <= max_step.
  static FiberSpec with_max_step(double length_periods, double max_step = 1e-3);

  void validate() const;
};

/// length_m / z0. Throws ConfigError on negative or non-finite input.
double meters_to_soliton_periods(double length_m);

}  // namespace soliton_squeeze
