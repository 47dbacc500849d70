#pragma once

// Symmetrized split-step Fourier solver for the mean field,
//   dU/dz = i|U|^2 U + (i/2) d^2U/dt^2,
// recording the field at the centre of every step for the fluctuation
// propagator.

#include <cstddef>
#include <span>

#include "soliton_squeeze/field.hpp"

namespace soliton_squeeze {

class Trajectory {
 public:
  const TimeGrid& grid() const { return initial_.grid; }
  const FiberSpec& fiber() const { return fiber_; }
  /// Steps actually taken: 0 for a zero-length fiber, fiber().n_steps otherwise.
  std::size_t n_steps() const { return n_steps_; }
  double step() const { return n_steps_ == 0 ? 0.0 : fiber_.step(); }

  const Envelope& initial() const { return initial_; }
  const Envelope& final() const { return final_; }

  /// Field at the z-centre of step n (after the first half dispersion step
  /// and half of the Kerr rotation).
  std::span<const cplx> midpoint(std::size_t n) const;
  Envelope midpoint_envelope(std::size_t n) const;

  /// Largest |E - E_0| / E_0 over all stored snapshots.
  double energy_drift() const { return energy_drift_; }

 private:
  friend Trajectory propagate_classical(const Envelope& input, const FiberSpec& fiber);
  Trajectory(Envelope initial, FiberSpec fiber);

  Envelope initial_;
  Envelope final_;
  FiberSpec fiber_;
  std::size_t n_steps_ = 0;
  ComplexVector midpoints_;  // n_steps_ x grid.size(), row per step
  double energy_drift_ = 0.0;
};

/// Throws NumericalError when the energy drifts by more than 1e-6 relative.
Trajectory propagate_classical(const Envelope& input, const FiberSpec& fiber);

/// Linear dispersion over a sub-step of length h in the FFT basis, with the
/// 1/n of the unnormalized inverse transform folded in:
///   exp(-i omega^2 h / 2) / n
ComplexVector dispersion_multiplier(const TimeGrid& grid, double h);

/// Peak nonlinear phase accumulated by a soliton of peak amplitude N over
/// normalized length zeta: N^2 zeta / 2 (zeta/2 for the fundamental soliton).
double soliton_phase(double soliton_number, double zeta);

}  // namespace soliton_squeeze
