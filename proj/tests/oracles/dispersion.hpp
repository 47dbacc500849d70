#pragma once

#include <complex>

namespace oracle {

// exp(-t^2 / 2) under dU/dz = (i/2) U_tt.
inline std::complex<double> dispersed_gaussian(double t, double z) {
  const std::complex<double> q(1.0, z);
  return std::exp(-t * t / (2.0 * q)) / std::sqrt(q);
}

}  // namespace oracle
