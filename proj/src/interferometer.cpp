#include "soliton_squeeze/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "soliton_squeeze/error.hpp"

namespace soliton_squeeze {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite_in(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

double real_dot(const ComplexVector& x, const ComplexVector& y) {
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sum += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
  }
  return sum;
}

std::array<std::array<double, 3>, 3> gram(const std::array<ComplexVector, 3>& v) {
  std::array<std::array<double, 3>, 3> g{};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) g[i][j] = g[j][i] = real_dot(v[i], v[j]);
  }
  return g;
}

double quadratic(const std::array<std::array<double, 3>, 3>& g, const std::array<double, 3>& x) {
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) sum += x[i] * g[i][j] * x[j];
  }
  return sum;
}

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

Envelope strong_input(const InterferometerConfig& config) {
  return sech_pulse(config.grid, PulseSpec{.soliton_number = config.soliton_number});
}

Envelope weak_input(const InterferometerConfig& config) {
  return sech_pulse(config.grid,
                    PulseSpec{.soliton_number =
                                  std::sqrt(config.aux_energy_fraction) * config.soliton_number,
                              .center_time = config.aux_offset});
}

double max_defect(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return kNaN;
  return std::max(a, b);
}

}  // namespace

void InterferometerConfig::validate() const {
  if (!finite_in(soliton_number, 0.0, std::numeric_limits<double>::max())) {
    throw ConfigError(fmt::format("soliton number N must be >= 0, got {}", soliton_number));
  }
  fiber.validate();
  if (!(std::isfinite(recombination_ratio) && recombination_ratio >= 0.0 &&
        recombination_ratio < 1.0)) {
    throw ConfigError(fmt::format("recombination ratio T must lie in [0, 1), got {}",
                                  recombination_ratio));
  }
  if (relative_phase && !std::isfinite(*relative_phase)) {
    throw ConfigError("relative phase must be finite");
  }
  if (!finite_in(aux_energy_fraction, 0.0, std::numeric_limits<double>::max())) {
    throw ConfigError(fmt::format("auxiliary energy fraction must be >= 0, got {}",
                                  aux_energy_fraction));
  }
  if (!std::isfinite(aux_offset)) throw ConfigError("auxiliary offset must be finite");
  if (!(std::isfinite(detection_efficiency) && detection_efficiency > 0.0 &&
        detection_efficiency <= 1.0)) {
    throw ConfigError(fmt::format("detection efficiency eta must lie in (0, 1], got {}",
                                  detection_efficiency));
  }
}

Arms run_arms(const InterferometerConfig& config) {
  config.validate();
  Trajectory strong = propagate_classical(strong_input(config), config.fiber);
  Trajectory weak = propagate_classical(weak_input(config), config.fiber);
  FluctuationPropagator strong_noise = propagate_fluctuations(strong);
  FluctuationPropagator weak_noise = config.aux_noise == AuxNoise::propagated
                                         ? propagate_fluctuations(weak)
                                         : FluctuationPropagator::identity(config.grid);
  return Arms{Arm{std::move(strong), std::move(strong_noise)},
              Arm{std::move(weak), std::move(weak_noise)}};
}

double mixing_angle(double strong_energy, double weak_energy, double ratio) {
  if (!(std::isfinite(ratio) && ratio >= 0.0)) {
    throw ConfigError(fmt::format("recombination ratio must be >= 0, got {}", ratio));
  }
  if (ratio == 0.0) return 0.0;
  if (!(weak_energy > 0.0)) {
    throw ConfigError(fmt::format(
        "recombination ratio T = {} needs a nonzero auxiliary pulse at the fiber output", ratio));
  }
  return std::atan(std::sqrt(ratio * strong_energy / weak_energy));
}

DetectedField recombine(const Arm& strong, const Arm& weak, double ratio, double phi) {
  const Envelope& a = strong.trajectory.final();
  const Envelope& b = weak.trajectory.final();
  if (!(a.grid == b.grid) || !(strong.noise.grid() == a.grid) || !(weak.noise.grid() == a.grid)) {
    throw ConfigError("interferometer arms must share one time grid");
  }
  const double theta = mixing_angle(energy(a), energy(b), ratio);
  const double s = std::cos(theta);
  const cplx w = std::polar(std::sin(theta), phi);

  DetectedField out{Envelope(a.grid), {strong.noise, weak.noise}, theta};
  for (std::size_t j = 0; j < a.amplitude.size(); ++j) {
    out.mean.amplitude[j] = s * a.amplitude[j] + w * b.amplitude[j];
  }
  for (cplx& v : out.arm_maps[0].storage()) v *= s;
  for (cplx& v : out.arm_maps[1].storage()) v *= w;
  return out;
}

double photon_number_fano(const DetectedField& detected) {
  const Envelope& mean = detected.mean;
  const double dt = mean.grid.dt();
  const double shot = energy(mean);
  if (!(shot > 0.0)) throw NumericalError("Fano factor undefined for a zero mean field");
  ComplexVector p(mean.amplitude.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = dt * std::conj(mean.amplitude[j]);
  double variance = 0.0;
  for (const FluctuationPropagator& map : detected.arm_maps) {
    for (const cplx& c : map.pull_back(p)) variance += std::norm(c);
  }
  return variance / (dt * shot);
}

std::array<ComplexVector, 6> detection_covectors(const Envelope& strong_output,
                                                 const Envelope& weak_output) {
  const double dt = strong_output.grid.dt();
  const std::size_t m = strong_output.amplitude.size();
  std::array<ComplexVector, 6> cov;
  for (auto& v : cov) v.resize(m);
  const cplx i_unit(0.0, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    const cplx a = dt * std::conj(strong_output.amplitude[j]);
    const cplx b = dt * std::conj(weak_output.amplitude[j]);
    cov[0][j] = a;
    cov[1][j] = b;
    cov[2][j] = -i_unit * b;
    cov[3][j] = b;
    cov[4][j] = a;
    cov[5][j] = i_unit * a;
  }
  return cov;
}

NoiseProjection project_noise(const Arms& arms, bool weak_noise_propagated) {
  NoiseProjection out{arms.strong.trajectory.final(), arms.weak.trajectory.final(), {}, {},
                      0.0, 0.0, 0.0};
  const auto cov = detection_covectors(out.strong_output, out.weak_output);
  for (int i = 0; i < 3; ++i) out.strong[i] = arms.strong.noise.pull_back(cov[i]);
  out.strong_defect = symplectic_defect(arms.strong.noise);
  if (weak_noise_propagated) {
    std::array<ComplexVector, 3> weak;
    for (int i = 0; i < 3; ++i) weak[i] = arms.weak.noise.pull_back(cov[3 + i]);
    out.weak = std::move(weak);
    out.weak_defect = symplectic_defect(arms.weak.noise);
  }
  out.energy_drift =
      std::max(arms.strong.trajectory.energy_drift(), arms.weak.trajectory.energy_drift());
  return out;
}

NoiseProjection project_noise(const InterferometerConfig& config, bool need_weak_noise) {
  config.validate();
  const bool weak_noise = need_weak_noise || config.aux_noise == AuxNoise::propagated;
  if (config.engine == NoiseEngine::dense) {
    InterferometerConfig arm_config = config;
    arm_config.aux_noise = weak_noise ? AuxNoise::propagated : AuxNoise::coherent;
    return project_noise(run_arms(arm_config), weak_noise);
  }

  const Trajectory strong = propagate_classical(strong_input(config), config.fiber);
  const Trajectory weak = propagate_classical(weak_input(config), config.fiber);
  NoiseProjection out{strong.final(), weak.final(), {}, {}, kNaN, kNaN, 0.0};
  const auto cov = detection_covectors(out.strong_output, out.weak_output);
  const std::size_t m = config.grid.size();

  auto pull = [&](const Trajectory& traj, std::size_t first) {
    ComplexVector batch(3 * m);
    for (std::size_t i = 0; i < 3; ++i) {
      std::copy(cov[first + i].begin(), cov[first + i].end(), batch.begin() + i * m);
    }
    const ComplexVector pulled = pull_back_through(traj, batch);
    std::array<ComplexVector, 3> result;
    for (std::size_t i = 0; i < 3; ++i) {
      result[i].assign(pulled.begin() + i * m, pulled.begin() + (i + 1) * m);
    }
    return result;
  };

  out.strong = pull(strong, 0);
  if (weak_noise) out.weak = pull(weak, 3);
  out.energy_drift = std::max(strong.energy_drift(), weak.energy_drift());
  return out;
}

PhaseResponse::PhaseResponse(const NoiseProjection& projection, AuxNoise aux_noise, double ratio)
    : dt_(projection.strong_output.grid.dt()) {
  const Envelope& a = projection.strong_output;
  const Envelope& b = projection.weak_output;
  strong_energy_ = energy(a);
  weak_energy_ = energy(b);
  theta_ = soliton_squeeze::mixing_angle(strong_energy_, weak_energy_, ratio);
  strong_gram_ = gram(projection.strong);
  if (aux_noise == AuxNoise::propagated) {
    if (!projection.weak) {
      throw std::invalid_argument("PhaseResponse: weak-arm noise was not propagated");
    }
    weak_gram_ = gram(*projection.weak);
  } else {
    const auto cov = detection_covectors(a, b);
    weak_gram_ = gram({cov[3], cov[4], cov[5]});
  }
  cplx overlap{};
  for (std::size_t j = 0; j < a.amplitude.size(); ++j) {
    overlap += std::conj(a.amplitude[j]) * b.amplitude[j];
  }
  overlap_ = overlap * dt_;
}

double PhaseResponse::fano(double phi) const {
  const double s = std::cos(theta_);
  const double w = std::sin(theta_);
  const double c = std::cos(phi);
  const double sn = std::sin(phi);
  // c_strong = s (s r0 + w cos r1 + w sin r2), c_weak = w (w q0 + s cos q1 + s sin q2)
  const double variance = s * s * quadratic(strong_gram_, {s, w * c, w * sn}) +
                          w * w * quadratic(weak_gram_, {w, s * c, s * sn});
  const double shot = s * s * strong_energy_ + w * w * weak_energy_ +
                      2.0 * s * w * (std::polar(1.0, phi) * overlap_).real();
  if (!(shot > 0.0)) throw NumericalError("Fano factor undefined for a zero mean field");
  return variance / (dt_ * shot);
}

PhaseOptimization optimize_phase(const PhaseResponse& response) {
  PhaseOptimization out;
  out.trace.reserve(kCoarsePhaseSamples);
  const double spacing = kTwoPi / static_cast<double>(kCoarsePhaseSamples);
  std::size_t best = 0;
  double highest = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kCoarsePhaseSamples; ++i) {
    const double phi = spacing * static_cast<double>(i);
    const double f = response.fano(phi);
    out.trace.emplace_back(phi, f);
    if (f < out.trace[best].second) best = i;
    highest = std::max(highest, f);
  }
  out.phi_star = out.trace[best].first;
  out.fano_min = out.trace[best].second;
  if (highest - out.fano_min < 1e-12) {
    out.flat = true;
    warn("phase trace is flat; the relative phase has no effect in this configuration");
    return out;
  }

  // Golden-section search on the bracket around the coarse minimum.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = out.phi_star - spacing;
  double hi = out.phi_star + spacing;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = response.fano(x1);
  double f2 = response.fano(x2);
  while (hi - lo > 0.5 * kPhaseTolerance) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = response.fano(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = response.fano(x2);
    }
  }
  const double x_mid = 0.5 * (lo + hi);
  for (const auto& [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}, std::pair{x_mid, response.fano(x_mid)}}) {
    if (f < out.fano_min) {
      out.fano_min = f;
      out.phi_star = wrap_phase(x);
    }
  }
  return out;
}

double apply_detection_loss(double fano, double eta) {
  if (!(std::isfinite(eta) && eta > 0.0 && eta <= 1.0)) {
    throw ConfigError(fmt::format("detection efficiency eta must lie in (0, 1], got {}", eta));
  }
  if (!(std::isfinite(fano) && fano >= 0.0)) {
    throw ConfigError(fmt::format("Fano factor must be >= 0, got {}", fano));
  }
  return eta * fano + (1.0 - eta);
}

double infer_lossless(double fano_measured, double eta) {
  if (!(std::isfinite(eta) && eta > 0.0 && eta <= 1.0)) {
    throw ConfigError(fmt::format("detection efficiency eta must lie in (0, 1], got {}", eta));
  }
  if (!(std::isfinite(fano_measured) && fano_measured >= 1.0 - eta)) {
    throw ConfigError(fmt::format(
        "measured Fano factor {} is below the loss floor 1 - eta = {}; unphysical", fano_measured,
        1.0 - eta));
  }
  return (fano_measured - (1.0 - eta)) / eta;
}

double squeezing_db(double fano) { return -10.0 * std::log10(fano); }

NoiseResult evaluate_point(const NoiseProjection& projection, const InterferometerConfig& config) {
  config.validate();
  const PhaseResponse response(projection, config.aux_noise, config.recombination_ratio);
  NoiseResult result;
  if (config.recombination_ratio == 0.0 || config.relative_phase) {
    result.phi_used = config.relative_phase.value_or(0.0);
    result.fano = response.fano(result.phi_used);
  } else {
    const PhaseOptimization opt = optimize_phase(response);
    result.phi_used = opt.phi_star;
    result.fano = opt.fano_min;
  }
  result.squeezing_db = squeezing_db(result.fano);
  result.fano_detected = apply_detection_loss(result.fano, config.detection_efficiency);
  result.squeezing_db_detected = squeezing_db(result.fano_detected);
  result.symplectic_defect = config.aux_noise == AuxNoise::propagated
                                 ? max_defect(projection.strong_defect, projection.weak_defect)
                                 : projection.strong_defect;
  result.energy_drift = projection.energy_drift;
  return result;
}

NoiseResult simulate_point(const InterferometerConfig& config) {
  return evaluate_point(project_noise(config, false), config);
}

PointOptimization optimize_phase(const InterferometerConfig& config) {
  config.validate();
  if (!(config.recombination_ratio > 0.0)) {
    throw ConfigError("phase optimization needs a recombination ratio T > 0");
  }
  const NoiseProjection projection = project_noise(config, false);
  const PhaseResponse response(projection, config.aux_noise, config.recombination_ratio);
  PhaseOptimization opt = optimize_phase(response);
  InterferometerConfig fixed = config;
  fixed.relative_phase = opt.phi_star;
  PointOptimization out{opt.phi_star, evaluate_point(projection, fixed), std::move(opt.trace)};
  return out;
}

}  // namespace soliton_squeeze
