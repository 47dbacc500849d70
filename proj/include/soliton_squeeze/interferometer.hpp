#pragma once

// Polarization Mach-Zehnder: a strong (soliton-like) pulse and a weak
// auxiliary pulse cross the same fiber in orthogonal polarization modes
// without interacting, are recombined at power ratio T and relative phase
// phi, and the combined port is photodetected.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soliton_squeeze/field.hpp"
#include "soliton_squeeze/nlse.hpp"
#include "soliton_squeeze/quantum.hpp"

namespace soliton_squeeze {

enum class AuxNoise {
  coherent,    // auxiliary pulse keeps coherent-state (vacuum) fluctuations
  propagated,  // its fluctuations are propagated through the fiber as well
};

/// How the detected-noise projections are obtained. Both give the same
/// numbers; `projected` pulls the few detection covectors back through the
/// fiber instead of building the dense (mu, nu) matrices and cannot report a
/// symplectic defect.
enum class NoiseEngine { dense, projected };

struct InterferometerConfig {
  double soliton_number = 1.0;
  TimeGrid grid = make_grid(512, 40.0);
  FiberSpec fiber = FiberSpec::with_max_step(0.0);
  double recombination_ratio = 0.0;        // weak:strong power at the detected port
  std::optional<double> relative_phase;    // empty: optimize
  double aux_energy_fraction = 0.1;        // of the strong pulse's input energy
  double aux_offset = 0.0;                 // temporal offset of the auxiliary pulse
  AuxNoise aux_noise = AuxNoise::propagated;
  double detection_efficiency = 1.0;
  NoiseEngine engine = NoiseEngine::dense;

  void validate() const;
};

struct Arm {
  Trajectory trajectory;
  FluctuationPropagator noise;  // identity for coherent-state auxiliary noise
};

struct Arms {
  Arm strong;
  Arm weak;
};

/// Strong arm N sech(t), weak arm sqrt(f) N sech(t - offset); each propagated
/// independently over the configured fiber.
Arms run_arms(const InterferometerConfig& config);

struct DetectedField {
  Envelope mean;                            // A = cos(theta) U_s + sin(theta) e^{i phi} U_w
  std::vector<FluctuationPropagator> arm_maps;  // strong, weak; already scaled
  double mixing_angle = 0.0;
};

/// Mixing angle with tan^2(theta) = T E_s / E_w at the fiber output.
/// Throws ConfigError when T > 0 cannot be realized (no auxiliary energy).
double mixing_angle(double strong_energy, double weak_energy, double ratio);

DetectedField recombine(const Arm& strong, const Arm& weak, double ratio, double phi);

/// Photon-number variance of the detected port over its shot-noise value.
double photon_number_fano(const DetectedField& detected);

/// Detection covectors pulled back to the fiber input for a fixed pair of
/// output means a (strong) and b (weak). Independent of T and phi.
struct NoiseProjection {
  Envelope strong_output;
  Envelope weak_output;
  // Strong arm: pull-backs of dt conj(a), dt conj(b), -i dt conj(b).
  std::array<ComplexVector, 3> strong;
  // Weak arm: pull-backs of dt conj(b), dt conj(a), i dt conj(a); empty when
  // the weak arm's noise was not propagated.
  std::optional<std::array<ComplexVector, 3>> weak;
  double strong_defect = 0.0;  // NaN when not computed
  double weak_defect = 0.0;
  double energy_drift = 0.0;
};

/// Covectors whose pull-backs make up a NoiseProjection; index 0..2 strong,
/// 3..5 weak.
std::array<ComplexVector, 6> detection_covectors(const Envelope& strong_output,
                                                 const Envelope& weak_output);

NoiseProjection project_noise(const Arms& arms, bool weak_noise_propagated);
/// Runs the arms with the configured engine. `need_weak_noise` forces the weak
/// arm's fluctuations to be propagated regardless of config.aux_noise.
NoiseProjection project_noise(const InterferometerConfig& config, bool need_weak_noise);

/// Fano factor as a closed-form function of phi for fixed arms and T.
class PhaseResponse {
 public:
  PhaseResponse(const NoiseProjection& projection, AuxNoise aux_noise, double ratio);

  double fano(double phi) const;
  double mixing_angle() const { return theta_; }

 private:
  using Gram = std::array<std::array<double, 3>, 3>;

  double theta_ = 0.0;
  double dt_ = 0.0;
  Gram strong_gram_{};
  Gram weak_gram_{};
  double strong_energy_ = 0.0;  // sum |a|^2 dt
  double weak_energy_ = 0.0;
  cplx overlap_{};              // sum conj(a) b dt
};

struct NoiseResult {
  double fano = 1.0;
  double squeezing_db = 0.0;
  double phi_used = 0.0;
  double fano_detected = 1.0;
  double squeezing_db_detected = 0.0;
  double symplectic_defect = 0.0;
  double energy_drift = 0.0;
};

struct PhaseOptimization {
  double phi_star = 0.0;
  double fano_min = 1.0;
  std::vector<std::pair<double, double>> trace;  // coarse scan (phi, fano), phi in [0, 2pi)
  bool flat = false;
};

inline constexpr std::size_t kCoarsePhaseSamples = 360;
inline constexpr double kPhaseTolerance = 1e-4;

/// Coarse scan over [0, 2pi) followed by golden-section refinement of the
/// best bracket. Warns when the trace is flat.
PhaseOptimization optimize_phase(const PhaseResponse& response);

struct PointOptimization {
  double phi_star = 0.0;
  NoiseResult result;
  std::vector<std::pair<double, double>> trace;
};
/// Requires T > 0.
PointOptimization optimize_phase(const InterferometerConfig& config);

/// Vacuum admixture of a loss eta: eta F + (1 - eta).
double apply_detection_loss(double fano, double eta);
/// Inverse of apply_detection_loss; rejects measured < 1 - eta.
double infer_lossless(double fano_measured, double eta);

/// -10 log10(F), positive when squeezed.
double squeezing_db(double fano);

/// Evaluates one configuration on an existing projection (phase optimized
/// unless config.relative_phase is set; skipped when T = 0).
NoiseResult evaluate_point(const NoiseProjection& projection, const InterferometerConfig& config);
NoiseResult simulate_point(const InterferometerConfig& config);

}  // namespace soliton_squeeze
