#pragma once

// Config-driven batch runs: parse a sectioned key-value document, expand the
// parameter grid, evaluate points on a worker pool (sharing fiber
// propagations between points that differ only in T, phi, eta or auxiliary
// noise mode) and write CSV tables and phase traces.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "soliton_squeeze/interferometer.hpp"

namespace soliton_squeeze {

struct FiberLength {
  double periods = 0.0;
  double meters = 0.0;

  static FiberLength from_meters(double m);
  static FiberLength from_periods(double p);
};

struct SweepAxes {
  std::vector<double> soliton_numbers;
  std::vector<double> ratios;
  std::vector<FiberLength> lengths;
  std::vector<AuxNoise> aux_noise;
  std::vector<double> efficiencies;

  bool empty() const;
};

struct OutputSpec {
  std::filesystem::path directory = ".";
  std::string table = "results.csv";
  bool phase_traces = false;
};

struct SweepPoint {
  std::size_t run_id = 0;
  InterferometerConfig config;
  FiberLength length;
};

struct SweepSpec {
  InterferometerConfig base;
  FiberLength base_length;
  double max_step = 1e-3;
  SweepAxes axes;
  OutputSpec output;

  std::size_t point_count() const;
  /// Row order: length, T, aux noise, eta, N (N varies fastest), each in the
  /// order listed in the document.
  std::vector<SweepPoint> points() const;
};

/// Parses the [grid] / [fiber] / [interferometer] / [sweep] / [output]
/// document. Throws ConfigError naming unknown keys or out-of-range values.
SweepSpec parse_config(std::string_view text);
SweepSpec load_config(const std::filesystem::path& path);

struct SweepRow {
  SweepPoint point;
  std::optional<NoiseResult> result;
  std::string status = "ok";  // "ok" or "error: ..."

  bool ok() const { return result.has_value(); }
};

struct SweepTable {
  std::vector<SweepRow> rows;
  bool all_ok() const;
};

/// Default worker count: SOLITON_SQUEEZE_JOBS, else hardware concurrency.
std::size_t default_jobs();

/// Evaluates every point; failures are recorded per row.
SweepTable compute_sweep(const SweepSpec& spec, std::size_t jobs);

/// compute_sweep plus output: checks that the table file is writable before
/// computing (ConfigError otherwise), then writes the table and optional
/// per-point phase traces.
SweepTable run_sweep(const SweepSpec& spec, std::size_t jobs);

inline constexpr std::string_view kCsvHeader =
    "run_id,N,N2,length_m,length_periods,T,aux_mode,eta,phi_star,fano,fano_detected,"
    "squeezing_db,squeezing_db_detected,symplectic_defect,energy_drift,status";

/// Writes a "# ..." provenance line (the only non-deterministic line), the
/// header and one row per point.
void write_results_csv(std::ostream& out, const SweepTable& table);

std::string_view aux_noise_name(AuxNoise mode);
std::string_view engine_name(NoiseEngine engine);

struct PhaseTrace {
  std::vector<std::pair<double, double>> samples;  // 0 .. 2pi inclusive
  double phi_star = 0.0;
  double fano_min = 1.0;
};

PhaseTrace phase_trace(const InterferometerConfig& config);
/// Two-column CSV (phi_radians, fano) over one closed 2pi scan, followed by a
/// "# refined" comment row carrying (phi_star, fano_min).
void emit_phase_trace(const InterferometerConfig& config, const std::filesystem::path& path);
void write_phase_trace(std::ostream& out, const PhaseTrace& trace);

}  // namespace soliton_squeeze
