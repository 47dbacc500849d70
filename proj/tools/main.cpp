// soliton-squeeze: batch runner for the fiber squeezing model.
//
//   soliton-squeeze sweep <config>        full grid -> results CSV
//   soliton-squeeze point <config>        single point -> results CSV + summary
//   soliton-squeeze phase-trace <config>  sum-current noise vs phi for one point
//
// Exit status: 0 all rows ok, 2 at least one row failed, 1 bad configuration.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fmt/format.h>
#include <optional>
#include <string>

#include "soliton_squeeze/error.hpp"
#include "soliton_squeeze/sweep.hpp"

namespace ss = soliton_squeeze;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRowFailed = 2;

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
  std::optional<unsigned long long> seed;
};

ss::SweepSpec load(const Options& opt) {
  ss::SweepSpec spec = ss::load_config(opt.config);
  if (opt.out) spec.output.directory = *opt.out;
  return spec;
}

std::size_t jobs_of(const Options& opt) { return opt.jobs ? *opt.jobs : ss::default_jobs(); }

int report(const ss::SweepTable& table, const ss::SweepSpec& spec) {
  std::size_t failed = 0;
  for (const auto& row : table.rows) {
    if (!row.ok()) {
      ++failed;
      fmt::print(stderr, "run {}: {}\n", row.point.run_id, row.status);
    }
  }
  fmt::print("{} rows ({} failed) -> {}\n", table.rows.size(), failed,
             (spec.output.directory / spec.output.table).string());
  return failed == 0 ? kExitOk : kExitRowFailed;
}

int run_sweep(const Options& opt) {
  const ss::SweepSpec spec = load(opt);
  return report(ss::run_sweep(spec, jobs_of(opt)), spec);
}

int run_point(const Options& opt) {
  const ss::SweepSpec spec = load(opt);
  if (spec.point_count() != 1) {
    throw ss::ConfigError(
        fmt::format("'point' needs a single-point config, this one expands to {} points",
                    spec.point_count()));
  }
  const ss::SweepTable table = ss::run_sweep(spec, 1);
  const ss::SweepRow& row = table.rows.front();
  if (row.ok()) {
    const ss::NoiseResult& r = *row.result;
    fmt::print("phi_star = {:.6f} rad\nfano = {:.8g} ({:.3f} dB)\nfano_detected = {:.8g} ({:.3f} dB)\n",
               r.phi_used, r.fano, r.squeezing_db, r.fano_detected, r.squeezing_db_detected);
  }
  return report(table, spec);
}

int run_phase_trace(const Options& opt) {
  const ss::SweepSpec spec = load(opt);
  if (spec.point_count() != 1) {
    throw ss::ConfigError(
        fmt::format("'phase-trace' needs a single-point config, this one expands to {} points",
                    spec.point_count()));
  }
  const auto path = spec.output.directory / "phase_trace.csv";
  std::error_code ec;
  std::filesystem::create_directories(spec.output.directory, ec);
  try {
    ss::emit_phase_trace(spec.points().front().config, path);
  } catch (const ss::NumericalError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRowFailed;
  }
  fmt::print("phase trace -> {}\n", path.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kerr-fiber soliton amplitude squeezing simulator"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", opt.config, "Config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides [output] dir)");
    sub->add_option("--jobs", opt.jobs, "Worker threads (default: SOLITON_SQUEEZE_JOBS or core count)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Accepted and ignored; runs are deterministic");
  };
  auto* sweep = app.add_subcommand("sweep", "Evaluate every point of the configured grid");
  auto* point = app.add_subcommand("point", "Evaluate a single-point config");
  auto* trace = app.add_subcommand("phase-trace", "Scan the relative phase for a single point");
  for (auto* sub : {sweep, point, trace}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sweep->parsed()) return run_sweep(opt);
    if (point->parsed()) return run_point(opt);
    return run_phase_trace(opt);
  } catch (const ss::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRowFailed;
  }
}
