#include "soliton_squeeze/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "soliton_squeeze/error.hpp"

namespace soliton_squeeze {

FiberLength FiberLength::from_meters(double m) {
  return FiberLength{meters_to_soliton_periods(m), m};
}

FiberLength FiberLength::from_periods(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) {
    throw ConfigError(fmt::format("fiber length must be >= 0 periods, got {}", p));
  }
  return FiberLength{p, p * kMetersPerSolitonPeriod};
}

bool SweepAxes::empty() const {
  return soliton_numbers.empty() && ratios.empty() && lengths.empty() && aux_noise.empty() &&
         efficiencies.empty();
}

std::string_view aux_noise_name(AuxNoise mode) {
  return mode == AuxNoise::coherent ? "coherent" : "propagated";
}

std::string_view engine_name(NoiseEngine engine) {
  return engine == NoiseEngine::dense ? "dense" : "projected";
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

using Ptree = boost::property_tree::ptree;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    items.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

class Section {
 public:
  Section(std::string name, const Ptree* tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) {
    seen_.insert(key);
    if (!tree_) return std::nullopt;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  std::string where(const std::string& key) const { return fmt::format("[{}] {}", name_, key); }

  void collect_unknown(std::vector<std::string>& unknown) const {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_) {
      if (!seen_.contains(key)) unknown.push_back(where(key));
    }
  }

 private:
  std::string name_;
  const Ptree* tree_;
  std::set<std::string> seen_;
};

double parse_number(const Section& sec, const std::string& key, const std::string& text,
                    bool allow_percent = false) {
  std::string body = text;
  double scale = 1.0;
  if (allow_percent && !body.empty() && body.back() == '%') {
    body = trim(std::string_view(body).substr(0, body.size() - 1));
    scale = 0.01;
  }
  double value = 0.0;
  const char* end = body.data() + body.size();
  const auto [ptr, ec] = std::from_chars(body.data(), end, value);
  if (ec != std::errc() || ptr != end || body.empty() || !std::isfinite(value)) {
    throw ConfigError(fmt::format("{} = '{}' is not a number", sec.where(key), text));
  }
  return value * scale;
}

struct Bound {
  double lo;
  double hi;
  bool lo_open;
  bool hi_open;

  bool contains(double v) const {
    return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  }
  std::string describe() const {
    auto edge = [](double v) { return std::isinf(v) ? std::string(v > 0 ? "inf" : "-inf") : fmt::format("{}", v); };
    return fmt::format("{}{}, {}{}", lo_open ? '(' : '[', edge(lo), edge(hi), hi_open ? ')' : ']');
  }
};

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Bound kNonNegative{0.0, kInf, false, true};
constexpr Bound kPositive{0.0, kInf, true, true};
constexpr Bound kRatio{0.0, 1.0, false, true};
constexpr Bound kEfficiency{0.0, 1.0, true, false};
constexpr Bound kAnyReal{-kInf, kInf, true, true};

double checked(const Section& sec, const std::string& key, double v, const Bound& bound) {
  if (!bound.contains(v)) {
    throw ConfigError(
        fmt::format("{} = {} is out of range {}", sec.where(key), v, bound.describe()));
  }
  return v;
}

std::optional<double> scalar(Section& sec, const std::string& key, const Bound& bound,
                             bool allow_percent = false) {
  const auto text = sec.raw(key);
  if (!text) return std::nullopt;
  return checked(sec, key, parse_number(sec, key, *text, allow_percent), bound);
}

std::vector<double> number_list(Section& sec, const std::string& key, const Bound& bound,
                                bool allow_percent = false) {
  std::vector<double> values;
  const auto text = sec.raw(key);
  if (!text) return values;
  for (const auto& item : split_list(*text)) {
    values.push_back(checked(sec, key, parse_number(sec, key, item, allow_percent), bound));
  }
  return values;
}

bool parse_bool(const Section& sec, const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw ConfigError(fmt::format("{} = '{}' is not a boolean", sec.where(key), text));
}

AuxNoise parse_aux_noise(const Section& sec, const std::string& key, const std::string& text) {
  if (text == "coherent") return AuxNoise::coherent;
  if (text == "propagated") return AuxNoise::propagated;
  throw ConfigError(fmt::format("{} = '{}' must be 'coherent' or 'propagated'", sec.where(key), text));
}

std::size_t parse_count(const Section& sec, const std::string& key, const std::string& text,
                        std::size_t minimum) {
  std::size_t value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(fmt::format("{} = '{}' is not a positive integer", sec.where(key), text));
  }
  if (value < minimum) {
    throw ConfigError(fmt::format("{} = {} is out of range [{}, inf)", sec.where(key), value, minimum));
  }
  return value;
}

}  // namespace

SweepSpec parse_config(std::string_view text) {
  Ptree tree;
  try {
    std::istringstream in{std::string(text)};
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("malformed config (line {}): {}", e.line(), e.message()));
  }

  static const std::set<std::string> kSections = {"grid", "fiber", "interferometer", "sweep",
                                                  "output"};
  std::vector<std::string> unknown;
  for (const auto& [name, child] : tree) {
    if (child.empty()) {
      unknown.push_back(name);  // key outside any section
    } else if (!kSections.contains(name)) {
      unknown.push_back(fmt::format("[{}]", name));
    }
  }
  auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(name, it == tree.not_found() || it->second.empty() ? nullptr : &it->second);
  };

  SweepSpec spec;
  InterferometerConfig& base = spec.base;

  Section grid = section("grid");
  const std::size_t n_points = grid.raw("n_points")
                                   ? parse_count(grid, "n_points", *grid.raw("n_points"), 8)
                                   : 512;
  const double t_window = scalar(grid, "t_window", kPositive).value_or(40.0);
  base.grid = make_grid(n_points, t_window);

  Section fiber = section("fiber");
  const auto length_m = scalar(fiber, "length_m", kNonNegative);
  const auto length_periods = scalar(fiber, "length_periods", kNonNegative);
  if (length_m && length_periods) {
    throw ConfigError("[fiber] give either length_m or length_periods, not both");
  }
  spec.base_length = length_m ? FiberLength::from_meters(*length_m)
                              : FiberLength::from_periods(length_periods.value_or(0.0));
  spec.max_step = scalar(fiber, "dz", kPositive).value_or(1e-3);
  base.fiber = FiberSpec::with_max_step(spec.base_length.periods, spec.max_step);
  if (const auto v = fiber.raw("dispersion")) base.fiber.dispersion = parse_bool(fiber, "dispersion", *v);
  if (const auto v = fiber.raw("nonlinearity")) base.fiber.nonlinearity = parse_bool(fiber, "nonlinearity", *v);
  if (const auto v = fiber.raw("engine")) {
    if (*v == "dense") {
      base.engine = NoiseEngine::dense;
    } else if (*v == "projected") {
      base.engine = NoiseEngine::projected;
    } else {
      throw ConfigError(fmt::format("[fiber] engine = '{}' must be 'dense' or 'projected'", *v));
    }
  }

  Section ifm = section("interferometer");
  base.soliton_number = scalar(ifm, "N", kNonNegative).value_or(1.0);
  base.recombination_ratio = scalar(ifm, "T", kRatio, true).value_or(0.0);
  if (const auto v = ifm.raw("phi"); v && *v != "optimize") {
    base.relative_phase = checked(ifm, "phi", parse_number(ifm, "phi", *v), kAnyReal);
  }
  base.aux_energy_fraction = scalar(ifm, "aux_fraction", kNonNegative).value_or(0.1);
  base.aux_offset = scalar(ifm, "aux_offset", kAnyReal).value_or(0.0);
  if (const auto v = ifm.raw("aux_noise")) base.aux_noise = parse_aux_noise(ifm, "aux_noise", *v);
  base.detection_efficiency = scalar(ifm, "eta", kEfficiency).value_or(1.0);

  Section sweep = section("sweep");
  SweepAxes& axes = spec.axes;
  axes.soliton_numbers = number_list(sweep, "N", kNonNegative);
  const auto n2_list = number_list(sweep, "N2", kNonNegative);
  const auto n2_range = sweep.raw("N2_range");
  if (static_cast<int>(!axes.soliton_numbers.empty()) + static_cast<int>(!n2_list.empty()) +
          static_cast<int>(n2_range.has_value()) > 1) {
    throw ConfigError("[sweep] N, N2 and N2_range are mutually exclusive");
  }
  for (double n2 : n2_list) axes.soliton_numbers.push_back(std::sqrt(n2));
  if (n2_range) {
    const auto parts = split_list(*n2_range);
    if (parts.size() != 3) {
      throw ConfigError(fmt::format("[sweep] N2_range = '{}' must be 'start, stop, count'", *n2_range));
    }
    const double start = checked(sweep, "N2_range", parse_number(sweep, "N2_range", parts[0]), kNonNegative);
    const double stop = checked(sweep, "N2_range", parse_number(sweep, "N2_range", parts[1]), kNonNegative);
    const std::size_t count = parse_count(sweep, "N2_range", parts[2], 1);
    for (std::size_t i = 0; i < count; ++i) {
      const double n2 = count == 1 ? start
                                   : start + (stop - start) * static_cast<double>(i) /
                                                 static_cast<double>(count - 1);
      axes.soliton_numbers.push_back(std::sqrt(n2));
    }
  }
  axes.ratios = number_list(sweep, "T", kRatio, true);
  const auto sweep_m = number_list(sweep, "length_m", kNonNegative);
  const auto sweep_p = number_list(sweep, "length_periods", kNonNegative);
  if (!sweep_m.empty() && !sweep_p.empty()) {
    throw ConfigError("[sweep] give either length_m or length_periods, not both");
  }
  for (double m : sweep_m) axes.lengths.push_back(FiberLength::from_meters(m));
  for (double p : sweep_p) axes.lengths.push_back(FiberLength::from_periods(p));
  if (const auto v = sweep.raw("aux_noise")) {
    for (const auto& item : split_list(*v)) axes.aux_noise.push_back(parse_aux_noise(sweep, "aux_noise", item));
  }
  axes.efficiencies = number_list(sweep, "eta", kEfficiency);

  Section output = section("output");
  if (const auto v = output.raw("dir")) spec.output.directory = *v;
  if (const auto v = output.raw("table")) spec.output.table = *v;
  if (const auto v = output.raw("phase_traces")) spec.output.phase_traces = parse_bool(output, "phase_traces", *v);

  for (Section* sec : {&grid, &fiber, &ifm, &sweep, &output}) sec->collect_unknown(unknown);
  if (!unknown.empty()) {
    throw ConfigError(fmt::format("unknown config keys: {}", fmt::join(unknown, ", ")));
  }
  base.validate();
  return spec;
}

SweepSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

// ---------------------------------------------------------------------------
// Expansion

std::size_t SweepSpec::point_count() const {
  auto size_or_one = [](std::size_t n) { return n == 0 ? std::size_t{1} : n; };
  return size_or_one(axes.lengths.size()) * size_or_one(axes.ratios.size()) *
         size_or_one(axes.aux_noise.size()) * size_or_one(axes.efficiencies.size()) *
         size_or_one(axes.soliton_numbers.size());
}

std::vector<SweepPoint> SweepSpec::points() const {
  auto or_base = [](const auto& axis, auto fallback) {
    using T = typename std::decay_t<decltype(axis)>::value_type;
    return axis.empty() ? std::vector<T>{fallback} : axis;
  };
  const auto lengths = or_base(axes.lengths, base_length);
  const auto ratios = or_base(axes.ratios, base.recombination_ratio);
  const auto modes = or_base(axes.aux_noise, base.aux_noise);
  const auto etas = or_base(axes.efficiencies, base.detection_efficiency);
  const auto ns = or_base(axes.soliton_numbers, base.soliton_number);

  std::vector<SweepPoint> out;
  out.reserve(point_count());
  for (const FiberLength& length : lengths) {
    FiberSpec fiber = FiberSpec::with_max_step(length.periods, max_step);
    fiber.dispersion = base.fiber.dispersion;
    fiber.nonlinearity = base.fiber.nonlinearity;
    for (double ratio : ratios) {
      for (AuxNoise mode : modes) {
        for (double eta : etas) {
          for (double n : ns) {
            SweepPoint point{out.size(), base, length};
            point.config.fiber = fiber;
            point.config.recombination_ratio = ratio;
            point.config.aux_noise = mode;
            point.config.detection_efficiency = eta;
            point.config.soliton_number = n;
            out.push_back(std::move(point));
          }
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Execution

bool SweepTable::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok(); });
}

std::size_t default_jobs() {
  if (const char* env = std::getenv("SOLITON_SQUEEZE_JOBS"); env && *env) {
    std::size_t jobs = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), jobs);
    if (ec == std::errc() && ptr == text.data() + text.size() && jobs > 0) return jobs;
    warn(fmt::format("ignoring SOLITON_SQUEEZE_JOBS='{}'", env));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Everything that determines the two fiber propagations of a point.
struct PropagationKey {
  double soliton_number;
  double length_periods;
  std::size_t n_steps;
  bool dispersion;
  bool nonlinearity;
  std::size_t n_points;
  double window;
  double aux_fraction;
  double aux_offset;
  NoiseEngine engine;

  static PropagationKey of(const InterferometerConfig& c) {
    return {c.soliton_number,  c.fiber.length_periods, c.fiber.n_steps,   c.fiber.dispersion,
            c.fiber.nonlinearity, c.grid.size(),       c.grid.window(),   c.aux_energy_fraction,
            c.aux_offset,      c.engine};
  }
  auto operator<=>(const PropagationKey&) const = default;
};

struct Propagation {
  InterferometerConfig config;  // representative
  bool need_weak_noise = false;
  std::optional<NoiseProjection> projection;
  std::string error;
};

std::string error_status(const std::exception& e) {
  std::string msg = e.what();
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return "error: " + msg;
}

PhaseTrace trace_from(const PhaseResponse& response) {
  const PhaseOptimization opt = optimize_phase(response);
  PhaseTrace trace;
  trace.samples = opt.trace;
  trace.samples.emplace_back(2.0 * std::numbers::pi, response.fano(2.0 * std::numbers::pi));
  trace.phi_star = opt.phi_star;
  trace.fano_min = opt.fano_min;
  return trace;
}

std::filesystem::path trace_path(const OutputSpec& output, std::size_t run_id) {
  return output.directory / fmt::format("phase_trace_{:04d}.csv", run_id);
}

}  // namespace

namespace {

SweepTable compute(const SweepSpec& spec, std::size_t jobs,
                   std::map<std::size_t, PhaseTrace>* traces) {
  const std::vector<SweepPoint> points = spec.points();

  std::map<PropagationKey, std::size_t> index;
  std::vector<Propagation> work;
  std::vector<std::size_t> point_work(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto key = PropagationKey::of(points[i].config);
    auto [it, inserted] = index.try_emplace(key, work.size());
    if (inserted) work.push_back(Propagation{points[i].config, false, std::nullopt, {}});
    work[it->second].need_weak_noise |= points[i].config.aux_noise == AuxNoise::propagated;
    point_work[i] = it->second;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < work.size();) {
      Propagation& p = work[i];
      try {
        p.projection = project_noise(p.config, p.need_weak_noise);
      } catch (const std::exception& e) {
        p.error = error_status(e);
      }
    }
  };
  {
    const std::size_t n_workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(work.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  SweepTable table;
  table.rows.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    SweepRow row{points[i], std::nullopt, "ok"};
    const Propagation& p = work[point_work[i]];
    if (!p.projection) {
      row.status = p.error;
    } else {
      try {
        row.result = evaluate_point(*p.projection, row.point.config);
        if (traces) {
          const PhaseResponse response(*p.projection, row.point.config.aux_noise,
                                       row.point.config.recombination_ratio);
          traces->emplace(row.point.run_id, trace_from(response));
        }
      } catch (const std::exception& e) {
        row.result.reset();
        row.status = error_status(e);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace

SweepTable compute_sweep(const SweepSpec& spec, std::size_t jobs) {
  return compute(spec, jobs, nullptr);
}

SweepTable run_sweep(const SweepSpec& spec, std::size_t jobs) {
  const OutputSpec& output = spec.output;
  const std::filesystem::path table_path = output.directory / output.table;
  {
    std::error_code ec;
    std::filesystem::create_directories(output.directory, ec);
    std::ofstream probe(table_path);
    if (!probe) {
      throw ConfigError(fmt::format("cannot write results table '{}'", table_path.string()));
    }
  }

  std::map<std::size_t, PhaseTrace> traces;
  SweepTable table = compute(spec, jobs, output.phase_traces ? &traces : nullptr);

  std::ofstream out(table_path);
  write_results_csv(out, table);
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", table_path.string()));
  for (const auto& [run_id, trace] : traces) {
    std::ofstream trace_out(trace_path(output, run_id));
    write_phase_trace(trace_out, trace);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

void write_results_csv(std::ostream& out, const SweepTable& table) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  out << fmt::format("# soliton-squeeze results, generated {:%Y-%m-%dT%H:%M:%SZ}\n",
                     fmt::gmtime(now));
  out << kCsvHeader << '\n';
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (const SweepRow& row : table.rows) {
    const InterferometerConfig& c = row.point.config;
    const NoiseResult r = row.result.value_or(NoiseResult{nan, nan, nan, nan, nan, nan, nan});
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", row.point.run_id,
                       c.soliton_number, c.soliton_number * c.soliton_number,
                       row.point.length.meters, row.point.length.periods, c.recombination_ratio,
                       aux_noise_name(c.aux_noise), c.detection_efficiency, r.phi_used, r.fano,
                       r.fano_detected, r.squeezing_db, r.squeezing_db_detected,
                       r.symplectic_defect, r.energy_drift, csv_field(row.status));
  }
}

PhaseTrace phase_trace(const InterferometerConfig& config) {
  const NoiseProjection projection = project_noise(config, false);
  return trace_from(PhaseResponse(projection, config.aux_noise, config.recombination_ratio));
}

void write_phase_trace(std::ostream& out, const PhaseTrace& trace) {
  out << "phi_radians,fano\n";
  for (const auto& [phi, fano] : trace.samples) out << fmt::format("{},{}\n", phi, fano);
  out << fmt::format("# refined,{},{}\n", trace.phi_star, trace.fano_min);
}

void emit_phase_trace(const InterferometerConfig& config, const std::filesystem::path& path) {
  const PhaseTrace trace = phase_trace(config);
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write phase trace '{}'", path.string()));
  write_phase_trace(out, trace);
}

}  // namespace soliton_squeeze
