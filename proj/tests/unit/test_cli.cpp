#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path workdir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("soliton_squeeze_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto path = dir / "run.ini";
  std::ofstream(path) << text;
  return path;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SOLITON_SQUEEZE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_body(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  const std::string text = s.str();
  return text.substr(text.find('\n') + 1);
}

constexpr const char* kSmall = R"([grid]
n_points = 64
t_window = 16
[fiber]
length_periods = 0.5
dz = 2e-3
[interferometer]
T = 1%
[sweep]
N = 0.8, 1.0, 1.3
aux_noise = coherent, propagated
)";

}  // namespace

TEST(Cli, SweepWritesTable) {
  const auto dir = workdir("sweep");
  const auto cfg = write_config(dir, kSmall);
  EXPECT_EQ(run("sweep " + cfg.string() + " --out " + (dir / "a").string() + " --jobs 2 --seed 5"), 0);
  EXPECT_TRUE(fs::exists(dir / "a" / "results.csv"));
}

TEST(Cli, OutputIsIndependentOfJobs) {
  const auto dir = workdir("jobs");
  const auto cfg = write_config(dir, kSmall);
  ASSERT_EQ(run("sweep " + cfg.string() + " --out " + (dir / "one").string() + " --jobs 1"), 0);
  ASSERT_EQ(run("sweep " + cfg.string() + " --out " + (dir / "four").string() + " --jobs 4"), 0);
  EXPECT_EQ(read_body(dir / "one" / "results.csv"), read_body(dir / "four" / "results.csv"));
}

TEST(Cli, ConfigErrorsExitWithOne) {
  const auto dir = workdir("config");
  EXPECT_EQ(run("sweep " + write_config(dir, "[interferometer]\neta = 1.3\n").string()), 1);
  EXPECT_EQ(run("sweep " + write_config(dir, "[grid]\nbogus = 1\n").string()), 1);
  EXPECT_EQ(run("sweep " + (dir / "missing.ini").string()), 1);
  EXPECT_EQ(run("point " + write_config(dir, kSmall).string() + " --out " + dir.string()), 1);
  EXPECT_EQ(run("frobnicate"), 1);
}

TEST(Cli, FailedRowsExitWithTwo) {
  const auto dir = workdir("rows");
  const auto cfg = write_config(dir, "[grid]\nn_points = 64\nt_window = 16\n[interferometer]\naux_fraction = 0\n[sweep]\nT = 0, 0.01\n");
  EXPECT_EQ(run("sweep " + cfg.string() + " --out " + dir.string()), 2);
  std::ifstream in(dir / "results.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(Cli, PointAndPhaseTrace) {
  const auto dir = workdir("point");
  const auto cfg = write_config(dir, "[grid]\nn_points = 64\nt_window = 16\n[fiber]\nlength_periods = 0.5\n[interferometer]\nN = 1\nT = 1%\n");
  EXPECT_EQ(run("point " + cfg.string() + " --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "results.csv"));
  EXPECT_EQ(run("phase-trace " + cfg.string() + " --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "phase_trace.csv"));
}

TEST(Cli, JobsFromEnvironment) {
  const auto dir = workdir("env");
  const auto cfg = write_config(dir, kSmall);
  ASSERT_EQ(setenv("SOLITON_SQUEEZE_JOBS", "3", 1), 0);
  EXPECT_EQ(run("sweep " + cfg.string() + " --out " + dir.string()), 0);
  unsetenv("SOLITON_SQUEEZE_JOBS");
}
