#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dgplate/checkpoint.hpp"
#include "dgplate/driver.hpp"
#include "support.hpp"

namespace dgplate {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> csv_last_row(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  std::vector<std::string> cells;
  std::stringstream ss(last);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  return cells;
}

RunConfig small(const std::string& scenario, const std::string& dir, Index steps) {
  RunConfig c;
  c.scenario = scenario;
  c.refinements = 2;
  c.max_steps = steps;
  c.deterministic = true;
  c.out = testing::scratch_dir(dir).string();
  return c;
}

TEST(Driver, ZeroStepsReportsTheInitialState) {
  const RunConfig c = small("clamped_identity", "driver_zero", 0);
  const RunSummary s = run(c);
  EXPECT_EQ(s.steps, 0);
  EXPECT_FALSE(s.converged);
  EXPECT_NEAR(s.initial_energy, 40.0, 1e-9);
  EXPECT_EQ(s.energy_total, s.initial_energy);
  EXPECT_EQ(s.n_cells, 16);
  EXPECT_EQ(s.n_dofs, 16 * 27 + 16 * 3);
  const std::filesystem::path out = c.out;
  EXPECT_TRUE(std::filesystem::exists(out / "snapshots" / "step_00000000.vtk"));
  EXPECT_TRUE(std::filesystem::exists(out / "final.ckpt"));
  EXPECT_EQ(read_checkpoint(out / "final.ckpt").step, 0);
}

TEST(Driver, FreeCigarDescendsAndWritesConsistentOutputs) {
  RunConfig c = small("free_cigar", "driver_cigar", 100);
  c.snapshot_every = 50;
  c.checkpoint_every = 40;
  const RunSummary s = run(c);
  EXPECT_EQ(s.steps, 100);
  EXPECT_EQ(s.energy_increases, 0);
  EXPECT_LT(s.energy_total, s.initial_energy);
  EXPECT_NEAR(s.initial_energy, 520.0, 1e-8);

  const std::filesystem::path out = c.out;
  const auto row = csv_last_row(out / "trace.csv");
  ASSERT_EQ(row.size(), 8u);
  EXPECT_EQ(row[0], "100");
  EXPECT_EQ(std::stod(row[2]), s.energy_total);

  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(j.at("energy_total").get<double>(), s.energy_total);
  EXPECT_EQ(j.at("steps").get<Index>(), 100);
  EXPECT_FALSE(j.at("converged").get<bool>());

  for (const char* f : {"snapshots/step_00000000.vtk", "snapshots/step_00000050.vtk", "snapshots/step_00000100.vtk",
                        "checkpoints/step_00000040.ckpt", "checkpoints/step_00000080.ckpt", "config.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  EXPECT_EQ(parse_config_file(out / "config.txt"), c);
  EXPECT_EQ(read_checkpoint(out / "final.ckpt").step, 100);
}

TEST(Driver, TraceCadenceStillEndsWithTheLastStep) {
  RunConfig c = small("free_cigar", "driver_cadence", 7);
  c.trace_every = 3;
  const RunSummary s = run(c);
  const auto row = csv_last_row(std::filesystem::path(c.out) / "trace.csv");
  EXPECT_EQ(row[0], "7");
  EXPECT_EQ(std::stod(row[2]), s.energy_total);
}

TEST(Driver, DeterministicRunsAreBitwiseIdentical) {
  RunConfig a = small("free_wavy", "driver_det_a", 25);
  RunConfig b = a;
  b.out = testing::scratch_dir("driver_det_b").string();
  run(a);
  run(b);
  const std::filesystem::path pa = a.out, pb = b.out;
  EXPECT_EQ(slurp(pa / "trace.csv"), slurp(pb / "trace.csv"));
  EXPECT_EQ(slurp(pa / "final.ckpt"), slurp(pb / "final.ckpt"));
}

TEST(Driver, BadConfigurationsFailBeforeRunning) {
  RunConfig c = small("no_such_plate", "driver_bad", 1);
  EXPECT_THROW(run(c), UnknownScenarioError);
  c.scenario = "free_cigar";
  c.epsilon = 0.0;
  EXPECT_THROW(run(c), FactorizationError);
}

}  // namespace
}  // namespace dgplate
