#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "blochstab/experiment.hpp"

using namespace blochstab;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.seed = 17;
  cfg.p = 4;
  cfg.integrator.t_final = 30.0;
  cfg.stride = 10;
  return cfg;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("blochstab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, RoundTripDefaults) {
  ScenarioConfig cfg;
  EXPECT_EQ(parse_config(to_yaml(cfg)), cfg);
}

TEST(Config, RoundTripEverything) {
  ScenarioConfig cfg;
  cfg.seed = 0xFFFFFFFFFFFFFFFFull;
  cfg.p = 3;
  cfg.freq_interval = {0.1, 1.0 / 3.0};
  cfg.frequencies = {1.0 / 7.0, 2.5, 3.141592653589793};
  cfg.z0_range = {-0.3, 0.9};
  cfg.weights = {WeightSpec::Scheme::Geometric, 1.1};
  cfg.law = law::RadiationDamping{0.123456789012345, -1};
  cfg.integrator = {Method::LieEulerRodrigues, 0.003, 1234.5};
  cfg.stride = 7;
  cfg.z_threshold = -0.95;
  cfg.outputs = {"a/traj.csv", "b.yaml", "c.svg"};
  const auto text = to_yaml(cfg);
  EXPECT_EQ(parse_config(text), cfg) << text;
  EXPECT_EQ(to_yaml(parse_config(text)), text);
}

TEST(Config, RoundTripLaws) {
  for (const std::string law : {"zero", "fullsum", "weighted", "truncated:3"}) {
    ScenarioConfig cfg;
    cfg.law = parse_control_law(law);
    EXPECT_EQ(parse_config(to_yaml(cfg)), cfg);
  }
}

TEST(Config, ParsesDocumentedLayout) {
  const auto cfg = parse_config(R"(
seed: 5
ensemble:
  p: 30
  freq_interval: [1, 4]
  z0_range: [0.8, 1]
weights:
  scheme: geometric
  base: 1.1
law: weighted
integrator:
  method: rk4
  h: 0.01
  t_final: 20000
  stride: 100
convergence:
  z_threshold: -0.99
output:
  trajectory_csv: run/trajectory.csv
)");
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.weights.scheme, WeightSpec::Scheme::Geometric);
  EXPECT_EQ(cfg.weights.base, 1.1);
  EXPECT_EQ(cfg.law, ControlLaw{law::Weighted{}});
  EXPECT_EQ(cfg.outputs.trajectory_csv, "run/trajectory.csv");
  EXPECT_NO_THROW(validate(cfg));
}

TEST(Config, FieldLevelErrors) {
  EXPECT_THROW(parse_config("bogus: 1"), ConfigError);
  EXPECT_THROW(parse_config("ensemble: {p: abc}"), ConfigError);
  EXPECT_THROW(parse_config("law: magic"), ConfigError);
  EXPECT_THROW(parse_config("weights: {scheme: cubic}"), ConfigError);
  EXPECT_THROW(parse_config("ensemble: {freq_interval: [1]}"), ConfigError);
  EXPECT_THROW(parse_config("[unclosed"), ConfigError);

  ScenarioConfig cfg;
  cfg.weights = {WeightSpec::Scheme::Geometric, 0.9};
  cfg.integrator.h = -1;
  cfg.z0_range = {0.5, 0.1};
  try {
    validate(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("weights.base"), std::string::npos) << msg;
    EXPECT_NE(msg.find("integrator"), std::string::npos) << msg;
    EXPECT_NE(msg.find("ensemble.z0_range"), std::string::npos) << msg;
    EXPECT_NE(msg.find("law"), std::string::npos) << msg;  // fullsum needs unit weights
  }
  ScenarioConfig t;
  t.p = 3;
  t.law = law::Truncated{4};
  EXPECT_THROW(validate(t), ConfigError);
}

TEST(Config, SeedRequiredToMaterialize) {
  ScenarioConfig cfg;
  EXPECT_THROW(materialize(cfg), ConfigError);
  cfg.seed = 1;
  EXPECT_EQ(materialize(cfg), materialize(cfg));
}

TEST(Config, ExplicitFrequencies) {
  ScenarioConfig cfg = small_config();
  cfg.frequencies = {1.0, 1.5, 2.0, 2.5};
  EXPECT_EQ(materialize(cfg).freqs(), cfg.frequencies);
  cfg.frequencies = {1.0};
  EXPECT_THROW(materialize(cfg), ConfigError);
}

TEST(Csv, Schema) {
  const auto res = simulate(small_config());
  std::stringstream ss;
  write_trajectory_csv(res.trajectory, ss);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "t,u1,u2,V,x1,y1,z1,x2,y2,z2,x3,y3,z3,x4,y4,z4");
  std::size_t rows = 0;
  while (std::getline(ss, line)) {
    EXPECT_EQ(split(line).size(), 4u + 3u * 4u);
    ++rows;
  }
  EXPECT_EQ(rows, res.trajectory.size());
}

TEST(Csv, ValuesRoundTrip) {
  const auto res = simulate(small_config());
  std::stringstream ss;
  write_trajectory_csv(res.trajectory, ss);
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  const auto f = split(line);
  EXPECT_EQ(std::stod(f[3]), res.trajectory.lyapunov[0]);
  EXPECT_EQ(std::stod(f[4]), res.trajectory.spins[0][0].x());
}

TEST(RunScenario, DeterministicFiles) {
  const auto d = temp_dir("det");
  auto cfg = small_config();
  cfg.outputs = {(d / "a.csv").string(), (d / "a.yaml").string(), (d / "a.svg").string()};
  run_scenario(cfg);
  cfg.outputs = {(d / "b.csv").string(), (d / "b.yaml").string(), (d / "b.svg").string()};
  run_scenario(cfg);
  EXPECT_EQ(slurp(d / "a.csv"), slurp(d / "b.csv"));
  EXPECT_EQ(slurp(d / "a.svg"), slurp(d / "b.svg"));
  EXPECT_NE(slurp(d / "a.svg").find("<svg"), std::string::npos);
  EXPECT_NE(slurp(d / "a.yaml").find("converged"), std::string::npos);
}

TEST(RunScenario, UnwritableOutput) {
  const auto d = temp_dir("unwritable");
  std::ofstream(d / "file") << "x";
  auto cfg = small_config();
  cfg.outputs.trajectory_csv = (d / "file" / "sub" / "t.csv").string();
  EXPECT_THROW(run_scenario(cfg), std::runtime_error);
}

TEST(Summary, ConsistentWithTrajectory) {
  auto cfg = small_config();
  cfg.integrator.t_final = 400.0;
  const auto res = simulate(cfg);
  const auto& s = res.summary;
  EXPECT_EQ(s.final_lyapunov, res.trajectory.lyapunov.back());
  ASSERT_EQ(s.final_spins.size(), 4u);
  EXPECT_EQ(s.final_spins[2], res.trajectory.spins.back()[2].vec());
  EXPECT_EQ(s.max_norm_drift, res.trajectory.max_norm_drift);
  EXPECT_EQ(s.target_pole, -1);
  EXPECT_EQ(s.samples, res.trajectory.size());
  bool all_down = true;
  for (const auto& v : s.final_spins) all_down = all_down && v.z() < -0.99;
  EXPECT_EQ(s.converged, all_down);
}

TEST(Summary, NorthPoleDoesNotConverge) {
  ScenarioConfig cfg;
  cfg.seed = 1;
  cfg.p = 1;
  cfg.frequencies = {2.0};
  cfg.z0_range = {1.0, 1.0};
  cfg.integrator.t_final = 100.0;
  const auto res = simulate(cfg);
  EXPECT_FALSE(res.summary.converged);
  EXPECT_EQ(res.summary.reached_pole, 1);
  EXPECT_FALSE(res.summary.settling_time_0p9);
}

TEST(Summary, RadiationDampingTargetsNorth) {
  ScenarioConfig cfg = small_config();
  cfg.z0_range = {-0.5, 0.5};
  cfg.law = law::RadiationDamping{1.0, 1};
  cfg.integrator.t_final = 2000.0;
  const auto res = simulate(cfg);
  EXPECT_EQ(res.summary.target_pole, 1);
  EXPECT_TRUE(res.summary.converged);
  EXPECT_EQ(res.summary.reached_pole, 1);
}

TEST(Spectrum, OneSpinTable) {
  const auto reps = spectrum_table({2.0}, SpectrumSelection::All);
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_EQ(reps[0].classification, Stability::Attractor);
  EXPECT_EQ(reps[1].classification, Stability::Repeller);
  std::stringstream ss;
  write_spectrum_csv(reps, ss);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "pattern,branch,index,re,im,residual,class,hyperbolic,n_unstable");
  int rows = 0;
  while (std::getline(ss, line)) {
    EXPECT_EQ(split(line).size(), 9u);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST(Spectrum, Selections) {
  Rng rng(5, 0);
  const auto f = random_frequencies(rng, 5, {1, 4});
  const auto down = spectrum_table(f, SpectrumSelection::Down);
  ASSERT_EQ(down.size(), 1u);
  EXPECT_EQ(down[0].classification, Stability::Attractor);
  const auto pat = spectrum_table({1.3, 2.2, 3.9}, SpectrumSelection::Pattern, {1, -1, -1});
  EXPECT_EQ(pat[0].classification, Stability::Saddle);
  EXPECT_GE(pat[0].n_unstable, 2u);
}

TEST(Fourier, ComparisonRows) {
  const auto s0 = random_ensemble(3, 3, {1, 4}, {-1, 1}, geometric_weights(3, 2.0));
  const auto rows = fourier_comparison(s0, 1000.0, 0.05, {7.5});
  ASSERT_EQ(rows.size(), 7u);
  for (const auto& r : rows) EXPECT_LE(r.error, 0.02);
  std::stringstream ss;
  write_fourier_csv(rows, ss);
  EXPECT_NE(ss.str().find("probe,7.5"), std::string::npos);
}

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}
