// Copyright 2026 The opophase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli/cli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "json.hpp"
#include "opophase/angles.hpp"

namespace opophase::cli {
namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

nlohmann::json run_json(const std::vector<std::string>& args) {
  const auto r = run(args);
  EXPECT_EQ(r.status, 0) << r.err;
  return nlohmann::json::parse(r.out);
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  csv.header = split(line);
  while (std::getline(ss, line)) {
    if (!line.empty()) csv.rows.push_back(split(line));
  }
  return csv;
}

double num(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  EXPECT_EQ(pos, s.size()) << s;
  return v;
}

// Parses a sweep CSV and checks its schema.
Csv validated_sweep(const std::string& text) {
  const Csv csv = parse_csv(text);
  EXPECT_EQ(csv.header, split(std::string(kSweepHeader)));
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    EXPECT_EQ(r.size(), 6u);
    if (r.size() != 6) continue;
    for (int c : {0, 1, 2, 3, 5}) num(r[c]);
    EXPECT_TRUE(r[4] == "Threshold" || r[4] == "AlwaysBeneficial" || r[4] == "NeverBeneficial" ||
                r[4] == "Neutral")
        << r[4];
    if (r[4] == "AlwaysBeneficial" || r[4] == "Neutral") EXPECT_EQ(num(r[5]), 0.0);
    if (r[4] == "NeverBeneficial") EXPECT_TRUE(std::isinf(num(r[5])));
    if (i > 0) {
      const auto& p = csv.rows[i - 1];
      EXPECT_TRUE(num(p[0]) < num(r[0]) || (num(p[0]) == num(r[0]) && num(p[1]) < num(r[1])));
    }
  }
  return csv;
}

TEST(ParseAngle, UnitsAndDefaults) {
  EXPECT_NEAR(parse_angle("45deg", AngleUnit::Radians), kPi / 4.0, 1e-15);
  EXPECT_NEAR(parse_angle("45", AngleUnit::Degrees), kPi / 4.0, 1e-15);
  EXPECT_EQ(parse_angle("0.5rad", AngleUnit::Degrees), 0.5);
  EXPECT_EQ(parse_angle("0.5", AngleUnit::Radians), 0.5);
  EXPECT_THROW(parse_angle("abc", AngleUnit::Degrees), UsageError);
  EXPECT_THROW(parse_angle("10 degrees", AngleUnit::Degrees), UsageError);
  for (const char* text : {"14.8deg", "7.712deg", "-40deg", "0.001deg"}) {
    const double rad = parse_angle(text, AngleUnit::Radians);
    const std::string t(text);
    EXPECT_NEAR(rad_to_deg(rad), std::stod(t.substr(0, t.size() - 3)), 1e-12);
  }
}

TEST(ParseHelpers, RangesAndLists) {
  EXPECT_EQ(parse_list("1,2,5"), (std::vector<double>{1, 2, 5}));
  const auto g = parse_gain_range("1.1:6:0.05");
  EXPECT_EQ(g.min, 1.1);
  EXPECT_EQ(g.max, 6.0);
  EXPECT_EQ(g.step, 0.05);
  EXPECT_EQ(parse_gain_range("3.12").points().size(), 1u);
  EXPECT_THROW(parse_gain_range("1:2"), UsageError);
  EXPECT_THROW(parse_list("1,,2"), UsageError);
}

TEST(Moments, PresetNoOpoBranch) {
  const auto j = run_json({"moments", "--preset", "configA", "--sigma", "0"});
  const auto& states = j["states"];
  ASSERT_EQ(states.size(), 3u);
  EXPECT_EQ(states[1]["stage"], "diffused");
  EXPECT_EQ(states[1]["var_x"].get<double>(), 1.0);
  EXPECT_EQ(states[1]["var_y"].get<double>(), 1.0);
  EXPECT_EQ(states[2]["stage"], "opo");
  EXPECT_NEAR(j["opo"]["gain"].get<double>(), 2.75, 1e-12);
}

TEST(Moments, FigureTwoTuple) {
  const auto j =
      run_json({"moments", "--beta", "2", "--phi", "45deg", "--opo", "d=0.40,eta-in=0.08,eta-esc=0.87"});
  const auto& opo = j["states"][1];
  EXPECT_EQ(opo["stage"], "opo");
  EXPECT_NEAR(opo["mean_x"].get<double>(), 2.4873, 5e-5);
  EXPECT_NEAR(opo["mean_y"].get<double>(), 1.0660, 5e-5);
  EXPECT_NEAR(opo["var_x"].get<double>(), 4.8667, 5e-5);
  EXPECT_NEAR(opo["var_y"].get<double>(), 0.28980, 5e-6);
}

TEST(Moments, DiffusedExample) {
  const auto j = run_json({"moments", "--beta", "2", "--sigma", "45deg"});
  const auto& d = j["states"][1];
  EXPECT_NEAR(d["mean_x"].get<double>(), 2.9385, 1e-4);
  EXPECT_NEAR(d["var_x"].get<double>(), 2.6955, 1e-4);
  EXPECT_NEAR(d["var_y"].get<double>(), 6.6702, 1e-4);
  EXPECT_NEAR(d["phase_variance"].get<double>(), 0.7725380, 1e-7);
  EXPECT_TRUE(j["opo"].is_null());
}

TEST(Moments, VacuumHasNoPhase) {
  const auto j = run_json({"moments", "--beta", "0"});
  EXPECT_TRUE(j["states"][0]["phase_variance"].is_null());
}

TEST(Threshold, Presets) {
  const auto a = run_json({"threshold", "--preset", "configA"});
  EXPECT_EQ(a["classification"], "Threshold");
  EXPECT_EQ(a["sigma_th_deg"].get<double>(), 7.712);
  EXPECT_TRUE(a["method_agreement"].get<bool>());
  EXPECT_EQ(a["bisection"]["classification"], "Threshold");

  const auto b = run_json({"threshold", "--preset", "configB"});
  EXPECT_EQ(b["classification"], "AlwaysBeneficial");
  EXPECT_TRUE(b["sigma_th_deg"].is_null());

  const auto n = run_json({"threshold", "--beta", "2", "--gain", "1"});
  EXPECT_EQ(n["classification"], "Neutral");
}

TEST(Threshold, MirrorCoupling) {
  const auto j = run_json({"threshold", "--beta", "2.05", "--gain", "3.12", "--mirrors",
                           "0.9925,0.917,2.42e-3"});
  EXPECT_NEAR(j["opo"]["eta_in"].get<double>(), 0.0787, 5e-5);
  EXPECT_EQ(j["classification"], "AlwaysBeneficial");
}

TEST(Sweep, SingleRowMatchesThreshold) {
  const auto sweep = run({"sweep", "--preset", "configA"});
  ASSERT_EQ(sweep.status, 0) << sweep.err;
  const auto threshold = run({"threshold", "--preset", "configA", "--format", "csv"});
  ASSERT_EQ(threshold.status, 0);
  EXPECT_EQ(sweep.out, threshold.out);
  const auto csv = validated_sweep(sweep.out);
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.rows[0][5], "7.71194");
}

TEST(Sweep, ConfigurationBRange) {
  const auto r = run({"sweep", "--preset", "configB", "--gain", "3.12:3.12:1"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto csv = validated_sweep(r.out);
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.rows[0][4], "AlwaysBeneficial");
  EXPECT_EQ(csv.rows[0][0], "3.12");
}

TEST(Sweep, FigureFourTopCommand) {
  const auto r = run({"sweep", "--eta-in", "0.01", "--eta-esc", "0.93", "--beta", "1,2,5",
                      "--gain", "1.1:6:0.05"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto csv = validated_sweep(r.out);
  EXPECT_EQ(csv.rows.size(), 99u * 3u);
}

TEST(Sweep, JsonFormat) {
  const auto j = run_json({"sweep", "--preset", "configB", "--format", "json"});
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0]["classification"], "AlwaysBeneficial");
}

TEST(Mc, SelfCheckPasses) {
  const auto r = run({"mc", "--preset", "configA", "--sigma", "10deg", "--samples", "1000000",
                      "--seed", "7"});
  EXPECT_EQ(r.status, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["self_check"], "pass");
  EXPECT_GE(j["entries"].size(), 8u);
  for (const auto& e : j["entries"]) EXPECT_LE(std::abs(e["z"].get<double>()), 5.0);
}

TEST(Mc, SmallRunIsDeterministic) {
  const std::vector<std::string> args = {"mc", "--beta", "2", "--sigma", "0", "--samples", "100",
                                         "--seed", "1"};
  const auto a = run(args);
  const auto b = run(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.status, b.status);
  auto with_threads = args;
  with_threads.insert(with_threads.end(), {"--threads", "3"});
  EXPECT_EQ(run(with_threads).out, a.out);
}

TEST(Mc, EstimatorExperiment) {
  const auto j = run_json({"mc", "--beta", "2", "--samples", "10000", "--batches", "200",
                           "--estimator-samples", "2000", "--seed", "3"});
  bool found = false;
  for (const auto& e : j["entries"]) {
    if (e["quantity"] == "scaled_phase_variance") {
      found = true;
      EXPECT_DOUBLE_EQ(e["analytic"].get<double>(), 0.0625);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Mc, FewBatchesIsModelError) {
  EXPECT_EQ(run({"mc", "--beta", "2", "--samples", "100", "--batches", "10"}).status, kExitModel);
}

TEST(Reproduce, AllFiguresParse) {
  const auto dir = std::filesystem::temp_directory_path() / "opophase_reproduce_test";
  std::filesystem::remove_all(dir);
  for (auto id : figure_ids()) {
    const auto r = run({"reproduce", std::string(id), "--out-dir", dir.string()});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto path = dir / (std::string(id) + ".csv");
    ASSERT_TRUE(std::filesystem::exists(path));
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    const Csv csv = id.starts_with("fig4") ? validated_sweep(text.str()) : parse_csv(text.str());
    EXPECT_FALSE(csv.rows.empty());
    for (const auto& row : csv.rows) {
      ASSERT_EQ(row.size(), csv.header.size());
      if (!id.starts_with("fig4")) {
        for (const auto& f : row) num(f);
      }
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(Reproduce, CompressionTable) {
  const auto r = run({"reproduce", "fig6-compression", "--out-dir", "-"});
  ASSERT_EQ(r.status, 0);
  const auto csv = parse_csv(r.out);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"theta0_deg", "gain", "d", "theta_d_deg"}));
  ASSERT_EQ(csv.rows.size(), 3u);
  EXPECT_EQ(num(csv.rows[2][0]), 40.0);
  EXPECT_EQ(num(csv.rows[2][1]), 3.1);
  EXPECT_NEAR(num(csv.rows[2][3]), 18.41, 5e-3);
  EXPECT_NEAR(num(csv.rows[0][3]), -18.41, 5e-3);
  EXPECT_EQ(num(csv.rows[1][3]), 0.0);
}

TEST(Reproduce, VarianceBBelowReference) {
  const auto r = run({"reproduce", "fig6-varB", "--out-dir", "-"});
  const auto csv = parse_csv(r.out);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"sigma_deg", "var_no_opo", "var_with_opo"}));
  EXPECT_EQ(num(csv.rows.back()[0]), 30.0);
  for (const auto& row : csv.rows) EXPECT_LT(num(row[2]), num(row[1]));
}

TEST(Reproduce, FigureFourTopShape) {
  const auto r = run({"reproduce", "fig4-top", "--out-dir", "-"});
  const auto csv = validated_sweep(r.out);
  std::map<double, std::vector<std::pair<std::string, double>>> by_beta;
  for (const auto& row : csv.rows) by_beta[num(row[1])].emplace_back(row[4], num(row[5]));
  ASSERT_EQ(by_beta.size(), 3u);
  for (const auto& [beta, series] : by_beta) {
    double previous = std::numeric_limits<double>::infinity();
    bool vanished = false;
    for (const auto& [cls, th] : series) {
      if (vanished) {
        EXPECT_EQ(cls, "AlwaysBeneficial");
        continue;
      }
      EXPECT_LE(th, previous) << beta;
      previous = th;
      vanished = cls == "AlwaysBeneficial";
    }
    EXPECT_TRUE(vanished) << beta;
  }
}

TEST(ConfigFile, MirrorsPreset) {
  const auto path = std::filesystem::temp_directory_path() / "opophase_config_test.json";
  {
    std::ofstream f(path);
    f << R"({"beta": 5.7, "gain": 2.75, "eta_in": 0.008, "eta_esc": 0.937, "sigma": "0.5deg"})";
  }
  const auto from_file = run_json({"threshold", "--config", path.string()});
  const auto from_preset = run_json({"threshold", "--preset", "configA"});
  EXPECT_EQ(from_file["sigma_th_rad"], from_preset["sigma_th_rad"]);

  // Flags override the file.
  const auto overridden = run_json({"threshold", "--config", path.string(), "--d", "0.9"});
  EXPECT_EQ(overridden["classification"], "AlwaysBeneficial");

  {
    std::ofstream f(path);
    f << R"({"beta": 2, "gain": 2.0, "d": 0.3})";
  }
  EXPECT_EQ(run({"threshold", "--config", path.string()}).status, kExitUsage);
  {
    std::ofstream f(path);
    f << R"({"beta": 2, "colour": "blue"})";
  }
  EXPECT_EQ(run({"moments", "--config", path.string()}).status, kExitUsage);
  {
    std::ofstream f(path);
    f << R"({"preset": "configB", "angle_unit": "rad", "sigma": 0.1})";
  }
  const auto m = run_json({"moments", "--config", path.string()});
  EXPECT_NEAR(m["input"]["sigma_deg"].get<double>(), rad_to_deg(0.1), 1e-12);
  std::filesystem::remove(path);
}

TEST(ExitCodes, UsageAndModelErrors) {
  EXPECT_EQ(run({}).status, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).status, kExitUsage);
  EXPECT_EQ(run({"moments", "--bogus"}).status, kExitUsage);
  EXPECT_EQ(run({"moments"}).status, kExitUsage);
  EXPECT_EQ(run({"threshold", "--beta", "2", "--gain", "2", "--d", "0.3"}).status, kExitUsage);
  EXPECT_EQ(run({"threshold", "--preset", "configC"}).status, kExitUsage);
  EXPECT_EQ(run({"moments", "--beta", "abc"}).status, kExitUsage);
  EXPECT_EQ(run({"moments", "--config", "/nonexistent/x.json"}).status, kExitUsage);
  EXPECT_EQ(run({"reproduce", "fig9"}).status, kExitUsage);
  EXPECT_EQ(run({"moments", "--beta", "-1"}).status, kExitModel);
  EXPECT_EQ(run({"moments", "--beta", "1", "--d", "1.2"}).status, kExitModel);
  EXPECT_EQ(run({"threshold", "--beta", "2", "--gain", "0.5"}).status, kExitModel);
  EXPECT_EQ(run({"moments", "--beta", "2", "--phi", "10", "--sigma", "5", "--gain", "2"}).status,
            kExitModel);
  EXPECT_EQ(run({"moments", "--help"}).status, kExitOk);
}

}  // namespace
}  // namespace opophase::cli
