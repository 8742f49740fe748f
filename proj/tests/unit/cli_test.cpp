#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include <axiograd/approx.hpp>
#include <axiograd/axioms.hpp>
#include <axiograd/errors.hpp>
#include <axiograd/io.hpp>

#include "cli.hpp"
#include "oracles.hpp"

namespace axiograd::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::initializer_list<std::string> args, const char* env_seed = nullptr) {
  std::vector<std::string> storage{"axiograd"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err, env_seed);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("axiograd_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

const std::string kMono = axiograd::testing::model_path("mono_2_1.json");
const std::string kMax = axiograd::testing::model_path("max.json");

TEST(ParseVector, Forms) {
  EXPECT_EQ(parse_vector("1,-2.5,3"), (Vec{1.0, -2.5, 3.0}));
  EXPECT_EQ(parse_vector(" 0.5 , 1e-3 "), (Vec{0.5, 1e-3}));
  EXPECT_THROW(parse_vector("1,,2"), InvalidConfig);
  EXPECT_THROW(parse_vector("1,abc"), InvalidConfig);
  EXPECT_THROW(parse_vector(""), InvalidConfig);
}

TEST(Attribute, IgOnMonomial) {
  const Result r = run_cli({"attribute", "--model", kMono, "--method", "ig", "--input", "1,1", "--baseline", "0,0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Attribution a = attribution_from_json(Json::parse(r.out));
  EXPECT_NEAR(a.values[0], 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(a.values[1], 1.0 / 3.0, 1e-10);
}

TEST(Attribute, ShapleyOnMonomial) {
  const Result r = run_cli({"attribute", "--model", kMono, "--method", "shapley", "--input", "1,1", "--baseline", "0,0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(attribution_from_json(Json::parse(r.out)).values, (Vec{0.5, 0.5}));
}

TEST(Attribute, MaxOnDiagonalExitsTwo) {
  const Result r = run_cli({"attribute", "--method", "ig", "--model", kMax, "--input", "1,1", "--baseline", "0,0"});
  EXPECT_EQ(r.code, kExitUndefined);
  EXPECT_FALSE(r.err.empty());
}

TEST(Attribute, OtherMethods) {
  for (const char* method : {"monomial-closed-form", "path:straight", "path:power", "path:lshape-yx",
                             "ensemble:straight=0.5,power=0.5"}) {
    const Result r = run_cli({"attribute", "--model", kMono, "--method", method, "--input", "1,1", "--baseline", "0,0"});
    ASSERT_EQ(r.code, kExitOk) << method << ": " << r.err;
    const Attribution a = attribution_from_json(Json::parse(r.out));
    EXPECT_NEAR(a.values[0] + a.values[1], 1.0, 1e-10) << method;
  }
}

TEST(Attribute, CsvFormat) {
  const Result r = run_cli({"attribute", "--model", kMono, "--method", "shapley", "--input", "1,1", "--baseline", "0,0",
                            "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "method,A1,A2,residual,quad_error\nshapley,0.5,0.5,0,0\n");
}

TEST(Attribute, ConfigErrorsExitOne) {
  EXPECT_EQ(run_cli({"attribute", "--model", "missing.json", "--input", "1,1", "--baseline", "0,0"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"attribute", "--model", kMono, "--input", "1,1,1", "--baseline", "0,0,0"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"attribute", "--model", kMono, "--input", "1,x", "--baseline", "0,0"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"attribute", "--model", kMono, "--method", "lime", "--input", "1,1", "--baseline", "0,0"}).code,
            kExitConfig);
  EXPECT_EQ(run_cli({"attribute", "--bogus-flag"}).code, kExitConfig);
  EXPECT_EQ(run_cli({}).code, kExitConfig);
}

TEST(Attribute, HelpExitsZero) { EXPECT_EQ(run_cli({"--help"}).code, kExitOk); }

TEST(Axioms, IgAllPasses) {
  const Result r = run_cli({"axioms", "--method", "ig", "--all", "--seed", "42"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("reports").size(), all_axioms().size());
  for (const auto& rep : j.at("reports")) EXPECT_EQ(report_from_json(rep).verdict, Verdict::kPass);
}

TEST(Axioms, ShapleyMonomialFailsWithThree) {
  const Result r = run_cli({"axioms", "--method", "shapley", "--axiom", "monomial-distribution"});
  EXPECT_EQ(r.code, kExitAxiomFail);
  EXPECT_EQ(report_from_json(Json::parse(r.out).at("reports").at(0)).verdict, Verdict::kFail);
}

TEST(Axioms, ZeroCasesIsVacuous) {
  const Result r = run_cli({"axioms", "--method", "ig", "--axiom", "asi", "--cases", "0"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(report_from_json(Json::parse(r.out).at("reports").at(0)).verdict, Verdict::kInapplicable);
}

TEST(Axioms, UnknownAxiomIsConfigError) {
  EXPECT_EQ(run_cli({"axioms", "--method", "ig", "--axiom", "fairness"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"axioms", "--method", "ig"}).code, kExitConfig);
}

TEST(Axioms, EnvironmentSeedOverridesFlag) {
  const Result r = run_cli({"axioms", "--method", "ig", "--axiom", "dummy", "--cases", "5", "--seed", "3"}, "7");
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(Json::parse(r.out).at("seed").get<std::uint64_t>(), 7u);
}

TEST(Axioms, CsvRows) {
  const Result r = run_cli({"axioms", "--method", "ig", "--axiom", "dummy", "--axiom", "linearity", "--cases", "5",
                            "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.rfind("method,axiom,verdict,worst,cases,inapplicable,seed\nig,dummy,pass,", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

TEST(Converge, SoftplusOffDiagonal) {
  const Result r = run_cli({"converge", "--kind", "softplus", "--model", kMax, "--input", "2,1", "--baseline", "0,0",
                            "--grid", "1,10,100,1000", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const ConvergenceSeries s = series_from_json(Json::parse(r.out));
  EXPECT_LE(s.deltas.back(), 1e-2);
}

TEST(Converge, TaylorExpSum) {
  const Result r = run_cli({"converge", "--kind", "taylor", "--model", axiograd::testing::model_path("expsum.json"),
                            "--input", "0.5,0.5", "--baseline", "0,0", "--grid", "1,2,3,4,5,6,7,8,9,10",
                            "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const ConvergenceSeries s = series_from_json(Json::parse(r.out));
  EXPECT_LE(s.deltas.back(), 1e-6);
}

TEST(Converge, TaylorCubicAtDegree) {
  const Result r = run_cli({"converge", "--kind", "taylor", "--model", axiograd::testing::model_path("cubic.json"),
                            "--input", "0.7,-0.3", "--baseline", "0.1,0.2", "--grid", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string header;
  std::string row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "param,A1,A2,delta,residual");
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  ASSERT_EQ(cells.size(), 5u);
  EXPECT_LE(std::stod(cells[3]), 1e-10);
}

TEST(Converge, BadKindIsConfigError) {
  EXPECT_EQ(run_cli({"converge", "--kind", "fourier", "--model", kMax, "--input", "2,1", "--baseline", "0,0"}).code,
            kExitConfig);
}

TEST(Config, FileWinsWithWarning) {
  TempDir dir;
  const std::string cfg = dir.file("run.json");
  write(cfg, Json{{"model", kMono}, {"method", "shapley"}, {"input", {1.0, 1.0}}, {"baseline", "0,0"}}.dump());
  const Result r = run_cli({"attribute", "--config", cfg, "--method", "ig"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(attribution_from_json(Json::parse(r.out)).method, "shapley");
}

TEST(Config, UnknownKeyRejected) {
  TempDir dir;
  const std::string cfg = dir.file("run.json");
  write(cfg, Json{{"model", kMono}, {"colour", "blue"}}.dump());
  EXPECT_EQ(run_cli({"attribute", "--config", cfg, "--input", "1,1", "--baseline", "0,0"}).code, kExitConfig);
}

TEST(Output, SameConfigSameBytes) {
  TempDir dir;
  const std::string a = dir.file("a.json");
  const std::string b = dir.file("b.json");
  for (const std::string& path : {a, b}) {
    ASSERT_EQ(run_cli({"axioms", "--method", "shapley", "--axiom", "proportionality", "--cases", "20", "-o", path}).code,
              kExitAxiomFail);
  }
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
  const std::string c = dir.file("c.csv");
  const std::string d = dir.file("d.csv");
  for (const std::string& path : {c, d}) {
    ASSERT_EQ(run_cli({"converge", "--kind", "softplus", "--model", kMax, "--input", "2,1", "--baseline", "0,0",
                       "-o", path})
                  .code,
              kExitOk);
  }
  EXPECT_EQ(slurp(c), slurp(d));
}

TEST(Output, ReportsRoundTrip) {
  const Result r = run_cli({"axioms", "--method", "power-path", "--axiom", "asi", "--cases", "20"});
  ASSERT_EQ(r.code, kExitAxiomFail);
  const Json j = Json::parse(r.out);
  for (const auto& rep : j.at("reports")) EXPECT_EQ(report_to_json(report_from_json(rep)), rep);
  const Result s = run_cli({"converge", "--kind", "softplus", "--model", kMax, "--input", "1,1", "--baseline", "0,0",
                            "--format", "json"});
  ASSERT_EQ(s.code, kExitOk);
  const Json sj = Json::parse(s.out);
  EXPECT_EQ(series_to_json(series_from_json(sj)), sj);
}

}  // namespace
}  // namespace axiograd::cli
