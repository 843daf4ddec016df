#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace treedim::cli;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "treedim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  RunConfig config;
  Result r;
  std::ostringstream out, err;
  int code = 0;
  if (!parse_args(static_cast<int>(argv.size()), argv.data(), config, code, out, err)) {
    r.code = code;
  } else {
    r.code = run(config, out, err);
  }
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path temp_dir(const std::string& tag) {
  auto d = fs::temp_directory_path() / ("treedim-cli-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string last_csv_field(const std::string& line) { return line.substr(line.rfind(',') + 1); }

}  // namespace

TEST(Cli, DimOdometerCsv) {
  auto r = invoke({"dim", "--spec", "odometer", "--levels", "10"});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream in(r.out);
  std::string line, last;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema_version=1");
  std::getline(in, line);
  EXPECT_EQ(line, "level,logm_index_num,logm_index_den_note,logm_wreath,ratio");
  while (std::getline(in, line)) last = line;
  EXPECT_EQ(last.substr(0, 3), "10,");
  EXPECT_NEAR(std::stod(last_csv_field(last)), 0.00978, 1e-5);
}

TEST(Cli, DimDenominatorNotes) {
  auto r = invoke({"dim", "--spec", "w3-sym3", "--levels", "2"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("ln(3)"), std::string::npos) << r.out;
  auto c = invoke({"dim", "--spec", "w3-c3", "--levels", "2"});
  EXPECT_NE(c.out.find("2,4,1,"), std::string::npos) << c.out;
}

TEST(Cli, VerifyGKPasses) {
  auto r = invoke({"verify-gk", "--H", "(1 2)", "--K", "w2", "--levels", "8"});
  EXPECT_EQ(r.code, kOk) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, VerifyGKNotTransitiveIsError) {
  auto r = invoke({"verify-gk", "--H", "(1 2)", "--K", "odometer3", "--levels", "3"});
  EXPECT_EQ(r.code, kError);
  EXPECT_NE(r.err.find("not transitive"), std::string::npos) << r.err;
}

TEST(Cli, VerifyGKFailureExitsOne) {
  auto r = invoke({"verify-gk", "--spec", "gk-trivial", "--levels", "3"});
  EXPECT_EQ(r.code, kFailed) << r.err;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, CheckPassesOnFixtures) {
  auto r = invoke({"check", "--levels", "4"});
  EXPECT_EQ(r.code, kOk) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(Cli, LevelsOverCapRejected) {
  auto r = invoke({"dim", "--spec", "w3-c3", "--levels", "10"});
  EXPECT_EQ(r.code, kError);
  EXPECT_NE(r.err.find("largest allowed level is 8"), std::string::npos) << r.err;
  auto s = invoke({"quotient", "--spec", "w2", "--levels", "6", "--cap-points", "32"});
  EXPECT_EQ(s.code, kError);
  EXPECT_NE(s.err.find("is 5"), std::string::npos) << s.err;
}

TEST(Cli, ParseErrors) {
  EXPECT_EQ(invoke({}).code, kError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kError);
  EXPECT_EQ(invoke({"dim", "--levels", "x"}).code, kError);
  EXPECT_EQ(invoke({"dim", "--spec", "odometer", "--format", "xml"}).code, kError);
  EXPECT_EQ(invoke({"dim", "--spec", "no-such-spec"}).code, kError);
  EXPECT_EQ(invoke({"dim"}).code, kError);
  auto multi = invoke({"dim", "--spec", "odometer", "--spec", "w2", "--format", "csv"});
  EXPECT_EQ(multi.code, kError);
  EXPECT_EQ(invoke({"dim", "--help"}).code, kOk);
}

TEST(Cli, JsonIsDeterministicAndStructured) {
  std::vector<std::string> args{"dim", "--spec", "grigorchuk", "--spec", "gk-w2",
                                "--levels", "6", "--format", "json"};
  auto a = invoke(args);
  auto b = invoke(args);
  ASSERT_EQ(a.code, kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto j = nlohmann::ordered_json::parse(a.out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"schema_version", "command", "config", "reports",
                                            "passed", "truncated"}));
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  ASSERT_EQ(j["reports"].size(), 2u);
  EXPECT_EQ(j["reports"][0]["levels"][2]["order"], "128");
  EXPECT_EQ(j["reports"][1]["levels"][5]["ratio_exact"], "32/63");
}

TEST(Cli, CacheWarmAndColdAgree) {
  auto dir = temp_dir("cache");
  std::vector<std::string> args{"abel", "--spec", "grigorchuk", "--levels", "7",
                                "--window", "2", "--format", "json", "--cache-dir", dir.string()};
  auto cold = invoke(args);
  ASSERT_EQ(cold.code, kOk) << cold.err;
  EXPECT_TRUE(fs::exists(dir / ".lock"));
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.path().extension() == ".json";
  EXPECT_GE(files, 7u);
  auto warm = invoke(args);
  EXPECT_EQ(cold.out, warm.out);
  fs::remove_all(dir);
}

TEST(Cli, OutFileWrittenAtomically) {
  auto dir = temp_dir("out");
  auto path = dir / "report.csv";
  auto r = invoke({"orbits", "--spec", "w2", "--levels", "4", "--format", "csv", "--out",
                   path.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::string first;
  std::getline(f, first);
  EXPECT_EQ(first, "# schema_version=1");
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().filename(), "report.csv");
  fs::remove_all(dir);
}

TEST(Cli, EnvironmentOverrides) {
  ::setenv("TREEDIM_LEVELS", "3", 1);
  ::setenv("TREEDIM_FORMAT", "json", 1);
  auto r = invoke({"quotient", "--spec", "grigorchuk"});
  ::unsetenv("TREEDIM_LEVELS");
  ::unsetenv("TREEDIM_FORMAT");
  ASSERT_EQ(r.code, kOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["config"]["levels"], 3);
  EXPECT_EQ(j["reports"][0]["levels"].size(), 3u);
}

TEST(Cli, WindowBeyondLevelsIsError) {
  auto r = invoke({"rist", "--spec", "w2", "--levels", "3", "--window", "4"});
  EXPECT_EQ(r.code, kError);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, AbelReportsBoundFailureWithExitOne) {
  auto r = invoke({"abel", "--spec", "w2", "--levels", "6", "--window", "3"});
  EXPECT_EQ(r.code, kFailed);
  EXPECT_NE(r.out.find("false"), std::string::npos);
  auto ok = invoke({"abel", "--spec", "w2", "--levels", "8", "--window", "2"});
  EXPECT_EQ(ok.code, kOk) << ok.out;
}

TEST(Cli, RistSingleVertex) {
  auto r = invoke({"rist", "--spec", "w2", "--levels", "3", "--vertex", "1", "--format", "json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["reports"][0]["vertices"][0]["order"], "8");
}

TEST(Cli, SpecFileArgument) {
  auto r = invoke({"quotient", "--spec", std::string(TREEDIM_TEST_DATA) + "/gk-lamplighter.json",
                   "--levels", "4"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("gk-lamplighter"), std::string::npos);
}
