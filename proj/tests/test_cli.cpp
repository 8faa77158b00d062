#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lrghz/cli.hpp"

using namespace lrghz;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args, const CliEnvironment& env = {}) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err, env);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Scratch directory removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("lrghz_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

bool documented_code(int code) {
  return code == kExitOk || code == kExitUsage || (code >= kExitErrorBase && code <= exit_code(ErrorCode::kIo));
}

// Runs the installed binary through the shell and returns its exit status.
int run_binary(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + " '" LRGHZ_CLI_PATH "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodeTable) {
  EXPECT_EQ(exit_code(ErrorCode::kInvalidArgument), 10);
  EXPECT_EQ(exit_code(ErrorCode::kUnsupportedRegime), 13);
  EXPECT_EQ(exit_code(ErrorCode::kUnreachableSize), 16);
  EXPECT_EQ(exit_code(ErrorCode::kMemoryCap), 17);
  EXPECT_EQ(exit_code(ErrorCode::kIo), 22);
}

TEST(Cli, SimulateExample) {
  const auto r = run({"simulate", "--alpha", "2.5", "--d", "1", "--r", "8", "--r0", "2", "--force-m", "2,2", "--coeff",
                      "0.6,0.8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_GE(j["final_fidelity"].get<double>(), 1 - 1e-9);
  EXPECT_EQ(j["forced_m"], true);
  EXPECT_TRUE(r.err.empty());
}

TEST(Cli, PlanExample) {
  const auto r = run({"plan", "--alpha", "2.5", "--d", "1", "--r", "20", "--r0", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["tree"]["m"], 10.0);
  EXPECT_NEAR(j["tree"]["t2"].get<double>(), std::numbers::pi * std::pow(20.0, 2.5) / 4, 1e-9);
  EXPECT_EQ(j["certified"], true);
}

TEST(Cli, UnsupportedRegime) {
  const auto r = run({"simulate", "--alpha", "0.5", "--d", "1", "--r", "4"});
  EXPECT_EQ(r.code, 13);
  const Json e = Json::parse(r.err);
  EXPECT_EQ(e["error"], "unsupported_regime");
  EXPECT_EQ(e["exit_code"], 13);
  EXPECT_FALSE(e["message"].get<std::string>().empty());
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UnreachableSizeNamesNeighbours) {
  const auto r = run({"plan", "--alpha", "2.5", "--r", "21", "--r0", "2"});
  EXPECT_EQ(r.code, 16);
  const std::string msg = Json::parse(r.err)["message"];
  EXPECT_NE(msg.find("20"), std::string::npos) << msg;
  EXPECT_NE(msg.find("200"), std::string::npos) << msg;
}

TEST(Cli, MemoryCap) {
  EXPECT_EQ(run({"simulate", "--alpha", "2.5", "--r", "32", "--r0", "2", "--force-m", "2,2,2,2"}).code, 17);
  EXPECT_EQ(run({"simulate", "--alpha", "2.5", "--r", "8", "--r0", "2", "--force-m", "2,2", "--mem-cap", "255"}).code, 17);
  CliEnvironment env;
  env.mem_cap = 128;
  // The environment cap is a ceiling that flags cannot raise.
  EXPECT_EQ(run({"simulate", "--alpha", "2.5", "--r", "8", "--r0", "2", "--force-m", "2,2", "--mem-cap", "100000"}, env).code,
            17);
  EXPECT_EQ(run({"simulate", "--alpha", "2.5", "--r", "2", "--r0", "2", "--q", "100"}, env).code, 17);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"plan", "--r", "4"}).code, kExitUsage);
  EXPECT_EQ(run({"plan", "--alpha", "x", "--r", "4"}).code, kExitUsage);
  EXPECT_EQ(run({"plan", "--alpha", "2.5", "--r", "4", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(Json::parse(run({"plan"}).err)["error"], "usage");
}

TEST(Cli, LibraryErrors) {
  EXPECT_EQ(run({"simulate", "--alpha", "2.5", "--r", "4", "--r0", "2", "--force-m", "2", "--coeff", "1,1"}).code,
            exit_code(ErrorCode::kNotNormalized));
  EXPECT_EQ(run({"simulate", "--alpha", "2.5", "--r", "4", "--r0", "2", "--force-m", "2", "--coeff", "1"}).code,
            exit_code(ErrorCode::kShapeMismatch));
  EXPECT_EQ(run({"simulate", "--alpha", "2.5", "--r", "4", "--r0", "2", "--force-m", "2", "--site", "9"}).code,
            exit_code(ErrorCode::kOutOfBounds));
  EXPECT_EQ(run({"plan", "--alpha", "2.5", "--r", "20", "--r0", "2", "--format", "xml"}).code,
            exit_code(ErrorCode::kInvalidArgument));
  EXPECT_EQ(run({"plan", "--alpha", "2.5", "--r", "4", "--config", "/nonexistent/x.cfg"}).code, exit_code(ErrorCode::kIo));
  EXPECT_EQ(run({"transfer", "--alpha", "2.5", "--r", "4", "--r0", "2", "--force-m", "2"}).code, kExitUsage);
}

TEST(Cli, TransferTime) {
  const auto r = run({"transfer", "--alpha", "2.5", "--r", "8", "--r0", "2", "--force-m", "2,2", "--to", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json trace = Json::parse(r.out);
  const auto p = run({"plan", "--alpha", "2.5", "--r", "8", "--r0", "2", "--force-m", "2,2"});
  const Json plan = Json::parse(p.out);
  EXPECT_EQ(trace["total_time"].get<double>(), 2 * plan["tree"]["t_total"].get<double>());
  EXPECT_GE(trace["final_fidelity"].get<double>(), 1 - 1e-9);
}

TEST(Cli, SweepAndBounds) {
  const auto s = run({"sweep", "--alpha", "2.5", "--alphas", "2.2,2.5", "--r-values", "4,8,16", "--format", "csv"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 7);
  const auto g = run({"sweep", "--alpha", "2.5", "--r-min", "4", "--r-max", "1e6", "--points", "10"});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_EQ(Json::parse(g.out).size(), 10u);
  const auto sp = run({"sweep", "--alpha", "1.5", "--speedup", "--r", "1e6"});
  ASSERT_EQ(sp.code, 0) << sp.err;
  EXPECT_EQ(Json::parse(sp.out)[0]["classification"], "superpolynomial");
  const auto b = run({"bounds", "--alpha", "2.5", "--n", "10000", "--format", "csv"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(b.out, "n,t_star,lower,upper,gap\r\n10000,100,10000,10000000000,1000000\r\n");
}

TEST(Cli, ConfigMergedUnderFlags) {
  TempDir dir("config");
  const fs::path cfg = dir.path / "run.cfg";
  std::ofstream(cfg) << "# plan settings\nalpha=2.5\nd=1\nr0=2\nformat=csv\n";
  const auto from_file = run({"plan", "--config", cfg.string(), "--r", "20"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out.rfind("level,", 0), 0u);
  const auto overridden = run({"plan", "--config", cfg.string(), "--r", "20", "--format", "json"});
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(Json::parse(overridden.out)["tree"]["m"], 10.0);
  const auto direct = run({"plan", "--alpha", "2.5", "--d", "1", "--r0", "2", "--r", "20"});
  EXPECT_EQ(overridden.out, direct.out);

  std::ofstream(dir.path / "bad.cfg") << "alpha 2.5\n";
  EXPECT_EQ(run({"plan", "--config", (dir.path / "bad.cfg").string(), "--alpha", "2.5", "--r", "20"}).code,
            exit_code(ErrorCode::kInvalidArgument));
}

TEST(Cli, DeterministicOutput) {
  const std::vector<std::vector<std::string>> cases{
      {"simulate", "--alpha", "2.5", "--r", "8", "--r0", "2", "--force-m", "2,2", "--coeff", "random:42"},
      {"simulate", "--alpha", "2.5", "--r", "8", "--r0", "2", "--force-m", "2,2", "--q", "3", "--coeff", "random:7",
       "--format", "csv"},
      {"sweep", "--alpha", "1.5", "--alphas", "1.5,2,2.5", "--r-min", "3000", "--r-max", "1e9", "--points", "30"},
      {"plan", "--alpha", "2.0", "--r", "1e40", "--mode", "continuous"},
  };
  for (const auto& c : cases) {
    const auto a = run(c);
    const auto b = run(c);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
  EXPECT_NE(run(cases[0]).out, run({"simulate", "--alpha", "2.5", "--r", "8", "--r0", "2", "--force-m", "2,2", "--coeff",
                                    "random:43"})
                                   .out);
}

TEST(Cli, RandomCoefficients) {
  const auto a = parse_coefficients("random:5", 3);
  ASSERT_EQ(a.size(), 3u);
  double norm = 0;
  for (auto v : a) norm += std::norm(v);
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_EQ(a, parse_coefficients("random:5", 3));
  EXPECT_NE(a, parse_coefficients("random:6", 3));
}

TEST(Cli, OutputDirectoryAndFiles) {
  TempDir dir("out");
  CliEnvironment env;
  env.out_dir = dir.path.string();
  const auto r = run({"plan", "--alpha", "2.5", "--r", "20", "--r0", "2"}, env);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(dir.path / "plan.json"), run({"plan", "--alpha", "2.5", "--r", "20", "--r0", "2"}).out);

  const auto s = run({"simulate", "--alpha", "2.5", "--r", "4", "--r0", "2", "--force-m", "2", "--coeff", "0.6,0.8",
                      "--format", "csv", "--out", "trace.csv", "--dump-state", "state.csv"},
                     env);
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(slurp(dir.path / "trace.csv").rfind("step,level", 0), 0u);
  std::istringstream rows(slurp(dir.path / "state.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(rows, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "basis,real,imag\r");
  EXPECT_EQ(lines[1].substr(0, 5), "0000,");
  EXPECT_NEAR(std::stod(lines[1].substr(5)), 0.6, 1e-14);
  EXPECT_EQ(lines[2].substr(0, 5), "1111,");
  EXPECT_NEAR(std::stod(lines[2].substr(5)), 0.8, 1e-14);

  EXPECT_EQ(run({"plan", "--alpha", "2.5", "--r", "20", "--r0", "2", "--out", "/nonexistent/dir/p.json"}).code,
            exit_code(ErrorCode::kIo));
}

TEST(Cli, BinaryHonoursEnvironment) {
  TempDir dir("bin");
  EXPECT_EQ(run_binary("bounds --alpha 2.5 --n 10000", "LRGHZ_OUT_DIR='" + dir.path.string() + "'"), 0);
  const std::string text = slurp(dir.path / "bounds.json");
  EXPECT_EQ(Json::parse(text)[0]["upper"], 1e10);
  EXPECT_EQ(run_binary("plan --alpha 0.5 --r 4"), 13);
  EXPECT_EQ(run_binary("nonsense"), kExitUsage);
  EXPECT_EQ(run_binary("plan --alpha 2.5 --r 4 --help"), 0);
}

TEST(Cli, FuzzNeverCrashes) {
  TempDir dir("fuzz");
  std::ofstream(dir.path / "ok.cfg") << "alpha=2.5\nr0=2\n";
  std::ofstream(dir.path / "bad.cfg") << "not a pair\n";
  CliEnvironment env;
  env.out_dir = dir.path.string();
  env.mem_cap = 1 << 12;

  const std::vector<std::string> subcommands{"plan", "simulate", "transfer", "sweep", "bounds", "", "help", "--help"};
  const std::vector<std::string> flags{"--alpha", "--d", "--q", "--r", "--r0", "--force-m", "--mode", "--k-alpha",
                                       "--constant-m", "--kappa-base", "--format", "--out", "--coeff", "--site",
                                       "--to", "--alphas", "--r-values", "--r-min", "--r-max", "--points", "--speedup",
                                       "--n", "--dump-state", "--dump-threshold", "--mem-cap", "--qubit-dft",
                                       "--config", "--bogus", "-x", "--"};
  const std::vector<std::string> values{"0", "1", "2", "3", "4", "8", "16", "20", "-1", "2.5", "1.5", "2.0", "3.0",
                                        "0.5", "1e9", "1e300", "nan", "inf", "-inf", "", "abc", "2,2", "2,2,2", "0,0",
                                        "0.6,0.8", "1,0,0", "random:1", "random:x", "continuous", "integer", "csv",
                                        "json", "xml", "out.txt", "/nonexistent/z", "ok.cfg", "bad.cfg", "3,1",
                                        "1,2,3", "1e6", "9223372036854775807", "99999999999999999999", "2,",
                                        ",", "4,8,16"};
  std::mt19937_64 rng(20240601);
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  int successes = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::string> args;
    const std::string sub = pick(subcommands);
    if (!sub.empty()) args.push_back(sub);
    const int n = static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) {
      std::string f = pick(flags);
      std::string v = pick(values);
      if (v == "ok.cfg" || v == "bad.cfg") v = (dir.path / v).string();
      switch (rng() % 4) {
        case 0:
          args.push_back(f);
          break;
        case 1:
          args.push_back(f + "=" + v);
          break;
        default:
          args.push_back(f);
          args.push_back(v);
      }
    }
    const auto r = run(args, env);
    ASSERT_TRUE(documented_code(r.code)) << "exit " << r.code << " for case " << i << ": " << r.err;
    if (r.code != 0) {
      const Json e = Json::parse(r.err);
      ASSERT_EQ(e["exit_code"], r.code);
    } else {
      ++successes;
    }
  }
  EXPECT_GT(successes, 0);
}
