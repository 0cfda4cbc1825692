#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "opreg/bench.hpp"
#include "opreg/cli.hpp"
#include "opreg/io.hpp"

namespace {

namespace fs = std::filesystem;
using opreg::Matrix;
using opreg::Vector;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("opreg_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  args.insert(args.begin(), "opreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = opreg::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

const char* kThreePoints =
    "i,x_1,x_2,y_1,y_2\n"
    "1,0,0,0,0\n"
    "2,1,0,2,0\n"
    "3,0,1,0,0.5\n";

TEST(DatasetIo, ReadsOperatorSamples) {
  std::istringstream in(" i , x_1,x_2,y_1,y_2\r\n4,1,2,3,4\n\n7,5,6,7,8e-1\n");
  const auto s = opreg::io::read_operator_samples(in);
  EXPECT_EQ(s.ids, (std::vector<long long>{4, 7}));
  EXPECT_EQ(s.data.points, (Matrix(2, 2) << 1, 5, 2, 6).finished());
  EXPECT_EQ(s.data.evaluations, (Matrix(2, 2) << 3, 7, 4, 0.8).finished());
  EXPECT_EQ(s.data.distinguished_index, 0);
}

TEST(DatasetIo, RejectsMalformedFiles) {
  for (const char* text : {"", "j,x_1,y_1\n1,2,3\n2,3,4\n", "i,x_1,x_2,y_2,y_1\n1,0,0,0,0\n",
                           "i,x_1,y_1\n1,2\n2,3,4\n", "i,x_1,y_1\n1,2,abc\n2,3,4\n",
                           "i,x_1,y_1\n1,2,3\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(opreg::io::read_operator_samples(in), opreg::InvalidArgument) << text;
  }
}

TEST(DatasetIo, FitRoundTripsShortestDecimals) {
  Matrix values(2, 2);
  values << 0.1, 1.0 / 3.0, -2e-300, 12345.678;
  std::ostringstream out;
  opreg::io::write_operator_fit(out, {1, 2}, values);
  EXPECT_EQ(out.str(), "i,t_1,t_2\n1,0.1,-2e-300\n2,0.3333333333333333,12345.678\n");
}

TEST(DatasetIo, FunctionSamples) {
  std::istringstream in("i,x_1,f,z_1\n1,0,0,0\n2,1,0.5,1\n");
  EXPECT_TRUE(opreg::io::is_function_header("i,x_1,f,z_1"));
  EXPECT_FALSE(opreg::io::is_function_header("i,x_1,y_1"));
  const auto s = opreg::io::read_function_samples(in);
  EXPECT_EQ(s.data.values, (Vector(2) << 0, 0.5).finished());
  EXPECT_EQ(s.data.gradients, (Matrix(1, 2) << 0, 1).finished());
}

TEST(Cli, FitWritesValuesAndSidecar) {
  TempDir dir;
  write_file(dir / "data.csv", kThreePoints);
  std::string out;
  ASSERT_EQ(run({"fit", (dir / "data.csv").string(), "--zeta", "0.5", "--max-iter", "3000",
                 "--out", (dir / "fit.csv").string()},
                &out),
            0);
  std::ifstream fit(dir / "fit.csv");
  std::string header;
  std::getline(fit, header);
  EXPECT_EQ(header, "i,t_1,t_2");
  const auto sidecar = nlohmann::json::parse(slurp(dir / "fit.json"));
  for (const char* key : {"iterations", "residual", "max_violation", "objective"}) {
    EXPECT_TRUE(sidecar.contains(key)) << key;
  }
  EXPECT_LE(sidecar["max_violation"].get<double>(), 1e-6);
  EXPECT_TRUE(sidecar["converged"].get<bool>());
}

TEST(Cli, FitMatchesLibrary) {
  TempDir dir;
  write_file(dir / "data.csv", kThreePoints);
  ASSERT_EQ(run({"fit", (dir / "data.csv").string(), "--zeta", "0.5", "--rho", "0.7", "--out",
                 (dir / "fit.csv").string()}),
            0);
  std::istringstream in(kThreePoints);
  const auto samples = opreg::io::read_operator_samples(in);
  const auto result = opreg::opreg_fit(samples.data, 0.5, 0.7, {100, 1e-8});
  std::ostringstream expected;
  opreg::io::write_operator_fit(expected, samples.ids, result.fit.values);
  EXPECT_EQ(slurp(dir / "fit.csv"), expected.str());
}

TEST(Cli, ConfigFileWithFlagOverride) {
  TempDir dir;
  write_file(dir / "data.csv", kThreePoints);
  write_file(dir / "a.cfg", "# fit settings\nzeta = 0.5\nrho=0.7\nmax-iter=1\n");
  ASSERT_EQ(run({"fit", (dir / "data.csv").string(), "--config", (dir / "a.cfg").string(),
                 "--max-iter", "100", "--out", (dir / "cfg.csv").string()}),
            0);
  ASSERT_EQ(run({"fit", (dir / "data.csv").string(), "--zeta", "0.5", "--rho", "0.7", "--out",
                 (dir / "flags.csv").string()}),
            0);
  EXPECT_EQ(slurp(dir / "cfg.csv"), slurp(dir / "flags.csv"));
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  std::string err;
  EXPECT_EQ(run({"fit", (dir / "missing.csv").string(), "--out", (dir / "x.csv").string()},
                nullptr, &err),
            1);
  EXPECT_NE(err.find("missing.csv"), std::string::npos);
  EXPECT_EQ(run({"bench", "lasso", "--unknown-flag"}, nullptr, &err), 1);
  EXPECT_EQ(run({"bench"}, nullptr, &err), 1);
  write_file(dir / "bad.cfg", "nope=1\n");
  EXPECT_EQ(run({"bench", "lasso", "--config", (dir / "bad.cfg").string(), "--out",
                 (dir / "o").string()}),
            1);
  EXPECT_EQ(run({"bench", "lasso", "--n", "7", "--out", (dir / "o").string()}), 1);
  EXPECT_EQ(run({"bench", "lasso", "--horizon", "3"}), 1);  // no --out
  write_file(dir / "bad.csv", "i,x_1,y_1\n1,0,nan-ish\n");
  EXPECT_EQ(run({"fit", (dir / "bad.csv").string(), "--out", (dir / "x.csv").string()}), 1);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST(Cli, BenchLassoWritesTracesAndSummary) {
  TempDir dir;
  const auto out = (dir / "run").string();
  ASSERT_EQ(run({"bench", "lasso", "--n", "20", "--L", "1e4", "--horizon", "16", "--seed", "2",
                 "--interp", "--cvxreg", "--no-wall-time", "--out", out}),
            0);
  const auto summary = nlohmann::json::parse(slurp(dir / "run" / "summary.json"));
  for (const char* solver : {"forward_backward", "fista", "fista_backtracking", "anderson",
                             "opreg_boost", "opreg_boost_interp", "cvxreg_boost"}) {
    ASSERT_TRUE(summary.contains(solver)) << solver;
    EXPECT_TRUE(summary[solver].contains("asymptotic_error"));
    EXPECT_TRUE(summary[solver].contains("mean_step_time_s"));
    std::ifstream csv(dir / "run" / (std::string(solver) + ".csv"));
    const auto trace = opreg::bench::read_trace_csv(csv, solver);
    ASSERT_EQ(trace.rows.size(), 16u);
    EXPECT_EQ(summary[solver]["asymptotic_error"].get<double>(),
              opreg::bench::asymptotic_error(trace.errors()));
  }
  EXPECT_FALSE(fs::exists(dir / "run" / "errors.csv"));
  const auto first = slurp(dir / "run" / "opreg_boost.csv");
  ASSERT_EQ(run({"bench", "lasso", "--n", "20", "--L", "1e4", "--horizon", "16", "--seed", "2",
                 "--no-wall-time", "--out", out}),
            0);
  EXPECT_EQ(slurp(dir / "run" / "opreg_boost.csv"), first);
}

TEST(Cli, BenchPhaseRuns) {
  TempDir dir;
  const auto out = (dir / "phase").string();
  const int code = run({"bench", "phase", "--pieces", "2", "--horizon", "6", "--n", "10", "--m",
                        "20", "--seed", "3", "--out", out});
  EXPECT_TRUE(code == 0 || code == 2);
  const auto summary = nlohmann::json::parse(slurp(dir / "phase" / "summary.json"));
  EXPECT_TRUE(summary.contains("prox_linear"));
  EXPECT_TRUE(summary.contains("opreg_boost"));
  EXPECT_EQ(fs::exists(dir / "phase" / "errors.csv"), code == 2);
}

}  // namespace
