#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "gphase/cli.hpp"

using namespace gphase;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "gphase");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gphase_test_" + name);
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

const std::vector<std::string> kSmallSweep = {"--realizations", "8",        "--theta_values",
                                              "0.5pi,pi",       "--db_values", "0.02,0.1"};

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  const CliRun bad_flag = run({"--no_such_key", "1", "bound"});
  EXPECT_EQ(bad_flag.code, kExitUsage);
  EXPECT_NE(bad_flag.err.find("valid keys:"), std::string::npos);
  EXPECT_EQ(run({"--realizations", "abc", "sweep", "aa"}).code, kExitUsage);
  EXPECT_EQ(run({"--state", "2", "phase-decompose"}).code, kExitUsage);
  EXPECT_EQ(run({"--workers", "0", "bound"}).code, kExitUsage);
  EXPECT_EQ(run({"--config", "/nonexistent.cfg", "bound"}).code, kExitUsage);
  EXPECT_EQ(run({"sweep", "nope"}).code, kExitUsage);
  EXPECT_EQ(run({"--fixed_steps", "10", "sweep", "aa"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);

  const auto cfg = temp_file("unknown.cfg");
  std::ofstream(cfg) << "realizations = 4\nbogus_key = 1\n";
  const CliRun unknown = run({"--config", cfg.string(), "bound"});
  EXPECT_EQ(unknown.code, kExitUsage);
  EXPECT_NE(unknown.err.find("bogus_key"), std::string::npos);
  std::filesystem::remove(cfg);
}

TEST(Cli, CompileReportsTheMerge) {
  const CliRun r = run({"--theta", "0.25pi", "compile"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("gate count: 20 -> 18"), std::string::npos);
  EXPECT_NE(r.out.find("merged gates"), std::string::npos);
  EXPECT_NE(r.out.find("verification: ok"), std::string::npos);
}

TEST(Cli, BoundAtMatchedFields) {
  const CliRun r = run({"--b_x", "1", "--b_z", "1", "--b_n", "1", "bound"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("θ_b = 2.000π"), std::string::npos) << r.out;
  const CliRun dev = run({"bound"});
  EXPECT_EQ(dev.code, kExitOk);
  EXPECT_NE(dev.out.find("charge qubit E_c = 1.35 K"), std::string::npos);
  EXPECT_NE(dev.out.find("2.5π"), std::string::npos);
}

TEST(Cli, PathClosesOnlyForCyclicStates) {
  const CliRun closed = run({"--theta", "0.7", "--steps", "50", "path"});
  EXPECT_EQ(closed.code, kExitOk);
  EXPECT_NE(closed.err.find("path closed"), std::string::npos);
  const auto rows = lines(closed.out);
  std::size_t first = 0;
  while (first < rows.size() && rows[first].rfind("#@", 0) == 0) ++first;
  ASSERT_LT(first, rows.size());
  EXPECT_EQ(rows[first], "t,bx,by,bz");
  EXPECT_EQ(rows.size() - first - 1, 3u * 50 + 1);

  const CliRun open = run({"--theta", "0.7", "--state", "+", "--steps", "50", "path"});
  EXPECT_EQ(open.code, kExitOk);
  EXPECT_NE(open.err.find("path open"), std::string::npos);
}

TEST(Cli, PhaseDecompose) {
  const CliRun r = run({"--theta", "0.4pi", "--steps", "2000", "phase-decompose"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find("cyclic = yes"), std::string::npos);
  EXPECT_NE(r.out.find("geometric phase = -1.2566370614"), std::string::npos) << r.out;
  const CliRun sup = run({"--theta", "0.4pi", "--state", "+i", "phase-decompose"});
  EXPECT_EQ(sup.code, kExitOk);
  EXPECT_NE(sup.out.find("cyclic = no"), std::string::npos);
}

TEST(Cli, SweepCsvSchemaAndDeterminism) {
  std::vector<std::string> a = kSmallSweep, b = kSmallSweep;
  a.insert(a.end(), {"sweep", "dynamic"});
  b.insert(b.begin(), {"--workers", "3"});
  b.insert(b.end(), {"sweep", "dynamic"});
  const CliRun r1 = run(a), r2 = run(b);
  ASSERT_EQ(r1.code, kExitOk) << r1.err;
  ASSERT_EQ(r2.code, kExitOk) << r2.err;
  EXPECT_EQ(r1.out, r2.out);

  const auto rows = lines(r1.out);
  std::size_t i = 0;
  for (; i < rows.size() && rows[i].rfind("#@ ", 0) == 0; ++i) {
    EXPECT_NE(rows[i].find(" = "), std::string::npos);
  }
  EXPECT_EQ(rows.front(), "#@ command = sweep");
  EXPECT_EQ(r1.out.find("workers"), std::string::npos);
  ASSERT_LT(i, rows.size());
  EXPECT_EQ(rows[i], "gate_kind,theta,db_max,n_real,mean_D,stderr,prediction,rel_err,seed");
  EXPECT_EQ(rows.size() - i - 1, 4u);
  for (std::size_t k = i + 1; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].rfind("dynamic,", 0), 0u);
    EXPECT_EQ(std::count(rows[k].begin(), rows[k].end(), ','), 8);
  }
}

TEST(Cli, ReplayFromCsvHeader) {
  std::vector<std::string> a = kSmallSweep;
  a.insert(a.begin(), {"--seed", "42"});
  a.insert(a.end(), {"sweep", "aa"});
  const CliRun first = run(a);
  ASSERT_EQ(first.code, kExitOk) << first.err;
  const auto csv = temp_file("replay.csv");
  std::ofstream(csv) << first.out;
  const CliRun again = run({"--config", csv.string(), "sweep"});
  EXPECT_EQ(again.code, kExitOk) << again.err;
  EXPECT_EQ(again.out, first.out);
  // Flags override the file.
  const CliRun other = run({"--config", csv.string(), "--seed", "43", "sweep"});
  EXPECT_NE(other.out, first.out);
  std::filesystem::remove(csv);
}

TEST(Cli, BerrySweepHasLoopColumns) {
  const CliRun r = run({"--realizations", "3", "--n_tilt", "50", "--n_sweep", "50", "--db_values",
                     "0.01", "sweep", "berry"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("gate_kind,theta,db_max,n_real,mean_D,stderr,prediction,rel_err,seed,t_tilt,"
                       "t_sweep,n_tilt,n_sweep,theta_cone"),
            std::string::npos);
  const CliRun phase = run({"--realizations", "0", "berry"});
  EXPECT_EQ(phase.code, kExitOk);
  EXPECT_NE(phase.out.find("measured relative phase"), std::string::npos);
}

TEST(Cli, OutFileOption) {
  const auto path = temp_file("bound.txt");
  const CliRun r = run({"--out", path.string(), "--b_x", "1", "--b_z", "1", "--b_n", "1", "bound"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("2.000π"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, InstalledBinaryExitCodes) {
  const char* exe = std::getenv("GPHASE_CLI");
  if (!exe) GTEST_SKIP() << "GPHASE_CLI not set";
  auto status = [&](const std::string& args) {
    const std::string cmd = std::string("\"") + exe + "\" " + args + " > /dev/null 2>&1";
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("--b_x 1 --b_z 1 --b_n 1 bound"), kExitOk);
  EXPECT_EQ(status("--bogus 1 bound"), kExitUsage);
  EXPECT_EQ(status("compile"), kExitOk);
}
