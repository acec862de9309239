#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result sh(const std::string& args) {
  const std::string cmd = std::string("\"") + SVAS_TOOL_PATH + "\" " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("svas_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }
  static std::string corpus(const std::string& name) { return std::string(SVAS_TEST_DIR) + "/corpus/" + name; }
  static std::string logic(const std::string& name) { return std::string(SVAS_TEST_DIR) + "/logic/" + name; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(sh("").code, 2);
  EXPECT_EQ(sh("frobnicate").code, 2);
  EXPECT_EQ(sh("run " + tmp("missing.svas")).code, 2);
  EXPECT_EQ(sh("dec-harness 0").code, 2);
}

TEST_F(Cli, CompileRunSearchReplay) {
  const std::string prefix = tmp("countdown");
  ASSERT_EQ(sh("compile " + corpus("countdown.cp") + " -n 2 -o " + prefix).code, 0);
  for (const char* ext : {".svas", ".ann", ".map"}) EXPECT_TRUE(fs::exists(prefix + ext)) << ext;

  auto run1 = sh("run " + prefix + ".svas");
  EXPECT_EQ(run1.code, 0);
  EXPECT_NE(run1.out.find("# outcome=Accepted"), std::string::npos);
  EXPECT_EQ(sh("run " + prefix + ".svas").out, run1.out);

  const std::string small = tmp("inc_dec");
  ASSERT_EQ(sh("compile " + corpus("inc_dec.cp") + " -n 1 -o " + small).code, 0);
  auto s = sh("search " + small + ".svas -w " + tmp("w.txt"));
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("verdict=Reachable"), std::string::npos);
  auto r = sh("replay " + small + ".svas " + tmp("w.txt"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# outcome=Accepted"), std::string::npos);
}

TEST_F(Cli, SearchUnreachableExitsOne) {
  const std::string prefix = tmp("dz");
  ASSERT_EQ(sh("compile " + corpus("dec_of_zero.cp") + " -n 1 -o " + prefix).code, 0);
  auto s = sh("search " + prefix + ".svas");
  EXPECT_EQ(s.code, 1);
  EXPECT_NE(s.out.find("verdict=Unreachable"), std::string::npos);
}

TEST_F(Cli, Harnesses) {
  auto d = sh("dec-harness 1 --exhaustive");
  EXPECT_EQ(d.code, 0);
  EXPECT_NE(d.out.find("pair-sum violations: 0"), std::string::npos);
  EXPECT_EQ(sh("dec-harness 1 --exhaustive").out, d.out);
  EXPECT_EQ(sh("dec-harness 2 --honest").code, 0);
  EXPECT_EQ(sh("zt-harness 1 --preload 0").code, 0);
  EXPECT_EQ(sh("zt-harness 1 --preload 1").code, 1);
}

TEST_F(Cli, OracleAndSizes) {
  auto o = sh("oracle " + corpus("countdown.cp") + " -n 2");
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(sh("oracle " + corpus("countdown.cp") + " --bound 2").code, 1);
  auto sz = sh("sizes " + corpus("transfer.cp") + " --from 1 --to 3");
  EXPECT_EQ(sz.code, 0);
  EXPECT_EQ(sh("sizes " + corpus("transfer.cp") + " --from 1 --to 3").out, sz.out);
}

TEST_F(Cli, LogicPipeline) {
  const std::string prog = logic("pump.svas");
  ASSERT_EQ(sh("search " + prog + " -w " + tmp("w")).code, 0);
  ASSERT_EQ(sh("encode " + prog + " " + tmp("w") + " -o " + tmp("f")).code, 0);
  auto ev = sh("formula " + prog + " --forest " + tmp("f"));
  EXPECT_EQ(ev.code, 0);
  auto chk = sh("check " + prog + " --forest " + tmp("f"));
  EXPECT_EQ(chk.code, 0);
  EXPECT_NE(chk.out.find("agreement=yes"), std::string::npos) << chk.out;
  auto printed = sh("formula " + prog);
  EXPECT_EQ(printed.code, 0);
  EXPECT_EQ(sh("formula " + prog).out, printed.out);

  for (int seed = 0; seed < 5; ++seed) {
    auto m = sh("mutate " + tmp("f") + " --seed " + std::to_string(seed) + " -o " + tmp("m"));
    ASSERT_EQ(m.code, 0);
    auto again = sh("mutate " + tmp("f") + " --seed " + std::to_string(seed));
    EXPECT_EQ(again.out, oracle::slurp(tmp("m")));
    auto c = sh("check " + prog + " --forest " + tmp("m"));
    EXPECT_NE(c.code, 2) << c.out;
  }
}
