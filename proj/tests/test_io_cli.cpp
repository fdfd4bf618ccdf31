#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "epg/filtration.hpp"
#include "epg/fixtures.hpp"
#include "epg/io.hpp"

namespace epg {
namespace {

template <typename Fn>
void expect_invalid(Fn&& fn) {
  try {
    fn();
    FAIL() << "expected an invalid-input error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput) << e.what();
  }
}

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() / (stem + "-" + std::to_string(::getpid()));
}

TEST(Roundtrip, ByteIdenticalOnFixtures) {
  for (const auto& name : fixture_names()) {
    EpgSystem s = *fixture_by_name(name);
    std::string first = serialize(s);
    EpgSystem back = deserialize(first);
    EXPECT_EQ(serialize(back), first) << name;
  }
}

TEST(Roundtrip, PerturbedSeed) {
  EpgSystem s = perturbed_shift(5);
  std::string first = serialize(s);
  EXPECT_EQ(serialize(deserialize(first)), first);
}

TEST(Roundtrip, PreservesDynamics) {
  EpgSystem s = deserialize(serialize(*fixture_by_name("ladder-shift-tau")));
  Filtration f = build_filtration(s.graph, s.map);
  EXPECT_NEAR(f.lambda(), 2.0, 1e-12);
  ASSERT_EQ(f.strata.size(), 1u);
  EXPECT_EQ(f.strata[0].edges, (std::vector<EdgeAddr>{EdgeAddr{"", 0, "a-1"}}));
}

TEST(Roundtrip, SaveAndLoad) {
  auto path = temp_file("epg-io-roundtrip");
  EpgSystem s = *fixture_by_name("fib-ray");
  save_system(path.string(), s);
  EpgSystem back = load_system(path.string());
  EXPECT_EQ(serialize(back), serialize(s));
  std::filesystem::remove(path);
}

TEST(Errors, RejectsBadInput) {
  expect_invalid([] { deserialize("this is not json"); });
  expect_invalid([] { deserialize("[1, 2, 3]"); });
  expect_invalid([] { load_system("/nonexistent/file.epg"); });

  Json good = to_json(*fixture_by_name("fib-ray"));

  Json no_map = good;
  no_map.erase("map");
  expect_invalid([&] { system_from_json(no_map); });

  Json no_core = good;
  no_core.erase("core");
  expect_invalid([&] { system_from_json(no_core); });

  Json bad_depth = good;
  bad_depth["map"]["depth"] = "two";
  expect_invalid([&] { system_from_json(bad_depth); });

  Json bad_image = good;
  bad_image["map"]["edges"]["core:p"] = 42;
  expect_invalid([&] { system_from_json(bad_image); });

  Json dangling = good;
  dangling["core"]["edges"][0]["head"] = "zzz";
  expect_invalid([&] { system_from_json(dangling); });
}

// ---- the installed command line tool, run as a subprocess ----

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cli(const std::string& args) {
  auto out_path = temp_file("epg-cli-out");
  std::string cmd = std::string(EPG_CLI_PATH) + " " + args + " > " + out_path.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  std::filesystem::remove(out_path);
  return r;
}

TEST(Cli, FixtureThenValidate) {
  auto path = temp_file("epg-cli-fixture");
  CmdResult made = run_cli("fixture fib-ray -o " + path.string());
  EXPECT_EQ(made.exit_code, 0) << made.output;
  CmdResult checked = run_cli("validate " + path.string());
  EXPECT_EQ(checked.exit_code, 0) << checked.output;
  EXPECT_NE(checked.output.find("ok:"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, FiltrationPrintsLambda) {
  CmdResult r = run_cli("filtration ladder-shift-tau");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("lambda 2.000000000"), std::string::npos) << r.output;
}

TEST(Cli, VerifyFailsBeforeTidyingAndPassesAfter) {
  CmdResult raw = run_cli("verify ladder-shift-tau");
  EXPECT_EQ(raw.exit_code, 1) << raw.output;
  EXPECT_NE(raw.output.find("verify FAIL"), std::string::npos);

  auto path = temp_file("epg-cli-tt");
  auto log_path = temp_file("epg-cli-ttlog");
  CmdResult tidied = run_cli("traintrack ladder-shift-tau -o " + path.string() + " --log " +
                             log_path.string());
  EXPECT_EQ(tidied.exit_code, 0) << tidied.output;
  EXPECT_NE(tidied.output.find("verify PASS"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(path.string() + ".corr"));
  EXPECT_GT(std::filesystem::file_size(log_path), 0u);
  CmdResult after = run_cli("verify " + path.string());
  EXPECT_EQ(after.exit_code, 0) << after.output;
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".corr");
  std::filesystem::remove(log_path);
}

TEST(Cli, GrowthOfTheRectangle) {
  CmdResult r = run_cli(
      "growth ladder-shift-tau "
      "--loop core:a-1,core:c-1,core:c0,~core:a1,~core:b0,~core:b-1 "
      "--sub stratum:0 --iters 12");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("exponent 0.693147181"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("escapes no"), std::string::npos) << r.output;
}

TEST(Cli, BadUsageExitsTwo) {
  EXPECT_EQ(run_cli("validate --bogus-flag ladder-shift").exit_code, 2);
  EXPECT_EQ(run_cli("validate /nonexistent/file.epg").exit_code, 2);
  EXPECT_EQ(run_cli("fixture no-such-fixture").exit_code, 2);
  EXPECT_EQ(run_cli("no-such-subcommand").exit_code, 2);
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(run_cli("--help").exit_code, 0);
}

}  // namespace
}  // namespace epg
