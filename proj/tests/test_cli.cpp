#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "revhardy/cli.hpp"

using namespace revhardy;

namespace {

std::vector<std::string> canonical_hardy() {
  return {"check-hardy", "--p", "-1", "--q", "-1", "--alpha", "0", "--beta", "-1", "--family-count", "10"};
}

Json strip_timing(Json env) {
  env.erase("timing");
  return env;
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, ParsesFlagsInBothSpellings) {
  const auto c = parse_args({"check-stein-weiss", "--p=-1", "--q", "-1", "--alpha", "-0.3", "--beta=-0.4",
                             "--mc_samples", "1000", "--truncation-radius", "5", "--family-count=3"});
  EXPECT_EQ(c.command, "check-stein-weiss");
  EXPECT_EQ(*c.p, -1.0);
  EXPECT_EQ(*c.alpha, -0.3);
  EXPECT_EQ(*c.beta, "-0.4");
  EXPECT_EQ(c.mc_samples, 1000u);
  EXPECT_EQ(c.truncation_radius, 5.0);
  EXPECT_EQ(c.family_count, 3u);
  EXPECT_EQ(c.resolved_format(), "json");
  EXPECT_EQ(parse_args({"scan"}).resolved_format(), "csv");
}

TEST(Cli, RejectsUnknownInput) {
  EXPECT_THROW(parse_args({"frobnicate"}), Error);
  EXPECT_THROW(parse_args({"check-hardy", "--no-such-flag", "1"}), Error);
  EXPECT_THROW(parse_args({"--p", "-1"}), Error);
  EXPECT_THROW(parse_args({"check-hardy", "--format", "xml"}), Error);
}

TEST(Cli, IniParsing) {
  const auto kv = parse_ini("# comment\n[space]\nspace = heisenberg:1\n; other\nmc_samples = 10\nbeta = \"solve\"\n");
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv[0].first, "space");
  EXPECT_EQ(kv[1].first, "mc-samples");
  EXPECT_EQ(kv[2].second, "solve");
  EXPECT_THROW(parse_ini("[broken\n"), Error);
  EXPECT_THROW(parse_ini("novalue\n"), Error);
  EXPECT_THROW(parse_ini(" = 3\n"), Error);
}

TEST(Cli, ConfigFileValuesYieldToFlags) {
  const auto path = temp_file("revhardy_cfg_test.ini", "command = check-hardy\np = -1\nq = -1\nalpha = 0\nbeta = -1\nseed = 5\n");
  const auto c = parse_args({"--config", path.string(), "--seed", "9"});
  EXPECT_EQ(c.command, "check-hardy");
  EXPECT_EQ(*c.q, -1.0);
  EXPECT_EQ(c.seed, 9u);
  const auto d = parse_args({"compute-constant", "--config", path.string()});
  EXPECT_EQ(d.command, "compute-constant");
  EXPECT_EQ(d.seed, 5u);
  EXPECT_THROW(parse_args({"--config", "/nonexistent/revhardy.ini"}), Error);
  std::filesystem::remove(path);
}

TEST(Cli, ShippedConfigsParse) {
  for (const auto& entry : std::filesystem::directory_iterator(REVHARDY_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    EXPECT_NO_THROW({
      const auto c = parse_args({"--config", entry.path().string()});
      EXPECT_FALSE(c.command.empty());
    }) << entry.path();
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(exit_code_for(Verdict::Verified), 0);
  EXPECT_EQ(exit_code_for(Verdict::TriviallyHolds), 0);
  EXPECT_EQ(exit_code_for(Verdict::Violated), 1);
  EXPECT_EQ(exit_code_for(Verdict::InvalidParams), 2);
  EXPECT_EQ(exit_code_for(Verdict::Inconclusive), 3);
}

TEST(Cli, CanonicalHardyEnvelope) {
  const auto r = run(parse_args(canonical_hardy()));
  EXPECT_EQ(r.exit_code, 0);
  const auto& env = r.envelope;
  EXPECT_EQ(env["schema_version"], kSchemaVersion);
  EXPECT_EQ(env["verdict"], "verified");
  EXPECT_NEAR(number_from(env["result"]["closed_form"]["D"]), 8.0, 1e-12);
  EXPECT_NEAR(number_from(env["result"]["report"]["D"]), 8.0, 1e-6);
  EXPECT_TRUE(env.contains("payload_digest"));
  EXPECT_TRUE(env["timing"].contains("wall_seconds"));
}

TEST(Cli, InvalidParametersGiveExitTwo) {
  auto args = canonical_hardy();
  args[4] = "-0.5";  // q > p
  const auto r = run(parse_args(args));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.envelope["verdict"], "invalid_params");
  EXPECT_TRUE(r.envelope.contains("error"));
  const auto hls = run(parse_args({"check-hls", "--p", "-1", "--q", "-1"}));
  EXPECT_EQ(hls.exit_code, 2);
  const auto missing = run(parse_args({"check-hardy", "--p", "-1"}));
  EXPECT_EQ(missing.exit_code, 2);
}

TEST(Cli, JsonRoundTrip) {
  const auto r = run(parse_args(canonical_hardy()));
  const std::string text = render(parse_args(canonical_hardy()), r);
  const Json back = Json::parse(text);
  EXPECT_EQ(back, r.envelope);
  EXPECT_EQ(back.dump(), r.envelope.dump());
}

TEST(Cli, NonFiniteNumbersSurviveJson) {
  const Json j{{"a", number(kInf)}, {"b", number(-kInf)}, {"c", number(std::nan(""))}, {"d", number(1.5)}};
  const Json back = Json::parse(j.dump());
  EXPECT_EQ(number_from(back["a"]), kInf);
  EXPECT_EQ(number_from(back["b"]), -kInf);
  EXPECT_TRUE(std::isnan(number_from(back["c"])));
  EXPECT_EQ(number_from(back["d"]), 1.5);
  EXPECT_THROW(number_from(Json("x")), Error);
}

TEST(Cli, DeterministicExceptTiming) {
  auto args = canonical_hardy();
  const auto a = run(parse_args(args));
  args.insert(args.end(), {"--threads", "1"});
  const auto b = run(parse_args(args));
  EXPECT_EQ(strip_timing(a.envelope).dump(), strip_timing(b.envelope).dump());
  EXPECT_EQ(a.envelope["payload_digest"], b.envelope["payload_digest"]);

  const std::vector<std::string> sw = {"check-stein-weiss", "--p", "-1", "--q", "-1", "--alpha", "-0.3", "--beta",
                                       "-0.4", "--family-count", "2", "--mc-samples", "20000"};
  EXPECT_EQ(strip_timing(run(parse_args(sw)).envelope).dump(), strip_timing(run(parse_args(sw)).envelope).dump());
}

TEST(Cli, NoTimingFlagDropsSection) {
  auto args = canonical_hardy();
  args.push_back("--no-timing");
  EXPECT_FALSE(run(parse_args(args)).envelope.contains("timing"));
}

TEST(Cli, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  const Table t{{"x", "y"}, {{"1", "pp(s0=1,R=2)"}}};
  EXPECT_EQ(to_csv(t), "x,y\r\n1,\"pp(s0=1,R=2)\"\r\n");
}

TEST(Cli, EmptyScanHasHeaderOnly) {
  auto c = parse_args({"scan", "--p-grid", "-1", "--q-grid", "-0.5"});
  const auto r = run(c);
  ASSERT_TRUE(r.table.has_value());
  EXPECT_EQ(r.table->rows.size(), 1u);
  EXPECT_EQ(r.table->rows[0][9], "inadmissible");
  c.p_grid = "";
  const auto empty = run(c);
  EXPECT_EQ(render(c, empty).substr(0, 4), "p,q,");
  EXPECT_EQ(empty.envelope["result"]["summary"]["rows"], 0);
}

TEST(Cli, ScanFactorNeverExceedsOne) {
  const auto r = run(parse_args({"scan", "--p-grid=-3:-0.1:20", "--q-grid=-3:-0.1:20", "--profile-points", "0"}));
  EXPECT_EQ(r.exit_code, 0);
  const auto& s = r.envelope["result"]["summary"];
  EXPECT_EQ(s["rows"], 400);
  EXPECT_EQ(s["factor_violations"], 0);
  EXPECT_LE(number_from(s["max_factor"]), 1.0);
}

TEST(Cli, OtherCommands) {
  const auto sa = run(parse_args({"sphere-area", "--space", "heisenberg:1", "--mc-samples", "200000"}));
  EXPECT_EQ(sa.exit_code, 0);
  const auto pi = run(parse_args({"proof-identities", "--p", "-1", "--beta", "-0.5"}));
  EXPECT_EQ(pi.exit_code, 0);
  const auto cc = run(parse_args({"compute-constant", "--space", "heisenberg:1", "--p", "-1", "--q", "-1", "--alpha", "0",
                                  "--beta", "solve", "--mc-samples", "100000"}));
  EXPECT_EQ(cc.exit_code, 0);
  EXPECT_NEAR(number_from(cc.envelope["derived"]["beta"]), -4.0, 1e-12);
  const auto conj = run(parse_args({"check-conjugate-hardy", "--p", "-1", "--q", "-1", "--alpha", "-2", "--beta", "-3",
                                    "--family-count", "5"}));
  EXPECT_EQ(conj.exit_code, 0);
}

TEST(Cli, MainEntryWritesOutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "revhardy_out_test.csv";
  std::ostringstream out, err;
  auto args = canonical_hardy();
  args.insert(args.end(), {"--format", "csv", "--output", path.string()});
  EXPECT_EQ(main_entry(args, out, err), 0);
  EXPECT_TRUE(out.str().empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "kind,f,A,t,ratio,error\r");
  std::filesystem::remove(path);
  std::ostringstream out2, err2;
  EXPECT_EQ(main_entry({"--help"}, out2, err2), 0);
  EXPECT_NE(out2.str().find("check-stein-weiss"), std::string::npos);
}
