#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <algorithm>
#include <sstream>

#include "cli/commands.hpp"
#include "oracles.hpp"
#include "subshift/family_io.hpp"
#include "subshift/serialize.hpp"

namespace fs = std::filesystem;
using subshift::json;

namespace {

struct Run {
  int code;
  std::string err;
};

Run run(const std::string& args, const std::string& env = "") {
  const auto log = fs::temp_directory_path() / "subshift_cli_stderr.txt";
  const std::string cmd = env + " " + SUBSHIFT_BIN + " " + args + " > /dev/null 2> " + log.string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

const char* kToy4 = R"({"N": 2, "M": 4, "mode": "relaxed", "steps": 2,
  "overrides": {"*": {"epsilon": 0.4, "delta": 0.0, "horizon_cap": 1}, "2": {"epsilon": 0.3}}})";
const char* kToy5 = R"({"N": 2, "M": 5, "mode": "relaxed", "steps": 2,
  "overrides": {"*": {"epsilon": 0.41, "delta": 0.0, "horizon_cap": 1}, "2": {"epsilon": 0.28}}})";

}  // namespace

TEST(CliSequence, MobiusFile) {
  const auto dir = oracle::temp_dir("cli_seq");
  const auto r = run("sequence --mobius 1000000 --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "sequence.txt");
  std::vector<double> first(6);
  for (auto& v : first) in >> v;
  EXPECT_EQ(first, (std::vector<double>{1, -1, -1, 0, -1, 1}));
  std::size_t lines = 6;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1000000u);
  const auto ap = json::parse(slurp(dir / "aperiodicity.json"));
  EXPECT_FALSE(ap.at("rows").empty());
  EXPECT_TRUE(fs::exists(dir / "aperiodicity.csv"));
}

TEST(CliSequence, RejectsOutOfRangeFile) {
  const auto dir = oracle::temp_dir("cli_bad");
  write(dir / "bad.txt", "0.5\n1.5\n0\n");
  EXPECT_EQ(run("sequence --file " + (dir / "bad.txt").string() + " --out " + dir.string()).code, 2);
  EXPECT_EQ(run("sequence --bernoulli 42 --out " + dir.string()).code, 2);
  EXPECT_EQ(run("sequence --out " + dir.string()).code, 2);
  EXPECT_EQ(run("sequence --mobius 10 --bernoulli 1:10").code, 2);
}

TEST(CliSequence, BernoulliIsReproducible) {
  const auto a = oracle::temp_dir("cli_ber_a");
  const auto b = oracle::temp_dir("cli_ber_b");
  ASSERT_EQ(run("sequence --bernoulli 42:1000 --out " + a.string()).code, 0);
  ASSERT_EQ(run("sequence --bernoulli 42:1000 --out " + b.string()).code, 0);
  for (const char* f : {"sequence.txt", "sequence.json", "aperiodicity.json", "aperiodicity.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(CliUsage, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("plan --no-such-flag").code, 2);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("construct --threads 0").code, 2);
}

TEST(CliPlan, StrictScheduleIsInfeasible) {
  const auto dir = oracle::temp_dir("cli_plan");
  const auto sched = write(dir / "strict.json",
                           R"({"N": 2, "M": 81, "mode": "strict", "steps": 1700, "jump_steps": {"82": 1700}})");
  const auto r = run("plan --schedule " + sched.string() + " --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("INFEASIBLE"), std::string::npos) << r.err;
  const auto plan = json::parse(slurp(dir / "plan.json"));
  EXPECT_DOUBLE_EQ(plan.at("entropy_floor").get<double>(), std::log(2.0) - std::log(2.0) / 80);
  EXPECT_TRUE(plan.at("strict_infeasible").get<bool>());
  EXPECT_TRUE(plan.at("steps").back().at("N_k").at("exact").is_null());
  EXPECT_EQ(plan.at("jumps")[0].at("condition_b").at("minimal_K").get<int>(), 1700);
}

TEST(CliPlan, ToyEvaluatesConditionsAndReportsMissingJump) {
  const auto dir = oracle::temp_dir("cli_plan_toy");
  const auto sched = write(dir / "toy.json", R"({"N": 2, "M": 4, "steps": 3, "jump_steps": {"5": 3}})");
  const auto r = run("plan --schedule " + sched.string() + " --sequence mobius:1000000 --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto plan = json::parse(slurp(dir / "plan.json"));
  const auto status = plan.at("jumps")[0].at("condition_a").at("status").get<std::string>();
  EXPECT_TRUE(status == "verified" || status == "violated") << status;
  EXPECT_TRUE(fs::exists(dir / "plan.csv"));

  const auto missing = write(dir / "missing.json", R"({"N": 2, "M": 4, "steps": 5, "jump_steps": {"6": 4}})");
  const auto bad = run("plan --schedule " + missing.string() + " --out " + dir.string());
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("m = 5"), std::string::npos) << bad.err;
}

TEST(CliConstruct, ToyIsExactAndDeterministic) {
  const auto dir = oracle::temp_dir("cli_construct");
  const auto sched = write(dir / "toy4.json", kToy4);
  const std::string common = "construct --schedule " + sched.string() + " --sequence mobius:1000000 --seed 9";
  ASSERT_EQ(run(common + " --out " + (dir / "a").string()).code, 0);
  ASSERT_EQ(run(common + " --threads 2 --out " + (dir / "b").string()).code, 0);
  for (const char* f : {"family_1.json", "family_2.json", "report.json", "report.csv", "entropy.json"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  const auto report = json::parse(slurp(dir / "a" / "report.json"));
  for (const auto& step : report.at("steps")) {
    EXPECT_EQ(step.at("gamma").at("kind").get<std::string>(), "exact");
    EXPECT_FALSE(step.contains("wall_ms"));
  }
  ASSERT_EQ(run(common + " --timings --out " + (dir / "c").string()).code, 0);
  EXPECT_TRUE(json::parse(slurp(dir / "c" / "report.json")).at("steps")[0].contains("wall_ms"));
}

TEST(CliConstruct, ShortSequenceNamesRequiredLength) {
  const auto dir = oracle::temp_dir("cli_short");
  const auto sched = write(dir / "toy4.json", kToy4);
  const auto r = run("construct --schedule " + sched.string() + " --sequence mobius:200 --out " + dir.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("m^2 N_k = 256"), std::string::npos) << r.err;
}

TEST(CliConstruct, BudgetThenResume) {
  const auto dir = oracle::temp_dir("cli_budget");
  const auto sched = write(dir / "toy4.json", kToy4);
  const std::string common = "construct --schedule " + sched.string() + " --sequence mobius:1000000 --mode exhaustive";
  const auto r = run(common + " --budget-candidates 1000 --out " + (dir / "r").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("--resume"), std::string::npos) << r.err;
  EXPECT_TRUE(fs::exists(dir / "r" / "family_1.json"));
  EXPECT_FALSE(fs::exists(dir / "r" / "family_2.json"));
  const auto resumed = run(common + " --resume --out " + (dir / "r").string());
  ASSERT_EQ(resumed.code, 0) << resumed.err;
  EXPECT_NE(resumed.err.find("resuming after level 1"), std::string::npos);
  ASSERT_EQ(run(common + " --out " + (dir / "fresh").string()).code, 0);
  EXPECT_EQ(slurp(dir / "r" / "family_2.json"), slurp(dir / "fresh" / "family_2.json"));
  // resuming with different parameters is refused
  const auto other = write(dir / "other.json", R"({"N": 2, "M": 4, "steps": 2})");
  EXPECT_EQ(run("construct --resume --schedule " + other.string() +
                " --sequence mobius:1000000 --out " + (dir / "r").string()).code,
            2);
}

TEST(CliConstruct, EnvironmentAndConfigFile) {
  const auto dir = oracle::temp_dir("cli_env");
  const auto sched = write(dir / "toy4.json", kToy4);
  const auto r = run("construct", "SUBSHIFT_SCHEDULE=" + sched.string() +
                                      " SUBSHIFT_SEQUENCE=mobius:1000000 SUBSHIFT_OUT=" + (dir / "e").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "e" / "family_2.json"));
  const auto cfg = write(dir / "run.toml", "schedule = \"" + sched.string() +
                                               "\"\nsequence = \"mobius:1000000\"\nout = \"" +
                                               (dir / "t").string() + "\"\n");
  ASSERT_EQ(run("--config " + cfg.string() + " construct").code, 0);
  EXPECT_EQ(slurp(dir / "e" / "family_2.json"), slurp(dir / "t" / "family_2.json"));
}

TEST(CliVerify, FreshMutatedAndTampered) {
  const auto dir = oracle::temp_dir("cli_verify");
  const auto sched = write(dir / "toy5.json", kToy5);
  const std::string args = " --schedule " + sched.string() + " --sequence mobius:1000000 --out ";
  ASSERT_EQ(run("construct" + args + dir.string()).code, 0);
  const auto ok = run("verify" + args + dir.string());
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto report = json::parse(slurp(dir / "verify.json"));
  EXPECT_TRUE(report.at("passed").get<bool>());
  EXPECT_TRUE(report.at("levels")[1].at("uncorrelation").at("violations").empty());
  EXPECT_EQ(report.at("levels")[1].at("diagnostics").at("note").get<std::string>(),
            "diagnostic, not enforced");

  // swap in a tuple of level-1 blocks that fails condition (R), keeping canonical order
  const auto chain = subshift::load_family_chain({dir / "family_1.json", dir / "family_2.json"});
  const auto& g2 = *chain.levels[2];
  std::vector<subshift::SlidingBlockCode> F;
  for (auto idx : g2.meta().codes) F.push_back(subshift::code_from_index(idx, 2));
  const auto y = subshift::mobius_sieve(1000000);
  std::vector<std::uint32_t> bad_tuple;
  std::mt19937_64 gen(1);
  for (int tries = 0; tries < 10000 && bad_tuple.empty(); ++tries) {
    std::vector<std::uint32_t> t(g2.multiplier());
    for (auto& x : t) x = static_cast<std::uint32_t>(gen() % chain.levels[1]->size());
    const subshift::BlockFamily single(chain.levels[1], g2.multiplier(), t, {}, g2.meta());
    if (!subshift::audit_family(single, F, y, {}, false).unsound.empty()) bad_tuple = t;
  }
  ASSERT_FALSE(bad_tuple.empty());
  auto fam = json::parse(slurp(dir / "family_2.json"));
  auto members = fam.at("members").get<std::vector<std::vector<std::uint32_t>>>();
  members.back() = bad_tuple;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  fam["members"] = members;
  const auto mutated = oracle::temp_dir("cli_verify_mut");
  fs::copy(dir / "family_1.json", mutated / "family_1.json");
  write(mutated / "family_2.json", fam.dump() + "\n");
  const auto bad = run("verify" + args + mutated.string());
  EXPECT_EQ(bad.code, 1) << bad.err;
  EXPECT_NE(bad.err.find("level 2"), std::string::npos) << bad.err;

  // editing level 1 breaks the parent hash stored in level 2
  std::string g1 = slurp(dir / "family_1.json");
  g1[g1.find("\"members\":[[0") + 13] = '1';
  const auto tampered = oracle::temp_dir("cli_verify_tamper");
  write(tampered / "family_1.json", g1);
  fs::copy(dir / "family_2.json", tampered / "family_2.json");
  EXPECT_EQ(run("verify" + args + tampered.string()).code, 4);
}

TEST(CliVerify, EmptyCodeFamilyWarns) {
  const auto dir = oracle::temp_dir("cli_vacuous");
  const auto sched = write(dir / "s.json", R"({"N": 2, "M": 5, "steps": 1})");
  const std::string args = " --schedule " + sched.string() + " --sequence mobius:10000 --out " + dir.string();
  ASSERT_EQ(run("construct" + args).code, 0);
  const auto r = run("verify" + args);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("vacuous"), std::string::npos) << r.err;
}

TEST(CliLibrary, SequenceSpecs) {
  using subshift::cli::load_sequence_spec;
  EXPECT_EQ(load_sequence_spec("mobius:6").at(6), 1.0);
  EXPECT_EQ(load_sequence_spec("bernoulli:1:5").length(), 5u);
  EXPECT_THROW(load_sequence_spec("mobius:x"), std::invalid_argument);
  EXPECT_THROW(load_sequence_spec("zeta:4"), std::invalid_argument);
  EXPECT_THROW(load_sequence_spec(""), std::invalid_argument);
}
