#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "exwalk/exceptional.hpp"
#include "exwalk/report.hpp"

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Result run_cli(const std::string& args) {
  const std::string cmd = std::string(EXWALK_BIN) + " " + args + " 2>cli_stderr.txt";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp("cli_stderr.txt");
  return r;
}

std::size_t lines(const std::string& s) {
  std::size_t c = 0;
  for (char ch : s) c += ch == '\n';
  return c;
}

}  // namespace

TEST_CASE("gambler run prints one row") {
  const auto r = run_cli("gambler --n 10 --trials 1000 --seed 7");
  CHECK(r.code == 0);
  CHECK(lines(r.out) == 3);
  CHECK(r.out.rfind("# config_hash=", 0) == 0);
  CHECK(r.out.find("name,param,trials,estimate,ci_lo,ci_hi,censored,seed,z\ngambler,n=10,1000,") !=
        std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  const auto bad = run_cli("gambler --n 10 --bogus 3");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("Usage") != std::string::npos);
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("nosuch").code == 1);
  CHECK(run_cli("--format xml gambler --n 3").code == 1);
  const auto spec = run_cli("carne --graph ring:3");
  CHECK(spec.code == 1);
  CHECK(nlohmann::json::parse(spec.err)["error"] == "usage");
}

TEST_CASE("runtime errors exit with 2") {
  const auto r = run_cli("en --n 50 --seed 1");
  CHECK(r.code == 2);
  const auto j = nlohmann::json::parse(r.err);
  CHECK(j["error"] == "range");
  CHECK(run_cli("fit --in does-not-exist.csv").code == 2);
}

TEST_CASE("help exits cleanly and describes the claim") {
  const auto r = run_cli("en --help");
  CHECK(r.code == 0);
  CHECK(r.out.find("returns") != std::string::npos);
  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("unseeded runs use seed 0 and say so") {
  const auto a = run_cli("gambler --n 4 --trials 500");
  const auto b = run_cli("gambler --n 4 --trials 500 --seed 0");
  CHECK(a.code == 0);
  CHECK(a.err.find("seed 0") != std::string::npos);
  CHECK(a.out == b.out);
}

TEST_CASE("job count does not change output") {
  const auto a = run_cli("en --n 2 --trials 200 --horizon 100000 --seed 3 --jobs 1");
  const auto b = run_cli("en --n 2 --trials 200 --horizon 100000 --seed 3 --jobs 3");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("json output") {
  const auto r = run_cli("--format json teleport --n 2 --trials 100 --seed 4");
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["rows"].size() == 2);
  CHECK(j["config"]["subcommand"] == "teleport");
  CHECK(j["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("snapshots and transcripts replay from the seed") {
  const auto r = run_cli("exceptional --seed 11 --stages 5 --snapshot cli_snap.txt --dump-transcript cli_tr.csv --audit");
  REQUIRE(r.code == 0);
  const auto run = exwalk::run_exceptional({11, 0}, exwalk::StopRule{std::nullopt, 5});
  std::ostringstream snap, tr;
  exwalk::write_snapshot(snap, run.env.snapshot());
  exwalk::write_transcript_csv(tr, run.transcript);
  CHECK(slurp("cli_snap.txt") == snap.str());
  CHECK(slurp("cli_tr.csv") == tr.str());
  CHECK(lines(r.out) == 2 + 5);
}

TEST_CASE("fit reads en-oracle reports") {
  std::string body;
  for (int n = 2; n <= 5; ++n) {
    const auto r = run_cli("en-oracle --n " + std::to_string(n) + " --trials 4000 --seed 9");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    int k = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (k++ == 0 && !body.empty()) continue;
      body += line + "\n";
    }
  }
  std::ofstream("cli_fit.csv") << body;
  const auto f = run_cli("fit --in cli_fit.csv");
  REQUIRE(f.code == 0);
  std::istringstream in(f.out);
  const auto t = exwalk::read_csv(in);
  REQUIRE(t.rows.size() == 2);
  CHECK(std::get<std::string>(t.rows[0][1]) == "points=4");
  CHECK(std::stod(std::get<std::string>(t.rows[0][3])) < 0.0);
}

TEST_CASE("every subcommand runs") {
  for (const char* args :
       {"localtime --N 100 --trials 100 --seed 1", "greedy --letters 1000 --seed 1",
        "multi --walks 2 --phases 3 --seed 1", "branching --horizon 6 --seed 1",
        "branching --gw 5 --trials 100 --seed 1", "tinybox --id 5 --horizon 500 --seed 1",
        "carne --graph comb:2:2 --tmax 10", "chernoff --n 20 --p 0.3 --eps 0.4",
        "displacement --n 50 --trials 200 --seed 1", "escape --letters 5000 --seed 1",
        "en --n 1 --walk 1 --trials 50 --horizon 100000 --seed 1"}) {
    const auto r = run_cli(args);
    INFO(args);
    CHECK(r.code == 0);
    CHECK(lines(r.out) >= 3);
  }
}
