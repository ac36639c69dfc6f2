#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

const fs::path kDir = "cli_fixtures";

std::string bin_path() {
  const char* bin = std::getenv("MODULARIS_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "MODULARIS_BIN must point at the CLI");
  return bin;
}

void put(const std::string& name, const std::string& text) {
  fs::create_directories(kDir);
  std::ofstream out(kDir / name, std::ios::binary);
  out << text;
}

std::string get(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int exit = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
  fs::create_directories(kDir);
  fs::path out_file = kDir / "stdout.txt";
  fs::path err_file = kDir / "stderr.txt";
  std::string cmd = env + (env.empty() ? "" : " ") + "'" + bin_path() + "' " +
                    args + " >" + out_file.string() + " 2>" +
                    err_file.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = get(out_file);
  r.err = get(err_file);
  return r;
}

std::string fx(const std::string& name) { return (kDir / name).string(); }

void write_fixtures() {
  put("l1.json", R"({"kind":"orlicz","phi":{"kind":"power","p":1},"convexity":"convex"})");
  put("bad_modular.json", R"({"kind":"orlicz","phi":{"kind":"power","p":-1}})");
  put("fn4.json", R"({"dim":1,"value_norm":"euclidean","blocks":[{"start":0,"end":1,"value":[4]}]})");
  put("fn1.json", R"({"dim":1,"value_norm":"euclidean","blocks":[{"start":0,"end":1,"value":[1]}]})");
  put("steps.json",
      R"({"dim":1,"value_norm":"euclidean","blocks":[{"start":0,"end":1,"value":[2]},{"start":1,"end":1.5,"value":[5]}]})");
  put("family.json", R"([{"dim":1,"value_norm":"euclidean","blocks":[{"start":0,"end":1,"value":[1]}]}])");
  put("space.json", R"({"alpha":"inf","exhaustion":[1,2,4]})");
  put("l2sym.json", R"({"kind":"lp","p":2})");
  put("chain.json", R"([[{"start":0,"end":1}],[{"start":0,"end":0.5},{"start":0.5,"end":1}]])");
  put("affine.json",
      R"({"kind":"affine-average","offset":{"dim":1,"value_norm":"euclidean","blocks":[{"start":0,"end":1,"value":[1]}]},"lambda":0.5,"averaging":[{"start":0,"end":1}]})");
  put("sin.json",
      R"({"kind":"sin-damped","offset":{"dim":1,"value_norm":"euclidean","blocks":[{"start":0,"end":1,"value":[0.5]}]},"gamma":0.5,"averaging":[{"start":0,"end":1}]})");
  put("cat.json", R"({"kind":"external","command":"cat"})");
}

}  // namespace

TEST_CASE("norm subcommand prints the scalar value") {
  write_fixtures();
  auto r = run_cli("norm --modular " + fx("l1.json") + " --fn " + fx("fn4.json"));
  CHECK(r.exit == 0);
  CHECK(r.out == "2\n");
  CHECK(r.err.empty());
}

TEST_CASE("usage problems exit 2") {
  write_fixtures();
  CHECK(run_cli("norm --modular " + fx("missing.json") + " --fn " + fx("fn4.json")).exit == 2);
  CHECK(run_cli("norm --fn " + fx("fn4.json")).exit == 2);
  CHECK(run_cli("bogus").exit == 2);
  CHECK(run_cli("").exit == 2);
  CHECK(run_cli("norm --modular " + fx("l1.json") + " --fn " + fx("fn4.json") +
                " --unknown-flag 3")
            .exit == 2);
  auto r = run_cli("norm --modular " + fx("l1.json") + " --fn " + fx("fn4.json"),
                   "MODULARIS_MAX_ITERS=abc");
  CHECK(r.exit == 2);
}

TEST_CASE("domain problems exit 1 with a one-line json error") {
  write_fixtures();
  auto r = run_cli("norm --modular " + fx("bad_modular.json") + " --fn " +
                   fx("fn4.json"));
  CHECK(r.exit == 1);
  CHECK(r.out.empty());
  CHECK(r.err.substr(0, 28) == "{\"error\":\"malformed-input\",\"");
  CHECK(r.err.find('\n') == r.err.size() - 1);
}

TEST_CASE("approx subcommand reports the stage budget as csv") {
  write_fixtures();
  auto r = run_cli("approx --modular " + fx("l1.json") + " --family " +
                   fx("family.json") + " --space " + fx("space.json") +
                   " --eps 0.5");
  CHECK(r.exit == 0);
  CHECK(r.out ==
        "stage,parameter,sup_error\n"
        "truncation,1,0\n"
        "radial,1.125,0\n"
        "averaging,1,0\n"
        "total,,0\n");
}

TEST_CASE("rearrange subcommand samples xstar and xstarstar") {
  write_fixtures();
  auto r = run_cli("rearrange --fn " + fx("steps.json") + " --points 3");
  CHECK(r.exit == 0);
  CHECK(r.out ==
        "t,xstar,xstarstar\n"
        "0.5,2,5\n"
        "1,2,3.5\n"
        "1.5,0,3\n");
}

TEST_CASE("map subcommand walks a refinement chain") {
  write_fixtures();
  auto dyadic = run_cli("map --symmetric " + fx("l2sym.json") + " --fn " +
                        fx("fn1.json") + " --dyadic 3");
  CHECK(dyadic.exit == 0);
  CHECK(dyadic.out == "level,error\n1,0\n2,0\n3,0\n");

  auto chain = run_cli("map --symmetric " + fx("l2sym.json") + " --fn " +
                       fx("fn1.json") + " --chain " + fx("chain.json"));
  CHECK(chain.exit == 0);
  CHECK(chain.out == "level,error\n1,0\n2,0\n");

  CHECK(run_cli("map --symmetric " + fx("l2sym.json") + " --fn " +
                fx("fn1.json") + " --chain " + fx("chain.json") + " --dyadic 2")
            .exit == 2);
}

TEST_CASE("fixpoint subcommand solves the affine operator in closed form") {
  write_fixtures();
  auto r = run_cli("fixpoint --modular " + fx("l1.json") + " --operator " +
                   fx("affine.json") + " --space " + fx("space.json") +
                   " --eps 1e-6");
  CHECK(r.exit == 0);
  CHECK(r.out ==
        "{\"iterations\":1,\"method\":\"linear\",\"point\":{\"blocks\":"
        "[{\"end\":1.0,\"start\":0.0,\"value\":[2.0]}],\"dim\":1,"
        "\"value_norm\":\"euclidean\"},\"residual\":0.0}\n");
}

TEST_CASE("fixpoint subcommand talks to an external operator") {
  write_fixtures();
  auto r = run_cli("fixpoint --modular " + fx("l1.json") + " --operator " +
                   fx("cat.json") + " --space " + fx("space.json") +
                   " --eps 1e-6");
  CHECK(r.exit == 0);
  CHECK(r.out.find("\"residual\":0.0") != std::string::npos);
  CHECK(r.out.find("\"value\":[0.0]") != std::string::npos);
}

TEST_CASE("fixpoint subcommand honors the iteration budget variable") {
  write_fixtures();
  auto r = run_cli("fixpoint --modular " + fx("l1.json") + " --operator " +
                       fx("sin.json") + " --space " + fx("space.json") +
                       " --eps 1e-6",
                   "MODULARIS_MAX_ITERS=1");
  CHECK(r.exit == 1);
  CHECK(r.err.substr(0, 28) == "{\"error\":\"budget-exhausted\",");
}

TEST_CASE("verify subcommand writes a passing report deterministically") {
  write_fixtures();
  for (std::string suite : {"fnorm-axioms", "modular-axioms", "binder-monotone"}) {
    auto first = run_cli("verify --suite " + suite +
                         " --seed 9 --samples 10 --trials 40 --output " +
                         fx(suite + "-a.json"));
    CHECK(first.exit == 0);
    std::string report = get(kDir / (suite + "-a.json"));
    CHECK(report.find("\"suite\":\"" + suite + "\"") != std::string::npos);
    CHECK(report.find("\"pass\":true") != std::string::npos);

    auto second = run_cli("verify --suite " + suite +
                          " --seed 9 --samples 10 --trials 40 --output " +
                          fx(suite + "-b.json"));
    CHECK(second.exit == 0);
    CHECK(get(kDir / (suite + "-b.json")) == report);
  }
}
