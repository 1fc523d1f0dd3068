#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("shellprime-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunResult run(const std::string& args, const std::string& env_prefix = "") {
  TempDir tmp;
  const fs::path out_file = tmp.path / "stdout";
  const fs::path err_file = tmp.path / "stderr";
  const std::string cmd = env_prefix + std::string(SHELLPRIME_CLI_PATH) + " " + args +
                          " >" + out_file.string() + " 2>" + err_file.string();
  const int raw = std::system(cmd.c_str());
  return {WEXITSTATUS(raw), slurp(out_file), slurp(err_file)};
}

}  // namespace

TEST_CASE("help lists the subcommands and the built-in defaults") {
  auto r = run("--help");
  CHECK(r.exit_code == 0);
  for (const char* sub : {"census", "count", "seq", "digits", "estimate", "mseries",
                          "verify", "reproduce"})
    CHECK(r.out.find(sub) != std::string::npos);

  auto est_help = run("estimate ms --help");
  CHECK(est_help.exit_code == 0);
  CHECK(est_help.out.find("1.68723") != std::string::npos);

  auto census_help = run("census --help");
  CHECK(census_help.out.find("128") != std::string::npos);

  auto mseries_help = run("mseries --help");
  CHECK(mseries_help.out.find("60") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run("definitely-not-a-subcommand").exit_code == 2);
  CHECK(run("census --no-such-flag").exit_code == 2);
  CHECK(run("estimate ms --x 100").exit_code == 2);  // missing required --p
  CHECK(run("reproduce nosuchtable").exit_code == 2);
}

TEST_CASE("computation errors exit with status 1") {
  auto r = run("mseries --family prime-shell --p 4 --x 10");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("estimate ms prints the reference value") {
  auto r = run("estimate ms --p 2 --x 100");
  CHECK(r.exit_code == 0);
  CHECK(r.out.substr(0, 8) == "42.75969");

  auto fixed = run("estimate ms --p 13 --x 200 --decimals 5");
  CHECK(fixed.out == "19.24779\n");
}

TEST_CASE("estimate fit reports the fitted root and its distance") {
  auto r = run("estimate fit --builtin 100");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("m = ") != std::string::npos);
  CHECK(r.out.find("distance_from_1.68723") != std::string::npos);
}

TEST_CASE("mseries prints S, P, and M at working precision") {
  auto r = run("mseries --family prime-shell --p 2 --x 100 --precision 60");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("M = -0.7085686919107") != std::string::npos);

  auto integers = run("mseries --family integers --x 100");
  CHECK(integers.out.find("M = -0.9481262248236") != std::string::npos);
}

TEST_CASE("mseries oracle confirms the elimination identity") {
  auto r = run("mseries --oracle --family integers --x 6 --max-degree 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("elimination bookkeeping exact: yes") != std::string::npos);
  CHECK(r.out.find("degree 2 (-)") != std::string::npos);
  CHECK(r.out.find("degree 3 (+)") != std::string::npos);
}

TEST_CASE("seq emits the catalogued sequence for base 166") {
  auto r = run("seq --n 166 --p-max 61 --format json");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"331\"") != std::string::npos);
  CHECK(r.out.find("\"82171\"") != std::string::npos);
  CHECK(r.out.find("\"3751197451\"") != std::string::npos);

  auto csv = run("seq --n 166 --p-max 61");
  CHECK(csv.out.rfind("p,value\n", 0) == 0);
  CHECK(csv.out.find("5,3751197451\n") != std::string::npos);
}

TEST_CASE("digits emits the matrix and the repeat metadata") {
  auto r = run("digits --n-count 6 --a-count 4 --format json");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"horizontal_period\"") != std::string::npos);
  CHECK(r.out.find("\"vertical_period\": 4") != std::string::npos);
}

TEST_CASE("census runs are reproducible and cache through SHELLPRIME_CACHE") {
  TempDir tmp;
  const fs::path grid_a = tmp.path / "a.csv";
  const fs::path grid_b = tmp.path / "b.csv";
  const fs::path cache = tmp.path / "cache.jsonl";

  auto a = run("census --n-max 20 --p-max 7 --cache " + cache.string() + " --out " +
               grid_a.string());
  REQUIRE(a.exit_code == 0);
  CHECK(fs::exists(cache));

  // The env var overrides --cache: pointing the flag somewhere unusable is
  // harmless while the env var carries the real location.
  auto b = run("census --n-max 20 --p-max 7 --cache /nonexistent-dir/x.jsonl --out " +
                   grid_b.string(),
               "SHELLPRIME_CACHE=" + cache.string() + " ");
  REQUIRE(b.exit_code == 0);
  CHECK(b.err.find("0 tested") != std::string::npos);
  CHECK(slurp(grid_a) == slurp(grid_b));
}

TEST_CASE("count prints a bare row count") {
  auto r = run("count --p 2 --n-max 10");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "7\n");
}

TEST_CASE("verify subcommands pass on their default sweeps") {
  auto t1 = run("verify theorem1 --n-max 20 --c-max 16");
  CHECK(t1.exit_code == 0);
  CHECK(t1.out.find("theorem1: PASS") != std::string::npos);

  auto t2 = run("verify theorem2");
  CHECK(t2.exit_code == 0);
  CHECK(t2.out.find("theorem2: PASS") != std::string::npos);

  auto t3 = run("verify theorem3 --x 50");
  CHECK(t3.exit_code == 0);
  CHECK(t3.out.find("theorem3: PASS") != std::string::npos);
}

TEST_CASE("estimate --curve emits the curve CSV") {
  auto r = run("estimate ls --x 5 --curve");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("kind,p,m,x,value\n", 0) == 0);
  CHECK(r.out.find("Ls,,,2,1.4426950409\n") != std::string::npos);
  CHECK(r.out.find("Ls,,,5,") != std::string::npos);
}

TEST_CASE("reproduce table3 writes a manifest and respects --force") {
  TempDir tmp;
  auto first = run("reproduce table3 --out-dir " + tmp.path.string());
  REQUIRE(first.exit_code == 0);

  const fs::path manifest = tmp.path / "table3_manifest.json";
  REQUIRE(fs::exists(manifest));
  const std::string body = slurp(manifest);
  CHECK(body.find("\"artifact_id\": \"table3\"") != std::string::npos);
  CHECK(body.find("\"generated_at\"") != std::string::npos);
  CHECK(body.find("\"paper_value\"") != std::string::npos);
  CHECK(body.find("\"pass\": true") != std::string::npos);
  CHECK(body.find("\"pass\": false") == std::string::npos);
  CHECK(fs::exists(tmp.path / "table3.csv"));

  auto blocked = run("reproduce table3 --out-dir " + tmp.path.string());
  CHECK(blocked.exit_code == 1);
  CHECK(blocked.err.find("--force") != std::string::npos);

  auto forced = run("reproduce table3 --out-dir " + tmp.path.string() + " --force");
  CHECK(forced.exit_code == 0);
}

TEST_CASE("the remaining reproduce targets emit data plus manifests") {
  TempDir tmp;
  const std::string cache = " --cache " + (tmp.path / "census.jsonl").string();

  auto t2 = run("reproduce table2 --out-dir " + tmp.path.string());
  REQUIRE(t2.exit_code == 0);
  const std::string t2_manifest = slurp(tmp.path / "table2_manifest.json");
  CHECK(t2_manifest.find("\"pass\": false") == std::string::npos);
  CHECK(slurp(tmp.path / "table2.csv").rfind("family,p,x,s,precision,S,P,M\n", 0) == 0);

  auto f10 = run("reproduce fig10 --out-dir " + tmp.path.string());
  REQUIRE(f10.exit_code == 0);
  CHECK(fs::exists(tmp.path / "fig10.csv"));

  auto f7 = run("reproduce fig7 --out-dir " + tmp.path.string() + cache);
  REQUIRE(f7.exit_code == 0);
  CHECK(slurp(tmp.path / "fig7.csv").rfind("kind,p,m,x,value\n", 0) == 0);

  auto t1 = run("reproduce table1 --out-dir " + tmp.path.string() + cache);
  REQUIRE(t1.exit_code == 0);
  // The shared cache makes the second full-grid pass free.
  CHECK(fs::exists(tmp.path / "table1_manifest.json"));

  auto t4 = run("reproduce table4 --out-dir " + tmp.path.string() + cache);
  REQUIRE(t4.exit_code == 0);
  CHECK(fs::exists(tmp.path / "table4.csv"));
}

TEST_CASE("reproduce fig8 reports the fit inside the published bounds") {
  TempDir tmp;
  auto r = run("reproduce fig8 --out-dir " + tmp.path.string());
  REQUIRE(r.exit_code == 0);
  const std::string body = slurp(tmp.path / "fig8_manifest.json");
  CHECK(body.find("\"fit\"") != std::string::npos);
  CHECK(body.find("\"distance_from_reference\"") != std::string::npos);
  const std::string csv = slurp(tmp.path / "fig8.csv");
  CHECK(csv.rfind("kind,p,m,x,value\n", 0) == 0);
  CHECK(csv.find("Ms,2,1.3575900000,100,") != std::string::npos);
  CHECK(csv.find("Ms,2,2.0000000000,100,") != std::string::npos);
}
