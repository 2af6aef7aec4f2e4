#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "support/schema_check.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  const std::string command = std::string(LPASIM_CLI_PATH) + " " + args +
                              " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  char buffer[4096];
  while (std::size_t got = std::fread(buffer, 1, sizeof(buffer), pipe)) {
    result.output.append(buffer, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lpasim_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static inline int counter = 0;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

json load_schema(const char* name) {
  return read_json(fs::path(LPASIM_SCHEMA_DIR) / name);
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("gen writes the dataset files and a manifest") {
  TempDir dir;
  const CommandResult result = run_cli(
      "gen --preset synthetic --n 3 --T 20 --seed 7 --out " +
      dir.path.string());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("mean v") != std::string::npos);
  CHECK(fs::exists(dir.path / "sellers.csv"));
  CHECK(fs::exists(dir.path / "requests.csv"));
  const json manifest = read_json(dir.path / "manifest.json");
  CHECK(manifest.at("command") == "gen");
  CHECK(manifest.at("config").at("n") == 3);
  CHECK(manifest.at("config").at("seed") == 7);
}

TEST_CASE("gen rejects impossible configs as usage errors") {
  TempDir dir;
  CHECK(run_cli("gen --n 0 --out " + dir.path.string()).exit_code == 1);
  CHECK(run_cli("gen --preset bogus --out " + dir.path.string()).exit_code ==
        1);
}

TEST_CASE("gen realworld-shape preset carries six slots") {
  TempDir dir;
  const CommandResult result = run_cli(
      "gen --preset realworld-shape --n 4 --T 10 --out " + dir.path.string());
  CHECK(result.exit_code == 0);
  const json manifest = read_json(dir.path / "manifest.json");
  CHECK(manifest.at("config").at("beta").size() == 6);
  CHECK(manifest.at("config").at("kappa") == 0.5);
}

TEST_CASE("compare emits a schema-valid report with a 100% baseline") {
  TempDir dir;
  const CommandResult result = run_cli(
      "compare --n 3 --T 60 --seed 5 --out " + dir.path.string());
  CHECK(result.exit_code == 0);

  const json report = read_json(dir.path / "metrics.json");
  CHECK_NOTHROW(
      lpasim::test::check_schema(report, load_schema("metrics.schema.json")));
  REQUIRE(report.at("rows").size() == 5);
  const json& baseline = report.at("rows").at(0);
  CHECK(baseline.at("auction") == "lpa_offline");
  CHECK(baseline.at("pct").at("lw") == doctest::Approx(100.0));
  CHECK(baseline.at("pct").at("obj") == doctest::Approx(100.0));

  const auto lines = csv_lines(read_file(dir.path / "comparison.csv"));
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] ==
        "auction,lw,kappa_ue,obj,rev,lw_pct,kappa_ue_pct,obj_pct,rev_pct");
  CHECK(lines[1].rfind("lpa_offline,", 0) == 0);
}

TEST_CASE("compare reruns are byte-identical") {
  TempDir a, b;
  CHECK(run_cli("compare --n 3 --T 40 --seed 9 --out " + a.path.string())
            .exit_code == 0);
  CHECK(run_cli("compare --n 3 --T 40 --seed 9 --out " + b.path.string())
            .exit_code == 0);
  CHECK(read_file(a.path / "comparison.csv") ==
        read_file(b.path / "comparison.csv"));
  CHECK(read_file(a.path / "metrics.json") ==
        read_file(b.path / "metrics.json"));
}

TEST_CASE("compare on a single seller: rules differ only in revenue") {
  TempDir dir;
  const CommandResult result = run_cli(
      "compare --n 1 --T 50 --seed 3 --out " + dir.path.string());
  CHECK(result.exit_code == 0);
  const json report = read_json(dir.path / "metrics.json");
  std::map<std::string, json> rows;
  for (const json& row : report.at("rows")) {
    rows[row.at("auction")] = row;
  }
  const double lw = rows.at("lpa").at("lw");
  for (const char* rule : {"gfp", "gsp", "vcg"}) {
    CHECK(rows.at(rule).at("lw").get<double>() == doctest::Approx(lw));
    CHECK(rows.at(rule).at("ue").get<double>() ==
          doctest::Approx(rows.at("lpa").at("ue").get<double>()));
  }
  CHECK(rows.at("gsp").at("rev").get<double>() == 0.0);
  CHECK(rows.at("vcg").at("rev").get<double>() == 0.0);
  CHECK(rows.at("lpa").at("rev").get<double>() == doctest::Approx(lw));
  CHECK(rows.at("gfp").at("rev").get<double>() > 0.0);
}

TEST_CASE("compare validates the dataset source combination") {
  TempDir dir;
  CHECK(run_cli("compare --sellers a.csv --n 3 --out " + dir.path.string())
            .exit_code == 1);
  CHECK(run_cli("compare --sellers nope.csv --requests nope2.csv --out " +
                dir.path.string())
            .exit_code == 2);
}

TEST_CASE("sweep produces sorted pareto rows") {
  TempDir dir;
  const CommandResult result = run_cli(
      "sweep --n 2 --T 30 --seed 2 --kappa-sweep 1,0.5 --rule lpa --rule gfp "
      "--out " +
      dir.path.string());
  CHECK(result.exit_code == 0);
  const auto lines = csv_lines(read_file(dir.path / "pareto.csv"));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "rule,kappa,lw,ue");
  CHECK(lines[1].rfind("lpa,0.5,", 0) == 0);
  CHECK(lines[2].rfind("lpa,1,", 0) == 0);
  CHECK(lines[3].rfind("gfp,0.5,", 0) == 0);
  CHECK(lines[4].rfind("gfp,1,", 0) == 0);
}

TEST_CASE("default sweep covers the nine-point kappa ladder") {
  TempDir dir;
  const CommandResult result = run_cli(
      "sweep --n 4 --T 300 --seed 6 --out " + dir.path.string());
  CHECK(result.exit_code == 0);
  const auto lines = csv_lines(read_file(dir.path / "pareto.csv"));
  REQUIRE(lines.size() == 37);  // header + 9 kappas x 4 rules

  // experience mass trends up with kappa, allowing one inversion per rule
  std::map<std::string, std::vector<double>> ue_by_rule;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::string rule, kappa, lw, ue;
    std::getline(row, rule, ',');
    std::getline(row, kappa, ',');
    std::getline(row, lw, ',');
    std::getline(row, ue, ',');
    ue_by_rule[rule].push_back(std::stod(ue));
  }
  for (const auto& [rule, ue] : ue_by_rule) {
    REQUIRE(ue.size() == 9);
    int inversions = 0;
    for (std::size_t i = 0; i + 1 < ue.size(); ++i) {
      if (ue[i + 1] < ue[i]) ++inversions;
    }
    INFO("rule ", rule);
    CHECK(inversions <= 1);
  }
}

TEST_CASE("certify passes on smooth synthetic data") {
  TempDir dir;
  const CommandResult result = run_cli(
      "certify --n 4 --T 200 --seed 11 --out " + dir.path.string());
  CHECK(result.exit_code == 0);
  const json report = read_json(dir.path / "certificate.json");
  CHECK_NOTHROW(lpasim::test::check_schema(
      report, load_schema("certificate.schema.json")));
  CHECK(report.at("status") == "pass");
  CHECK(report.at("verifier").at("pass") == true);
}

TEST_CASE("certify rejects an out-of-range epsilon") {
  TempDir dir;
  CHECK(run_cli("certify --n 2 --T 10 --epsilon 0.6 --out " +
                dir.path.string())
            .exit_code == 1);
}

TEST_CASE("certify warns instead of failing on atom-heavy data") {
  // constant values tie every request; the verifier passes but the gap is
  // genuine, so the report downgrades to a warning
  TempDir dir;
  {
    std::ofstream sellers(dir.path / "sellers.csv");
    sellers << "seller_id,budget,roi\n0,0.3,1\n1,0.3,1\n";
    std::ofstream requests(dir.path / "requests.csv");
    requests << "request_id,seller_id,v,e\n";
    for (int t = 0; t < 4; ++t) {
      requests << t << ",0,1,0\n" << t << ",1,1,0\n";
    }
  }
  const CommandResult result = run_cli(
      "certify --sellers " + (dir.path / "sellers.csv").string() +
      " --requests " + (dir.path / "requests.csv").string() +
      " --beta 1 --kappa 0 --out " + dir.path.string());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("WARN") != std::string::npos);
  const json report = read_json(dir.path / "certificate.json");
  CHECK(report.at("status") == "warn");
  CHECK(report.at("verifier").at("pass") == true);
  CHECK(report.at("tie_rate").get<double>() == 1.0);
}

TEST_CASE("truncation can be disabled for reporting") {
  TempDir dir;
  const CommandResult result = run_cli(
      "compare --n 2 --T 40 --seed 8 --no-truncate --out " +
      dir.path.string());
  CHECK(result.exit_code == 0);
  const json report = read_json(dir.path / "metrics.json");
  CHECK(report.at("truncated") == false);
}

TEST_CASE("ic probe passes on a small grid and rejects bad sellers") {
  TempDir dir;
  const CommandResult ok = run_cli(
      "ic --seller 0 --grid 0.5,1,2 --n 2 --T 30 --seed 4 --out " +
      dir.path.string());
  CHECK(ok.exit_code == 0);
  const json report = read_json(dir.path / "ic_grid.json");
  CHECK(report.at("pass") == true);
  CHECK(report.at("cells").size() == 9);

  CHECK(run_cli("ic --seller 99 --n 2 --T 10 --out " + dir.path.string())
            .exit_code == 1);
  CHECK(run_cli("ic --n 2 --T 10 --out " + dir.path.string()).exit_code == 1);
}

TEST_CASE("bare invocations are usage errors") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("--bogus").exit_code == 1);
  CHECK(run_cli("gen --no-such-flag").exit_code == 1);
}
