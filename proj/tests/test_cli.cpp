#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>

#ifndef CITEDYN_CLI
#error "CITEDYN_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path root = [] {
    const auto p = fs::temp_directory_path() / ("citedyn_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CITEDYN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string dir(const std::string& name) { return (scratch() / name).string(); }

// The manifest lists the config file, which records the run's own paths;
// compare everything else.
std::string manifest_without_config(const fs::path& run) {
  std::istringstream in(slurp(run / "manifest.json"));
  std::string out, line, prev;
  bool skip = false;
  while (std::getline(in, line)) {
    if (line.find("config.toml") != std::string::npos) skip = true;
    if (!skip) out += line + "\n";
    if (skip && line.find("fnv1a64") != std::string::npos) skip = false;
  }
  return out;
}

const char* kSim = "simulate --journal JA,1,-1.2,0.4,24 --journal JB,3,-1.2,0.4,24 --fixed-beta 1095 "
                   "--first-preprint 2006-01-01 --last-preprint 2006-12-31 --database-end 2012-12-31";

}  // namespace

TEST_CASE("simulate is deterministic for a seed and a persisted config") {
  REQUIRE(run("--seed 3 --out " + dir("sim_a") + " " + kSim) == 0);
  REQUIRE(run("--seed 3 --out " + dir("sim_b") + " " + kSim) == 0);
  REQUIRE(run("--config " + dir("sim_a") + "/config.toml --out " + dir("sim_c") + " simulate") == 0);
  for (const char* f : {"preprints.jsonl", "publications.jsonl", "references.jsonl", "truth.json"}) {
    CHECK(slurp(scratch() / "sim_a" / f) == slurp(scratch() / "sim_b" / f));
    CHECK(slurp(scratch() / "sim_a" / f) == slurp(scratch() / "sim_c" / f));
  }
  CHECK(slurp(scratch() / "sim_a" / "manifest.json") == slurp(scratch() / "sim_b" / "manifest.json"));
  REQUIRE(run("--seed 4 --out " + dir("sim_d") + " " + kSim) == 0);
  CHECK(slurp(scratch() / "sim_a" / "references.jsonl") != slurp(scratch() / "sim_d" / "references.jsonl"));
}

TEST_CASE("a zero latent rate journal yields empty citation files") {
  REQUIRE(run("--out " + dir("sim_zero") + " simulate --journal J0,2,0,0.5,10 --fixed-phi 0 "
              "--noise-references 0") == 0);
  CHECK(slurp(scratch() / "sim_zero" / "references.jsonl").empty());
  CHECK(slurp(scratch() / "sim_zero" / "citations.jsonl").empty());
}

TEST_CASE("ingest, fit, resume and report") {
  REQUIRE(run("--seed 3 --out " + dir("sim") + " " + kSim) == 0);
  REQUIRE(run("--out " + dir("ing") + " ingest --input " + dir("sim") +
              " --subject-threshold 5 --min-articles 5") == 0);
  CHECK(fs::exists(scratch() / "ing" / "subsets.csv"));
  CHECK(fs::exists(scratch() / "ing" / "impact.csv"));

  const std::string fit = " fit --input " + dir("ing") + " --fields Physics --chains 2 --iterations 300";
  REQUIRE(run("--jobs 3 --out " + dir("fit") + fit) == 0);
  int summaries = 0;
  for (const auto& e : fs::recursive_directory_iterator(scratch() / "fit"))
    summaries += e.path().filename() == "summary.json";
  CHECK(summaries == 3);

  // Rerun skips completed subsets, leaving their files untouched.
  const auto before = slurp(scratch() / "fit" / "manifest.json");
  REQUIRE(run("--jobs 3 --out " + dir("fit") + fit) == 0);
  CHECK(slurp(scratch() / "fit" / "manifest.json") == before);

  // Job count does not change any output.
  REQUIRE(run("--jobs 1 --out " + dir("fit1") + fit) == 0);
  CHECK(manifest_without_config(scratch() / "fit") == manifest_without_config(scratch() / "fit1"));

  std::ifstream subsets(scratch() / "ing" / "subsets.csv");
  std::string header, first;
  std::getline(subsets, header);
  std::getline(subsets, first);
  const std::string article = first.substr(first.rfind(',') + 1);
  REQUIRE(run("--out " + dir("rep") + " report --fits " + dir("fit") + " --ingest " + dir("ing") +
              " --articles " + article + " --n-samples 50") == 0);
  CHECK(fs::exists(scratch() / "rep" / "journal_table.csv"));
  CHECK(fs::exists(scratch() / "rep" / "by_field.csv"));
  CHECK(fs::exists(scratch() / "rep" / "by_year.csv"));
  CHECK(fs::exists(scratch() / "rep" / "journal_averages.csv"));
  CHECK(fs::is_directory(scratch() / "rep" / "predictive"));

  CHECK(run("--out " + dir("rep_bad") + " report --fits " + dir("fit") + " --ingest " + dir("ing") +
            " --articles no-such-id") == 2);
}

TEST_CASE("a pathological fit is flagged as excluded") {
  REQUIRE(run("--seed 3 --out " + dir("sim_p") + " " + kSim) == 0);
  REQUIRE(run("--out " + dir("ing_p") + " ingest --input " + dir("sim_p") +
              " --subject-threshold 5 --min-articles 5") == 0);
  // A near-zero acceptance target forces huge steps and energy blow-ups.
  REQUIRE(run("--out " + dir("fit_p") + " fit --input " + dir("ing_p") +
              " --fields Physics --chains 2 --iterations 200 --target-accept 0.01") == 0);
  const auto excluded = slurp(scratch() / "fit_p" / "excluded.csv");
  CHECK(excluded.find("Physics,") != std::string::npos);
}

TEST_CASE("exit codes separate input errors") {
  CHECK(run("--out " + dir("x") + " ingest --input " + dir("does_not_exist")) == 2);
  CHECK(run("--out " + dir("x") + " simulate --first-preprint 2006-02-30") == 2);
  CHECK(run("--out " + dir("x") + " simulate --journal bad") == 2);
  CHECK(run("simulate") == 2);
  CHECK(run("--out " + dir("x") + " fit --input " + dir("ing") + " --years 1990") == 2);
  CHECK(run("--help") == 0);
}
