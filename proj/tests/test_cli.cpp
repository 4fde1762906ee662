#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kkb/csv.hpp"
#include "kkb/synth.hpp"
#include "oracles.hpp"

#ifdef _WIN32
#error "posix only"
#endif
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(KKB_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("kkb_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace

TEST_CASE("simulate writes matrix, labels and manifest deterministically") {
  TempDir dir("simulate");
  const std::string out_a = (dir / "a").string();
  const std::string out_b = (dir / "b").string();
  const std::string args = "simulate --scenario 1 --n 40 --p 40 --seed 7 --out-dir ";
  REQUIRE(run_cli(args + out_a, dir / "log_a.txt") == 0);
  REQUIRE(run_cli(args + out_b, dir / "log_b.txt") == 0);

  const kkb::DataMatrix m = kkb::csv::read_matrix(dir / "a" / "matrix.csv");
  CHECK(m.rows == 40);
  CHECK(m.layout.covariates == 40);
  CHECK(kkb::csv::read_labels(dir / "a" / "truth_rows.csv").size() == 40);
  CHECK(kkb::csv::read_labels(dir / "a" / "truth_cols.csv").size() == 40);
  CHECK(fs::exists(dir / "a" / "simulate_manifest.json"));

  CHECK(slurp(dir / "a" / "matrix.csv") == slurp(dir / "b" / "matrix.csv"));
  CHECK(slurp(dir / "a" / "truth_rows.csv") == slurp(dir / "b" / "truth_rows.csv"));
}

TEST_CASE("simulate rejects unknown scenarios with a usage error") {
  TempDir dir("badscenario");
  const int code = run_cli("simulate --scenario 4 --out-dir " + (dir / "out").string(),
                           dir / "log.txt");
  CHECK(code == 1);
  const std::string log = slurp(dir / "log.txt");
  CHECK(log.find("{1, 2, 3}") != std::string::npos);
}

TEST_CASE("bicluster recovers the checkerboard duplicate fixture from a file") {
  TempDir dir("bicluster");
  std::vector<double> grid;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) grid.push_back(((r < 4) == (c < 4)) ? 0.0 : 1.0);
  const kkb::DataMatrix fixture = kkb::build_matrix(grid, 8, kkb::CovariateLayout{8, 1});
  kkb::csv::write_matrix(dir / "matrix.csv", fixture);

  const std::string out = (dir / "out").string();
  REQUIRE(run_cli("bicluster --input " + (dir / "matrix.csv").string() +
                      " --clusters 2 --rounds 4 --restarts 6 --seed 3 --out-dir " + out,
                  dir / "log.txt") == 0);

  const std::vector<int> rows = kkb::csv::read_labels(dir / "out" / "row_labels.csv");
  const std::vector<int> cols = kkb::csv::read_labels(dir / "out" / "col_labels.csv");
  const std::vector<int> truth{0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(kkb::clustering_accuracy(rows, truth).accuracy == 1.0);
  CHECK(kkb::clustering_accuracy(cols, truth).accuracy == 1.0);
  CHECK(fs::exists(dir / "out" / "history.csv"));
}

TEST_CASE("bicluster requires either a file or a scenario, not both") {
  TempDir dir("bicmode");
  CHECK(run_cli("bicluster --clusters 2", dir / "log1.txt") == 1);
  CHECK(run_cli("bicluster --clusters 2 --input x.csv --scenario 1", dir / "log2.txt") == 1);
}

TEST_CASE("bicluster reports missing input files on exit code 2") {
  TempDir dir("missing");
  const int code =
      run_cli("bicluster --input " + (dir / "absent.csv").string() + " --clusters 2",
              dir / "log.txt");
  CHECK(code == 2);
  CHECK(slurp(dir / "log.txt").find("absent.csv") != std::string::npos);
}

TEST_CASE("cluster separates two blobs and matches its transposed run") {
  TempDir dir("cluster");
  kkb::SplitMix64 rng(9);
  std::vector<double> grid;
  const int per_blob = 10;
  for (int i = 0; i < 2 * per_blob; ++i) {
    const double shift = i < per_blob ? -4.0 : 4.0;
    grid.push_back(shift + 0.3 * rng.normal());
    grid.push_back(shift + 0.3 * rng.normal());
  }
  const kkb::DataMatrix blobs = kkb::build_matrix(grid, 2 * per_blob, kkb::CovariateLayout{2, 1});
  kkb::csv::write_matrix(dir / "blobs.csv", blobs);
  kkb::csv::write_matrix(dir / "blobs_t.csv", kkb::transpose_roles(blobs));

  REQUIRE(run_cli("cluster --input " + (dir / "blobs.csv").string() +
                      " --clusters 2 --restarts 5 --seed 2 --out-dir " + (dir / "a").string(),
                  dir / "log_a.txt") == 0);
  const std::vector<int> labels = kkb::csv::read_labels(dir / "a" / "labels.csv");
  std::vector<int> truth(2 * per_blob, 0);
  for (int i = per_blob; i < 2 * per_blob; ++i) truth[i] = 1;
  CHECK(kkb::clustering_accuracy(labels, truth).accuracy == 1.0);

  // --axis cols on the original equals --axis rows on the transposed file
  REQUIRE(run_cli("cluster --input " + (dir / "blobs_t.csv").string() +
                      " --axis cols --clusters 2 --restarts 5 --seed 2 --out-dir " +
                      (dir / "b").string(),
                  dir / "log_b.txt") == 0);
  CHECK(slurp(dir / "a" / "labels.csv") == slurp(dir / "b" / "labels.csv"));
}

TEST_CASE("cluster rejects more clusters than items") {
  TempDir dir("toofew");
  const kkb::DataMatrix tiny = oracle::random_matrix(3, 2, 4);
  kkb::csv::write_matrix(dir / "tiny.csv", tiny);
  const int code = run_cli("cluster --input " + (dir / "tiny.csv").string() + " --clusters 5",
                           dir / "log.txt");
  CHECK(code == 2);
}

TEST_CASE("evaluate prints the permutation-maximized accuracy") {
  TempDir dir("evaluate");
  kkb::csv::write_labels(dir / "pred.csv", {0, 0, 1, 1});
  kkb::csv::write_labels(dir / "truth.csv", {0, 1, 1, 1});
  kkb::csv::write_labels(dir / "same.csv", {1, 0, 0, 0});

  REQUIRE(run_cli("evaluate --pred " + (dir / "pred.csv").string() + " --truth " +
                      (dir / "truth.csv").string(),
                  dir / "log.txt") == 0);
  CHECK(slurp(dir / "log.txt").find("0.75") != std::string::npos);

  // label-swapped copies score 1
  REQUIRE(run_cli("evaluate --pred " + (dir / "same.csv").string() + " --truth " +
                      (dir / "truth.csv").string(),
                  dir / "log2.txt") == 0);
  CHECK(slurp(dir / "log2.txt").find("1.0") != std::string::npos);

  kkb::csv::write_labels(dir / "short.csv", {0, 1});
  CHECK(run_cli("evaluate --pred " + (dir / "short.csv").string() + " --truth " +
                    (dir / "truth.csv").string(),
                dir / "log3.txt") == 2);
}

TEST_CASE("sweep writes a well-formed grid") {
  TempDir dir("sweep");
  const kkb::SyntheticData data = kkb::gen_scenario({1, 16, 16, 5});
  kkb::csv::write_matrix(dir / "matrix.csv", data.matrix);
  kkb::csv::write_labels(dir / "rows.csv", data.row_labels);
  kkb::csv::write_labels(dir / "cols.csv", data.col_labels);

  REQUIRE(run_cli("sweep --input " + (dir / "matrix.csv").string() + " --truth-rows " +
                      (dir / "rows.csv").string() + " --truth-cols " +
                      (dir / "cols.csv").string() +
                      " --clusters 2 --rounds 2 --restarts 3 --multipliers-data 0.5,2"
                      " --multipliers-vars 1 --seed 4 --out-dir " +
                      (dir / "out").string(),
                  dir / "log.txt") == 0);
  const std::string grid = slurp(dir / "out" / "grid.csv");
  CHECK(grid.find("data_mult") == 0);
  CHECK(std::count(grid.begin(), grid.end(), '\n') == 3);  // header + two multiplier rows
  CHECK(fs::exists(dir / "out" / "grid.json"));
}

TEST_CASE("rerun reproduces outputs bit for bit") {
  TempDir dir("rerun");
  const std::string first = (dir / "first").string();
  REQUIRE(run_cli("bicluster --scenario 2 --n 16 --p 16 --trials 2 --clusters 2 --rounds 3"
                  " --restarts 4 --seed 11 --out-dir " +
                      first,
                  dir / "log.txt") == 0);
  const std::string replay = (dir / "replay").string();
  REQUIRE(run_cli("rerun " + (dir / "first" / "bicluster_manifest.json").string() +
                      " --out-dir " + replay,
                  dir / "log2.txt") == 0);
  CHECK(slurp(dir / "first" / "trials.csv") == slurp(dir / "replay" / "trials.csv"));
  CHECK(slurp(dir / "first" / "summary.csv") == slurp(dir / "replay" / "summary.csv"));

  // the same holds for simulate outputs
  REQUIRE(run_cli("simulate --scenario 3 --n 12 --p 14 --seed 9 --out-dir " +
                      (dir / "sim").string(),
                  dir / "log3.txt") == 0);
  REQUIRE(run_cli("rerun " + (dir / "sim" / "simulate_manifest.json").string() + " --out-dir " +
                      (dir / "sim2").string(),
                  dir / "log4.txt") == 0);
  CHECK(slurp(dir / "sim" / "matrix.csv") == slurp(dir / "sim2" / "matrix.csv"));
}

TEST_CASE("matrix CSV round trips at full precision") {
  TempDir dir("roundtrip");
  kkb::SplitMix64 rng(31337);
  std::vector<double> values(6 * 8);
  for (double& v : values) v = rng.normal() * std::pow(10.0, rng.uniform(-8.0, 8.0));
  const kkb::DataMatrix m = kkb::build_matrix(values, 6, kkb::CovariateLayout{4, 2});
  kkb::csv::write_matrix(dir / "m.csv", m);
  const kkb::DataMatrix back = kkb::csv::read_matrix(dir / "m.csv", 2, 4);
  CHECK(back.values == m.values);
  CHECK(back.layout.grid_width == 2);

  // malformed cells are reported with their position
  std::ofstream bad(dir / "bad.csv");
  bad << "1,2\n3,oops\n";
  bad.close();
  try {
    kkb::csv::read_matrix(dir / "bad.csv");
    FAIL("expected io_error");
  } catch (const kkb::io_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
}

TEST_CASE("degenerate median data exits with code 3") {
  TempDir dir("degenerate");
  const kkb::DataMatrix flat =
      kkb::build_matrix(std::vector<double>(5 * 4, 1.0), 5, kkb::CovariateLayout{4, 1});
  kkb::csv::write_matrix(dir / "flat.csv", flat);
  const int code = run_cli("cluster --input " + (dir / "flat.csv").string() + " --clusters 2",
                           dir / "log.txt");
  CHECK(code == 3);
}
