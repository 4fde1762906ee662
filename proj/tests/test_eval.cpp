#include <catch2/catch.hpp>

#include "kkb/eval.hpp"
#include "kkb/synth.hpp"
#include "oracles.hpp"

using namespace kkb;

TEST_CASE("accuracy on hand examples") {
  const std::vector<int> truth{0, 1, 1, 1};
  CHECK(clustering_accuracy(truth, truth).accuracy == 1.0);

  const std::vector<int> swapped{1, 0, 0, 0};
  CHECK(clustering_accuracy(swapped, truth).accuracy == 1.0);

  const std::vector<int> pred{0, 0, 1, 1};
  CHECK(clustering_accuracy(pred, truth).accuracy == 0.75);
}

TEST_CASE("accuracy is symmetric and relabel invariant") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 15;
    const int m = 2 + int(seed % 3);
    const std::vector<int> a = oracle::random_partition(n, m, seed);
    const std::vector<int> b = oracle::random_partition(n, m, seed + 100);
    const double forward = clustering_accuracy(a, b).accuracy;
    CHECK(forward == clustering_accuracy(b, a).accuracy);

    std::vector<int> relabeled(n);
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = (i + 1) % m;
    for (int i = 0; i < n; ++i) relabeled[i] = perm[a[i]];
    CHECK(clustering_accuracy(relabeled, b).accuracy == forward);
  }
}

TEST_CASE("balanced binary truth bounds accuracy below by one half") {
  const int n = 16;
  std::vector<int> truth(n);
  for (int i = 0; i < n; ++i) truth[i] = i < n / 2 ? 0 : 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::vector<int> pred = oracle::random_partition(n, 2, 900 + seed);
    CHECK(clustering_accuracy(pred, truth).accuracy >= 0.5);
  }
}

TEST_CASE("assignment search agrees with the factorial search") {
  // force both paths on the same m <= 8 instances by calling the solver
  // directly against the brute-force optimum
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const int n = 40;
    const int m = 3 + int(seed % 4);
    const std::vector<int> pred = oracle::random_partition(n, m, seed);
    const std::vector<int> truth = oracle::random_partition(n, m, seed + 55);

    std::vector<double> confusion(std::size_t(m) * m, 0.0);
    for (int i = 0; i < n; ++i) confusion[std::size_t(pred[i]) * m + truth[i]] += 1.0;
    std::vector<double> cost(confusion.size());
    for (std::size_t i = 0; i < cost.size(); ++i) cost[i] = -confusion[i];
    const std::vector<int> assignment = detail::min_cost_assignment(cost, m);
    double hungarian_matches = 0.0;
    for (int l = 0; l < m; ++l) hungarian_matches += confusion[std::size_t(l) * m + assignment[l]];

    const double brute = clustering_accuracy(pred, truth).accuracy;
    CHECK(hungarian_matches / n == Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("accuracy input validation") {
  const std::vector<int> a{0, 1};
  const std::vector<int> b{0, 1, 1};
  CHECK_THROWS_AS(clustering_accuracy(a, b), validation_error);
  const std::vector<int> neg{0, -1};
  CHECK_THROWS_AS(clustering_accuracy(neg, a), validation_error);
}

TEST_CASE("bicluster accuracy averages the two axes") {
  std::vector<int> truth(8);
  for (int i = 0; i < 8; ++i) truth[i] = i < 4 ? 0 : 1;
  std::vector<int> rows = truth, cols = truth;
  rows[0] = 1;  // one mislabeled row of 8
  cols[5] = 0;  // one mislabeled column of 8
  const AccuracyReport report = bicluster_accuracy(Bipartition{rows, cols, 2}, truth, truth);
  CHECK(report.row_accuracy == 0.875);
  CHECK(report.col_accuracy == 0.875);
  CHECK(report.mean_accuracy == 0.875);
}

TEST_CASE("a single-cell sweep equals the direct fit") {
  const SyntheticData data = gen_scenario({1, 16, 16, 77});
  AkkbConfig cfg;
  cfg.clusters = 2;
  cfg.rounds = 3;
  cfg.restarts = 4;
  cfg.seed = 5;
  const SweepGrid grid =
      bandwidth_sweep(data.matrix, data.row_labels, data.col_labels, cfg, {1.0}, {1.0});
  REQUIRE(grid.mean_accuracy.size() == 1);

  AkkbConfig direct = cfg;
  direct.sigma_data = BandwidthSetting::median(1.0);
  direct.sigma_variables = BandwidthSetting::median(1.0);
  const BiclusterResult fit = akkb_fit(data.matrix, direct);
  const AccuracyReport report =
      bicluster_accuracy(fit.bipartition, data.row_labels, data.col_labels);
  CHECK(grid.mean_accuracy[0] == report.mean_accuracy);
}

TEST_CASE("sweep cells depend only on their multiplier pair") {
  const SyntheticData data = gen_scenario({1, 14, 14, 3});
  AkkbConfig cfg;
  cfg.clusters = 2;
  cfg.rounds = 2;
  cfg.restarts = 3;
  cfg.seed = 21;
  const SweepGrid forward =
      bandwidth_sweep(data.matrix, data.row_labels, data.col_labels, cfg, {0.5, 2.0}, {1.0, 3.0});
  const SweepGrid reversed =
      bandwidth_sweep(data.matrix, data.row_labels, data.col_labels, cfg, {2.0, 0.5}, {3.0, 1.0});
  CHECK(forward.mean_at(0, 0) == reversed.mean_at(1, 1));
  CHECK(forward.mean_at(0, 1) == reversed.mean_at(1, 0));
  CHECK(forward.mean_at(1, 0) == reversed.mean_at(0, 1));
  CHECK(forward.mean_at(1, 1) == reversed.mean_at(0, 0));

  CHECK_THROWS_AS(
      bandwidth_sweep(data.matrix, data.row_labels, data.col_labels, cfg, {}, {1.0}),
      validation_error);
  CHECK_THROWS_AS(
      bandwidth_sweep(data.matrix, data.row_labels, data.col_labels, cfg, {-1.0}, {1.0}),
      validation_error);
}
