#include <catch2/catch.hpp>

#include "kkb/synth.hpp"
#include "oracles.hpp"

using namespace kkb;

TEST_CASE("truncated normal samples stay inside the bounds") {
  SplitMix64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double x = sample_truncated_normal(0.0, 1.0, -1.8, 1.8, rng);
    CHECK(x >= -1.8);
    CHECK(x <= 1.8);
  }
  CHECK_THROWS_AS(sample_truncated_normal(0.0, 1.0, 2.0, 1.0, rng), validation_error);
  CHECK_THROWS_AS(sample_truncated_normal(0.0, 0.0, -1.0, 1.0, rng), validation_error);
  CHECK_THROWS_AS(
      sample_truncated_normal(0.0, 1.0, -std::numeric_limits<double>::infinity(), 0.0, rng),
      validation_error);
}

TEST_CASE("truncated normal moments match the closed form") {
  const int draws = 100000;
  SplitMix64 rng(77);
  std::vector<double> xs(draws);
  for (double& x : xs) x = sample_truncated_normal(0.0, 1.0, -1.8, 1.8, rng);
  const oracle::SampleStats stats = oracle::stats(xs);
  const oracle::TruncatedMoments moments = oracle::truncated_normal_moments(-1.8, 1.8);

  // the closed-form variance is 1 - 2 a phi(a) / (2 Phi(a) - 1), about 0.694
  CHECK(moments.variance == Approx(0.6937).margin(5e-4));
  const double se_mean = std::sqrt(moments.variance / draws);
  const double se_var =
      std::sqrt((moments.fourth_central - moments.variance * moments.variance) / draws);
  CHECK(std::abs(stats.mean - moments.mean) <= 3.0 * se_mean);
  CHECK(std::abs(stats.variance - moments.variance) <= 3.0 * se_var);
}

TEST_CASE("scenario generation is bit-reproducible") {
  const ScenarioSpec spec{3, 20, 16, 12345};
  const SyntheticData a = gen_scenario(spec);
  const SyntheticData b = gen_scenario(spec);
  CHECK(a.matrix.values == b.matrix.values);
  CHECK(a.row_labels == b.row_labels);
  CHECK(a.col_labels == b.col_labels);
  CHECK(a.matrix.rows == 20);
  CHECK(a.matrix.layout.covariates == 16);
}

TEST_CASE("scenario truth labels split each axis in half") {
  const SyntheticData data = gen_scenario({1, 10, 6, 4});
  CHECK(data.row_labels == std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  CHECK(data.col_labels == std::vector<int>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("scenario 2 respects the block supports") {
  const SyntheticData data = gen_scenario({2, 60, 60, 9});
  for (int r = 0; r < 60; ++r)
    for (int c = 0; c < 60; ++c) {
      const double v = data.matrix.at(r, c);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      if (r < 30 && c < 30) {
        CHECK(v >= 0.3);
        CHECK(v <= 0.7);
      }
    }
}

TEST_CASE("blocks are driven by independent substreams") {
  // flipping the scenario-1 convention changes only the top-left block
  ScenarioSpec sd{1, 12, 12, 31, true};
  ScenarioSpec var = sd;
  var.normal_param_is_sd = false;
  const SyntheticData a = gen_scenario(sd);
  const SyntheticData b = gen_scenario(var);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 12; ++c) {
      if (r < 6 && c < 6)
        CHECK(a.matrix.at(r, c) != b.matrix.at(r, c));
      else
        CHECK(a.matrix.at(r, c) == b.matrix.at(r, c));
    }
}

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(gen_scenario({4, 10, 10, 0}), validation_error);
  CHECK_THROWS_AS(gen_scenario({0, 10, 10, 0}), validation_error);
  CHECK_THROWS_AS(gen_scenario({1, 9, 10, 0}), validation_error);
  CHECK_THROWS_AS(gen_scenario({1, 10, 7, 0}), validation_error);
}

TEST_CASE("scenario 1 block variances follow the sd convention") {
  const SyntheticData data = gen_scenario({1, 316, 316, 8});
  auto block_variance = [&](int r0, int c0) {
    std::vector<double> xs;
    xs.reserve(158 * 158);
    for (int r = r0; r < r0 + 158; ++r)
      for (int c = c0; c < c0 + 158; ++c) xs.push_back(data.matrix.at(r, c));
    return oracle::stats(xs);
  };
  const int draws = 158 * 158;
  // top-left is N(0, sd 2): variance 4; se(var) uses mu4 - var^2 = 3 s^4 - s^4
  const oracle::SampleStats top_left = block_variance(0, 0);
  CHECK(std::abs(top_left.mean) <= 3.0 * std::sqrt(4.0 / draws));
  CHECK(std::abs(top_left.variance - 4.0) <= 3.0 * std::sqrt((3 * 16.0 - 16.0) / draws));
  // the other blocks are standard normal
  for (auto [r0, c0] : {std::pair{0, 158}, std::pair{158, 0}, std::pair{158, 158}}) {
    const oracle::SampleStats s = block_variance(r0, c0);
    CHECK(std::abs(s.mean) <= 3.0 * std::sqrt(1.0 / draws));
    CHECK(std::abs(s.variance - 1.0) <= 3.0 * std::sqrt(2.0 / draws));
  }

  // under the variance convention the top-left block has variance 2
  ScenarioSpec var_spec{1, 316, 316, 8, false};
  const SyntheticData var_data = gen_scenario(var_spec);
  std::vector<double> xs;
  for (int r = 0; r < 158; ++r)
    for (int c = 0; c < 158; ++c) xs.push_back(var_data.matrix.at(r, c));
  const oracle::SampleStats s = oracle::stats(xs);
  CHECK(std::abs(s.variance - 2.0) <= 3.0 * std::sqrt((3 * 4.0 - 4.0) / draws));
}
