#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "kkb/data_model.hpp"
#include "kkb/rng.hpp"

namespace kkb {

/// Built-in 2 x 2 block benchmark scenarios (d = 1). Each axis splits in
/// half; only the block distributions differ:
///   1: top-left N(0, sd 2), elsewhere N(0, 1) -- a pure variance contrast
///   2: top-left Unif(0.3, 0.7), elsewhere Unif(0, 1)
///   3: top-left Unif(-sqrt 3, sqrt 3), bottom-right N(0, 1), off-diagonal
///      blocks truncated N(0,1) on [-1.8, 1.8] plus Unif(-0.5, 0.5)
struct ScenarioSpec {
  int id = 1;
  int n = 200;
  int p = 200;
  std::uint64_t seed = 0;
  /// Read the second parameter of the scenario-1 normal as the standard
  /// deviation; when false it is taken as the variance instead.
  bool normal_param_is_sd = true;
};

struct SyntheticData {
  DataMatrix matrix;
  std::vector<int> row_labels;
  std::vector<int> col_labels;
};

/// N(mean, sd^2) conditioned on [lo, hi] by rejection.
inline double sample_truncated_normal(double mean, double sd, double lo, double hi,
                                      SplitMix64& rng) {
  if (!(sd > 0.0)) throw validation_error("truncated normal: sd must be positive");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw validation_error("truncated normal: bounds must be finite with lo < hi");
  for (long attempt = 0; attempt < 100000000L; ++attempt) {
    const double x = rng.normal(mean, sd);
    if (x >= lo && x <= hi) return x;
  }
  throw degenerate_data_error("truncated normal: acceptance region too far in the tail");
}

/// Generates one scenario draw. The four blocks are filled row-major from
/// independent substreams (block index 2*row_half + col_half), so a change to
/// one block's distribution leaves the others bit-identical under the same
/// seed, and the whole matrix is bit-reproducible from (spec, seed).
inline SyntheticData gen_scenario(const ScenarioSpec& spec) {
  if (spec.id < 1 || spec.id > 3)
    throw validation_error(detail::str("scenario: id ", spec.id, " not in {1, 2, 3}"));
  if (spec.n < 2 || spec.p < 2 || spec.n % 2 != 0 || spec.p % 2 != 0)
    throw validation_error("scenario: n and p must be even and >= 2");

  const double sqrt3 = std::sqrt(3.0);
  const double scenario1_sd = spec.normal_param_is_sd ? 2.0 : std::sqrt(2.0);
  auto draw = [&](int block, SplitMix64& rng) -> double {
    const bool top_left = block == 0;
    switch (spec.id) {
      case 1:
        return rng.normal(0.0, top_left ? scenario1_sd : 1.0);
      case 2:
        return top_left ? rng.uniform(0.3, 0.7) : rng.uniform(0.0, 1.0);
      default:
        if (block == 0) return rng.uniform(-sqrt3, sqrt3);
        if (block == 3) return rng.normal();
        return sample_truncated_normal(0.0, 1.0, -1.8, 1.8, rng) + rng.uniform(-0.5, 0.5);
    }
  };

  std::vector<double> values(std::size_t(spec.n) * spec.p);
  const int half_n = spec.n / 2, half_p = spec.p / 2;
  for (int block = 0; block < 4; ++block) {
    SplitMix64 rng(SplitMix64::derive(spec.seed, std::uint64_t(block)));
    const int r0 = (block / 2) * half_n;
    const int c0 = (block % 2) * half_p;
    for (int r = r0; r < r0 + half_n; ++r)
      for (int c = c0; c < c0 + half_p; ++c)
        values[std::size_t(r) * spec.p + c] = draw(block, rng);
  }

  SyntheticData data;
  data.matrix = build_matrix(std::move(values), spec.n, CovariateLayout{spec.p, 1});
  data.row_labels.assign(spec.n, 0);
  for (int r = half_n; r < spec.n; ++r) data.row_labels[r] = 1;
  data.col_labels.assign(spec.p, 0);
  for (int c = half_p; c < spec.p; ++c) data.col_labels[c] = 1;
  return data;
}

}  // namespace kkb
