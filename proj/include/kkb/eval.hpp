#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

#include "kkb/akkb.hpp"

namespace kkb {

namespace detail {

/// Square min-cost assignment via the Hungarian algorithm with potentials,
/// O(m^3). Returns the column assigned to each row.
inline std::vector<int> min_cost_assignment(const std::vector<double>& cost, int m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0), minv(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  std::vector<bool> used(m + 1, false);
  for (int i = 1; i <= m; ++i) {
    match[0] = i;
    int j0 = 0;
    minv.assign(m + 1, inf);
    used.assign(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[std::size_t(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(m, -1);
  for (int j = 1; j <= m; ++j)
    if (match[j] >= 1) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

struct LabelMatch {
  double accuracy = 0.0;
  std::vector<int> permutation;  // permutation[predicted label] = matched truth label
};

/// Fraction of items whose predicted label matches the truth under the best
/// relabeling of the prediction. Exact: all permutations are tried up to
/// m = 8, an assignment solver takes over beyond that.
inline LabelMatch clustering_accuracy(std::span<const int> predicted,
                                      std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw validation_error(detail::str("accuracy: ", predicted.size(), " predictions vs ",
                                       truth.size(), " truth labels"));
  if (predicted.empty()) throw validation_error("accuracy: empty label vectors");
  int m = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || truth[i] < 0)
      throw validation_error("accuracy: labels must be nonnegative");
    m = std::max({m, predicted[i] + 1, truth[i] + 1});
  }
  std::vector<double> confusion(std::size_t(m) * m, 0.0);
  for (std::size_t i = 0; i < predicted.size(); ++i)
    confusion[std::size_t(predicted[i]) * m + truth[i]] += 1.0;

  LabelMatch best;
  if (m <= 8) {
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = i;
    double top = -1.0;
    do {
      double matches = 0.0;
      for (int l = 0; l < m; ++l) matches += confusion[std::size_t(l) * m + perm[l]];
      if (matches > top) {
        top = matches;
        best.permutation = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    best.accuracy = top / double(predicted.size());
  } else {
    std::vector<double> cost(confusion.size());
    for (std::size_t i = 0; i < confusion.size(); ++i) cost[i] = -confusion[i];
    best.permutation = detail::min_cost_assignment(cost, m);
    double matches = 0.0;
    for (int l = 0; l < m; ++l) matches += confusion[std::size_t(l) * m + best.permutation[l]];
    best.accuracy = matches / double(predicted.size());
  }
  return best;
}

struct AccuracyReport {
  double row_accuracy = 0.0;
  double col_accuracy = 0.0;
  double mean_accuracy = 0.0;
  std::vector<int> row_permutation;
  std::vector<int> col_permutation;
};

inline AccuracyReport bicluster_accuracy(const Bipartition& predicted,
                                         std::span<const int> truth_rows,
                                         std::span<const int> truth_cols) {
  const LabelMatch rows = clustering_accuracy(predicted.row_labels, truth_rows);
  const LabelMatch cols = clustering_accuracy(predicted.col_labels, truth_cols);
  AccuracyReport report;
  report.row_accuracy = rows.accuracy;
  report.col_accuracy = cols.accuracy;
  report.mean_accuracy = 0.5 * (rows.accuracy + cols.accuracy);
  report.row_permutation = rows.permutation;
  report.col_permutation = cols.permutation;
  return report;
}

/// Accuracy over a grid of bandwidth multipliers applied to the per-axis
/// median heuristic. Cell (i, j) is row-major at i * |vars| + j.
struct SweepGrid {
  std::vector<double> multipliers_data;
  std::vector<double> multipliers_vars;
  std::vector<double> mean_accuracy;
  std::vector<double> row_accuracy;
  std::vector<double> col_accuracy;
  double base_sigma_data = 0.0;
  double base_sigma_variables = 0.0;

  double mean_at(int i, int j) const noexcept {
    return mean_accuracy[std::size_t(i) * multipliers_vars.size() + j];
  }
};

/// Fits the full alternating model once per grid cell with
/// sigma_data = a * median(rows) and sigma_variables = b * median(cols),
/// scoring each result against the ground truth. Every cell uses the same
/// seed, so a cell's value depends only on (seed, a, b); cells are
/// independent jobs and may run on any number of workers.
inline SweepGrid bandwidth_sweep(const DataMatrix& m, std::span<const int> truth_rows,
                                 std::span<const int> truth_cols, const AkkbConfig& base,
                                 std::vector<double> multipliers_data,
                                 std::vector<double> multipliers_vars) {
  if (multipliers_data.empty() || multipliers_vars.empty())
    throw validation_error("sweep: multiplier lists must be nonempty");
  for (double v : multipliers_data)
    if (!(v > 0.0)) throw validation_error("sweep: data multipliers must be positive");
  for (double v : multipliers_vars)
    if (!(v > 0.0)) throw validation_error("sweep: variable multipliers must be positive");
  if (base.family != KernelFamily::gaussian)
    throw validation_error("sweep: bandwidth sweep requires the gaussian family");

  SweepGrid grid;
  grid.multipliers_data = std::move(multipliers_data);
  grid.multipliers_vars = std::move(multipliers_vars);
  grid.base_sigma_data = median_heuristic(m, Axis::rows);
  grid.base_sigma_variables = median_heuristic(m, Axis::covariates);
  const int cells = int(grid.multipliers_data.size() * grid.multipliers_vars.size());
  grid.mean_accuracy.assign(cells, 0.0);
  grid.row_accuracy.assign(cells, 0.0);
  grid.col_accuracy.assign(cells, 0.0);

  parallel_for(0, cells, base.threads, [&](int cell) {
    const int i = cell / int(grid.multipliers_vars.size());
    const int j = cell % int(grid.multipliers_vars.size());
    AkkbConfig cfg = base;
    cfg.sigma_data = BandwidthSetting::median(grid.multipliers_data[i]);
    cfg.sigma_variables = BandwidthSetting::median(grid.multipliers_vars[j]);
    cfg.threads = 1;
    const BiclusterResult fit = akkb_fit(m, cfg);
    const AccuracyReport report = bicluster_accuracy(fit.bipartition, truth_rows, truth_cols);
    grid.mean_accuracy[cell] = report.mean_accuracy;
    grid.row_accuracy[cell] = report.row_accuracy;
    grid.col_accuracy[cell] = report.col_accuracy;
  });
  return grid;
}

}  // namespace kkb
