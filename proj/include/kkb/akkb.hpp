#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kkb/kgroups.hpp"

namespace kkb {

/// How a per-level bandwidth is chosen: a multiple of the median heuristic
/// computed once on the full data, or an explicit value.
struct BandwidthSetting {
  bool use_median = true;
  double multiplier = 1.0;
  double value = 0.0;

  static BandwidthSetting median(double mult = 1.0) { return {true, mult, 0.0}; }
  static BandwidthSetting explicit_value(double sigma) { return {false, 1.0, sigma}; }
};

struct AkkbConfig {
  int clusters = 2;    // m, shared by both axes
  int rounds = 20;     // T
  int restarts = 100;  // R per kernel-k-groups invocation
  KernelFamily family = KernelFamily::gaussian;
  BandwidthSetting sigma_data{};
  BandwidthSetting sigma_variables{};
  bool phase_restarts = true;  // fresh starts inside row/col updates besides the warm start
  int max_sweeps = 1000;
  double accept_tol = 1e-12;
  std::uint64_t seed = 0;
  int threads = 1;
};

inline void validate(const AkkbConfig& cfg) {
  if (cfg.clusters < 2) throw validation_error("akkb: cluster count must be >= 2");
  if (cfg.rounds < 1) throw validation_error("akkb: rounds must be >= 1");
  if (cfg.restarts < 1) throw validation_error("akkb: restarts must be >= 1");
  if (!cfg.sigma_data.use_median && cfg.family == KernelFamily::gaussian &&
      !(cfg.sigma_data.value > 0.0))
    throw validation_error("akkb: explicit data bandwidth must be positive");
  if (!cfg.sigma_variables.use_median && cfg.family == KernelFamily::gaussian &&
      !(cfg.sigma_variables.value > 0.0))
    throw validation_error("akkb: explicit variable bandwidth must be positive");
}

struct HalfStep {
  Axis axis = Axis::rows;
  int round = 0;  // 0 for the two init phases
  double objective_before = 0.0;
  double objective_after = 0.0;
  long moves = 0;
  int sweeps = 0;
  int best_start = 0;        // winning start; 0 is the warm start in update phases
  int min_cluster_size = 0;  // smallest cluster on the updated axis afterwards
};

struct BiclusterResult {
  Bipartition bipartition;
  std::vector<HalfStep> history;
  bool converged = false;
  int rounds_run = 0;
  KernelSpec kernel_data;       // resolved, bandwidth included
  KernelSpec kernel_variables;
  std::vector<RestartRecord> init_row_restarts;
  std::vector<RestartRecord> init_col_restarts;
  std::vector<std::pair<std::string, double>> phase_seconds;
};

struct ResolvedKernels {
  KernelSpec data;
  KernelSpec variables;
};

/// Freezes both bandwidths for the whole fit. Median-based settings read the
/// heuristic off the full data once per axis; they are never re-estimated per
/// cluster or per round.
inline ResolvedKernels resolve_bandwidths(const DataMatrix& m, const AkkbConfig& cfg) {
  auto resolve = [&](const BandwidthSetting& setting, Axis axis) {
    KernelSpec spec;
    spec.family = cfg.family;
    if (cfg.family == KernelFamily::linear) return spec;
    if (setting.use_median) {
      if (!(setting.multiplier > 0.0))
        throw validation_error("akkb: median multiplier must be positive");
      spec.sigma = setting.multiplier * median_heuristic(m, axis);
      spec.median_based = true;
      spec.median_multiplier = setting.multiplier;
    } else {
      spec.sigma = setting.value;
    }
    validate(spec);
    return spec;
  };
  return ResolvedKernels{resolve(cfg.sigma_data, Axis::rows),
                         resolve(cfg.sigma_variables, Axis::covariates)};
}

namespace detail {

inline int min_cluster_size(const std::vector<int>& labels, int clusters) {
  std::vector<int> counts(clusters, 0);
  for (int l : labels) ++counts[l];
  int least = labels.empty() ? 0 : int(labels.size());
  for (int c : counts) least = std::min(least, c);
  return least;
}

inline KGroupsOptions phase_options(const AkkbConfig& cfg, int restarts, std::uint64_t stream) {
  KGroupsOptions opts;
  opts.clusters = cfg.clusters;
  opts.restarts = restarts;
  opts.max_sweeps = cfg.max_sweeps;
  opts.accept_tol = cfg.accept_tol;
  opts.seed = stream;
  opts.threads = cfg.threads;
  return opts;
}

inline HalfStep to_half_step(const KGroupsResult& result, Axis axis, int round, int clusters) {
  const RestartRecord& best = result.restarts[result.best_restart];
  HalfStep step;
  step.axis = axis;
  step.round = round;
  step.objective_before = result.restarts.front().initial_objective;
  step.objective_after = result.objective;
  step.moves = best.moves;
  step.sweeps = best.sweeps;
  step.best_start = result.best_restart;
  step.min_cluster_size = min_cluster_size(result.labels, clusters);
  return step;
}

/// Shared body of the two update phases: items of `m`'s row axis are
/// re-clustered under per-cluster kernels, cluster l's kernel living on the
/// feature subset {f : feature_labels[f] == l}.
inline KGroupsResult local_kernel_update(const DataMatrix& m,
                                         const std::vector<int>& feature_labels,
                                         const std::vector<int>& item_labels,
                                         const AkkbConfig& cfg, const KernelSpec& kernel,
                                         std::uint64_t stream) {
  if (int(feature_labels.size()) != m.layout.covariates)
    throw validation_error("akkb update: feature label count does not match matrix");
  if (int(item_labels.size()) != m.rows)
    throw validation_error("akkb update: item label count does not match matrix");
  validate_labels(item_labels, cfg.clusters, "akkb update items");
  std::vector<std::vector<int>> subsets(cfg.clusters);
  for (int f = 0; f < int(feature_labels.size()); ++f) {
    const int l = feature_labels[f];
    if (l < 0 || l >= cfg.clusters)
      throw validation_error("akkb update: feature label outside cluster range");
    subsets[l].push_back(f);
  }
  for (int l = 0; l < cfg.clusters; ++l)
    if (subsets[l].empty())
      throw validation_error(kkb::detail::str("akkb update: feature cluster ", l, " is empty"));

  std::vector<GramMatrix> grams(cfg.clusters);
  parallel_for(0, cfg.clusters, cfg.threads, [&](int l) {
    grams[l] = gram_matrix(m, Axis::rows, subsets[l], kernel);
  });
  const int restarts = cfg.phase_restarts ? cfg.restarts : 1;
  return kernel_kgroups(KernelSource::per_cluster(std::move(grams)),
                        phase_options(cfg, restarts, stream), &item_labels);
}

}  // namespace detail

struct PhaseOutcome {
  std::vector<int> labels;
  HalfStep step;
};

/// Re-clusters the rows given covariate clusters: cluster l's kernel is the
/// data-level kernel restricted to covariate set l. Warm-started from the
/// incumbent row labels; with phase_restarts, R-1 fresh random starts compete
/// and the best local objective wins.
inline PhaseOutcome row_update(const DataMatrix& m, const std::vector<int>& col_labels,
                               const std::vector<int>& row_labels, const AkkbConfig& cfg,
                               const KernelSpec& data_kernel, std::uint64_t stream, int round = 0) {
  const KGroupsResult result =
      detail::local_kernel_update(m, col_labels, row_labels, cfg, data_kernel, stream);
  return PhaseOutcome{result.labels,
                      detail::to_half_step(result, Axis::rows, round, cfg.clusters)};
}

/// Mirror image of row_update on the transposed matrix: covariates are
/// re-clustered under per-cluster kernels over the current row clusters.
inline PhaseOutcome col_update(const DataMatrix& m, const std::vector<int>& col_labels,
                               const std::vector<int>& row_labels, const AkkbConfig& cfg,
                               const KernelSpec& variables_kernel, std::uint64_t stream,
                               int round = 0) {
  const DataMatrix transposed = transpose_roles(m);
  const KGroupsResult result =
      detail::local_kernel_update(transposed, row_labels, col_labels, cfg, variables_kernel, stream);
  return PhaseOutcome{result.labels,
                      detail::to_half_step(result, Axis::covariates, round, cfg.clusters)};
}

/// Independent flat clusterings of both axes under their full-feature kernels,
/// R restarts each. Substreams 0 and 1 of the seed drive the two phases.
inline Bipartition akkb_init(const DataMatrix& m, const AkkbConfig& cfg,
                             const ResolvedKernels& kernels,
                             std::vector<RestartRecord>* row_log = nullptr,
                             std::vector<RestartRecord>* col_log = nullptr,
                             std::vector<HalfStep>* history = nullptr) {
  validate(cfg);
  if (m.rows < cfg.clusters || m.layout.covariates < cfg.clusters)
    throw validation_error(detail::str("akkb: both axes need at least ", cfg.clusters,
                                       " items; matrix is ", m.rows, " x ",
                                       m.layout.covariates));
  const KGroupsResult rows = kernel_kgroups(
      m, Axis::rows, kernels.data, detail::phase_options(cfg, cfg.restarts, SplitMix64::derive(cfg.seed, 0)));
  const KGroupsResult cols =
      kernel_kgroups(transpose_roles(m), Axis::rows, kernels.variables,
                     detail::phase_options(cfg, cfg.restarts, SplitMix64::derive(cfg.seed, 1)));
  if (row_log) *row_log = rows.restarts;
  if (col_log) *col_log = cols.restarts;
  if (history) {
    history->push_back(detail::to_half_step(rows, Axis::rows, 0, cfg.clusters));
    history->push_back(detail::to_half_step(cols, Axis::covariates, 0, cfg.clusters));
  }
  return Bipartition{rows.labels, cols.labels, cfg.clusters};
}

/// Full alternating fit: initialize both axes, then alternate row and column
/// updates for up to `rounds` rounds, stopping early once a whole round
/// changes neither label vector. Bandwidths are frozen up front; substream
/// 2t (rows) and 2t+1 (columns) of the seed drive round t.
inline BiclusterResult akkb_fit(const DataMatrix& m, const AkkbConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto seconds_since = [](clock::time_point start) {
    return std::chrono::duration<double>(clock::now() - start).count();
  };

  BiclusterResult result;
  auto t0 = clock::now();
  const ResolvedKernels kernels = resolve_bandwidths(m, cfg);
  result.kernel_data = kernels.data;
  result.kernel_variables = kernels.variables;
  result.phase_seconds.emplace_back("bandwidths", seconds_since(t0));

  t0 = clock::now();
  Bipartition bp = akkb_init(m, cfg, kernels, &result.init_row_restarts,
                             &result.init_col_restarts, &result.history);
  result.phase_seconds.emplace_back("init", seconds_since(t0));

  double row_seconds = 0.0, col_seconds = 0.0;
  for (int round = 1; round <= cfg.rounds; ++round) {
    result.rounds_run = round;

    t0 = clock::now();
    PhaseOutcome rows = row_update(m, bp.col_labels, bp.row_labels, cfg, kernels.data,
                                   SplitMix64::derive(cfg.seed, std::uint64_t(2 * round)), round);
    row_seconds += seconds_since(t0);

    t0 = clock::now();
    PhaseOutcome cols =
        col_update(m, bp.col_labels, rows.labels, cfg, kernels.variables,
                   SplitMix64::derive(cfg.seed, std::uint64_t(2 * round + 1)), round);
    col_seconds += seconds_since(t0);

    const bool unchanged = rows.labels == bp.row_labels && cols.labels == bp.col_labels;
    bp.row_labels = std::move(rows.labels);
    bp.col_labels = std::move(cols.labels);
    result.history.push_back(rows.step);
    result.history.push_back(cols.step);
    if (unchanged) {
      result.converged = true;
      break;
    }
  }
  result.phase_seconds.emplace_back("row_updates", row_seconds);
  result.phase_seconds.emplace_back("col_updates", col_seconds);

  validate_bipartition(bp, m.rows, m.layout.covariates);
  result.bipartition = std::move(bp);
  return result;
}

/// Mean centered dispersion of the current biclustering, evaluated at the
/// cluster kernel means: (1/n) [ sum_x k_{l(x)}(x,x) - sum_l Q_l / n_l ].
/// Zero exactly when every cluster's members coincide on its feature subset.
inline double empirical_risk(const DataMatrix& m, const Bipartition& bp,
                             const KernelSpec& data_kernel) {
  validate_bipartition(bp, m.rows, m.layout.covariates);
  std::vector<std::vector<int>> subsets(bp.clusters);
  for (int f = 0; f < m.layout.covariates; ++f) subsets[bp.col_labels[f]].push_back(f);
  std::vector<std::vector<int>> members(bp.clusters);
  for (int r = 0; r < m.rows; ++r) members[bp.row_labels[r]].push_back(r);

  double diag_total = 0.0, coherence = 0.0;
  for (int l = 0; l < bp.clusters; ++l) {
    const SubsetView view(m, Axis::rows, subsets[l]);
    double q = 0.0;
    for (int a : members[l]) {
      diag_total += kernel_diag(view, a, data_kernel);
      for (int b : members[l])
        q += (a == b) ? kernel_diag(view, a, data_kernel) : kernel_value(view, a, b, data_kernel);
    }
    coherence += q / double(members[l].size());
  }
  return (diag_total - coherence) / m.rows;
}

}  // namespace kkb
