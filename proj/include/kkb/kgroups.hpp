#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "kkb/kernels.hpp"
#include "kkb/rng.hpp"

namespace kkb {

/// Cluster-indexed kernel lookup. Flat clustering shares one Gram matrix
/// across all clusters; the biclustering half-steps give every cluster its
/// own Gram built over that cluster's active features.
class KernelSource {
 public:
  static KernelSource shared(GramMatrix gram, int clusters) {
    auto holder = std::make_shared<const GramMatrix>(std::move(gram));
    KernelSource src;
    src.items_ = holder->size;
    src.grams_.assign(clusters, holder);
    return src;
  }

  static KernelSource per_cluster(std::vector<GramMatrix> grams) {
    if (grams.empty()) throw validation_error("kernel source: no clusters");
    KernelSource src;
    src.items_ = grams.front().size;
    for (auto& g : grams) {
      if (g.size != src.items_)
        throw validation_error("kernel source: cluster grams disagree on item count");
      src.grams_.push_back(std::make_shared<const GramMatrix>(std::move(g)));
    }
    return src;
  }

  int items() const noexcept { return items_; }
  int clusters() const noexcept { return int(grams_.size()); }
  double value(int cluster, int a, int b) const noexcept { return grams_[cluster]->at(a, b); }
  double diag(int cluster, int a) const noexcept { return grams_[cluster]->diag(a); }
  const GramMatrix& gram(int cluster) const noexcept { return *grams_[cluster]; }

 private:
  std::vector<std::shared_ptr<const GramMatrix>> grams_;
  int items_ = 0;
};

/// Single-point relocation and its objective gain.
struct MoveDelta {
  int datum = -1;
  int source = -1;
  int target = -1;
  double delta = 0.0;
};

/// Mutable clustering workspace for Hartigan-style single-point moves on the
/// objective J = sum_l Q_l / n_l, where Q_l is cluster l's within dispersion
/// (the sum of its kernel evaluations over ordered member pairs, under
/// cluster l's own kernel). Keeps Q_l and the per-item cross sums
/// Q_l(x) = sum_{y in C_l} k_l(x, y) incrementally up to date, so evaluating
/// a move is O(1) and applying one is O(n).
class ClusterState {
 public:
  ClusterState(KernelSource kernels, std::vector<int> labels)
      : kernels_(std::move(kernels)), labels_(std::move(labels)) {
    const int n = kernels_.items();
    const int m = kernels_.clusters();
    if (int(labels_.size()) != n)
      throw validation_error("cluster state: label count does not match kernel source");
    validate_labels(labels_, m, "cluster state");
    sizes_.assign(m, 0);
    for (int l : labels_) ++sizes_[l];
    cross_sums_.assign(std::size_t(n) * m, 0.0);
    for (int y = 0; y < n; ++y) {
      const int l = labels_[y];
      for (int x = 0; x < n; ++x)
        cross_sums_[std::size_t(x) * m + l] += kernels_.value(l, x, y);
    }
    dispersion_.assign(m, 0.0);
    for (int x = 0; x < n; ++x) dispersion_[labels_[x]] += cross_sums_[std::size_t(x) * m + labels_[x]];
  }

  int items() const noexcept { return kernels_.items(); }
  int clusters() const noexcept { return kernels_.clusters(); }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int size_of(int cluster) const noexcept { return sizes_[cluster]; }
  double dispersion(int cluster) const noexcept { return dispersion_[cluster]; }
  double cross_sum(int datum, int cluster) const noexcept {
    return cross_sums_[std::size_t(datum) * clusters() + cluster];
  }
  const KernelSource& kernels() const noexcept { return kernels_; }

  double objective() const noexcept {
    double j = 0.0;
    for (int l = 0; l < clusters(); ++l) j += dispersion_[l] / sizes_[l];
    return j;
  }

  /// Gain of moving `datum` from its cluster j to `target` l:
  ///   Q+_l / (n_l + 1) + Q-_j / (n_j - 1) - Q_l / n_l - Q_j / n_j
  /// with Q+_l = Q_l + 2 Q_l(x) + k_l(x,x) and Q-_j = Q_j - 2 Q_j(x) + k_j(x,x).
  /// A singleton source would empty its cluster, which the sweep never allows;
  /// allow_emptying computes the value anyway, with the emptied cluster
  /// contributing exactly zero.
  MoveDelta move_delta(int datum, int target, bool allow_emptying = false) const {
    const int source = labels_[datum];
    if (target == source) throw validation_error("move: target equals source cluster");
    if (target < 0 || target >= clusters())
      throw validation_error("move: target cluster out of range");
    if (sizes_[source] < 2 && !allow_emptying)
      throw validation_error("move: source cluster is a singleton");
    return MoveDelta{datum, source, target, gain(datum, source, target)};
  }

  void apply(const MoveDelta& move) {
    const int m = clusters();
    const int x = move.datum;
    const int j = move.source;
    const int l = move.target;
    if (labels_[x] != j || j == l) throw validation_error("move: stale or invalid");
    if (sizes_[j] < 2) throw validation_error("move: source cluster is a singleton");
    dispersion_[l] += 2.0 * cross_sums_[std::size_t(x) * m + l] + kernels_.diag(l, x);
    dispersion_[j] += -2.0 * cross_sums_[std::size_t(x) * m + j] + kernels_.diag(j, x);
    for (int y = 0; y < items(); ++y) {
      cross_sums_[std::size_t(y) * m + l] += kernels_.value(l, x, y);
      cross_sums_[std::size_t(y) * m + j] -= kernels_.value(j, x, y);
    }
    --sizes_[j];
    ++sizes_[l];
    labels_[x] = l;
  }

 private:
  double gain(int x, int j, int l) const noexcept {
    const int m = clusters();
    const double q_plus =
        dispersion_[l] + 2.0 * cross_sums_[std::size_t(x) * m + l] + kernels_.diag(l, x);
    double removed = 0.0;
    if (sizes_[j] >= 2) {
      const double q_minus =
          dispersion_[j] - 2.0 * cross_sums_[std::size_t(x) * m + j] + kernels_.diag(j, x);
      removed = q_minus / (sizes_[j] - 1);
    }
    return q_plus / (sizes_[l] + 1) + removed - dispersion_[l] / sizes_[l] -
           dispersion_[j] / sizes_[j];
  }

  KernelSource kernels_;
  std::vector<int> labels_;
  std::vector<int> sizes_;
  std::vector<double> dispersion_;
  std::vector<double> cross_sums_;
};

/// One pass over the data in index order. For each datum the best-gain
/// destination is taken (lowest index on ties) iff the gain clears accept_tol
/// and the move would not empty its source cluster. Returns moves applied.
inline int hartigan_sweep(ClusterState& state, double accept_tol = 1e-12) {
  int moves = 0;
  const int m = state.clusters();
  for (int x = 0; x < state.items(); ++x) {
    const int source = state.labels()[x];
    if (state.size_of(source) < 2) continue;
    MoveDelta best;
    for (int l = 0; l < m; ++l) {
      if (l == source) continue;
      const MoveDelta candidate = state.move_delta(x, l);
      if (best.target < 0 || candidate.delta > best.delta) best = candidate;
    }
    if (best.target >= 0 && best.delta > accept_tol) {
      state.apply(best);
      ++moves;
    }
  }
  return moves;
}

struct SweepRun {
  int sweeps = 0;
  long moves = 0;
  bool converged = false;
};

inline SweepRun run_sweeps(ClusterState& state, int max_sweeps, double accept_tol = 1e-12) {
  SweepRun run;
  while (run.sweeps < max_sweeps) {
    const int moved = hartigan_sweep(state, accept_tol);
    ++run.sweeps;
    run.moves += moved;
    if (moved == 0) {
      run.converged = true;
      break;
    }
  }
  return run;
}

/// Uniform labels conditioned on every cluster being nonempty. Rejection
/// sampling, with a shuffle-based fallback for the tight n ~ clusters regime
/// where rejection rarely lands.
inline std::vector<int> random_labels(int items, int clusters, SplitMix64& rng) {
  if (clusters < 1 || items < clusters)
    throw validation_error("random labels: need at least as many items as clusters");
  std::vector<int> labels(items);
  std::vector<int> counts(clusters);
  for (int attempt = 0; attempt < 200; ++attempt) {
    counts.assign(clusters, 0);
    for (int i = 0; i < items; ++i) {
      labels[i] = int(rng.next() % std::uint64_t(clusters));
      ++counts[labels[i]];
    }
    bool ok = true;
    for (int c : counts) ok = ok && c > 0;
    if (ok) return labels;
  }
  for (int i = 0; i < items; ++i) labels[i] = i % clusters;
  for (int i = items - 1; i > 0; --i) {
    const int j = int(rng.next() % std::uint64_t(i + 1));
    std::swap(labels[i], labels[j]);
  }
  return labels;
}

struct KGroupsOptions {
  int clusters = 2;
  int restarts = 1;
  int max_sweeps = 1000;
  double accept_tol = 1e-12;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RestartRecord {
  int restart = 0;
  double initial_objective = 0.0;
  double objective = 0.0;
  int sweeps = 0;
  long moves = 0;
  bool converged = false;
};

struct KGroupsResult {
  std::vector<int> labels;
  double objective = 0.0;
  int best_restart = 0;
  std::vector<RestartRecord> restarts;
};

/// Restarted Hartigan optimization of J = sum_l Q_l / n_l. Restart r draws
/// its labels from substream derive(seed, r); when a warm start is given it
/// occupies restart 0 and the random restarts fill the remaining slots. The
/// best objective wins, lowest restart index on exact ties, so the outcome is
/// a pure function of (kernels, options, warm labels) for any thread count.
inline KGroupsResult kernel_kgroups(const KernelSource& kernels, const KGroupsOptions& opts,
                                    const std::vector<int>* warm_start = nullptr) {
  const int n = kernels.items();
  if (opts.clusters < 2) throw validation_error("kgroups: need at least 2 clusters");
  if (opts.clusters != kernels.clusters())
    throw validation_error("kgroups: options and kernel source disagree on cluster count");
  if (n < opts.clusters)
    throw validation_error(detail::str("kgroups: ", n, " items cannot form ", opts.clusters,
                                       " nonempty clusters"));
  if (opts.restarts < 1) throw validation_error("kgroups: restarts must be >= 1");

  struct Run {
    RestartRecord record;
    std::vector<int> labels;
  };
  std::vector<Run> runs(opts.restarts);
  parallel_for(0, opts.restarts, opts.threads, [&](int r) {
    std::vector<int> init;
    if (warm_start != nullptr && r == 0) {
      init = *warm_start;
    } else {
      SplitMix64 rng(SplitMix64::derive(opts.seed, std::uint64_t(r)));
      init = random_labels(n, opts.clusters, rng);
    }
    ClusterState state(kernels, std::move(init));
    const double initial = state.objective();
    const SweepRun sweeps = run_sweeps(state, opts.max_sweeps, opts.accept_tol);
    runs[r].record = RestartRecord{r,           initial,      state.objective(),
                                   sweeps.sweeps, sweeps.moves, sweeps.converged};
    runs[r].labels = state.labels();
  });

  KGroupsResult result;
  result.restarts.reserve(opts.restarts);
  for (int r = 0; r < opts.restarts; ++r) {
    result.restarts.push_back(runs[r].record);
    if (r == 0 || runs[r].record.objective > result.objective) {
      result.objective = runs[r].record.objective;
      result.best_restart = r;
      result.labels = runs[r].labels;
    }
  }
  return result;
}

/// Flat clustering of one axis under a single kernel over the full opposite
/// axis.
inline KGroupsResult kernel_kgroups(const DataMatrix& m, Axis axis, const KernelSpec& spec,
                                    const KGroupsOptions& opts) {
  const int opposite = axis == Axis::rows ? m.layout.covariates : m.rows;
  GramMatrix gram = gram_matrix(m, axis, all_indices(opposite), spec, opts.threads);
  return kernel_kgroups(KernelSource::shared(std::move(gram), opts.clusters), opts);
}

}  // namespace kkb
