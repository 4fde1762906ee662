#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "kkb/common.hpp"
#include "kkb/data_model.hpp"

namespace kkb {

enum class KernelFamily { gaussian, linear };

inline const char* name_of(KernelFamily family) noexcept {
  return family == KernelFamily::gaussian ? "gaussian" : "linear";
}

/// Kernel family plus bandwidth and where the bandwidth came from.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double sigma = 1.0;  // ignored by the linear family
  bool median_based = false;
  double median_multiplier = 1.0;
};

inline void validate(const KernelSpec& spec) {
  if (spec.family == KernelFamily::gaussian && !(spec.sigma > 0.0))
    throw validation_error("kernel: gaussian bandwidth must be positive");
}

inline double normalized_sq_distance(const SubsetView& view, int a, int b) {
  return view.sq_distance(a, b);
}

/// exp(-dist^2 / sigma^2) on the subset-normalized squared distance.
inline double gaussian_kernel(const SubsetView& view, int a, int b, double sigma) {
  if (!(sigma > 0.0)) throw validation_error("kernel: gaussian bandwidth must be positive");
  return std::exp(-view.sq_distance(a, b) / (sigma * sigma));
}

inline double kernel_value(const SubsetView& view, int a, int b, const KernelSpec& spec) {
  if (spec.family == KernelFamily::gaussian)
    return std::exp(-view.sq_distance(a, b) / (spec.sigma * spec.sigma));
  return view.inner(a, b);
}

inline double kernel_diag(const SubsetView& view, int a, const KernelSpec& spec) {
  if (spec.family == KernelFamily::gaussian) return 1.0;
  return view.inner(a, a);
}

/// Bandwidth from the median of all pairwise subset-normalized squared
/// distances on an axis: sigma = sqrt(median). Even pair counts take the mean
/// of the two middle values. A zero median leaves no usable scale and throws;
/// callers must then supply an explicit bandwidth.
inline double median_heuristic(const DataMatrix& m, Axis axis, const std::vector<int>& subset) {
  const SubsetView view(m, axis, subset);
  const int n = view.items();
  if (n < 2) throw validation_error("median heuristic: need at least 2 items on the axis");
  std::vector<double> sq;
  sq.reserve(std::size_t(n) * (n - 1) / 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) sq.push_back(view.sq_distance(a, b));
  std::sort(sq.begin(), sq.end());
  const std::size_t count = sq.size();
  const double median = (count % 2 == 1)
                            ? sq[count / 2]
                            : 0.5 * (sq[count / 2 - 1] + sq[count / 2]);
  if (!(median > 0.0))
    throw degenerate_data_error(
        "median heuristic: median pairwise distance is zero; supply an explicit bandwidth");
  return std::sqrt(median);
}

inline double median_heuristic(const DataMatrix& m, Axis axis) {
  const int opposite = axis == Axis::rows ? m.layout.covariates : m.rows;
  return median_heuristic(m, axis, all_indices(opposite));
}

/// Symmetric matrix of kernel evaluations between all items of one axis,
/// restricted to a feature subset. Each unordered pair is evaluated once; the
/// gaussian diagonal is exactly 1.
struct GramMatrix {
  int size = 0;
  std::vector<double> values;  // size x size
  KernelSpec spec;
  std::vector<int> subset;

  double at(int a, int b) const noexcept { return values[std::size_t(a) * size + b]; }
  double diag(int a) const noexcept { return values[std::size_t(a) * (size + 1)]; }
};

inline GramMatrix gram_matrix(const DataMatrix& m, Axis axis, const std::vector<int>& subset,
                              const KernelSpec& spec, int threads = 1) {
  validate(spec);
  const SubsetView view(m, axis, subset);
  const int n = view.items();
  GramMatrix gram{n, std::vector<double>(std::size_t(n) * n), spec, view.feature_set()};
  double* k = gram.values.data();
  parallel_for(0, n, threads, [&](int a) {
    k[std::size_t(a) * (n + 1)] = kernel_diag(view, a, spec);
    for (int b = a + 1; b < n; ++b) {
      const double v = kernel_value(view, a, b, spec);
      k[std::size_t(a) * n + b] = v;
      k[std::size_t(b) * n + a] = v;
    }
  });
  return gram;
}

/// Rectangular block of kernel evaluations between two item lists.
struct KernelBlock {
  int rows = 0, cols = 0;
  std::vector<double> values;

  double at(int i, int j) const noexcept { return values[std::size_t(i) * cols + j]; }
  double sum() const noexcept {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
};

inline KernelBlock kernel_block(const SubsetView& view, const std::vector<int>& items_x,
                                const std::vector<int>& items_y, const KernelSpec& spec) {
  validate(spec);
  KernelBlock block{int(items_x.size()), int(items_y.size()), {}};
  block.values.reserve(items_x.size() * items_y.size());
  for (int a : items_x)
    for (int b : items_y)
      block.values.push_back(a == b ? kernel_diag(view, a, spec) : kernel_value(view, a, b, spec));
  return block;
}

/// Biased two-sample statistic from precomputed kernel blocks:
/// mean(k(X,X)) + mean(k(Y,Y)) - 2 mean(k(X,Y)), diagonals included.
inline double mmd_squared(const KernelBlock& xx, const KernelBlock& yy, const KernelBlock& xy) {
  if (xx.rows < 1 || yy.rows < 1) throw validation_error("mmd: empty sample");
  if (xx.rows != xx.cols || yy.rows != yy.cols)
    throw validation_error("mmd: within-sample blocks must be square");
  if (xy.rows != xx.rows || xy.cols != yy.rows)
    throw validation_error("mmd: cross block dimensions do not match the samples");
  const double n1 = xx.rows, n2 = yy.rows;
  return xx.sum() / (n1 * n1) + yy.sum() / (n2 * n2) - 2.0 * xy.sum() / (n1 * n2);
}

/// Between-sample energy dispersion of a partition, with the semimetric
/// rho(x,y) = k(x,x) + k(y,y) - 2 k(x,y) induced by the kernel:
/// sum over cluster pairs a < b of
///   (2 n_a n_b / n) * [ 2 mean(rho(A,B)) - mean(rho(A,A)) - mean(rho(B,B)) ].
/// Nonnegative (to rounding) for kernels of this form, and maximized by the
/// same partition that maximizes the within-kernel coherence sum Q_l / n_l.
inline double multisample_energy(const GramMatrix& gram, const std::vector<int>& labels,
                                 int clusters) {
  const int n = gram.size;
  if (int(labels.size()) != n) throw validation_error("energy: label count does not match gram");
  if (clusters < 2) throw validation_error("energy: need at least 2 clusters");
  validate_labels(labels, clusters, "energy");
  std::vector<double> rho_sum(std::size_t(clusters) * clusters, 0.0);
  std::vector<double> sizes(clusters, 0.0);
  for (int i = 0; i < n; ++i) sizes[labels[i]] += 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double rho = gram.diag(i) + gram.diag(j) - 2.0 * gram.at(i, j);
      rho_sum[std::size_t(labels[i]) * clusters + labels[j]] += rho;
    }
  }
  double total = 0.0;
  for (int a = 0; a < clusters; ++a) {
    for (int b = a + 1; b < clusters; ++b) {
      const double na = sizes[a], nb = sizes[b];
      const double between = 2.0 / (na * nb) * rho_sum[std::size_t(a) * clusters + b];
      const double within_a = rho_sum[std::size_t(a) * clusters + a] / (na * na);
      const double within_b = rho_sum[std::size_t(b) * clusters + b] / (nb * nb);
      total += (2.0 * na * nb / n) * (between - within_a - within_b);
    }
  }
  return total;
}

}  // namespace kkb
