#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "kkb/common.hpp"

namespace kkb {

/// Column layout for matrices whose covariates are curves sampled on a shared
/// uniform grid. Covariate i owns the stored columns [i*d, (i+1)*d). Squared
/// block norms are quadrature sums divided by d, so d = 1 reduces exactly to
/// plain squared Euclidean coordinates.
struct CovariateLayout {
  int covariates = 0;  // p
  int grid_width = 1;  // d, samples per curve

  int columns() const noexcept { return covariates * grid_width; }
  double grid_weight() const noexcept { return 1.0 / grid_width; }
};

inline void validate(const CovariateLayout& layout) {
  if (layout.covariates < 1)
    throw validation_error("layout: covariate count must be >= 1");
  if (layout.grid_width < 1)
    throw validation_error("layout: grid width must be >= 1");
}

/// Dense n x (p*d) matrix of grid samples, row-major, immutable once built.
struct DataMatrix {
  CovariateLayout layout;
  int rows = 0;  // n
  std::vector<double> values;
  std::vector<std::string> row_ids;        // empty or size n
  std::vector<std::string> covariate_ids;  // empty or size p

  int columns() const noexcept { return layout.columns(); }
  double at(int r, int c) const noexcept {
    return values[std::size_t(r) * columns() + c];
  }
  const double* row(int r) const noexcept {
    return values.data() + std::size_t(r) * columns();
  }
  const double* block(int r, int covariate) const noexcept {
    return row(r) + std::size_t(covariate) * layout.grid_width;
  }
};

inline DataMatrix build_matrix(std::vector<double> values, int rows, CovariateLayout layout,
                               std::vector<std::string> row_ids = {},
                               std::vector<std::string> covariate_ids = {}) {
  validate(layout);
  if (rows < 1) throw validation_error("matrix: row count must be >= 1");
  const std::size_t expected = std::size_t(rows) * layout.columns();
  if (values.size() != expected)
    throw validation_error(detail::str("matrix: ", values.size(), " values cannot fill ", rows,
                                       " rows of ", layout.covariates, " covariate(s) x ",
                                       layout.grid_width, " grid sample(s) = ", expected,
                                       " entries"));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw validation_error(detail::str("matrix: non-finite entry at row ",
                                         i / layout.columns(), ", column ", i % layout.columns()));
  }
  if (!row_ids.empty() && int(row_ids.size()) != rows)
    throw validation_error("matrix: row id count does not match row count");
  if (!covariate_ids.empty() && int(covariate_ids.size()) != layout.covariates)
    throw validation_error("matrix: covariate id count does not match covariate count");
  return DataMatrix{layout, rows, std::move(values), std::move(row_ids), std::move(covariate_ids)};
}

/// Swaps the datum and covariate roles: transposed datum i's covariate-j block
/// is the original datum j's covariate-i block. An exact involution.
inline DataMatrix transpose_roles(const DataMatrix& m) {
  const int d = m.layout.grid_width;
  CovariateLayout layout{m.rows, d};
  std::vector<double> values(std::size_t(m.layout.covariates) * layout.columns());
  for (int i = 0; i < m.layout.covariates; ++i) {
    double* out = values.data() + std::size_t(i) * layout.columns();
    for (int j = 0; j < m.rows; ++j) {
      const double* in = m.block(j, i);
      std::copy(in, in + d, out + std::size_t(j) * d);
    }
  }
  return DataMatrix{layout, m.layout.covariates, std::move(values), m.covariate_ids, m.row_ids};
}

/// Paired row/covariate partitions sharing one cluster count.
struct Bipartition {
  std::vector<int> row_labels;
  std::vector<int> col_labels;
  int clusters = 0;  // m
};

inline void validate_labels(const std::vector<int>& labels, int clusters, const char* what) {
  if (clusters < 1) throw validation_error(detail::str(what, ": cluster count must be >= 1"));
  std::vector<int> counts(clusters, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= clusters)
      throw validation_error(detail::str(what, ": label ", labels[i], " at position ", i,
                                         " outside [0, ", clusters, ")"));
    ++counts[labels[i]];
  }
  for (int l = 0; l < clusters; ++l)
    if (counts[l] == 0) throw validation_error(detail::str(what, ": cluster ", l, " is empty"));
}

inline void validate_bipartition(const Bipartition& bp, int rows, int covariates) {
  if (int(bp.row_labels.size()) != rows)
    throw validation_error("bipartition: row label count does not match matrix");
  if (int(bp.col_labels.size()) != covariates)
    throw validation_error("bipartition: covariate label count does not match matrix");
  validate_labels(bp.row_labels, bp.clusters, "bipartition rows");
  validate_labels(bp.col_labels, bp.clusters, "bipartition covariates");
}

enum class Axis { rows, covariates };

inline const char* name_of(Axis axis) noexcept {
  return axis == Axis::rows ? "rows" : "cols";
}

/// Non-owning view that treats one axis of a matrix as the items to compare
/// and a subset of the opposite axis as the active features. Feature indices
/// are kept sorted so that accumulation order (and hence the floating point
/// result) does not depend on how the subset was listed.
class SubsetView {
 public:
  SubsetView(const DataMatrix& m, Axis axis, std::vector<int> feature_set)
      : matrix_(&m), axis_(axis), features_(std::move(feature_set)) {
    if (features_.empty()) throw validation_error("subset view: empty feature set");
    std::sort(features_.begin(), features_.end());
    const int bound = axis_ == Axis::rows ? m.layout.covariates : m.rows;
    if (features_.front() < 0 || features_.back() >= bound)
      throw validation_error(detail::str("subset view: feature index outside [0, ", bound, ")"));
    for (std::size_t i = 1; i < features_.size(); ++i)
      if (features_[i] == features_[i - 1])
        throw validation_error(detail::str("subset view: duplicate feature index ", features_[i]));
  }

  const DataMatrix& matrix() const noexcept { return *matrix_; }
  Axis axis() const noexcept { return axis_; }
  const std::vector<int>& feature_set() const noexcept { return features_; }
  int items() const noexcept {
    return axis_ == Axis::rows ? matrix_->rows : matrix_->layout.covariates;
  }

  /// Squared distance between items a and b, averaged over the active
  /// features, each feature's contribution being its grid-weighted squared
  /// block distance.
  double sq_distance(int a, int b) const noexcept {
    const int d = matrix_->layout.grid_width;
    double acc = 0.0;
    for (int f : features_) {
      const double* xa = block_of(a, f);
      const double* xb = block_of(b, f);
      double block = 0.0;
      for (int j = 0; j < d; ++j) {
        const double diff = xa[j] - xb[j];
        block += diff * diff;
      }
      acc += block / d;
    }
    return acc / double(features_.size());
  }

  /// Inner product under the same normalization, so that
  /// inner(a,a) + inner(b,b) - 2*inner(a,b) == sq_distance(a,b).
  double inner(int a, int b) const noexcept {
    const int d = matrix_->layout.grid_width;
    double acc = 0.0;
    for (int f : features_) {
      const double* xa = block_of(a, f);
      const double* xb = block_of(b, f);
      double block = 0.0;
      for (int j = 0; j < d; ++j) block += xa[j] * xb[j];
      acc += block / d;
    }
    return acc / double(features_.size());
  }

 private:
  const double* block_of(int item, int feature) const noexcept {
    return axis_ == Axis::rows ? matrix_->block(item, feature) : matrix_->block(feature, item);
  }

  const DataMatrix* matrix_;
  Axis axis_;
  std::vector<int> features_;
};

inline std::vector<int> all_indices(int count) {
  std::vector<int> out(count);
  for (int i = 0; i < count; ++i) out[i] = i;
  return out;
}

inline SubsetView full_view(const DataMatrix& m, Axis axis) {
  const int opposite = axis == Axis::rows ? m.layout.covariates : m.rows;
  return SubsetView(m, axis, all_indices(opposite));
}

}  // namespace kkb
