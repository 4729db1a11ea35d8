#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ldr/errors.hpp"

namespace ldr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Hard assignment of n samples (columns) to k classes.
/// Class indices live in [0, k). Empty classes are only legal when
/// `allow_empty` is set (incremental mode).
struct Partition {
  std::vector<std::int32_t> class_of;
  int k = 0;
  bool allow_empty = false;

  Partition() = default;
  Partition(std::vector<std::int32_t> labels, int num_classes, bool allow_empty_classes = false);

  /// All n samples in one class.
  static Partition single_class(Index n);

  Index size() const { return static_cast<Index>(class_of.size()); }

  /// Throws ShapeError / DegenerateInput when inconsistent with an
  /// n-column feature matrix.
  void validate(Index n) const;

  /// Per-class sample counts, length k.
  std::vector<Index> counts() const;

  /// Column indices per class, length k, each in increasing order.
  std::vector<std::vector<Index>> members() const;
};

/// Columns of `Z` restricted to `cols`, in the given order.
Matrix select_columns(const Matrix& Z, const std::vector<Index>& cols);

/// Projects every column onto the unit sphere. Throws DegenerateInput on a
/// zero column.
Matrix normalize_columns(const Matrix& Z);

/// True when every column norm is within `tol` of 1.
bool has_unit_columns(const Matrix& Z, double tol = 1e-9);

void require_finite(const Matrix& Z, const char* what);

}  // namespace ldr
