#include "ldr/types.hpp"

#include <string>

namespace ldr {

Partition::Partition(std::vector<std::int32_t> labels, int num_classes, bool allow_empty_classes)
    : class_of(std::move(labels)), k(num_classes), allow_empty(allow_empty_classes) {}

Partition Partition::single_class(Index n) {
  Partition p;
  p.class_of.assign(static_cast<std::size_t>(n), 0);
  p.k = 1;
  return p;
}

void Partition::validate(Index n) const {
  if (size() != n) {
    throw ShapeError("partition labels " + std::to_string(size()) + " vs " +
                     std::to_string(n) + " columns");
  }
  if (k <= 0) throw DegenerateInput("partition has k = 0 classes");
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (std::int32_t c : class_of) {
    if (c < 0 || c >= k) throw DegenerateInput("class index out of [0, k)");
    seen[static_cast<std::size_t>(c)] = true;
  }
  if (!allow_empty) {
    for (int j = 0; j < k; ++j) {
      if (!seen[static_cast<std::size_t>(j)]) {
        throw DegenerateInput("class " + std::to_string(j) +
                              " is empty (set allow_empty for incremental mode)");
      }
    }
  }
}

std::vector<Index> Partition::counts() const {
  std::vector<Index> c(static_cast<std::size_t>(k), 0);
  for (std::int32_t j : class_of) ++c[static_cast<std::size_t>(j)];
  return c;
}

std::vector<std::vector<Index>> Partition::members() const {
  std::vector<std::vector<Index>> m(static_cast<std::size_t>(k));
  for (Index i = 0; i < size(); ++i) {
    m[static_cast<std::size_t>(class_of[static_cast<std::size_t>(i)])].push_back(i);
  }
  return m;
}

Matrix select_columns(const Matrix& Z, const std::vector<Index>& cols) {
  Matrix out(Z.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out.col(static_cast<Index>(i)) = Z.col(cols[i]);
  }
  return out;
}

Matrix normalize_columns(const Matrix& Z) {
  Matrix out = Z;
  for (Index i = 0; i < out.cols(); ++i) {
    const double norm = out.col(i).norm();
    if (norm == 0.0) throw DegenerateInput("cannot normalize a zero column");
    out.col(i) /= norm;
  }
  return out;
}

bool has_unit_columns(const Matrix& Z, double tol) {
  for (Index i = 0; i < Z.cols(); ++i) {
    if (std::abs(Z.col(i).norm() - 1.0) > tol) return false;
  }
  return true;
}

void require_finite(const Matrix& Z, const char* what) {
  if (!Z.allFinite()) throw InvalidMatrix(std::string(what) + " has non-finite entries");
}

}  // namespace ldr
