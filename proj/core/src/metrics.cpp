#include "ldr/metrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace ldr::data {

std::vector<double> principal_angles(const Matrix& U, const Matrix& V) {
  if (U.rows() != V.rows()) throw ShapeError("principal_angles: ambient dimension mismatch");
  if (U.cols() == 0 || V.cols() == 0) throw DegenerateInput("principal_angles: empty basis");
  const auto check_orthonormal = [](const Matrix& B, const char* name) {
    const Matrix gram = B.transpose() * B;
    if ((gram - Matrix::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff() > 1e-8) {
      throw InvalidMatrix(std::string(name) + " does not have orthonormal columns");
    }
  };
  check_orthonormal(U, "U");
  check_orthonormal(V, "V");

  Eigen::JacobiSVD<Matrix> svd(U.transpose() * V);
  const auto& s = svd.singularValues();
  const Index m = std::min(U.cols(), V.cols());
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    angles.push_back(std::acos(std::clamp(s(i), 0.0, 1.0)));
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double block_diagonality(const Matrix& Z, const Partition& part) {
  part.validate(Z.cols());
  if (part.k == 1) return 1.0;
  const Index n = Z.cols();
  if (n < 2) return 1.0;

  Matrix Zn(Z.rows(), n);
  for (Index i = 0; i < n; ++i) {
    const double norm = Z.col(i).norm();
    if (norm == 0.0) throw InvalidMatrix("block_diagonality: zero feature column");
    Zn.col(i) = Z.col(i) / norm;
  }
  const Matrix G = (Zn.transpose() * Zn).cwiseAbs();

  double within = 0.0;
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      total += G(i, j);
      if (part.class_of[static_cast<std::size_t>(i)] == part.class_of[static_cast<std::size_t>(j)]) {
        within += G(i, j);
      }
    }
  }
  // No off-diagonal mass at all is perfect block-diagonality.
  if (total <= 1e-15) return 1.0;
  return within / total;
}

std::vector<Vector> per_class_spectrum(const Matrix& Z, const Partition& part) {
  part.validate(Z.cols());
  const auto members = part.members();
  std::vector<Vector> spectra;
  spectra.reserve(static_cast<std::size_t>(part.k));
  for (int j = 0; j < part.k; ++j) {
    const auto& cols = members[static_cast<std::size_t>(j)];
    if (cols.empty()) {
      spectra.emplace_back(Vector::Zero(0));
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(select_columns(Z, cols));
    spectra.push_back(svd.singularValues());
  }
  return spectra;
}

bool collapsed(const Vector& spectrum, double threshold) {
  if (spectrum.size() < 2 || spectrum(0) <= 0.0) return true;
  return spectrum(1) / spectrum(0) < threshold;
}

}  // namespace ldr::data
