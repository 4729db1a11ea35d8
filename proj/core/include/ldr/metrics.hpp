#pragma once

#include <vector>

#include "ldr/types.hpp"

namespace ldr::data {

/// Canonical angles between the subspaces spanned by two orthonormal bases,
/// ascending: arccos of the singular values of U^T V clamped to [0, 1].
std::vector<double> principal_angles(const Matrix& U, const Matrix& V);

/// Fraction of off-diagonal |cosine similarity| mass that lies within
/// classes, over unit-normalized columns. 1.0 when classes occupy mutually
/// orthogonal subspaces; k = 1 (and zero total mass) score 1.0 by
/// convention.
double block_diagonality(const Matrix& Z, const Partition& part);

/// Descending singular values of each class's feature block.
std::vector<Vector> per_class_spectrum(const Matrix& Z, const Partition& part);

/// Neural-collapse detector: sigma_2 / sigma_1 < 0.05 (a class with fewer
/// than two singular values counts as collapsed).
bool collapsed(const Vector& spectrum, double threshold = 0.05);

/// Summary row the CLI writes to metrics.csv and `report` prints.
struct MetricsRecord {
  double R = 0.0;
  double Rc = 0.0;
  double dR = 0.0;
  double accuracy = -1.0;           // -1 when not applicable
  double holdout_accuracy = -1.0;   // -1 when not applicable
  double block_diag = 0.0;
  std::vector<double> max_principal_angles;  // per class, radians
  std::vector<Vector> class_spectra;
};

}  // namespace ldr::data
