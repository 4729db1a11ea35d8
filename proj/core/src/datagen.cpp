#include "ldr/datagen.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numbers>

#include "ldr/metrics.hpp"
#include "ldr/rng.hpp"

namespace ldr::data {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix orthonormal_basis(Rng& rng, Index ambient, Index dim) {
  Eigen::HouseholderQR<Matrix> qr(rng.gaussian_matrix(ambient, dim));
  Matrix Q = qr.householderQ() * Matrix::Identity(ambient, dim);
  const Matrix R = qr.matrixQR().topLeftCorner(dim, dim).triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

double min_pairwise_angle(const std::vector<Matrix>& bases) {
  double worst = kPi;
  for (std::size_t a = 0; a < bases.size(); ++a) {
    for (std::size_t b = a + 1; b < bases.size(); ++b) {
      worst = std::min(worst, principal_angles(bases[a], bases[b]).front());
    }
  }
  return worst;
}

}  // namespace

void SubspaceMixtureSpec::validate() const {
  if (ambient_dim < 1) throw DegenerateInput("ambient_dim must be >= 1");
  if (classes.empty()) throw DegenerateInput("at least one class required");
  Index total_dim = 0;
  for (const auto& c : classes) {
    if (c.dim < 1) throw DegenerateInput("class subspace dim must be >= 1");
    if (c.samples < 1) throw DegenerateInput("class sample count must be >= 1");
    if (c.noise < 0.0) throw DegenerateInput("noise must be >= 0");
    total_dim += c.dim;
  }
  if (total_dim > ambient_dim) {
    throw DegenerateInput("sum of class dims exceeds the ambient dimension");
  }
  if (min_principal_angle && (*min_principal_angle < 0.0 || *min_principal_angle > kPi / 2)) {
    throw DegenerateInput("min principal angle must lie in [0, pi/2]");
  }
}

SubspaceMixture sample_subspace_mixture(const SubspaceMixtureSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int k = static_cast<int>(spec.classes.size());
  const Rng basis_root(spec.basis_seed);

  std::vector<Matrix> bases;
  const bool exact_orthogonal =
      spec.min_principal_angle && *spec.min_principal_angle >= kPi / 2 - 1e-9;
  if (exact_orthogonal) {
    // Slice one joint orthonormal frame; pairwise angles are exactly pi/2.
    Index total_dim = 0;
    for (const auto& c : spec.classes) total_dim += c.dim;
    Rng rng = basis_root.stream(0);
    const Matrix joint = orthonormal_basis(rng, spec.ambient_dim, total_dim);
    Index off = 0;
    for (const auto& c : spec.classes) {
      bases.push_back(joint.middleCols(off, c.dim));
      off += c.dim;
    }
  } else {
    constexpr int kMaxAttempts = 100;
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
      Rng rng = basis_root.stream(static_cast<std::uint64_t>(attempt));
      bases.clear();
      for (const auto& c : spec.classes) {
        bases.push_back(orthonormal_basis(rng, spec.ambient_dim, c.dim));
      }
      accepted = !spec.min_principal_angle || k < 2 ||
                 min_pairwise_angle(bases) >= *spec.min_principal_angle;
    }
    if (!accepted) {
      throw DegenerateInput("could not satisfy the minimum principal angle in 100 attempts");
    }
  }

  const Rng sample_root(seed);
  Index n_total = 0;
  for (const auto& c : spec.classes) n_total += c.samples;

  SubspaceMixture out;
  out.X.resize(spec.ambient_dim, n_total);
  out.bases = bases;
  std::vector<std::int32_t> labels;
  labels.reserve(static_cast<std::size_t>(n_total));

  Index col = 0;
  for (int j = 0; j < k; ++j) {
    const auto& c = spec.classes[static_cast<std::size_t>(j)];
    Rng coord_rng = sample_root.stream(100 + static_cast<std::uint64_t>(j));
    Rng noise_rng = sample_root.stream(200 + static_cast<std::uint64_t>(j));
    Matrix block = bases[static_cast<std::size_t>(j)] * coord_rng.gaussian_matrix(c.dim, c.samples);
    if (c.noise > 0.0) {
      block += c.noise * noise_rng.gaussian_matrix(spec.ambient_dim, c.samples);
    }
    for (Index i = 0; i < c.samples; ++i) {
      const double norm = block.col(i).norm();
      if (norm == 0.0) throw DegenerateInput("drew a zero sample; raise noise or dims");
      out.X.col(col) = block.col(i) / norm;
      labels.push_back(j);
      ++col;
    }
  }
  out.part = Partition(std::move(labels), k);
  return out;
}

std::pair<Matrix, Partition> sample_nonlinear_manifolds(ManifoldKind kind, Index n, double noise,
                                                        std::uint64_t seed) {
  if (n < 2) throw DegenerateInput("need at least two samples");
  if (noise < 0.0) throw DegenerateInput("noise must be >= 0");
  Rng rng = Rng(seed).stream(0);
  Rng noise_rng = Rng(seed).stream(1);

  const Index n0 = n / 2;
  Matrix X(3, n);
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n), 0);

  for (Index i = 0; i < n; ++i) {
    const bool second = i >= n0;
    labels[static_cast<std::size_t>(i)] = second ? 1 : 0;
    const double t = rng.uniform(0.0, 2.0 * kPi);
    Eigen::Vector3d p;
    switch (kind) {
      case ManifoldKind::Circles: {
        // Two latitude circles on the sphere.
        const double phi = second ? -kPi / 6 : kPi / 6;
        p << std::cos(phi) * std::cos(t), std::cos(phi) * std::sin(t), std::sin(phi);
        break;
      }
      case ManifoldKind::Helix: {
        // Spherical spirals winding in opposite senses.
        const double lat = -kPi / 2 + t / 2.0;
        const double lon = second ? -3.0 * t : 3.0 * t;
        p << std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat);
        break;
      }
      case ManifoldKind::MoonsOnSphere: {
        // Classic interleaved half moons, lifted to the sphere.
        const double a = t / 2.0;  // [0, pi)
        double x = second ? 1.0 - std::cos(a) : std::cos(a);
        double y = second ? 0.5 - std::sin(a) : std::sin(a);
        p << x, y, 1.0;
        p.normalize();
        break;
      }
    }
    Eigen::Vector3d v = p;
    if (noise > 0.0) {
      v += noise * Eigen::Vector3d(noise_rng.gaussian(), noise_rng.gaussian(), noise_rng.gaussian());
    }
    const double norm = v.norm();
    if (norm == 0.0) throw DegenerateInput("noise annihilated a sample");
    X.col(i) = v / norm;
  }
  return {std::move(X), Partition(std::move(labels), 2)};
}

AugmentedSet self_supervised_partition(const Matrix& X, const Augment& aug, std::uint64_t seed) {
  require_finite(X, "self_supervised_partition input");
  const Index n = X.cols();
  const Index d = X.rows();
  if (n == 0) throw DegenerateInput("no samples to augment");
  Rng root(seed);

  std::vector<Vector> columns;
  std::vector<std::int32_t> labels;

  for (Index i = 0; i < n; ++i) {
    const Vector x = X.col(i);
    columns.push_back(x);
    labels.push_back(static_cast<std::int32_t>(i));

    if (const auto* shift = std::get_if<ShiftAugment>(&aug)) {
      const Index taps = shift->taps;
      if (taps < 1 || d % taps != 0) {
        throw ShapeError("shift augmentation: taps must divide the feature dimension");
      }
      const Index channels = d / taps;
      const Index count = (shift->range > 0 && shift->range < taps) ? shift->range : taps - 1;
      const auto sig = spectral::unvectorize(x, channels, taps);
      for (Index tau = 1; tau <= count; ++tau) {
        columns.push_back(spectral::vectorize(spectral::cyclic_shift(sig, tau)));
        labels.push_back(static_cast<std::int32_t>(i));
      }
    } else if (const auto* rot = std::get_if<RotationAugment>(&aug)) {
      if (rot->copies < 0) throw DegenerateInput("rotation copies must be >= 0");
      Rng rng = root.stream(static_cast<std::uint64_t>(i));
      for (int c = 0; c < rot->copies; ++c) {
        // Givens rotation in a random coordinate plane.
        const Index a = static_cast<Index>(rng.below(static_cast<std::uint64_t>(d)));
        Index b = static_cast<Index>(rng.below(static_cast<std::uint64_t>(d - 1)));
        if (b >= a) ++b;
        const double angle = rng.uniform(-rot->max_angle, rot->max_angle);
        Vector y = x;
        const double ca = std::cos(angle), sa = std::sin(angle);
        y(a) = ca * x(a) - sa * x(b);
        y(b) = sa * x(a) + ca * x(b);
        columns.push_back(y);
        labels.push_back(static_cast<std::int32_t>(i));
      }
    } else if (const auto* noise = std::get_if<NoiseAugment>(&aug)) {
      if (noise->copies < 0) throw DegenerateInput("noise copies must be >= 0");
      Rng rng = root.stream(static_cast<std::uint64_t>(i));
      for (int c = 0; c < noise->copies; ++c) {
        Vector y = x + noise->sigma * rng.gaussian_matrix(d, 1).col(0);
        const double norm = y.norm();
        if (norm == 0.0) throw DegenerateInput("noise annihilated a sample");
        columns.push_back(y / norm);
        labels.push_back(static_cast<std::int32_t>(i));
      }
    }
  }

  AugmentedSet out;
  out.X.resize(d, static_cast<Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out.X.col(static_cast<Index>(i)) = columns[i];
  }
  out.part = Partition(std::move(labels), static_cast<int>(n));
  return out;
}

std::vector<spectral::MultiChannelSignal> random_signals(Index channels, Index taps, Index count,
                                                         double noise, std::uint64_t seed,
                                                         Index smooth_taps) {
  if (channels < 1 || taps < 1 || count < 1) {
    throw DegenerateInput("random_signals: channels, taps and count must be >= 1");
  }
  Rng root(seed);
  std::vector<spectral::MultiChannelSignal> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    Rng rng = root.stream(static_cast<std::uint64_t>(i));
    Matrix v = rng.gaussian_matrix(channels, taps);
    if (smooth_taps > 1) {
      Matrix smooth = Matrix::Zero(channels, taps);
      for (Index t = 0; t < taps; ++t) {
        for (Index w = 0; w < smooth_taps; ++w) {
          smooth.col(t) += v.col((t + w) % taps);
        }
      }
      v = smooth / static_cast<double>(smooth_taps);
    }
    if (noise > 0.0) v += noise * rng.gaussian_matrix(channels, taps);
    const double norm = v.norm();
    if (norm == 0.0) throw DegenerateInput("drew a zero signal");
    out.emplace_back(Matrix(v / norm));
  }
  return out;
}

}  // namespace ldr::data
