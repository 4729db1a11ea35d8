#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/QR>
#include <cmath>
#include <filesystem>

#include "ldr/datagen.hpp"
#include "ldr/dataset_io.hpp"
#include "ldr/metrics.hpp"
#include "ldr/rng.hpp"
#include "oracles.hpp"

using ldr::Index;
using ldr::Matrix;
using ldr::Partition;
using ldr::Rng;
namespace data = ldr::data;
namespace io = ldr::io;

namespace {

data::SubspaceMixtureSpec two_line_spec(double min_angle) {
  data::SubspaceMixtureSpec spec;
  spec.ambient_dim = 3;
  spec.classes = {{1, 10, 0.0}, {1, 10, 0.0}};
  spec.basis_seed = 11;
  spec.min_principal_angle = min_angle;
  return spec;
}

}  // namespace

TEST_CASE("sample_subspace_mixture determinism and structure") {
  data::SubspaceMixtureSpec spec;
  spec.ambient_dim = 6;
  spec.classes = {{2, 15, 1e-2}, {1, 10, 1e-2}};
  spec.basis_seed = 3;

  const auto a = data::sample_subspace_mixture(spec, 42);
  const auto b = data::sample_subspace_mixture(spec, 42);
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.part.class_of == b.part.class_of);

  // Different sample seed, same bases.
  const auto c = data::sample_subspace_mixture(spec, 43);
  CHECK((a.X - c.X).cwiseAbs().maxCoeff() > 0.0);
  for (std::size_t j = 0; j < a.bases.size(); ++j) {
    CHECK((a.bases[j] - c.bases[j]).cwiseAbs().maxCoeff() == 0.0);
  }

  CHECK(ldr::has_unit_columns(a.X, 1e-12));
}

TEST_CASE("noiseless single class lies in its span") {
  data::SubspaceMixtureSpec spec;
  spec.ambient_dim = 5;
  spec.classes = {{2, 12, 0.0}};
  spec.basis_seed = 9;
  const auto mix = data::sample_subspace_mixture(spec, 7);
  const Matrix& U = mix.bases[0];
  const Matrix residual = mix.X - U * (U.transpose() * mix.X);
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("minimum angle constraint is honored") {
  const double want = 60.0 * M_PI / 180.0;
  const auto mix = data::sample_subspace_mixture(two_line_spec(want), 1);
  const auto angles = data::principal_angles(mix.bases[0], mix.bases[1]);
  CHECK(angles.front() >= want);
}

TEST_CASE("exact orthogonality via the joint frame") {
  const auto mix = data::sample_subspace_mixture(two_line_spec(M_PI / 2.0), 1);
  const auto angles = data::principal_angles(mix.bases[0], mix.bases[1]);
  CHECK(std::abs(angles.front() - M_PI / 2.0) < 1e-12);
}

TEST_CASE("impossible angle constraint fails after 100 attempts") {
  // Two 1-D lines in R^2 with a near-orthogonality demand but below the
  // exact-orthogonal trigger: rejection sampling cannot deliver.
  data::SubspaceMixtureSpec spec;
  spec.ambient_dim = 2;
  spec.classes = {{1, 4, 0.0}, {1, 4, 0.0}};
  spec.basis_seed = 5;
  spec.min_principal_angle = M_PI / 2.0 - 1e-6;
  CHECK_THROWS_AS(data::sample_subspace_mixture(spec, 3), ldr::DegenerateInput);
}

TEST_CASE("nonlinear manifolds") {
  for (auto kind :
       {data::ManifoldKind::Circles, data::ManifoldKind::Helix, data::ManifoldKind::MoonsOnSphere}) {
    const auto [X, part] = data::sample_nonlinear_manifolds(kind, 50, 1e-2, 5);
    CHECK(X.cols() == 50);
    CHECK(part.k == 2);
    CHECK(ldr::has_unit_columns(X, 1e-12));
    const auto [X2, part2] = data::sample_nonlinear_manifolds(kind, 50, 1e-2, 5);
    CHECK((X - X2).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("self_supervised_partition") {
  Rng rng(13);
  const Matrix X = oracle::random_unit_columns(rng, 6, 4);

  SUBCASE("zero augmentations give singleton classes") {
    const auto set = data::self_supervised_partition(X, data::NoiseAugment{0, 0.0}, 1);
    CHECK(set.X.cols() == 4);
    CHECK(set.part.k == 4);
    for (Index i = 0; i < 4; ++i) {
      CHECK(set.part.class_of[static_cast<std::size_t>(i)] == i);
    }
  }

  SUBCASE("shift augmentation yields classes of size T") {
    const auto set = data::self_supervised_partition(X, data::ShiftAugment{3, 0}, 1);
    CHECK(set.X.cols() == 4 * 3);  // T = 3 shifts per sample (d = 6 = 2 channels x 3 taps)
    const auto counts = set.part.counts();
    for (Index c : counts) CHECK(c == 3);
    // Shifted copies keep the unit norm.
    CHECK(ldr::has_unit_columns(set.X, 1e-12));
  }

  SUBCASE("rotation copies preserve norms and are deterministic") {
    const auto a = data::self_supervised_partition(X, data::RotationAugment{5, 0.2}, 9);
    const auto b = data::self_supervised_partition(X, data::RotationAugment{5, 0.2}, 9);
    CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.X.cols() == 4 * 6);
    CHECK(ldr::has_unit_columns(a.X, 1e-12));
  }

  SUBCASE("taps must divide the dimension") {
    CHECK_THROWS_AS(data::self_supervised_partition(X, data::ShiftAugment{4, 0}, 1),
                    ldr::ShapeError);
  }
}

TEST_CASE("principal_angles") {
  Rng rng(17);
  Eigen::HouseholderQR<Matrix> qr(rng.gaussian_matrix(5, 3));
  const Matrix Q = qr.householderQ() * Matrix::Identity(5, 3);

  SUBCASE("identical bases have zero angles") {
    for (double a : data::principal_angles(Q, Q)) CHECK(a < 1e-7);
  }
  SUBCASE("orthogonal coordinate axes") {
    Matrix e1 = Matrix::Zero(3, 1), e2 = Matrix::Zero(3, 1);
    e1(0, 0) = 1.0;
    e2(1, 0) = 1.0;
    const auto angles = data::principal_angles(e1, e2);
    REQUIRE(angles.size() == 1);
    CHECK(angles[0] == doctest::Approx(M_PI / 2.0));
  }
  SUBCASE("symmetry") {
    Eigen::HouseholderQR<Matrix> qr2(rng.gaussian_matrix(5, 2));
    const Matrix V = qr2.householderQ() * Matrix::Identity(5, 2);
    const auto ab = data::principal_angles(Q, V);
    const auto ba = data::principal_angles(V, Q);
    REQUIRE(ab.size() == ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
      CHECK(ab[i] == doctest::Approx(ba[i]).epsilon(1e-10));
    }
  }
  SUBCASE("smallest angle matches a brute-force sweep over unit vectors") {
    // Two 1-D lines in R^3: the only principal angle is the angle between
    // the lines, recoverable by maximizing |cos| over a fine grid of unit
    // vectors in the first span.
    Matrix u(3, 1), v(3, 1);
    u << 1.0, 0.0, 0.0;
    v << std::cos(0.7), std::sin(0.7), 0.0;
    const auto angles = data::principal_angles(u, v);
    double best = 0.0;
    for (int s = -1000; s <= 1000; ++s) {
      const double c = std::abs(std::cos(0.7) * (s >= 0 ? 1.0 : -1.0));
      best = std::max(best, c);
    }
    CHECK(std::abs(angles[0] - std::acos(best)) < 1e-6);
  }
  SUBCASE("non-orthonormal input rejected") {
    CHECK_THROWS_AS(data::principal_angles(2.0 * Q, Q), ldr::InvalidMatrix);
  }
}

TEST_CASE("block_diagonality") {
  SUBCASE("orthogonal class subspaces score 1") {
    Matrix Z = Matrix::Zero(4, 6);
    // Class 0 spans {e1, e2}, class 1 spans {e3, e4}; within-class overlap
    // is nonzero, across-class overlap is exactly zero.
    Z.col(0) << 1, 0, 0, 0;
    Z.col(1) << std::sqrt(0.5), std::sqrt(0.5), 0, 0;
    Z.col(2) << 0, 1, 0, 0;
    Z.col(3) << 0, 0, 1, 0;
    Z.col(4) << 0, 0, std::sqrt(0.5), std::sqrt(0.5);
    Z.col(5) << 0, 0, 0, 1;
    const Partition part({0, 0, 0, 1, 1, 1}, 2);
    CHECK(data::block_diagonality(Z, part) == doctest::Approx(1.0));
  }

  SUBCASE("identical features match the combinatorial count") {
    Matrix Z(3, 6);
    for (Index i = 0; i < 6; ++i) Z.col(i) << 1, 0, 0;
    const Partition part({0, 0, 0, 1, 1, 1}, 2);
    // All pairs carry mass 1; within-class pairs: 2 * C(3,2) = 6 of C(6,2) = 15.
    CHECK(data::block_diagonality(Z, part) == doctest::Approx(6.0 / 15.0));
  }

  SUBCASE("k = 1 scores 1 by convention") {
    Rng rng(19);
    const Matrix Z = oracle::random_unit_columns(rng, 4, 9);
    CHECK(data::block_diagonality(Z, Partition::single_class(9)) == 1.0);
  }

  SUBCASE("invariant to within-class permutation and global rotation") {
    Rng rng(23);
    const Matrix Z = oracle::random_unit_columns(rng, 5, 12);
    const Partition part = oracle::random_partition(rng, 12, 3);
    const double base = data::block_diagonality(Z, part);

    Eigen::HouseholderQR<Matrix> qr(rng.gaussian_matrix(5, 5));
    const Matrix Q = qr.householderQ();
    CHECK(data::block_diagonality(Q * Z, part) == doctest::Approx(base).epsilon(1e-10));

    // Swap two columns of the same class.
    const auto members = part.members();
    for (const auto& cols : members) {
      if (cols.size() >= 2) {
        Matrix Zs = Z;
        Zs.col(cols[0]).swap(Zs.col(cols[1]));
        CHECK(data::block_diagonality(Zs, part) == doctest::Approx(base).epsilon(1e-10));
        break;
      }
    }
  }
}

TEST_CASE("per_class_spectrum and the collapse detector") {
  Matrix Z = Matrix::Zero(4, 6);
  // Class 0: spread over two directions; class 1: a repeated single direction.
  Z.col(0) << 1, 0, 0, 0;
  Z.col(1) << 0, 1, 0, 0;
  Z.col(2) << std::sqrt(0.5), std::sqrt(0.5), 0, 0;
  Z.col(3) << 0, 0, 1, 0;
  Z.col(4) << 0, 0, 1, 0;
  Z.col(5) << 0, 0, 1, 0;
  const Partition part({0, 0, 0, 1, 1, 1}, 2);
  const auto spectra = data::per_class_spectrum(Z, part);
  REQUIRE(spectra.size() == 2);
  CHECK_FALSE(data::collapsed(spectra[0]));
  CHECK(data::collapsed(spectra[1]));
  // Descending order.
  for (const auto& s : spectra) {
    for (Index i = 1; i < s.size(); ++i) CHECK(s(i) <= s(i - 1) + 1e-15);
  }
}

TEST_CASE("dataset CSV and binary round trips") {
  Rng rng(29);
  io::Dataset ds;
  ds.X = rng.gaussian_matrix(5, 17);
  ds.part = oracle::random_partition(rng, 17, 3);

  const auto dir = std::filesystem::temp_directory_path() / "ldr_io_test";
  std::filesystem::create_directories(dir);

  SUBCASE("csv round trip is bit exact") {
    const auto path = dir / "ds.csv";
    io::write_dataset_csv(path, ds);
    const auto back = io::read_dataset_csv(path);
    CHECK(back.X.rows() == 5);
    CHECK(back.X.cols() == 17);
    CHECK((back.X - ds.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.part.class_of == ds.part.class_of);
    CHECK(back.part.k == 3);
    // Writing the reread dataset reproduces the file byte for byte.
    const auto path2 = dir / "ds2.csv";
    io::write_dataset_csv(path2, back);
    std::ifstream f1(path), f2(path2);
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
  }

  SUBCASE("binary round trip is bit exact") {
    const auto path = dir / "ds.bin";
    io::write_dataset_binary(path, ds);
    const auto back = io::read_dataset_binary(path);
    CHECK((back.X - ds.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.part.class_of == ds.part.class_of);
  }

  SUBCASE("bad magic is rejected") {
    const auto path = dir / "bad.bin";
    std::ofstream os(path, std::ios::binary);
    os << "NOTLDRK1 garbage";
    os.close();
    CHECK_THROWS_AS(io::read_dataset_binary(path), ldr::Error);
  }
}

TEST_CASE("random_signals determinism and smoothing") {
  const auto a = data::random_signals(2, 16, 3, 0.0, 99, 4);
  const auto b = data::random_signals(2, 16, 3, 0.0, 99, 4);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i].values - b[i].values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(a[i].norm() - 1.0) < 1e-12);
  }
}
