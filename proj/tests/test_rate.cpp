#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldr/rate.hpp"
#include "ldr/rng.hpp"
#include "oracles.hpp"

using ldr::DegenerateInput;
using ldr::Index;
using ldr::InvalidMatrix;
using ldr::Matrix;
using ldr::Partition;
using ldr::Rng;
using ldr::ShapeError;
namespace rate = ldr::rate;
using rate::RateParams;

namespace {

RateParams fixed_alpha(double a) {
  RateParams p;
  p.fixed_alpha = a;
  return p;
}

}  // namespace

TEST_CASE("alpha_for resolves both conventions") {
  RateParams count_scaled;
  count_scaled.epsilon = 0.5;
  CHECK(rate::alpha_for(count_scaled, 8, 32) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rate::alpha_for(fixed_alpha(1.0), 999, 999) == 1.0);
  RateParams unit_eps;
  unit_eps.epsilon = 1.0;
  CHECK(rate::alpha_for(unit_eps, 2, 2) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(rate::alpha_for(count_scaled, 8, 0), DegenerateInput);
  RateParams tiny_eps;
  tiny_eps.epsilon = 1e-7;
  CHECK_THROWS_AS(rate::alpha_for(tiny_eps, 8, 8), DegenerateInput);
}

TEST_CASE("coding_rate closed-form identities") {
  CHECK(rate::coding_rate(Matrix::Zero(2, 0), 1.0) == 0.0);
  CHECK(rate::coding_rate(Matrix::Identity(2, 2), 1.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));

  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rate::coding_rate(bad, 1.0), InvalidMatrix);
}

TEST_CASE("coding_rate matches the SVD oracle") {
  Rng rng(17);
  // The d x n case exercised through the fat-matrix Gram side.
  const Matrix Z = rng.gaussian_matrix(8, 32);
  const double alpha = 1.0;  // epsilon = 0.5 CountScaled on 8 x 32
  CHECK(std::abs(rate::coding_rate(Z, alpha) - oracle::svd_coding_rate(Z, alpha)) < 1e-10);

  // Tall matrix goes through the n x n Gram side.
  const Matrix tall = rng.gaussian_matrix(20, 5);
  CHECK(std::abs(rate::coding_rate(tall, 0.37) - oracle::svd_coding_rate(tall, 0.37)) < 1e-10);
}

TEST_CASE("class_rate_average") {
  Rng rng(3);
  const Matrix Z = oracle::random_unit_columns(rng, 4, 40);

  SUBCASE("single class is coding_rate itself") {
    RateParams p;
    const Partition part = Partition::single_class(40);
    CHECK(rate::class_rate_average(Z, part, p) ==
          doctest::Approx(rate::coding_rate(Z, rate::alpha_for(p, 4, 40))).epsilon(1e-15));
  }

  SUBCASE("orthogonal singletons, fixed alpha 1") {
    Matrix E = Matrix::Identity(2, 2);
    Partition part({0, 1}, 2);
    const double got = rate::class_rate_average(E, part, fixed_alpha(1.0));
    CHECK(got == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  }

  SUBCASE("mean of per-class rates, CountScaled") {
    RateParams p;
    Partition part = oracle::random_partition(rng, 40, 4);
    const auto members = part.members();
    double want = 0.0;
    for (const auto& cols : members) {
      const Matrix Zj = ldr::select_columns(Z, cols);
      want += oracle::svd_coding_rate(Zj, rate::alpha_for(p, 4, static_cast<Index>(cols.size())));
    }
    want /= 4.0;
    CHECK(std::abs(rate::class_rate_average(Z, part, p) - want) < 1e-10);
  }

  SUBCASE("k = 0 rejected") {
    CHECK_THROWS_AS(rate::class_rate_average(Z, Partition({}, 0), RateParams{}), ldr::Error);
  }
}

TEST_CASE("rate_reduction basics") {
  SUBCASE("k = 1 gives exactly zero") {
    Rng rng(5);
    const Matrix Z = oracle::random_unit_columns(rng, 6, 12);
    CHECK(rate::rate_reduction(Z, Partition::single_class(12), RateParams{}) == 0.0);
  }

  SUBCASE("two orthogonal singletons, fixed alpha") {
    Matrix E = Matrix::Identity(2, 2);
    Partition part({0, 1}, 2);
    CHECK(rate::rate_reduction(E, part, fixed_alpha(1.0)) ==
          doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  }

  SUBCASE("same-line classes score below orthogonal classes") {
    // Identical per-class spectra; only the relative placement differs.
    Matrix orth(2, 4);
    orth << 1, 1, 0, 0, 0, 0, 1, 1;
    Matrix line(2, 4);
    line << 1, 1, 1, 1, 0, 0, 0, 0;
    Partition part({0, 0, 1, 1}, 2);
    const auto p = fixed_alpha(1.0);
    CHECK(rate::rate_reduction(line, part, p) < rate::rate_reduction(orth, part, p) - 1e-6);
  }
}

TEST_CASE("rate_gradient closed form and oracle") {
  SUBCASE("identity input") {
    const Matrix got = rate::rate_gradient(Matrix::Identity(2, 2), 1.0);
    CHECK((got - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-14);
  }
  SUBCASE("zero input") {
    const Matrix got = rate::rate_gradient(Matrix::Zero(3, 5), 7.0);
    CHECK(got.norm() == 0.0);
  }
  SUBCASE("finite differences, wide and tall") {
    Rng rng(23);
    for (const auto [d, n] : {std::pair<Index, Index>{6, 20}, {20, 6}}) {
      const Matrix Z = rng.gaussian_matrix(d, n);
      const double alpha = 1.0;
      const Matrix got = rate::rate_gradient(Z, alpha);
      const Matrix want = oracle::finite_difference_gradient(
          [&](const Matrix& M) { return rate::coding_rate(M, alpha); }, Z);
      CHECK(oracle::relative_error(got, want) < 1e-6);
    }
  }
}

TEST_CASE("rate_reduction_gradient") {
  SUBCASE("k = 1 gives the zero matrix") {
    Rng rng(2);
    const Matrix Z = oracle::random_unit_columns(rng, 5, 9);
    const Matrix got = rate::rate_reduction_gradient(Z, Partition::single_class(9), RateParams{});
    CHECK(got.cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("finite differences on a 3-class problem") {
    Rng rng(29);
    const Matrix Z = rng.gaussian_matrix(5, 15);
    const Partition part = oracle::random_partition(rng, 15, 3);
    RateParams p;
    const Matrix got = rate::rate_reduction_gradient(Z, part, p);
    const Matrix want = oracle::finite_difference_gradient(
        [&](const Matrix& M) { return rate::rate_reduction(M, part, p); }, Z);
    CHECK(oracle::relative_error(got, want) < 1e-6);
  }

  SUBCASE("singleton classes expand to (E - C^j/k) z_j") {
    Rng rng(31);
    const Index d = 4;
    const Matrix Z = oracle::random_unit_columns(rng, d, 3);
    const Partition part({0, 1, 2}, 3);
    const auto p = fixed_alpha(0.8);
    const Matrix grad = rate::rate_reduction_gradient(Z, part, p);
    for (Index j = 0; j < 3; ++j) {
      const Matrix G = Matrix::Identity(d, d) + 0.8 * (Z * Z.transpose());
      const Matrix E = 0.8 * G.inverse();
      const Matrix Gj = Matrix::Identity(d, d) + 0.8 * (Z.col(j) * Z.col(j).transpose());
      const Matrix Cj = 0.8 * Gj.inverse();
      const auto want = (E - Cj / 3.0) * Z.col(j);
      CHECK((grad.col(j) - want).norm() < 1e-10);
    }
  }

  SUBCASE("size-weighted average gradient matches finite differences") {
    Rng rng(37);
    const Matrix Z = rng.gaussian_matrix(4, 12);
    const Partition part = oracle::random_partition(rng, 12, 3);
    RateParams p;
    p.size_weighted = true;
    const Matrix got = rate::rate_reduction_gradient(Z, part, p);
    const Matrix want = oracle::finite_difference_gradient(
        [&](const Matrix& M) { return rate::rate_reduction(M, part, p); }, Z);
    CHECK(oracle::relative_error(got, want) < 1e-6);
  }
}

TEST_CASE("pairwise_rate_reduction") {
  Rng rng(41);
  const Matrix Z = oracle::random_unit_columns(rng, 6, 14);
  RateParams p;

  SUBCASE("duplication gives zero under CountScaled") {
    CHECK(std::abs(rate::pairwise_rate_reduction(Z, Z, p)) < 1e-12);
  }
  SUBCASE("distinct subspaces give a strictly positive value") {
    Matrix A = Matrix::Zero(2, 6);
    Matrix B = Matrix::Zero(2, 6);
    Rng r2(43);
    for (Index i = 0; i < 6; ++i) {
      A(0, i) = r2.gaussian();
      B(1, i) = A(0, i);  // same spectrum on an orthogonal line
    }
    CHECK(rate::pairwise_rate_reduction(A, B, p) > 1e-3);
  }
  SUBCASE("column permutation is invisible") {
    Matrix P = Z;
    std::vector<Index> order(static_cast<std::size_t>(Z.cols()));
    for (Index i = 0; i < Z.cols(); ++i) order[static_cast<std::size_t>(i)] = Z.cols() - 1 - i;
    const Matrix Zperm = ldr::select_columns(Z, order);
    CHECK(std::abs(rate::pairwise_rate_reduction(Z, Zperm, p)) < 1e-12);
  }
  SUBCASE("dimension mismatch raises ShapeError") {
    CHECK_THROWS_AS(rate::pairwise_rate_reduction(Z, Matrix::Zero(5, 3), p), ShapeError);
  }
}

TEST_CASE("pairwise gradients match finite differences") {
  Rng rng(47);
  const Matrix Z = rng.gaussian_matrix(4, 7);
  const Matrix Zh = rng.gaussian_matrix(4, 9);
  RateParams p;
  const auto got = rate::pairwise_rate_reduction_gradients(Z, Zh, p);
  const Matrix want_z = oracle::finite_difference_gradient(
      [&](const Matrix& M) { return rate::pairwise_rate_reduction(M, Zh, p); }, Z);
  const Matrix want_zh = oracle::finite_difference_gradient(
      [&](const Matrix& M) { return rate::pairwise_rate_reduction(Z, M, p); }, Zh);
  CHECK(oracle::relative_error(got.d_Z, want_z) < 1e-6);
  CHECK(oracle::relative_error(got.d_Zhat, want_zh) < 1e-6);
}

TEST_CASE("invariance properties") {
  Rng rng(53);
  const Matrix Z = oracle::random_unit_columns(rng, 6, 18);
  RateParams p;
  const double alpha = rate::alpha_for(p, 6, 18);

  SUBCASE("column permutation") {
    std::vector<Index> order(18);
    for (Index i = 0; i < 18; ++i) order[static_cast<std::size_t>(i)] = (i * 7) % 18;
    const Matrix Zp = ldr::select_columns(Z, order);
    CHECK(std::abs(rate::coding_rate(Z, alpha) - rate::coding_rate(Zp, alpha)) < 1e-12);

    Partition part = oracle::random_partition(rng, 18, 3);
    std::vector<std::int32_t> permuted_labels(18);
    for (Index i = 0; i < 18; ++i) {
      permuted_labels[static_cast<std::size_t>(i)] =
          part.class_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    }
    const Partition part_p(std::move(permuted_labels), 3);
    CHECK(std::abs(rate::rate_reduction(Z, part, p) - rate::rate_reduction(Zp, part_p, p)) < 1e-12);
  }

  SUBCASE("rotation") {
    Rng r2(59);
    Eigen::HouseholderQR<Matrix> qr(r2.gaussian_matrix(6, 6));
    const Matrix Q = qr.householderQ();
    CHECK(std::abs(rate::coding_rate(Q * Z, alpha) - rate::coding_rate(Z, alpha)) < 1e-10);
  }

  SUBCASE("duplication under CountScaled") {
    Matrix ZZ(6, 36);
    ZZ << Z, Z;
    const double a2 = rate::alpha_for(p, 6, 36);
    CHECK(std::abs(rate::coding_rate(ZZ, a2) - rate::coding_rate(Z, alpha)) < 1e-10);
  }

  SUBCASE("strict monotonicity in alpha") {
    CHECK(rate::coding_rate(Z, 0.5) < rate::coding_rate(Z, 1.0));
    CHECK(rate::coding_rate(Z, 1.0) < rate::coding_rate(Z, 2.0));
  }
}

TEST_CASE("gradients match finite differences across 20 seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Index d = 3 + static_cast<Index>(rng.below(6));   // <= 8
    const Index n = 8 + static_cast<Index>(rng.below(25));  // <= 32
    const int k = 2 + static_cast<int>(rng.below(3));       // <= 4
    const Matrix Z = rng.gaussian_matrix(d, n);
    RateParams p;
    const double alpha = rate::alpha_for(p, d, n);

    const Matrix g1 = rate::rate_gradient(Z, alpha);
    const Matrix w1 = oracle::finite_difference_gradient(
        [&](const Matrix& M) { return rate::coding_rate(M, alpha); }, Z);
    CHECK(oracle::relative_error(g1, w1) < 1e-6);

    const Partition part = oracle::random_partition(rng, n, k);
    const Matrix g2 = rate::rate_reduction_gradient(Z, part, p);
    const Matrix w2 = oracle::finite_difference_gradient(
        [&](const Matrix& M) { return rate::rate_reduction(M, part, p); }, Z);
    CHECK(oracle::relative_error(g2, w2) < 1e-6);
  }
}

TEST_CASE("orthogonal placement maximizes two-class rate reduction") {
  // d = 2, two 1-D classes with identical spectra; sweep the angle of the
  // second line. The maximum over the sweep must sit at the orthogonal
  // placement.
  const Index per_class = 8;
  Rng rng(61);
  Eigen::VectorXd coeffs(per_class);
  for (Index i = 0; i < per_class; ++i) coeffs(i) = rng.gaussian();

  const auto delta_r_at = [&](double theta) {
    Matrix Z(2, 2 * per_class);
    for (Index i = 0; i < per_class; ++i) {
      Z.col(i) << coeffs(i), 0.0;
      Z.col(per_class + i) << coeffs(i) * std::cos(theta), coeffs(i) * std::sin(theta);
    }
    std::vector<std::int32_t> labels(static_cast<std::size_t>(2 * per_class), 0);
    for (Index i = per_class; i < 2 * per_class; ++i) labels[static_cast<std::size_t>(i)] = 1;
    return rate::rate_reduction(Z, ldr::Partition(std::move(labels), 2), rate::RateParams{});
  };

  const double at_orthogonal = delta_r_at(M_PI / 2.0);
  for (int s = 0; s <= 180; ++s) {
    const double theta = M_PI * static_cast<double>(s) / 180.0;
    CHECK(delta_r_at(theta) <= at_orthogonal + 1e-12);
  }
}
