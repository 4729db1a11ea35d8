#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ldr/attention.hpp"
#include "ldr/rate.hpp"
#include "ldr/rng.hpp"
#include "oracles.hpp"

using ldr::Index;
using ldr::Matrix;
using ldr::Rng;
namespace attention = ldr::attention;
namespace rate = ldr::rate;

namespace {

double lambda_max(const Matrix& Z) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Z * Z.transpose());
  return eig.eigenvalues().maxCoeff();
}

Matrix scaled_to_alpha_lmax(const Matrix& Z, double alpha, double target) {
  // Rescale Z so alpha * lambda_max(Z Z^T) hits the target.
  return Z * std::sqrt(target / (alpha * lambda_max(Z)));
}

attention::AttentionLayer identity_layer(Index d, double alpha) {
  attention::AttentionLayer layer;
  layer.U_o = Matrix::Identity(d, d);
  layer.U_v = Matrix::Identity(d, d);
  layer.U_k = Matrix::Identity(d, d);
  layer.U_q = Matrix::Identity(d, d);
  layer.alpha = alpha;
  return layer;
}

}  // namespace

TEST_CASE("approx_rate_gradient closed forms") {
  CHECK(attention::approx_rate_gradient(Matrix::Zero(3, 4), 1.0).norm() == 0.0);

  // At alpha lambda_max = 1 the first-order expansion degenerates to zero
  // while the exact gradient is l/2.
  const Matrix Z = Matrix::Identity(2, 2);
  const Matrix approx = attention::approx_rate_gradient(Z, 1.0);
  CHECK(approx.cwiseAbs().maxCoeff() < 1e-15);
  CHECK((rate::rate_gradient(Z, 1.0) - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("small-spectrum regime: relative error under 0.006 at 0.05") {
  Rng rng(7);
  Matrix Z = rng.gaussian_matrix(6, 24);
  const double alpha = 1.0;
  Z = scaled_to_alpha_lmax(Z, alpha, 0.05);
  const Matrix exact = rate::rate_gradient(Z, alpha);
  const Matrix approx = attention::approx_rate_gradient(Z, alpha);
  CHECK((exact - approx).norm() / exact.norm() <= 0.006);
}

TEST_CASE("attention_layer_forward") {
  Rng rng(11);
  const Matrix Z = oracle::random_unit_columns(rng, 5, 12);

  SUBCASE("zero transforms are the identity map") {
    attention::AttentionLayer layer;
    layer.U_o = Matrix::Zero(5, 5);
    layer.U_v = Matrix::Zero(5, 5);
    layer.U_k = Matrix::Zero(5, 5);
    layer.U_q = Matrix::Zero(5, 5);
    layer.alpha = 1.0;
    CHECK((attention::attention_layer_forward(Z, layer) - Z).norm() == 0.0);
  }

  SUBCASE("identity transforms reduce to the printed update") {
    const double alpha = 0.3;
    const Matrix got = attention::attention_layer_forward(Z, identity_layer(5, alpha));
    const Matrix want = Z + (Z - alpha * Z * (Z.transpose() * Z));
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
    // Which is Z plus the first-order gradient divided by alpha.
    const Matrix via_grad = Z + attention::approx_rate_gradient(Z, alpha) / alpha;
    CHECK((got - via_grad).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("alpha -> 0 limit is Z + U_o Z exactly") {
    Rng r2(13);
    attention::AttentionLayer layer = identity_layer(5, 0.0);
    layer.U_o = r2.gaussian_matrix(5, 5);
    // alpha = 0 is the exact limit; the bracket collapses to Z.
    const Matrix got = attention::attention_layer_forward(Z, layer);
    CHECK((got - (Z + layer.U_o * Z)).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("one attention step increases the coding rate on sub-sphere data") {
    const double alpha = 0.05 / lambda_max(Z);
    Matrix advanced = attention::attention_layer_forward(Z, identity_layer(5, alpha));
    advanced = ldr::normalize_columns(advanced);
    CHECK(rate::coding_rate(advanced, alpha) > rate::coding_rate(Z, alpha));
  }

  SUBCASE("shape mismatch raises") {
    attention::AttentionLayer layer = identity_layer(4, 1.0);
    CHECK_THROWS_AS(attention::attention_layer_forward(Z, layer), ldr::ShapeError);
  }
}

TEST_CASE("multi_head_forward") {
  Rng rng(17);
  const Matrix Z = oracle::random_unit_columns(rng, 4, 10);

  SUBCASE("one head reduces to attention_layer_forward") {
    attention::AttentionLayer head = identity_layer(4, 0.2);
    head.U_v = rng.gaussian_matrix(4, 4);
    std::vector<attention::AttentionLayer> heads{head};
    CHECK((attention::multi_head_forward(Z, heads) -
           attention::attention_layer_forward(Z, head))
              .norm() == 0.0);
  }

  SUBCASE("heads sum after U_o") {
    std::vector<attention::AttentionLayer> heads;
    for (int h = 0; h < 3; ++h) {
      attention::AttentionLayer head = identity_layer(4, 0.1 * (h + 1));
      head.U_o = rng.gaussian_matrix(4, 4);
      heads.push_back(head);
    }
    Matrix want = Z;
    for (const auto& head : heads) {
      want += attention::attention_layer_forward(Z, head) - Z;
    }
    CHECK((attention::multi_head_forward(Z, heads) - want).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("no heads rejected") {
    CHECK_THROWS_AS(attention::multi_head_forward(Z, {}), ldr::DegenerateInput);
  }
}

TEST_CASE("approximation_error_profile") {
  Rng rng(23);
  const Matrix Z = oracle::random_unit_columns(rng, 6, 20);
  const double lmax = lambda_max(Z);

  std::vector<double> alphas;
  for (int i = 1; i <= 10; ++i) alphas.push_back(0.01 * i / lmax);
  const auto profile = attention::approximation_error_profile(Z, alphas);
  REQUIRE(profile.size() == 10);

  SUBCASE("keys are alpha lambda_max and the curve is monotone") {
    for (std::size_t i = 0; i < profile.size(); ++i) {
      CHECK(profile[i].alpha_lmax == doctest::Approx(0.01 * static_cast<double>(i + 1)));
      if (i > 0) CHECK(profile[i].rel_err >= profile[i - 1].rel_err);
    }
  }

  SUBCASE("first-order consistency bound across 20 seeds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng r(seed);
      const Matrix W = oracle::random_unit_columns(r, 4 + static_cast<Index>(seed % 4), 16);
      const double wl = lambda_max(W);
      std::vector<double> grid;
      for (int i = 1; i <= 8; ++i) grid.push_back(0.0125 * i / wl);  // alpha lmax <= 0.1
      for (const auto& p : attention::approximation_error_profile(W, grid)) {
        CHECK(p.rel_err <= 1.5 * p.alpha_lmax);
      }
    }
  }
}
