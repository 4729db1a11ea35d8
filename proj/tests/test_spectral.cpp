#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldr/datagen.hpp"
#include "ldr/redunet.hpp"
#include "ldr/rng.hpp"
#include "ldr/spectral.hpp"
#include "oracles.hpp"

using ldr::Index;
using ldr::Matrix;
using ldr::Partition;
using ldr::Rng;
using ldr::Vector;
namespace spectral = ldr::spectral;
namespace redunet = ldr::redunet;
namespace rate = ldr::rate;
using spectral::MultiChannelSignal;

namespace {

std::vector<MultiChannelSignal> random_signal_set(std::uint64_t seed, Index channels, Index taps,
                                                  Index count) {
  return ldr::data::random_signals(channels, taps, count, 0.0, seed, 0);
}

// Dense feature matrix of all shifts (the explicit augmentation the
// spectral path avoids).
Matrix dense_augmentation(std::span<const MultiChannelSignal> samples) {
  const Index t = samples.front().taps();
  const Index d = samples.front().channels() * t;
  Matrix Z(d, static_cast<Index>(samples.size()) * t);
  Index col = 0;
  for (const auto& s : samples) {
    for (const auto& shifted : spectral::shift_augment(s)) {
      Z.col(col++) = spectral::vectorize(shifted);
    }
  }
  return Z;
}

}  // namespace

TEST_CASE("cyclic_shift and vectorize round trips") {
  Rng rng(3);
  const MultiChannelSignal x{rng.gaussian_matrix(2, 5)};
  CHECK((spectral::cyclic_shift(x, 5).values - x.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((spectral::cyclic_shift(spectral::cyclic_shift(x, 2), 3).values - x.values)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  const Vector v = spectral::vectorize(x);
  CHECK((spectral::unvectorize(v, 2, 5).values - x.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shift_augment") {
  SUBCASE("T = 1 returns the signal itself") {
    MultiChannelSignal x{Matrix::Constant(3, 1, 2.0)};
    const auto shifts = spectral::shift_augment(x);
    REQUIRE(shifts.size() == 1);
    CHECK((shifts[0].values - x.values).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("delta signal visits every tap") {
    Matrix m = Matrix::Zero(1, 4);
    m(0, 0) = 1.0;
    const auto shifts = spectral::shift_augment(MultiChannelSignal{m});
    REQUIRE(shifts.size() == 4);
    for (Index tau = 0; tau < 4; ++tau) {
      CHECK(shifts[static_cast<std::size_t>(tau)].values(0, tau) == 1.0);
      CHECK(shifts[static_cast<std::size_t>(tau)].values.sum() == 1.0);
    }
  }
  SUBCASE("augmenting a shifted signal permutes the orbit") {
    Rng rng(5);
    const MultiChannelSignal x{rng.gaussian_matrix(2, 6)};
    auto orbit_a = spectral::shift_augment(x);
    auto orbit_b = spectral::shift_augment(spectral::cyclic_shift(x, 1));
    Matrix sum_a = Matrix::Zero(2, 6), sum_b = Matrix::Zero(2, 6);
    for (const auto& s : orbit_a) sum_a += s.values;
    for (const auto& s : orbit_b) sum_b += s.values;
    CHECK((sum_a - sum_b).cwiseAbs().maxCoeff() < 1e-12);  // orbit sums agree
    // And element-wise: orbit_b[tau] = orbit_a[tau + 1].
    for (std::size_t tau = 0; tau < orbit_b.size(); ++tau) {
      CHECK((orbit_b[tau].values - orbit_a[(tau + 1) % orbit_a.size()].values)
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("circulant_expansion") {
  SUBCASE("zero samples give alpha I blocks") {
    const auto op = spectral::circulant_expansion({}, 2.0, spectral::SignalShape{2, 4});
    REQUIRE(op.bins() == 4);
    for (const auto& b : op.blocks) {
      CHECK((b - 2.0 * ldr::ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("single channel flat spectrum collapses to a scalar") {
    // A one-channel delta has |X(f)|^2 = 1 at every bin (unnormalized DFT),
    // so every block is alpha / (1 + alpha).
    Matrix m = Matrix::Zero(1, 8);
    m(0, 0) = 1.0;
    std::vector<MultiChannelSignal> xs{MultiChannelSignal{m}};
    const double alpha = 0.7;
    const auto op = spectral::circulant_expansion(xs, alpha);
    for (const auto& b : op.blocks) {
      CHECK(std::abs(b(0, 0).real() - alpha / (1.0 + alpha)) < 1e-12);
      CHECK(std::abs(b(0, 0).imag()) < 1e-15);
    }
  }

  SUBCASE("densify equals the dense expansion operator on the augmented set") {
    for (const auto [channels, taps] : {std::pair<Index, Index>{1, 8}, {2, 6}, {3, 5}}) {
      const auto xs = random_signal_set(11, channels, taps, 3);
      const double alpha = 0.9;
      const auto op = spectral::circulant_expansion(xs, alpha);
      const Matrix dense_op = spectral::densify(op);
      const Matrix want = redunet::expansion_operator(dense_augmentation(xs), alpha);
      CHECK((dense_op - want).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  SUBCASE("conjugate symmetry holds") {
    const auto xs = random_signal_set(13, 2, 7, 4);
    const auto op = spectral::circulant_expansion(xs, 1.1);
    CHECK(op.conjugate_symmetric);
    CHECK(spectral::conjugate_symmetry_error(op) < 1e-10);
  }

  SUBCASE("inconsistent shapes are rejected") {
    Rng rng(7);
    std::vector<MultiChannelSignal> xs{MultiChannelSignal{rng.gaussian_matrix(2, 4)},
                                       MultiChannelSignal{rng.gaussian_matrix(2, 5)}};
    CHECK_THROWS_AS(spectral::circulant_expansion(xs, 1.0), ldr::ShapeError);
  }
}

TEST_CASE("circulant_compressions") {
  const auto xs = random_signal_set(17, 2, 6, 5);
  rate::RateParams params;

  SUBCASE("one class equals circulant_expansion") {
    const auto ops =
        spectral::circulant_compressions(xs, Partition::single_class(5), params);
    REQUIRE(ops.size() == 1);
    const double alpha = rate::alpha_for(params, 2 * 6, 5 * 6);
    const auto want = spectral::circulant_expansion(xs, alpha);
    for (Index f = 0; f < 6; ++f) {
      CHECK((ops[0].blocks[static_cast<std::size_t>(f)] - want.blocks[static_cast<std::size_t>(f)])
                .cwiseAbs()
                .maxCoeff() < 1e-14);
    }
  }

  SUBCASE("dense oracle equivalence per class") {
    Rng rng(19);
    const Partition part = oracle::random_partition(rng, 5, 2);
    const auto ops = spectral::circulant_compressions(xs, part, params);
    const auto members = part.members();
    for (int j = 0; j < 2; ++j) {
      std::vector<MultiChannelSignal> class_signals;
      for (Index i : members[static_cast<std::size_t>(j)]) {
        class_signals.push_back(xs[static_cast<std::size_t>(i)]);
      }
      const Matrix Zj = dense_augmentation(class_signals);
      const double aj = rate::alpha_for(params, 12, Zj.cols());
      const Matrix want = redunet::expansion_operator(Zj, aj);
      CHECK((spectral::densify(ops[static_cast<std::size_t>(j)]) - want).cwiseAbs().maxCoeff() <
            1e-8);
    }
  }

  SUBCASE("empty class gives alpha I blocks") {
    std::vector<std::int32_t> labels{0, 0, 0, 0, 0};
    const Partition part(labels, 2, /*allow_empty=*/true);
    const auto ops = spectral::circulant_compressions(xs, part, params);
    const double alpha_one = rate::alpha_for(params, 12, 6);  // one-signal convention
    for (const auto& b : ops[1].blocks) {
      CHECK((b - alpha_one * ldr::ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("spectral_apply") {
  const auto xs = random_signal_set(23, 2, 8, 3);
  const auto op = spectral::circulant_expansion(xs, 1.3);

  SUBCASE("identity blocks leave the signal unchanged") {
    spectral::SpectralOperator id;
    id.alpha = 1.0;
    id.blocks.assign(8, ldr::ComplexMatrix::Identity(2, 2));
    id.conjugate_symmetric = true;
    const auto y = spectral::spectral_apply(id, xs[0]);
    CHECK((y.values - xs[0].values).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("commutes with cyclic shift") {
    for (Index tau = 0; tau < 8; ++tau) {
      const auto a = spectral::spectral_apply(op, spectral::cyclic_shift(xs[0], tau));
      const auto b = spectral::cyclic_shift(spectral::spectral_apply(op, xs[0]), tau);
      CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SUBCASE("matches densify times vec") {
    const Matrix dense = spectral::densify(op);
    for (const auto& x : xs) {
      const Vector want = dense * spectral::vectorize(x);
      const Vector got = spectral::vectorize(spectral::spectral_apply(op, x));
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("spectral build matches the dense-augmented build end-to-end") {
  // C <= 3, T <= 16 oracle regime.
  for (const auto [channels, taps] : {std::pair<Index, Index>{2, 8}, {3, 5}}) {
    const Index per_class = 2;
    const int k = 2;
    auto signals = random_signal_set(29 + static_cast<std::uint64_t>(channels), channels, taps,
                                     per_class * k);
    std::vector<std::int32_t> labels;
    for (int j = 0; j < k; ++j) {
      for (Index i = 0; i < per_class; ++i) labels.push_back(j);
    }
    const Partition part(labels, k);

    redunet::BuildConfig cfg;
    cfg.num_layers = 6;
    cfg.eta = 0.5;
    cfg.lambda = 1.0;

    const auto model = spectral::build_spectral_redunet(signals, part, cfg);

    // Dense oracle: same unrolling on the explicitly augmented matrix.
    const auto [Z0, aug_part] = spectral::augment_to_feature_matrix(signals, part);
    const auto dense_model = redunet::build_redunet(Z0, aug_part, cfg);

    const auto feats = spectral::forward_supervised(model, signals, part);
    Matrix dense_feats = Z0;
    for (const auto& layer : dense_model.layers) {
      dense_feats = redunet::layer_forward_supervised(dense_feats, layer, aug_part);
    }
    // Column of shift tau of sample i must equal the tau-shift of the
    // spectral feature of sample i.
    Index col = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < signals.size(); ++i) {
      for (Index tau = 0; tau < taps; ++tau) {
        const Vector want = dense_feats.col(col++);
        const Vector got = spectral::vectorize(spectral::cyclic_shift(feats[i], tau));
        worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
      }
    }
    CHECK(worst < 1e-7);

    // Layer operators agree with the dense operators after densify.
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      CHECK((spectral::densify(model.layers[l].E) - dense_model.layers[l].E)
                .cwiseAbs()
                .maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("shift invariance of classification") {
  const Index taps = 8;
  const auto bases = ldr::data::random_signals(2, taps, 3, 0.0, 31, 3);
  std::vector<MultiChannelSignal> signals;
  std::vector<std::int32_t> labels;
  Rng rng(37);
  for (int j = 0; j < 3; ++j) {
    for (int copy = 0; copy < 4; ++copy) {
      Matrix v = bases[static_cast<std::size_t>(j)].values + 0.02 * rng.gaussian_matrix(2, taps);
      signals.emplace_back(Matrix(v / v.norm()));
      labels.push_back(j);
    }
  }
  const Partition part(labels, 3);

  redunet::BuildConfig cfg;
  cfg.num_layers = 10;
  cfg.eta = 0.5;
  const auto model = spectral::build_spectral_redunet(signals, part, cfg);

  for (const auto& s : signals) {
    const int base_class = spectral::classify(model, s);
    for (Index tau = 1; tau < taps; ++tau) {
      CHECK(spectral::classify(model, spectral::cyclic_shift(s, tau)) == base_class);
    }
  }
}

TEST_CASE("conjugate symmetry maintained through a build") {
  const auto signals = random_signal_set(41, 2, 6, 4);
  redunet::BuildConfig cfg;
  cfg.num_layers = 4;
  const auto model =
      spectral::build_spectral_redunet(signals, Partition::single_class(4), cfg);
  for (const auto& layer : model.layers) {
    CHECK(layer.E.conjugate_symmetric);
    CHECK(spectral::conjugate_symmetry_error(layer.E) < 1e-10);
    for (const auto& c : layer.C) CHECK(spectral::conjugate_symmetry_error(c) < 1e-10);
  }
}

TEST_CASE("unit signal norm preserved per layer") {
  const auto signals = random_signal_set(43, 2, 8, 6);
  Rng rng(45);
  const Partition part = oracle::random_partition(rng, 6, 2);
  redunet::BuildConfig cfg;
  cfg.num_layers = 8;
  const auto model = spectral::build_spectral_redunet(signals, part, cfg);
  const auto rec = spectral::forward(model, signals);
  for (const auto& f : rec.features) {
    CHECK(std::abs(f.norm() - 1.0) < 1e-10);
  }
}
