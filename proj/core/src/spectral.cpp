#include "ldr/spectral.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <complex>

#include "ldr/fft.hpp"

namespace ldr::spectral {

namespace {

void check_same_shape(std::span<const MultiChannelSignal> samples) {
  if (samples.empty()) return;
  const Index c = samples.front().channels();
  const Index t = samples.front().taps();
  for (const auto& s : samples) {
    if (s.channels() != c || s.taps() != t) {
      throw ShapeError("signals must share channel count and tap count");
    }
  }
}

// Hermitian resolvent alpha (I + alpha T Sigma)^{-1} per bin.
ComplexMatrix bin_resolvent(const ComplexMatrix& sigma, double alpha, double taps) {
  const Index c = sigma.rows();
  const ComplexMatrix G = ComplexMatrix::Identity(c, c) + (alpha * taps) * sigma;
  Eigen::LLT<ComplexMatrix> llt(G);
  if (llt.info() != Eigen::Success) throw InvalidMatrix("spectral resolvent failed");
  ComplexMatrix M = alpha * llt.solve(ComplexMatrix::Identity(c, c));
  return 0.5 * (M + M.adjoint());
}

SpectralOperator operator_from_dfts(std::span<const ComplexMatrix> dfts, Index channels,
                                    Index taps, double alpha) {
  SpectralOperator op;
  op.alpha = alpha;
  op.blocks.resize(static_cast<std::size_t>(taps));
  for (Index f = 0; f < taps; ++f) {
    ComplexMatrix sigma = ComplexMatrix::Zero(channels, channels);
    for (const auto& X : dfts) {
      sigma.noalias() += X.col(f) * X.col(f).adjoint();
    }
    op.blocks[static_cast<std::size_t>(f)] =
        bin_resolvent(sigma, alpha, static_cast<double>(taps));
  }
  op.conjugate_symmetric = conjugate_symmetry_error(op) <= 1e-10;
  return op;
}

SpectralOperator identity_scaled_operator(Index channels, Index taps, double alpha) {
  SpectralOperator op;
  op.alpha = alpha;
  op.blocks.assign(static_cast<std::size_t>(taps),
                   alpha * ComplexMatrix::Identity(channels, channels));
  op.conjugate_symmetric = true;
  return op;
}

}  // namespace

MultiChannelSignal::MultiChannelSignal(Matrix v) : values(std::move(v)) {
  if (values.rows() < 1 || values.cols() < 1) {
    throw DegenerateInput("signal needs at least one channel and one tap");
  }
  require_finite(values, "signal");
}

MultiChannelSignal cyclic_shift(const MultiChannelSignal& x, Index tau) {
  const Index t = x.taps();
  Matrix out(x.channels(), t);
  for (Index col = 0; col < t; ++col) {
    Index src = (col - tau) % t;
    if (src < 0) src += t;
    out.col(col) = x.values.col(src);
  }
  return MultiChannelSignal(std::move(out));
}

Vector vectorize(const MultiChannelSignal& x) {
  const Index c = x.channels();
  const Index t = x.taps();
  Vector v(c * t);
  for (Index ch = 0; ch < c; ++ch) {
    v.segment(ch * t, t) = x.values.row(ch).transpose();
  }
  return v;
}

MultiChannelSignal unvectorize(const Vector& v, Index channels, Index taps) {
  if (v.size() != channels * taps) throw ShapeError("unvectorize: size mismatch");
  Matrix m(channels, taps);
  for (Index ch = 0; ch < channels; ++ch) {
    m.row(ch) = v.segment(ch * taps, taps).transpose();
  }
  return MultiChannelSignal(std::move(m));
}

double conjugate_symmetry_error(const SpectralOperator& op) {
  const Index t = op.bins();
  double worst = 0.0;
  for (Index f = 0; f < t; ++f) {
    const Index g = (t - f) % t;
    worst = std::max(worst, (op.blocks[static_cast<std::size_t>(f)] -
                             op.blocks[static_cast<std::size_t>(g)].conjugate())
                                .cwiseAbs()
                                .maxCoeff());
  }
  return worst;
}

std::vector<MultiChannelSignal> shift_augment(const MultiChannelSignal& x) {
  std::vector<MultiChannelSignal> out;
  out.reserve(static_cast<std::size_t>(x.taps()));
  for (Index tau = 0; tau < x.taps(); ++tau) out.push_back(cyclic_shift(x, tau));
  return out;
}

SpectralOperator circulant_expansion(std::span<const MultiChannelSignal> samples, double alpha,
                                     std::optional<SignalShape> shape) {
  if (!(alpha > 0.0)) throw DegenerateInput("circulant_expansion: alpha must be positive");
  if (samples.empty()) {
    if (!shape) throw DegenerateInput("circulant_expansion: no samples and no shape");
    return identity_scaled_operator(shape->channels, shape->taps, alpha);
  }
  check_same_shape(samples);
  const Index c = samples.front().channels();
  const Index t = samples.front().taps();

  std::vector<ComplexMatrix> dfts;
  dfts.reserve(samples.size());
  for (const auto& s : samples) dfts.push_back(fft::dft_rows(s.values));
  return operator_from_dfts(dfts, c, t, alpha);
}

std::vector<SpectralOperator> circulant_compressions(std::span<const MultiChannelSignal> samples,
                                                     const Partition& part,
                                                     const RateParams& params) {
  part.validate(static_cast<Index>(samples.size()));
  if (samples.empty()) throw DegenerateInput("circulant_compressions: no samples");
  check_same_shape(samples);
  const Index c = samples.front().channels();
  const Index t = samples.front().taps();

  std::vector<ComplexMatrix> dfts;
  dfts.reserve(samples.size());
  for (const auto& s : samples) dfts.push_back(fft::dft_rows(s.values));

  const auto members = part.members();
  std::vector<SpectralOperator> ops;
  ops.reserve(static_cast<std::size_t>(part.k));
  for (int j = 0; j < part.k; ++j) {
    const auto& idx = members[static_cast<std::size_t>(j)];
    if (idx.empty()) {
      // One-signal convention: T augmented columns of dimension C*T.
      ops.push_back(identity_scaled_operator(c, t, rate::alpha_for(params, c * t, t)));
      continue;
    }
    std::vector<ComplexMatrix> class_dfts;
    class_dfts.reserve(idx.size());
    for (Index i : idx) class_dfts.push_back(dfts[static_cast<std::size_t>(i)]);
    const double alpha_j =
        rate::alpha_for(params, c * t, static_cast<Index>(idx.size()) * t);
    ops.push_back(operator_from_dfts(class_dfts, c, t, alpha_j));
  }
  return ops;
}

MultiChannelSignal spectral_apply(const SpectralOperator& op, const MultiChannelSignal& x) {
  if (op.bins() != x.taps() || op.channels() != x.channels()) {
    throw ShapeError("spectral_apply: operator/signal shape mismatch");
  }
  ComplexMatrix X = fft::dft_rows(x.values);
  ComplexMatrix Y(X.rows(), X.cols());
  for (Index f = 0; f < x.taps(); ++f) {
    Y.col(f) = op.blocks[static_cast<std::size_t>(f)] * X.col(f);
  }
  return MultiChannelSignal(fft::idft_rows_real(Y));
}

Matrix densify(const SpectralOperator& op) {
  const Index c = op.channels();
  const Index t = op.bins();
  // m_{cc'}(u) = (1/T) sum_f B_f[c,c'] e^{2 pi i f u / T}; entry (s, t) of
  // block (c, c') is m_{cc'}(s - t mod T).
  Matrix dense(c * t, c * t);
  std::vector<std::complex<double>> kernel(static_cast<std::size_t>(t));
  for (Index a = 0; a < c; ++a) {
    for (Index b = 0; b < c; ++b) {
      ComplexMatrix seq(1, t);
      for (Index f = 0; f < t; ++f) seq(0, f) = op.blocks[static_cast<std::size_t>(f)](a, b);
      // Unitary inverse DFT carries 1/sqrt(T); the block-circulant kernel
      // needs 1/T.
      const ComplexMatrix k = fft::idft_rows(seq) / std::sqrt(static_cast<double>(t));
      for (Index u = 0; u < t; ++u) kernel[static_cast<std::size_t>(u)] = k(0, u);
      for (Index s = 0; s < t; ++s) {
        for (Index tt = 0; tt < t; ++tt) {
          Index u = (s - tt) % t;
          if (u < 0) u += t;
          dense(a * t + s, b * t + tt) = kernel[static_cast<std::size_t>(u)].real();
        }
      }
    }
  }
  return dense;
}

Vector soft_assignment(const MultiChannelSignal& x, std::span<const SpectralOperator> C,
                       double lambda) {
  const auto k = static_cast<Index>(C.size());
  if (k == 0) throw DegenerateInput("soft_assignment: no compression operators");
  if (!(lambda > 0.0)) throw DegenerateInput("soft_assignment: lambda must be positive");
  Vector score(k);
  for (Index j = 0; j < k; ++j) {
    score(j) = -lambda * spectral_apply(C[static_cast<std::size_t>(j)], x).norm();
  }
  const double m = score.maxCoeff();
  Vector pi = (score.array() - m).exp();
  pi /= pi.sum();
  return pi;
}

MultiChannelSignal layer_forward(const MultiChannelSignal& x, const SpectralLayer& layer) {
  if (x.norm() == 0.0) throw DegenerateInput("layer_forward: zero signal");
  const auto k = static_cast<Index>(layer.C.size());
  const Vector pi = soft_assignment(x, layer.C, layer.lambda);

  Matrix update = spectral_apply(layer.E, x).values;
  for (Index j = 0; j < k; ++j) {
    update -= (pi(j) / static_cast<double>(k)) *
              spectral_apply(layer.C[static_cast<std::size_t>(j)], x).values;
  }
  Matrix out = x.values + layer.eta * update;
  const double norm = out.norm();
  if (norm == 0.0) throw DegenerateInput("layer_forward: update annihilated the signal");
  return MultiChannelSignal(out / norm);
}

MultiChannelSignal layer_forward_supervised(const MultiChannelSignal& x,
                                            const SpectralLayer& layer, int class_index) {
  if (x.norm() == 0.0) throw DegenerateInput("layer_forward_supervised: zero signal");
  const auto k = static_cast<Index>(layer.C.size());
  if (class_index < 0 || class_index >= k) {
    throw DegenerateInput("layer_forward_supervised: class index out of range");
  }
  const Matrix update =
      spectral_apply(layer.E, x).values -
      spectral_apply(layer.C[static_cast<std::size_t>(class_index)], x).values /
          static_cast<double>(k);
  Matrix out = x.values + layer.eta * update;
  const double norm = out.norm();
  if (norm == 0.0) throw DegenerateInput("layer_forward_supervised: zero update");
  return MultiChannelSignal(out / norm);
}

SpectralReduNetModel build_spectral_redunet(std::span<const MultiChannelSignal> samples,
                                            const Partition& part, const BuildConfig& cfg) {
  part.validate(static_cast<Index>(samples.size()));
  if (samples.empty()) throw DegenerateInput("build_spectral_redunet: no samples");
  check_same_shape(samples);
  if (cfg.num_layers < 1) throw DegenerateInput("build_spectral_redunet: need >= 1 layer");
  for (const auto& s : samples) {
    if (std::abs(s.norm() - 1.0) > 1e-6) {
      throw DegenerateInput("build_spectral_redunet: signals must be unit-norm");
    }
  }

  SpectralReduNetModel model;
  model.channels = samples.front().channels();
  model.taps = samples.front().taps();
  model.k = part.k;
  model.params = cfg.params;
  model.eta = cfg.eta;
  model.lambda = cfg.lambda;

  const Index n = static_cast<Index>(samples.size());
  const Index d = model.channels * model.taps;
  std::vector<MultiChannelSignal> feats(samples.begin(), samples.end());

  for (int l = 0; l < cfg.num_layers; ++l) {
    const double alpha = rate::alpha_for(cfg.params, d, n * model.taps);
    SpectralLayer layer;
    layer.E = circulant_expansion(feats, alpha);
    layer.C = circulant_compressions(feats, part, cfg.params);
    layer.eta = cfg.eta;
    layer.lambda = cfg.lambda;
    std::vector<MultiChannelSignal> next(feats.size());
    for (std::size_t i = 0; i < feats.size(); ++i) {
      next[i] = layer_forward_supervised(feats[i], layer, part.class_of[i]);
    }
    feats = std::move(next);
    model.layers.push_back(std::move(layer));
  }

  // Shift-invariant class subspaces from the explicitly augmented final
  // features (desk-scale path).
  const auto members = part.members();
  for (int j = 0; j < part.k; ++j) {
    const auto& idx = members[static_cast<std::size_t>(j)];
    if (idx.empty()) {
      model.class_subspaces.emplace_back(Matrix::Zero(d, 0));
      continue;
    }
    Matrix Zj(d, static_cast<Index>(idx.size()) * model.taps);
    Index col = 0;
    for (Index i : idx) {
      for (const auto& shifted : shift_augment(feats[static_cast<std::size_t>(i)])) {
        Zj.col(col++) = vectorize(shifted);
      }
    }
    model.class_subspaces.push_back(redunet::class_subspace_basis(Zj, d, part.k));
  }
  return model;
}

SpectralForwardRecord forward(const SpectralReduNetModel& model,
                              std::span<const MultiChannelSignal> samples) {
  check_same_shape(samples);
  SpectralForwardRecord rec;
  rec.features.assign(samples.begin(), samples.end());
  for (const auto& layer : model.layers) {
    Matrix pis(static_cast<Index>(layer.C.size()), static_cast<Index>(rec.features.size()));
    for (std::size_t i = 0; i < rec.features.size(); ++i) {
      pis.col(static_cast<Index>(i)) = soft_assignment(rec.features[i], layer.C, layer.lambda);
      rec.features[i] = layer_forward(rec.features[i], layer);
    }
    rec.assignments.push_back(std::move(pis));
  }
  return rec;
}

std::vector<MultiChannelSignal> forward_supervised(const SpectralReduNetModel& model,
                                                   std::span<const MultiChannelSignal> samples,
                                                   const Partition& part) {
  part.validate(static_cast<Index>(samples.size()));
  std::vector<MultiChannelSignal> feats(samples.begin(), samples.end());
  for (const auto& layer : model.layers) {
    for (std::size_t i = 0; i < feats.size(); ++i) {
      feats[i] = layer_forward_supervised(feats[i], layer, part.class_of[i]);
    }
  }
  return feats;
}

int classify(const SpectralReduNetModel& model, const MultiChannelSignal& x) {
  if (model.class_subspaces.empty()) throw DegenerateInput("model has no class subspaces");
  std::vector<MultiChannelSignal> one{x};
  const auto rec = forward(model, one);
  const Vector z = vectorize(rec.features.front());
  int best = 0;
  double best_score = -1.0;
  for (int j = 0; j < static_cast<int>(model.class_subspaces.size()); ++j) {
    const Matrix& U = model.class_subspaces[static_cast<std::size_t>(j)];
    const double score = U.cols() > 0 ? (U.transpose() * z).squaredNorm() : 0.0;
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

std::pair<Matrix, Partition> augment_to_feature_matrix(std::span<const MultiChannelSignal> samples,
                                                       const Partition& part) {
  part.validate(static_cast<Index>(samples.size()));
  check_same_shape(samples);
  if (samples.empty()) throw DegenerateInput("augment_to_feature_matrix: no samples");
  const Index t = samples.front().taps();
  const Index d = samples.front().channels() * t;

  Matrix Z(d, static_cast<Index>(samples.size()) * t);
  std::vector<std::int32_t> labels;
  labels.reserve(static_cast<std::size_t>(Z.cols()));
  Index col = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (const auto& shifted : shift_augment(samples[i])) {
      Z.col(col++) = vectorize(shifted);
      labels.push_back(part.class_of[i]);
    }
  }
  return {std::move(Z), Partition(std::move(labels), part.k, part.allow_empty)};
}

std::vector<redunet::RateTraceRow> layer_rate_trace(const SpectralReduNetModel& model,
                                                    std::span<const MultiChannelSignal> samples,
                                                    const Partition& part) {
  std::vector<redunet::RateTraceRow> rows;
  rows.reserve(model.layers.size() + 1);
  std::vector<MultiChannelSignal> feats(samples.begin(), samples.end());

  const auto record = [&](int layer_index) {
    const auto [Z, aug_part] = augment_to_feature_matrix(feats, part);
    redunet::RateTraceRow row;
    row.layer = layer_index;
    row.R = rate::coding_rate(Z, rate::alpha_for(model.params, Z.rows(), Z.cols()));
    row.Rc = rate::class_rate_average(Z, aug_part, model.params);
    row.dR = row.R - row.Rc;
    rows.push_back(row);
  };

  record(0);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (std::size_t i = 0; i < feats.size(); ++i) {
      feats[i] = layer_forward_supervised(feats[i], model.layers[l], part.class_of[i]);
    }
    record(static_cast<int>(l) + 1);
  }
  return rows;
}

}  // namespace ldr::spectral
