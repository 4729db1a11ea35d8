#include "ldr/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "ldr/dataset_io.hpp"

namespace ldr::io {

namespace {

using nlohmann::json;

constexpr int kModelVersion = 1;

json matrix_to_flat(const Matrix& m) {
  json arr = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  }
  return arr;
}

Matrix matrix_from_flat(const json& arr, Index rows, Index cols, const char* what) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != rows * cols) {
    throw Error(std::string("model json: ") + what + " has the wrong length");
  }
  Matrix m(rows, cols);
  Index idx = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = arr[static_cast<std::size_t>(idx++)].get<double>();
  }
  return m;
}

// Rectangular matrices with varying shapes go as nested row arrays.
json matrix_to_rows(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_rows(const json& rows, const char* what) {
  if (!rows.is_array()) throw Error(std::string("model json: ") + what + " must be an array");
  const Index r = static_cast<Index>(rows.size());
  if (r == 0) return Matrix(0, 0);
  const Index c = static_cast<Index>(rows[0].size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != c) {
      throw Error(std::string("model json: ragged rows in ") + what);
    }
    for (Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

json complex_matrix_to_flat(const ComplexMatrix& m) {
  json arr = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      arr.push_back(m(i, j).real());
      arr.push_back(m(i, j).imag());
    }
  }
  return arr;
}

ComplexMatrix complex_matrix_from_flat(const json& arr, Index rows, Index cols) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != 2 * rows * cols) {
    throw Error("model json: complex block has the wrong length");
  }
  ComplexMatrix m(rows, cols);
  std::size_t idx = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double re = arr[idx++].get<double>();
      const double im = arr[idx++].get<double>();
      m(i, j) = std::complex<double>(re, im);
    }
  }
  return m;
}

json params_to_json_fields(const rate::RateParams& params) {
  json j;
  j["epsilon"] = params.epsilon;
  if (params.fixed_alpha) j["fixed_alpha"] = *params.fixed_alpha;
  return j;
}

rate::RateParams params_from_json(const json& j) {
  rate::RateParams p;
  p.epsilon = j.at("epsilon").get<double>();
  if (j.contains("fixed_alpha")) p.fixed_alpha = j["fixed_alpha"].get<double>();
  return p;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void dump_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << "\n";
  if (!os) throw Error("failed writing " + path.string());
}

int checked_version(const json& j) {
  const int version = j.at("version").get<int>();
  if (version != kModelVersion) {
    throw Error("unsupported model version " + std::to_string(version));
  }
  return version;
}

}  // namespace

void save_redunet(const std::filesystem::path& path, const redunet::ReduNetModel& model) {
  json j;
  j["version"] = kModelVersion;
  j["d"] = model.d;
  j["k"] = model.k;
  j.update(params_to_json_fields(model.params));
  j["eta"] = model.eta;
  j["lambda"] = model.lambda;
  json layers = json::array();
  for (const auto& layer : model.layers) {
    json jl;
    jl["E"] = matrix_to_flat(layer.E);
    json cs = json::array();
    for (const auto& c : layer.C) cs.push_back(matrix_to_flat(c));
    jl["C"] = std::move(cs);
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);
  json subspaces = json::array();
  for (const auto& u : model.class_subspaces) subspaces.push_back(matrix_to_rows(u));
  j["class_subspaces"] = std::move(subspaces);
  dump_json(path, j);
}

redunet::ReduNetModel load_redunet(const std::filesystem::path& path) {
  const json j = load_json(path);
  checked_version(j);
  redunet::ReduNetModel model;
  model.d = j.at("d").get<Index>();
  model.k = j.at("k").get<int>();
  model.params = params_from_json(j);
  model.eta = j.at("eta").get<double>();
  model.lambda = j.at("lambda").get<double>();
  for (const auto& jl : j.at("layers")) {
    redunet::ReduLayer layer;
    layer.E = matrix_from_flat(jl.at("E"), model.d, model.d, "layer E");
    for (const auto& jc : jl.at("C")) {
      layer.C.push_back(matrix_from_flat(jc, model.d, model.d, "layer C"));
    }
    layer.eta = model.eta;
    layer.lambda = model.lambda;
    model.layers.push_back(std::move(layer));
  }
  for (const auto& ju : j.at("class_subspaces")) {
    model.class_subspaces.push_back(matrix_from_rows(ju, "class subspace"));
  }
  return model;
}

void save_spectral(const std::filesystem::path& path,
                   const spectral::SpectralReduNetModel& model) {
  json j;
  j["version"] = kModelVersion;
  j["channels"] = model.channels;
  j["taps"] = model.taps;
  j["k"] = model.k;
  j.update(params_to_json_fields(model.params));
  j["eta"] = model.eta;
  j["lambda"] = model.lambda;

  const auto op_to_json = [](const spectral::SpectralOperator& op) {
    json jo;
    jo["alpha"] = op.alpha;
    json blocks = json::array();
    for (const auto& b : op.blocks) blocks.push_back(complex_matrix_to_flat(b));
    jo["blocks"] = std::move(blocks);
    return jo;
  };

  json layers = json::array();
  for (const auto& layer : model.layers) {
    json jl;
    jl["E"] = op_to_json(layer.E);
    json cs = json::array();
    for (const auto& c : layer.C) cs.push_back(op_to_json(c));
    jl["C"] = std::move(cs);
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);
  json subspaces = json::array();
  for (const auto& u : model.class_subspaces) subspaces.push_back(matrix_to_rows(u));
  j["class_subspaces"] = std::move(subspaces);
  dump_json(path, j);
}

spectral::SpectralReduNetModel load_spectral(const std::filesystem::path& path) {
  const json j = load_json(path);
  checked_version(j);
  spectral::SpectralReduNetModel model;
  model.channels = j.at("channels").get<Index>();
  model.taps = j.at("taps").get<Index>();
  model.k = j.at("k").get<int>();
  model.params = params_from_json(j);
  model.eta = j.at("eta").get<double>();
  model.lambda = j.at("lambda").get<double>();

  const auto op_from_json = [&](const json& jo) {
    spectral::SpectralOperator op;
    op.alpha = jo.at("alpha").get<double>();
    for (const auto& jb : jo.at("blocks")) {
      op.blocks.push_back(complex_matrix_from_flat(jb, model.channels, model.channels));
    }
    if (op.bins() != model.taps) throw Error("model json: wrong number of spectral blocks");
    op.conjugate_symmetric = spectral::conjugate_symmetry_error(op) <= 1e-10;
    return op;
  };

  for (const auto& jl : j.at("layers")) {
    spectral::SpectralLayer layer;
    layer.E = op_from_json(jl.at("E"));
    for (const auto& jc : jl.at("C")) layer.C.push_back(op_from_json(jc));
    layer.eta = model.eta;
    layer.lambda = model.lambda;
    model.layers.push_back(std::move(layer));
  }
  for (const auto& ju : j.at("class_subspaces")) {
    model.class_subspaces.push_back(matrix_from_rows(ju, "class subspace"));
  }
  return model;
}

void save_transcription(const std::filesystem::path& path, const ctrl::TranscriptionState& state,
                        const rate::RateParams& params) {
  json j;
  j["version"] = kModelVersion;
  j["d"] = state.feature_dim();
  j["D"] = state.data_dim();
  j.update(params_to_json_fields(params));
  j["iter"] = state.iter;
  j["f"] = matrix_to_rows(state.f);
  j["g"] = matrix_to_rows(state.g);
  dump_json(path, j);
}

LoadedTranscription load_transcription(const std::filesystem::path& path) {
  const json j = load_json(path);
  checked_version(j);
  LoadedTranscription out;
  out.params = params_from_json(j);
  out.state.iter = j.at("iter").get<int>();
  out.state.f = matrix_from_rows(j.at("f"), "encoder f");
  out.state.g = matrix_from_rows(j.at("g"), "decoder g");
  const auto d = j.at("d").get<Index>();
  const auto D = j.at("D").get<Index>();
  if (out.state.f.rows() != d || out.state.f.cols() != D || out.state.g.rows() != D ||
      out.state.g.cols() != d) {
    throw Error("model json: encoder/decoder shapes disagree with d, D");
  }
  return out;
}

void write_rate_trace_csv(const std::filesystem::path& path,
                          std::span<const redunet::RateTraceRow> rows) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "layer,R,Rc,dR\n";
  for (const auto& r : rows) {
    os << r.layer << "," << format_double(r.R) << "," << format_double(r.Rc) << ","
       << format_double(r.dR) << "\n";
  }
  if (!os) throw Error("failed writing " + path.string());
}

void write_game_history_csv(const std::filesystem::path& path,
                            std::span<const ctrl::RoundRecord> rows) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "round,dR_Z,dR_Zhat,dR_pair,constraint_residual\n";
  for (const auto& r : rows) {
    os << r.round << "," << format_double(r.dR_Z) << "," << format_double(r.dR_Zhat) << ","
       << format_double(r.dR_pair) << "," << format_double(r.constraint_residual) << "\n";
  }
  if (!os) throw Error("failed writing " + path.string());
}

}  // namespace ldr::io
