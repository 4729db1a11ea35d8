#include "ldr/dataset_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace ldr::io {

namespace {

constexpr char kMagic[5] = {'L', 'D', 'R', 'K', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  // Little-endian regardless of host order.
  char buf[4];
  buf[0] = static_cast<char>(v & 0xff);
  buf[1] = static_cast<char>((v >> 8) & 0xff);
  buf[2] = static_cast<char>((v >> 16) & 0xff);
  buf[3] = static_cast<char>((v >> 24) & 0xff);
  os.write(buf, 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char buf[4];
  is.read(reinterpret_cast<char*>(buf), 4);
  if (!is) throw Error("dataset binary: truncated header");
  return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

void write_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  os.write(buf, 8);
}

double read_f64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw Error("dataset binary: truncated data");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

double parse_double(const std::string& token, const char* what) {
  double v = 0.0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  const auto result = std::from_chars(begin, end, v);
  if (result.ec != std::errc{} || result.ptr != end) {
    throw Error(std::string("dataset csv: bad ") + what + " value '" + token + "'");
  }
  return v;
}

long parse_long(const std::string& token, const char* what) {
  long v = 0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  const auto result = std::from_chars(begin, end, v);
  if (result.ec != std::errc{} || result.ptr != end) {
    throw Error(std::string("dataset csv: bad ") + what + " value '" + token + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds) {
  ds.part.validate(ds.X.cols());
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "sample_id,class";
  for (Index j = 0; j < ds.X.rows(); ++j) os << ",x" << j;
  os << "\n";
  for (Index i = 0; i < ds.X.cols(); ++i) {
    os << i << "," << ds.part.class_of[static_cast<std::size_t>(i)];
    for (Index j = 0; j < ds.X.rows(); ++j) os << "," << format_double(ds.X(j, i));
    os << "\n";
  }
  if (!os) throw Error("failed writing " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw Error("dataset csv: missing header");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) header.push_back(tok);
  }
  if (header.size() < 3 || header[0] != "sample_id" || header[1] != "class") {
    throw Error("dataset csv: unexpected header");
  }
  const Index dim = static_cast<Index>(header.size()) - 2;
  for (Index j = 0; j < dim; ++j) {
    if (header[static_cast<std::size_t>(j + 2)] != "x" + std::to_string(j)) {
      throw Error("dataset csv: unexpected feature column name");
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::int32_t> labels;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> tokens;
    while (std::getline(ss, tok, ',')) tokens.push_back(tok);
    if (static_cast<Index>(tokens.size()) != dim + 2) {
      throw Error("dataset csv: wrong column count on a data row");
    }
    labels.push_back(static_cast<std::int32_t>(parse_long(tokens[1], "class")));
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(dim));
    for (Index j = 0; j < dim; ++j) {
      values.push_back(parse_double(tokens[static_cast<std::size_t>(j + 2)], "feature"));
    }
    rows.push_back(std::move(values));
  }

  Dataset ds;
  ds.X.resize(dim, static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Index j = 0; j < dim; ++j) ds.X(j, static_cast<Index>(i)) = rows[i][static_cast<std::size_t>(j)];
  }
  std::int32_t k = 0;
  for (std::int32_t c : labels) k = std::max(k, c + 1);
  ds.part = Partition(std::move(labels), k);
  ds.part.validate(ds.X.cols());
  return ds;
}

void write_dataset_binary(const std::filesystem::path& path, const Dataset& ds) {
  ds.part.validate(ds.X.cols());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(kMagic, 5);
  write_u32(os, static_cast<std::uint32_t>(ds.X.rows()));
  write_u32(os, static_cast<std::uint32_t>(ds.X.cols()));
  write_u32(os, static_cast<std::uint32_t>(ds.part.k));
  for (Index i = 0; i < ds.X.cols(); ++i) {
    for (Index j = 0; j < ds.X.rows(); ++j) write_f64(os, ds.X(j, i));
  }
  for (Index i = 0; i < ds.X.cols(); ++i) {
    write_u32(os, static_cast<std::uint32_t>(ds.part.class_of[static_cast<std::size_t>(i)]));
  }
  if (!os) throw Error("failed writing " + path.string());
}

Dataset read_dataset_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, kMagic, 5) != 0) {
    throw Error("dataset binary: bad magic (expected LDRK1)");
  }
  const auto dim = static_cast<Index>(read_u32(is));
  const auto n = static_cast<Index>(read_u32(is));
  const auto k = static_cast<int>(read_u32(is));

  Dataset ds;
  ds.X.resize(dim, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < dim; ++j) ds.X(j, i) = read_f64(is);
  }
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(read_u32(is));
  }
  ds.part = Partition(std::move(labels), k);
  ds.part.validate(n);
  return ds;
}

}  // namespace ldr::io
