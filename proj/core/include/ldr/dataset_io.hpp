#pragma once

#include <filesystem>
#include <string>

#include "ldr/types.hpp"

namespace ldr::io {

struct Dataset {
  Matrix X;  // D x n, features as columns
  Partition part;
};

/// CSV with header `sample_id,class,x0..x{D-1}`; doubles are written in
/// shortest round-trip form, so write/read is bit-exact.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset_csv(const std::filesystem::path& path);

/// Compact little-endian binary: magic "LDRK1", u32 D, u32 n, u32 k,
/// f64 data column-major, u32 labels.
void write_dataset_binary(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset_binary(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double value);

}  // namespace ldr::io
