#pragma once

// Dataset directories: columnar CSV files plus a JSON manifest carrying
// FNV-1a digests of every file, so later stages can detect stale inputs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "hyperwind/dataset.hpp"

namespace hyperwind {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL);
std::string hex_digest(std::uint64_t h);
std::string file_digest(const std::filesystem::path& path);
std::string text_digest(std::string_view text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

struct DatasetFiles {
  /// File name to digest.
  std::map<std::string, std::string> digests;
  /// Digest over the sorted (name, digest) pairs.
  std::string combined;
};

/// Writes checkpoints.csv, stopping.csv, rays.csv, exits.csv and paths.csv.
DatasetFiles write_dataset(const Dataset& data, const std::filesystem::path& dir);
/// Inverse of write_dataset; accumulators are recomputed in path order.
Dataset read_dataset(const std::filesystem::path& dir, std::uint64_t master_seed);
/// Recomputes the digests of the files written by write_dataset.
DatasetFiles digest_dataset(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace hyperwind
