#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fedsynth/data/png_io.hpp"
#include "fedsynth/data/slice.hpp"

namespace fedsynth {

// Corpus layout: <root>/source/<name>.png and <root>/target/<name>.png, paired
// by file name, plus <root>/manifest.csv.

struct LoadResult {
  std::vector<SlicePair> pairs;
  /// Files present on only one side.
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// Per-image min-max normalization to [0, 1]; a constant image maps to zeros
/// and sets `*constant`.
Image normalize_min_max(const RawImage& pixels, bool* constant = nullptr);

/// Loads every matched pair, sorted by file name. Unmatched files are skipped
/// and counted; a size mismatch within a pair or an empty corpus is an error.
LoadResult load_paired_dataset(const std::filesystem::path& root, const std::string& site_id);

struct ManifestEntry {
  std::string pair_id;
  std::string site_id;
  std::string source;  // relative to the corpus root
  std::string target;
  std::uint32_t checksum = 0;  // CRC-32 over source bytes then target bytes

  bool operator==(const ManifestEntry&) const = default;
};

inline constexpr const char* kManifestName = "manifest.csv";

/// Writes 16-bit PNGs for every pair plus the manifest; returns the entries.
std::vector<ManifestEntry> write_corpus(const std::filesystem::path& root,
                                        std::span<const SlicePair> pairs);

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// CRC-32 over the concatenated bytes of the given files.
std::uint32_t file_checksum(std::span<const std::filesystem::path> files);

}  // namespace fedsynth
