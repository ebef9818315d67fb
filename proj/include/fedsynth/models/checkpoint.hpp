#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "fedsynth/models/parameter_set.hpp"

namespace fedsynth {

// Binary layout, all integers little-endian:
//   "FSCK"  u32 format_version  u32 metadata_bytes  metadata (UTF-8 JSON)
//   parameter set:
//     u32 entry_count
//     per entry: u32 name_bytes, name, u32 rank, rank x u64 dims, f32 values
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct CheckpointMetadata {
  nlohmann::json config = nlohmann::json::object();
  /// Completed epochs (or rounds) at the time of writing.
  std::int64_t epoch = 0;
  std::uint64_t seed = 0;
  std::uint32_t format_version = kCheckpointFormatVersion;

  bool operator==(const CheckpointMetadata&) const = default;
};

struct Checkpoint {
  CheckpointMetadata metadata;
  ParameterSet parameters;

  bool operator==(const Checkpoint&) const = default;
};

std::string encode_parameter_set(const ParameterSet& params);
/// Decodes one parameter set starting at `offset`; advances it past the set.
ParameterSet decode_parameter_set(std::string_view bytes, std::size_t& offset);
ParameterSet decode_parameter_set(std::string_view bytes);

std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::string_view bytes);

/// Writes via a temporary file and rename, so readers never see partial files.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace fedsynth
