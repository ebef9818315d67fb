#include "fedsynth/models/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fedsynth/errors.hpp"

namespace fedsynth {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'C', 'K'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xffu));
  }
}

template <typename T>
T get_le(std::string_view bytes, std::size_t& offset) {
  if (offset + sizeof(T) > bytes.size()) throw ValidationError("checkpoint: truncated data");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  offset += sizeof(T);
  return value;
}

std::string_view get_bytes(std::string_view bytes, std::size_t& offset, std::size_t count) {
  if (count > bytes.size() || offset > bytes.size() - count) {
    throw ValidationError("checkpoint: truncated data");
  }
  auto out = bytes.substr(offset, count);
  offset += count;
  return out;
}

}  // namespace

std::string encode_parameter_set(const ParameterSet& params) {
  std::string out;
  out.reserve(static_cast<std::size_t>(params.total_values()) * 4 + params.size() * 64 + 4);
  put_le(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& e : params.entries()) {
    put_le(out, static_cast<std::uint32_t>(e.name.size()));
    out += e.name;
    put_le(out, static_cast<std::uint32_t>(e.shape.size()));
    for (auto d : e.shape) put_le(out, static_cast<std::uint64_t>(d));
    for (float v : e.values) put_le(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

ParameterSet decode_parameter_set(std::string_view bytes, std::size_t& offset) {
  const auto count = get_le<std::uint32_t>(bytes, offset);
  ParameterSet out;
  for (std::uint32_t k = 0; k < count; ++k) {
    ParameterEntry e;
    const auto name_len = get_le<std::uint32_t>(bytes, offset);
    e.name = std::string(get_bytes(bytes, offset, name_len));
    const auto rank = get_le<std::uint32_t>(bytes, offset);
    if (rank > 16) throw ValidationError("checkpoint: implausible rank for '" + e.name + "'");
    std::uint64_t elements = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      const auto d = get_le<std::uint64_t>(bytes, offset);
      e.shape.push_back(static_cast<std::int64_t>(d));
      elements *= d;
    }
    if (elements > (bytes.size() - offset) / 4) {
      throw ValidationError("checkpoint: truncated values for '" + e.name + "'");
    }
    e.values.resize(static_cast<std::size_t>(elements));
    for (auto& v : e.values) v = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
    out.add(std::move(e));
  }
  return out;
}

ParameterSet decode_parameter_set(std::string_view bytes) {
  std::size_t offset = 0;
  auto out = decode_parameter_set(bytes, offset);
  if (offset != bytes.size()) throw ValidationError("parameter set: trailing bytes");
  return out;
}

std::string encode_checkpoint(const Checkpoint& checkpoint) {
  nlohmann::json meta = {{"config", checkpoint.metadata.config},
                         {"epoch", checkpoint.metadata.epoch},
                         {"seed", checkpoint.metadata.seed}};
  const std::string meta_text = meta.dump();
  std::string out(kMagic, sizeof kMagic);
  put_le(out, checkpoint.metadata.format_version);
  put_le(out, static_cast<std::uint32_t>(meta_text.size()));
  out += meta_text;
  out += encode_parameter_set(checkpoint.parameters);
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  std::size_t offset = 0;
  if (get_bytes(bytes, offset, 4) != std::string_view(kMagic, 4)) {
    throw ValidationError("checkpoint: bad magic");
  }
  Checkpoint out;
  out.metadata.format_version = get_le<std::uint32_t>(bytes, offset);
  if (out.metadata.format_version != kCheckpointFormatVersion) {
    throw ValidationError("checkpoint: unsupported format version " +
                          std::to_string(out.metadata.format_version));
  }
  const auto meta_len = get_le<std::uint32_t>(bytes, offset);
  const auto meta = nlohmann::json::parse(get_bytes(bytes, offset, meta_len), nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) throw ValidationError("checkpoint: bad metadata");
  out.metadata.config = meta.value("config", nlohmann::json::object());
  out.metadata.epoch = meta.value("epoch", std::int64_t{0});
  out.metadata.seed = meta.value("seed", std::uint64_t{0});
  out.parameters = decode_parameter_set(bytes, offset);
  if (offset != bytes.size()) throw ValidationError("checkpoint: trailing bytes");
  out.parameters.require_finite();
  return out;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::string bytes = encode_checkpoint(checkpoint);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decode_checkpoint(buffer.str());
}

}  // namespace fedsynth
