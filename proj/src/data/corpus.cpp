#include "fedsynth/data/corpus.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fedsynth/errors.hpp"

namespace fedsynth {

namespace fs = std::filesystem;

Image normalize_min_max(const RawImage& pixels, bool* constant) {
  const Image values = pixels.cast<float>();
  const float lo = values.minCoeff();
  const float hi = values.maxCoeff();
  if (constant != nullptr) *constant = hi == lo;
  if (hi == lo) return Image::Zero(values.rows(), values.cols());
  return ((values.array() - lo) / (hi - lo)).matrix();
}

namespace {

std::map<std::string, fs::path> list_pngs(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      out.emplace(entry.path().filename().string(), entry.path());
    }
  }
  return out;
}

}  // namespace

LoadResult load_paired_dataset(const fs::path& root, const std::string& site_id) {
  const auto sources = list_pngs(root / "source");
  const auto targets = list_pngs(root / "target");
  LoadResult result;
  for (const auto& [name, path] : targets) {
    if (!sources.contains(name)) {
      ++result.skipped;
      result.warnings.push_back("target " + name + " has no matching source; skipped");
    }
  }
  for (const auto& [name, source_path] : sources) {
    auto it = targets.find(name);
    if (it == targets.end()) {
      ++result.skipped;
      result.warnings.push_back("source " + name + " has no matching target; skipped");
      continue;
    }
    const GrayPng source = read_gray_png(source_path);
    const GrayPng target = read_gray_png(it->second);
    if (source.pixels.rows() != target.pixels.rows() ||
        source.pixels.cols() != target.pixels.cols()) {
      throw ShapeError("pair " + name + ": source and target dimensions differ");
    }
    SlicePair pair;
    bool constant = false;
    pair.source = normalize_min_max(source.pixels, &constant);
    if (constant) result.warnings.push_back("source " + name + " is constant; normalized to zeros");
    pair.target = normalize_min_max(target.pixels, &constant);
    if (constant) result.warnings.push_back("target " + name + " is constant; normalized to zeros");
    pair.pair_id = fs::path(name).stem().string();
    pair.site_id = site_id;
    result.pairs.push_back(std::move(pair));
  }
  if (result.pairs.empty()) {
    throw ValidationError("no matched source/target pairs under " + root.string());
  }
  return result;
}

std::uint32_t file_checksum(std::span<const fs::path> files) {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<char> buffer(1 << 16);
    while (in) {
      in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      const auto got = in.gcount();
      if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buffer.data()), static_cast<uInt>(got));
    }
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<ManifestEntry> write_corpus(const fs::path& root, std::span<const SlicePair> pairs) {
  std::vector<ManifestEntry> entries;
  std::set<std::string> seen;
  for (const auto& pair : pairs) {
    validate_slice_pair(pair);
    if (!seen.insert(pair.pair_id).second) {
      throw ValidationError("duplicate pair id '" + pair.pair_id + "'");
    }
    ManifestEntry e;
    e.pair_id = pair.pair_id;
    e.site_id = pair.site_id;
    e.source = "source/" + pair.pair_id + ".png";
    e.target = "target/" + pair.pair_id + ".png";
    write_gray_png(root / e.source, quantize(pair.source, 16), 16);
    write_gray_png(root / e.target, quantize(pair.target, 16), 16);
    const fs::path files[] = {root / e.source, root / e.target};
    e.checksum = file_checksum(files);
    entries.push_back(std::move(e));
  }
  write_manifest(root / kManifestName, entries);
  return entries;
}

void write_manifest(const fs::path& path, std::span<const ManifestEntry> entries) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "pair_id,site_id,source,target,checksum\n";
  char hex[16];
  for (const auto& e : entries) {
    std::snprintf(hex, sizeof hex, "%08x", e.checksum);
    out << e.pair_id << ',' << e.site_id << ',' << e.source << ',' << e.target << ',' << hex
        << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "pair_id,site_id,source,target,checksum") {
    throw ValidationError(path.string() + ": unexpected manifest header");
  }
  std::vector<ManifestEntry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw ValidationError(path.string() + ": malformed line '" + line + "'");
    entries.push_back({fields[0], fields[1], fields[2], fields[3],
                       static_cast<std::uint32_t>(std::stoul(fields[4], nullptr, 16))});
  }
  return entries;
}

}  // namespace fedsynth
