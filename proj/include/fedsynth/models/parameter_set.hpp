#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fedsynth {

/// One named tensor of a ParameterSet. Values are float32, the wire type used
/// for checkpoints and federation messages.
struct ParameterEntry {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<float> values;

  std::int64_t element_count() const;
  bool operator==(const ParameterEntry&) const = default;
};

/// Ordered, named collection of real-valued arrays: the unit exchanged and
/// aggregated during federation. Treated as an immutable value once built.
class ParameterSet {
 public:
  ParameterSet() = default;
  explicit ParameterSet(std::vector<ParameterEntry> entries);

  /// Appends an entry; throws ValidationError on duplicate names or a
  /// shape/value-count disagreement.
  void add(ParameterEntry entry);

  const std::vector<ParameterEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::int64_t total_values() const;

  const ParameterEntry* find(const std::string& name) const;

  /// Throws ShapeError naming the first entry whose name or shape differs.
  void require_compatible(const ParameterSet& other) const;
  bool compatible(const ParameterSet& other) const;

  /// Throws ValidationError naming the first entry holding a non-finite value.
  void require_finite() const;

  /// Entries whose names start with `prefix`, with the prefix stripped.
  ParameterSet with_prefix_stripped(const std::string& prefix) const;
  /// Copy with `prefix` prepended to every entry name.
  ParameterSet with_prefix(const std::string& prefix) const;
  /// Concatenates two sets; names must stay unique.
  ParameterSet merged(const ParameterSet& other) const;

  bool operator==(const ParameterSet&) const = default;

 private:
  std::vector<ParameterEntry> entries_;
};

}  // namespace fedsynth
