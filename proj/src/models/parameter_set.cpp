#include "fedsynth/models/parameter_set.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "fedsynth/errors.hpp"

namespace fedsynth {

namespace {

std::string shape_text(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace

std::int64_t ParameterEntry::element_count() const {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

ParameterSet::ParameterSet(std::vector<ParameterEntry> entries) {
  entries_.reserve(entries.size());
  for (auto& e : entries) add(std::move(e));
}

void ParameterSet::add(ParameterEntry entry) {
  if (entry.name.empty()) throw ValidationError("parameter entry with empty name");
  for (auto d : entry.shape) {
    if (d < 0) throw ValidationError("parameter '" + entry.name + "' has a negative dimension");
  }
  if (entry.element_count() != static_cast<std::int64_t>(entry.values.size())) {
    throw ValidationError("parameter '" + entry.name + "' shape " + shape_text(entry.shape) +
                          " does not match its " + std::to_string(entry.values.size()) +
                          " values");
  }
  if (find(entry.name) != nullptr) {
    throw ValidationError("duplicate parameter name '" + entry.name + "'");
  }
  entries_.push_back(std::move(entry));
}

std::int64_t ParameterSet::total_values() const {
  std::int64_t n = 0;
  for (const auto& e : entries_) n += static_cast<std::int64_t>(e.values.size());
  return n;
}

const ParameterEntry* ParameterSet::find(const std::string& name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const ParameterEntry& e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

void ParameterSet::require_compatible(const ParameterSet& other) const {
  if (entries_.size() != other.entries_.size()) {
    throw ShapeError("parameter sets differ in entry count: " + std::to_string(entries_.size()) +
                     " vs " + std::to_string(other.entries_.size()));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name) {
      throw ShapeError("parameter entry " + std::to_string(i) + " name mismatch: '" + a.name +
                       "' vs '" + b.name + "'");
    }
    if (a.shape != b.shape) {
      throw ShapeError("parameter '" + a.name + "' shape mismatch: " + shape_text(a.shape) +
                       " vs " + shape_text(b.shape));
    }
  }
}

bool ParameterSet::compatible(const ParameterSet& other) const {
  try {
    require_compatible(other);
    return true;
  } catch (const ShapeError&) {
    return false;
  }
}

void ParameterSet::require_finite() const {
  for (const auto& e : entries_) {
    if (!std::all_of(e.values.begin(), e.values.end(), [](float v) { return std::isfinite(v); })) {
      throw ValidationError("parameter '" + e.name + "' contains non-finite values");
    }
  }
}

ParameterSet ParameterSet::with_prefix_stripped(const std::string& prefix) const {
  ParameterSet out;
  for (const auto& e : entries_) {
    if (e.name.compare(0, prefix.size(), prefix) == 0) {
      out.add({e.name.substr(prefix.size()), e.shape, e.values});
    }
  }
  return out;
}

ParameterSet ParameterSet::with_prefix(const std::string& prefix) const {
  ParameterSet out;
  for (const auto& e : entries_) out.add({prefix + e.name, e.shape, e.values});
  return out;
}

ParameterSet ParameterSet::merged(const ParameterSet& other) const {
  ParameterSet out = *this;
  for (const auto& e : other.entries_) out.add(e);
  return out;
}

}  // namespace fedsynth
