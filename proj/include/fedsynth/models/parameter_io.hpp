#pragma once

#include <string>
#include <vector>

#include "fedsynth/errors.hpp"
#include "fedsynth/models/parameter_set.hpp"
#include "fedsynth/nn/layers.hpp"

namespace fedsynth {

template <typename Scalar>
ParameterSet export_parameter_set(const std::vector<const nn::Parameter<Scalar>*>& params) {
  ParameterSet out;
  for (const auto* p : params) {
    ParameterEntry e;
    e.name = p->name;
    e.shape.assign(p->shape.begin(), p->shape.end());
    e.values.resize(static_cast<std::size_t>(p->value.size()));
    for (Index i = 0; i < p->value.size(); ++i) e.values[i] = static_cast<float>(p->value[i]);
    out.add(std::move(e));
  }
  return out;
}

/// Copies values into the model's parameters. Names and shapes must match
/// entry-by-entry; the offending entry is named otherwise.
template <typename Scalar>
void import_parameter_set(const std::vector<nn::Parameter<Scalar>*>& params,
                          const ParameterSet& set) {
  if (set.size() != params.size()) {
    throw ShapeError("parameter import: expected " + std::to_string(params.size()) +
                     " entries, got " + std::to_string(set.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = set.entries()[i];
    auto* p = params[i];
    if (e.name != p->name) {
      throw ShapeError("parameter import: entry " + std::to_string(i) + " is '" + e.name +
                       "', expected '" + p->name + "'");
    }
    if (e.shape.size() != p->shape.size() ||
        !std::equal(e.shape.begin(), e.shape.end(), p->shape.begin())) {
      throw ShapeError("parameter import: shape mismatch for '" + e.name + "'");
    }
  }
  set.require_finite();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& values = set.entries()[i].values;
    auto* p = params[i];
    for (Index k = 0; k < p->value.size(); ++k) p->value[k] = static_cast<Scalar>(values[k]);
  }
}

}  // namespace fedsynth
