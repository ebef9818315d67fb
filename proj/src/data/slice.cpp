#include "fedsynth/data/slice.hpp"

namespace fedsynth {

void validate_slice_pair(const SlicePair& pair) {
  if (pair.source.rows() != pair.target.rows() || pair.source.cols() != pair.target.cols()) {
    throw ShapeError("pair '" + pair.pair_id + "': source and target dimensions differ");
  }
  for (const Image* img : {&pair.source, &pair.target}) {
    if (!img->allFinite() || (img->size() > 0 && (img->minCoeff() < 0.0f || img->maxCoeff() > 1.0f))) {
      throw ValidationError("pair '" + pair.pair_id + "': intensities must be finite and in [0, 1]");
    }
  }
}

}  // namespace fedsynth
