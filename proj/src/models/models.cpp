#include "fedsynth/models/discriminator.hpp"
#include "fedsynth/models/generator.hpp"

namespace fedsynth {

template class GeneratorModel<float>;
template class GeneratorModel<double>;
template class DiscriminatorModel<float>;
template class DiscriminatorModel<double>;

}  // namespace fedsynth
