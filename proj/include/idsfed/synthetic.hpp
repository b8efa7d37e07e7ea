#pragma once

#include <cstdint>

#include "idsfed/matrix.hpp"

namespace idsfed {

// Two unit-variance Gaussian clusters centered at +-(separation/2) along a
// seeded random unit direction; class sizes follow class_ratio (fraction of
// attack rows). Row order is a seeded shuffle of the two blocks.
FeatureMatrix generate_synthetic(std::size_t n, std::size_t d, double separation,
                                 double class_ratio, std::uint64_t seed);

}  // namespace idsfed
