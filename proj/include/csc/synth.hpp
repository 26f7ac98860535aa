#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csc/array.hpp"

namespace csc::synth {

// Deterministic greyscale test scenes in [0, 1]: "shapes" (flat regions and
// sharp edges of mixed contrast), "texture" (gratings and checkerboards at
// several amplitudes), "mixed" (shading, thin lines, a textured disk) and
// "blocks" (seeded random rectangles over a gradient).
const std::vector<std::string>& image_names();
Image test_image(const std::string& name, Shape shape, std::uint64_t seed = 1);

// Zero-mean, unit-norm filter banks: "random" (Gaussian), "dct" (2-D DCT
// atoms without DC, lowest frequencies first) and "gabor" (windowed
// oriented sinusoids over several orientations, frequencies and phases).
const std::vector<std::string>& dictionary_kinds();
Dictionary dictionary(const std::string& kind, Shape filter_shape, std::size_t num_filters,
                      std::uint64_t seed = 1);

}  // namespace csc::synth
