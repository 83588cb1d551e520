#pragma once

#include "pgnoise/image.hpp"

#include <cstddef>
#include <cstdint>

namespace pgnoise {

/// Procedural 8-bit grayscale scene standing in for a natural photograph:
/// smooth illumination gradient, multi-octave value-noise texture and a set of
/// flat-shaded ellipses and rectangles. Values are quantized to k/255.
/// Deterministic in (width, height, seed).
ImageBuffer generate_scene(std::size_t width, std::size_t height, std::uint64_t seed);

}  // namespace pgnoise
