#pragma once

#include "pgnoise/image.hpp"
#include "pgnoise/philox.hpp"

#include <cstdint>

namespace pgnoise {

/// Poisson-Gaussian parameters: y = Poisson(a x) / a + N(0, b^2).
struct NoiseParams {
    double a = 1.0;  ///< photon scaling, > 0
    double b = 0.0;  ///< Gaussian standard deviation, >= 0

    /// Throws InvalidArgument unless a > 0 finite and b >= 0 finite.
    void validate() const;
    double a_inv() const { return 1.0 / a; }
    double b_sq() const { return b * b; }

    friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

struct Seed {
    std::uint64_t value = 0;
};

struct Moments {
    double mean;
    double variance;
};

/// E[y] = x, V[y] = x/a + b^2.
Moments theoretical_moments(double x, const NoiseParams& params);

/// Poisson variate. Inversion by sequential search for rate < 10,
/// Hörmann's PTRS transformed rejection otherwise.
std::uint64_t sample_poisson(double rate, PhiloxStream& rng);

/// Standard normal variate by Box-Muller (cosine branch only).
double sample_standard_normal(PhiloxStream& rng);

/// Draws one noisy value for clean intensity x at the given pixel index.
/// Poisson draws use lane 0 of the (seed, index) stream, Gaussian draws lane 1.
double sample_pixel(double x, const NoiseParams& params, Seed seed, std::uint64_t index);

/// Applies the forward model to every pixel. Pixel i uses only the
/// (seed, i) streams, so the output does not depend on traversal order.
/// Throws InvalidArgument on invalid params or clean values outside [0,1] / non-finite.
ImagePair synthesize(const ImageBuffer& clean, const NoiseParams& params, Seed seed);

}  // namespace pgnoise
