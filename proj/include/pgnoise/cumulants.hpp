#pragma once

#include "pgnoise/image.hpp"

#include <cstddef>
#include <span>

namespace pgnoise {

/// Sample means of x, x^2 and x^3.
struct CleanMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double mean_sq = 0.0;
    double mean_cube = 0.0;

    /// mean_sq - mean^2
    double variance() const { return mean_sq - mean * mean; }
    /// mean_cube - 3 mean_sq mean + 2 mean^3
    double third_central() const { return mean_cube - 3.0 * mean_sq * mean + 2.0 * mean * mean * mean; }
};

/// Unbiased estimates of the second and third cumulant.
struct KStatistics {
    double k2 = 0.0;
    double k3 = 0.0;
};

/// Everything the cumulant estimator consumes.
struct MomentSummary {
    CleanMoments clean;
    KStatistics noisy;
};

/// Throws InvalidArgument on an empty range or non-finite values.
CleanMoments clean_moments(std::span<const double> x);
CleanMoments clean_moments(const ImageBuffer& x);

/// Fisher k-statistics. With m2, m3 the central sample moments:
///   k2 = n/(n-1) m2,  k3 = n^2/((n-1)(n-2)) m3.
/// Central moments are accumulated in a second pass around the mean.
/// Throws InvalidArgument if n < 3.
KStatistics k_statistics(std::span<const double> y);
KStatistics k_statistics(const ImageBuffer& y);

MomentSummary moment_summary(const ImagePair& pair);

}  // namespace pgnoise
