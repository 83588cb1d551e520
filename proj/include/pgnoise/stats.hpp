#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pgnoise {

/// Quantile by linear interpolation between order statistics (Hyndman-Fan type 7,
/// the numpy/R default): h = (n-1) p, Q = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// Throws InvalidArgument on empty input or p outside [0,1].
double quantile(std::span<const double> values, double p);
double quantile_sorted(std::span<const double> sorted, double p);

struct StatSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;  ///< population (divide by n)
    double q75 = 0.0;
    double max = 0.0;
};

/// Throws InvalidArgument on empty input.
StatSummary summarize_values(std::span<const double> values);

/// Q(0.75) + 1.5 (Q(0.75) - Q(0.25)).
double iqr_fence(std::span<const double> values);

/// Marks values strictly above the IQR fence.
std::vector<bool> iqr_outlier_mask(std::span<const double> values);

}  // namespace pgnoise
