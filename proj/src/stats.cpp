#include "pgnoise/stats.hpp"

#include "pgnoise/error.hpp"
#include "pgnoise/summation.hpp"

#include <algorithm>
#include <cmath>

namespace pgnoise {

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty())
        throw InvalidArgument("quantile of an empty set");
    if (!(p >= 0.0 && p <= 1.0))
        throw InvalidArgument("quantile probability must be in [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size())
        return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> values, double p) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, p);
}

StatSummary summarize_values(std::span<const double> values) {
    if (values.empty())
        throw InvalidArgument("summary of an empty set");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    const double n = static_cast<double>(sorted.size());
    CompensatedSum sum;
    for (double v : sorted)
        sum += v;
    const double mean = sum.value() / n;
    CompensatedSum dev;
    for (double v : sorted)
        dev += (v - mean) * (v - mean);

    StatSummary s;
    s.count = sorted.size();
    s.mean = mean;
    s.stddev = std::sqrt(dev.value() / n);
    s.q75 = quantile_sorted(sorted, 0.75);
    s.max = sorted.back();
    return s;
}

double iqr_fence(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double q1 = quantile_sorted(sorted, 0.25);
    const double q3 = quantile_sorted(sorted, 0.75);
    return q3 + 1.5 * (q3 - q1);
}

std::vector<bool> iqr_outlier_mask(std::span<const double> values) {
    const double fence = iqr_fence(values);
    std::vector<bool> mask(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        mask[i] = values[i] > fence;
    return mask;
}

}  // namespace pgnoise
