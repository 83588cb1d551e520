#include "pgnoise/cumulants.hpp"

#include "pgnoise/error.hpp"
#include "pgnoise/summation.hpp"

#include <cmath>

namespace pgnoise {

CleanMoments clean_moments(std::span<const double> x) {
    if (x.empty())
        throw InvalidArgument("clean_moments: empty input");
    CompensatedSum s1, s2, s3;
    for (double v : x) {
        if (!std::isfinite(v))
            throw InvalidArgument("clean_moments: non-finite value");
        const double v2 = v * v;
        s1 += v;
        s2 += v2;
        s3 += v2 * v;
    }
    const double n = static_cast<double>(x.size());
    return {x.size(), s1.value() / n, s2.value() / n, s3.value() / n};
}

CleanMoments clean_moments(const ImageBuffer& x) { return clean_moments(x.data()); }

KStatistics k_statistics(std::span<const double> y) {
    if (y.size() < 3)
        throw InvalidArgument("k_statistics: need at least 3 samples");
    CompensatedSum s1;
    for (double v : y) {
        if (!std::isfinite(v))
            throw InvalidArgument("k_statistics: non-finite value");
        s1 += v;
    }
    const double n = static_cast<double>(y.size());
    const double mean = s1.value() / n;

    CompensatedSum c2, c3;
    for (double v : y) {
        const double d = v - mean;
        const double d2 = d * d;
        c2 += d2;
        c3 += d2 * d;
    }
    const double m2 = c2.value() / n;
    const double m3 = c3.value() / n;
    return {n / (n - 1.0) * m2, n * n / ((n - 1.0) * (n - 2.0)) * m3};
}

KStatistics k_statistics(const ImageBuffer& y) { return k_statistics(y.data()); }

MomentSummary moment_summary(const ImagePair& pair) {
    return {clean_moments(pair.clean()), k_statistics(pair.noisy())};
}

}  // namespace pgnoise
