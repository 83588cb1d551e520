#include "pgnoise/noise_sim.hpp"

#include "pgnoise/error.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace pgnoise {

void NoiseParams::validate() const {
    if (!(std::isfinite(a) && a > 0.0))
        throw InvalidArgument("noise parameter a must be finite and > 0");
    if (!(std::isfinite(b) && b >= 0.0))
        throw InvalidArgument("noise parameter b must be finite and >= 0");
}

Moments theoretical_moments(double x, const NoiseParams& params) {
    return {x, x / params.a + params.b * params.b};
}

namespace {

constexpr double kInversionLimit = 10.0;

std::uint64_t poisson_inversion(double rate, PhiloxStream& rng) {
    // Sequential search on the CDF; rate < 10 keeps exp(-rate) far from underflow.
    const double u = rng.uniform();
    double p = std::exp(-rate);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf) {
        ++k;
        p *= rate / static_cast<double>(k);
        const double next = cdf + p;
        if (next == cdf)
            break;
        cdf = next;
    }
    return k;
}

std::uint64_t poisson_ptrs(double rate, PhiloxStream& rng) {
    const double slam = std::sqrt(rate);
    const double loglam = std::log(rate);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= v_r)
            return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -rate + k * loglam - std::lgamma(k + 1.0))
            return static_cast<std::uint64_t>(k);
    }
}

}  // namespace

std::uint64_t sample_poisson(double rate, PhiloxStream& rng) {
    if (rate <= 0.0)
        return 0;
    return rate < kInversionLimit ? poisson_inversion(rate, rng) : poisson_ptrs(rate, rng);
}

double sample_standard_normal(PhiloxStream& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_pixel(double x, const NoiseParams& params, Seed seed, std::uint64_t index) {
    PhiloxStream shot(seed.value, index, 0);
    double y = static_cast<double>(sample_poisson(params.a * x, shot)) / params.a;
    if (params.b > 0.0) {
        PhiloxStream read(seed.value, index, 1);
        y += params.b * sample_standard_normal(read);
    }
    return y;
}

ImagePair synthesize(const ImageBuffer& clean, const NoiseParams& params, Seed seed) {
    params.validate();
    if (clean.empty())
        throw InvalidArgument("cannot synthesize noise on an empty image");
    const auto x = clean.data();
    for (double v : x)
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw InvalidArgument("clean image values must be finite and in [0,1]");

    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = sample_pixel(x[i], params, seed, i);

    PairMeta meta;
    meta.seed = seed.value;
    meta.a = params.a;
    meta.b = params.b;
    return ImagePair(clean, ImageBuffer(clean.width(), clean.height(), std::move(y)), std::move(meta));
}

}  // namespace pgnoise
