#include "pgnoise/error.hpp"
#include "pgnoise/noise_sim.hpp"
#include "pgnoise/philox.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

namespace pgnoise {
namespace {

// Random123 known-answer vectors for Philox4x32-10.
TEST(Philox, KnownAnswerVectors) {
    using Block = std::array<std::uint32_t, 4>;
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
              (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreDistinctAndUniformIsOpen) {
    PhiloxStream a(7, 0, 0), b(7, 1, 0), c(7, 0, 1), a2(7, 0, 0);
    EXPECT_NE(a.next_u64(), b.next_u64());
    EXPECT_NE(a2.next_u64(), c.next_u64());
    PhiloxStream u(3, 9);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi, 1.0);
}

TEST(NoiseParams, Validation) {
    EXPECT_THROW((NoiseParams{0.0, 0.1}.validate()), InvalidArgument);
    EXPECT_THROW((NoiseParams{-1.0, 0.1}.validate()), InvalidArgument);
    EXPECT_THROW((NoiseParams{1.0, -0.1}.validate()), InvalidArgument);
    EXPECT_THROW((NoiseParams{INFINITY, 0.1}.validate()), InvalidArgument);
    EXPECT_NO_THROW((NoiseParams{1.0, 0.0}.validate()));
}

TEST(TheoreticalMoments, Examples) {
    const auto zero = theoretical_moments(0.0, {20.0, 0.05});
    EXPECT_EQ(zero.mean, 0.0);
    EXPECT_DOUBLE_EQ(zero.variance, 0.0025);
    const auto mid = theoretical_moments(0.5, {20.0, 0.05});
    EXPECT_EQ(mid.mean, 0.5);
    EXPECT_DOUBLE_EQ(mid.variance, 0.0275);
    const auto unit = theoretical_moments(1.0, {1.0, 0.0});
    EXPECT_EQ(unit.mean, 1.0);
    EXPECT_EQ(unit.variance, 1.0);
}

TEST(Synthesize, ZeroSignalWithoutReadNoiseIsExactlyZero) {
    const auto pair = synthesize(ImageBuffer::filled(16, 16, 0.0), {5.0, 0.0}, Seed{3});
    for (double v : pair.noisy().data())
        EXPECT_EQ(v, 0.0);
}

TEST(Synthesize, IsPureFunctionOfInputs) {
    std::vector<double> x(64 * 48);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = static_cast<double>(i % 256) / 255.0;
    const ImageBuffer clean(64, 48, x);
    const auto p1 = synthesize(clean, {37.0, 0.07}, Seed{11});
    const auto p2 = synthesize(clean, {37.0, 0.07}, Seed{11});
    EXPECT_EQ(p1.noisy(), p2.noisy());
    const auto p3 = synthesize(clean, {37.0, 0.07}, Seed{12});
    EXPECT_NE(p1.noisy(), p3.noisy());
    EXPECT_EQ(p1.meta().seed, 11u);
    EXPECT_EQ(p1.meta().a, 37.0);
}

TEST(Synthesize, PixelDependsOnlyOnItsOwnStream) {
    // The same pixel value and index give the same output whatever the rest of the image holds.
    const NoiseParams params{12.0, 0.03};
    std::vector<double> xa(100, 0.3), xb(100, 0.9);
    xb[41] = 0.3;
    const auto ya = synthesize(ImageBuffer(10, 10, xa), params, Seed{5}).noisy();
    const auto yb = synthesize(ImageBuffer(10, 10, xb), params, Seed{5}).noisy();
    EXPECT_EQ(ya[41], yb[41]);
    EXPECT_EQ(ya[41], sample_pixel(0.3, params, Seed{5}, 41));
}

// Frozen outputs of the documented sampler (Philox4x32-10, inversion/PTRS, Box-Muller).
// A change here means previously published noisy images can no longer be regenerated.
TEST(Synthesize, GoldenSamples) {
    EXPECT_EQ(sample_pixel(0.5, {20.0, 0.05}, Seed{42}, 0), 0x1.00ec93acc4f2p-1);
    EXPECT_EQ(sample_pixel(0.5, {20.0, 0.05}, Seed{42}, 7), 0x1.dfbe81ef96748p-2);
    EXPECT_EQ(sample_pixel(0.9, {100.0, 0.0}, Seed{42}, 3), 0x1.f0a3d70a3d70ap-1);  // 97 / 100
    EXPECT_EQ(sample_pixel(0.2, {1.0, 0.15}, Seed{42}, 12345), 0x1.095b08b66bdbap+0);
}

TEST(Synthesize, DoesNotClip) {
    const auto pair = synthesize(ImageBuffer::filled(100, 100, 0.0), {10.0, 0.1}, Seed{1});
    double lo = 0.0;
    for (double v : pair.noisy().data())
        lo = std::min(lo, v);
    EXPECT_LT(lo, 0.0);
}

TEST(Synthesize, Errors) {
    EXPECT_THROW(synthesize(ImageBuffer::filled(2, 2, 0.5), {0.0, 0.1}, Seed{}), InvalidArgument);
    EXPECT_THROW(synthesize(ImageBuffer(2, 1, {0.5, NAN}), {1.0, 0.1}, Seed{}), InvalidArgument);
    EXPECT_THROW(synthesize(ImageBuffer(2, 1, {0.5, 1.5}), {1.0, 0.1}, Seed{}), InvalidArgument);
}

// Scaled Poisson Y = K/a with K ~ Poisson(a x) has cumulants kappa_j = x / a^(j-1).
struct CentralMoments {
    double m2, m3, m4, m6;
};

CentralMoments scaled_poisson_gaussian(double x, double a, double b) {
    auto kappa = [&](int j) { return x / std::pow(a, j - 1); };
    const double k2 = kappa(2) + b * b, k3 = kappa(3), k4 = kappa(4), k6 = kappa(6);
    return {k2, k3, k4 + 3 * k2 * k2, k6 + 15 * k4 * k2 + 10 * k3 * k3 + 15 * k2 * k2 * k2};
}

TEST(Synthesize, MomentsMatchTheoryWithinFiveSigma) {
    const double x = 0.5, a = 20.0, b = 0.05;
    const std::size_t n = 400 * 500;
    const auto y = synthesize(ImageBuffer::filled(400, 500, x), {a, b}, Seed{2024}).noisy();
    double s = 0;
    for (double v : y.data())
        s += v;
    const double mean = s / n;
    double c2 = 0;
    for (double v : y.data())
        c2 += (v - mean) * (v - mean);
    const double var = c2 / (n - 1);

    const auto th = theoretical_moments(x, {a, b});
    const auto cm = scaled_poisson_gaussian(x, a, b);
    EXPECT_NEAR(mean, th.mean, 5 * std::sqrt(cm.m2 / n));
    EXPECT_NEAR(var, th.variance, 5 * std::sqrt((cm.m4 - cm.m2 * cm.m2) / n));
}

TEST(Synthesize, ThirdCentralMomentOfPurePoisson) {
    const double x = 0.4, a = 5.0;
    const std::size_t n = 500 * 500;
    const auto y = synthesize(ImageBuffer::filled(500, 500, x), {a, 0.0}, Seed{77}).noisy();
    double s = 0;
    for (double v : y.data())
        s += v;
    const double mean = s / n;
    double c3 = 0;
    for (double v : y.data())
        c3 += std::pow(v - mean, 3);
    const double m3 = c3 / n;
    const auto cm = scaled_poisson_gaussian(x, a, 0.0);
    const double var_m3 = (cm.m6 - cm.m3 * cm.m3 - 6 * cm.m4 * cm.m2 + 9 * std::pow(cm.m2, 3)) / n;
    EXPECT_NEAR(m3, x / (a * a), 5 * std::sqrt(var_m3));
}

double poisson_pmf(double rate, int k) {
    return std::exp(k * std::log(rate) - rate - std::lgamma(k + 1.0));
}

// Chi-square goodness of fit against the exact pmf, covering both sampler branches.
class PoissonSampler : public ::testing::TestWithParam<double> {};

TEST_P(PoissonSampler, MatchesExactPmf) {
    const double rate = GetParam();
    const int draws = 200000;
    PhiloxStream rng(static_cast<std::uint64_t>(rate * 1000), 0);
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < draws; ++i)
        ++counts[sample_poisson(rate, rng)];

    // One bin per k up to kmax (upper tail folded into the last), merged left to right until expected >= 5.
    const int kmax = static_cast<int>(rate + 8 * std::sqrt(rate) + 10);
    std::vector<double> expected(kmax + 1), observed(kmax + 1);
    for (int j = 0; j <= kmax; ++j)
        expected[j] = draws * poisson_pmf(rate, j);
    double tail = 1.0;
    for (int j = 0; j <= kmax; ++j)
        tail -= poisson_pmf(rate, j);
    expected[kmax] += draws * std::max(tail, 0.0);
    for (const auto& [value, c] : counts)
        observed[std::min<std::uint64_t>(value, kmax)] += c;

    std::vector<double> e, o;
    double eb = 0, ob = 0;
    for (int j = 0; j <= kmax; ++j) {
        eb += expected[j];
        ob += observed[j];
        if (eb >= 5) {
            e.push_back(eb);
            o.push_back(ob);
            eb = ob = 0;
        }
    }
    e.back() += eb;
    o.back() += ob;
    double chi2 = 0;
    for (std::size_t j = 0; j < e.size(); ++j)
        chi2 += (o[j] - e[j]) * (o[j] - e[j]) / e[j];
    const double df = static_cast<double>(e.size() - 1);
    EXPECT_LT(chi2, df + 6 * std::sqrt(2 * df)) << "rate " << rate << " bins " << e.size();
}

INSTANTIATE_TEST_SUITE_P(BothBranches, PoissonSampler,
                         ::testing::Values(0.05, 0.5, 3.0, 9.99, 10.0, 30.0, 100.0));

TEST(PoissonSampler, ZeroRate) {
    PhiloxStream rng(1, 1);
    EXPECT_EQ(sample_poisson(0.0, rng), 0u);
}

TEST(StandardNormal, FirstFourMoments) {
    PhiloxStream rng(99, 0);
    const int n = 400000;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = sample_standard_normal(rng);
        s1 += z;
        s2 += z * z;
        s3 += z * z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 5 * std::sqrt(1.0 / n));
    EXPECT_NEAR(s2 / n, 1.0, 5 * std::sqrt(2.0 / n));
    EXPECT_NEAR(s3 / n, 0.0, 5 * std::sqrt(15.0 / n));
    EXPECT_NEAR(s4 / n, 3.0, 5 * std::sqrt(96.0 / n));
}

}  // namespace
}  // namespace pgnoise
