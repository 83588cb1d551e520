#include "pgnoise/error.hpp"
#include "pgnoise/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

namespace pgnoise {
namespace {

TEST(Quantile, LinearInterpolationConvention) {
    const std::vector<double> v{4, 1, 3, 2};
    EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile(v, 0.75), 3.25);
    EXPECT_EQ(quantile(v, 0.0), 1.0);
    EXPECT_EQ(quantile(v, 1.0), 4.0);
    EXPECT_EQ(quantile(std::vector<double>{5.0}, 0.75), 5.0);
    EXPECT_THROW(quantile(std::vector<double>{}, 0.5), InvalidArgument);
    EXPECT_THROW(quantile(v, 1.5), InvalidArgument);
}

TEST(Summary, Arithmetic) {
    const auto s = summarize_values(std::vector<double>{1, 2, 3, 4});
    EXPECT_EQ(s.count, 4u);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.stddev, 1.118033988749895);
    EXPECT_DOUBLE_EQ(s.q75, 3.25);
    EXPECT_EQ(s.max, 4.0);
    EXPECT_THROW(summarize_values(std::vector<double>{}), InvalidArgument);
}

TEST(IqrFence, WorkedExample) {
    // Type-7 quartiles of {1,1,1,100}: Q1 = 1, Q3 = 25.75, fence = 62.875.
    const std::vector<double> v{1, 1, 1, 100};
    EXPECT_DOUBLE_EQ(iqr_fence(v), 62.875);
    EXPECT_EQ(iqr_outlier_mask(v), (std::vector<bool>{false, false, false, true}));
}

TEST(IqrFence, AllEqualKeepsEverything) {
    const std::vector<double> v(7, 0.3);
    for (bool out : iqr_outlier_mask(v))
        EXPECT_FALSE(out);
}

struct FenceCase {
    std::vector<double> values;
    double fence;
    std::size_t kept;
};

// Expected fences and kept counts computed with numpy.quantile (default "linear" method).
TEST(IqrFence, MatchesNumpyReference) {
    const std::vector<FenceCase> cases{
        {{1.565, 0.663, 0.263, 0.506, 0.226, 1.094, 7.466, 0.478, 0.394, 2.085, 1.708}, 3.4372499999999997, 10},
        {{1.171, 0.248, 0.957, 2.838, 0.133, 0.503, 0.058, 0.145, 0.063}, 2.193, 8},
        {{0.149, 1.502, 1.265, 0.755, 0.023, 0.446, 0.93, 1.185, 0.101, 0.488}, 2.4682500000000003, 10},
        {{0.23, 0.297, 4.91, 0.298, 0.952, 3.768}, 7.214125, 6},
        {{0.846, 1.18, 1.1, 0.159, 1.121, 7.677, 0.098, 3.629, 1.196}, 1.7209999999999999, 7},
    };
    for (const auto& c : cases) {
        EXPECT_NEAR(iqr_fence(c.values), c.fence, 1e-12);
        const auto mask = iqr_outlier_mask(c.values);
        EXPECT_EQ(static_cast<std::size_t>(std::count(mask.begin(), mask.end(), false)), c.kept);
    }
}

}  // namespace
}  // namespace pgnoise
