#pragma once

#include "pgnoise/cumulants.hpp"
#include "pgnoise/error.hpp"
#include "pgnoise/image.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace pgnoise {

enum class Method { Cumulant, Var };

std::string_view method_name(Method m);
/// Accepts "cumulant" / "var"; throws InvalidArgument otherwise.
Method parse_method(std::string_view name);

struct EstimateDiagnostics {
    double discriminant = 0.0;    ///< cumulant: discriminant of the quadratic in 1/a
    double a_inv_raw = 0.0;       ///< pre-clamp value
    double b_sq_raw = 0.0;        ///< pre-clamp value
    bool a_inv_clamped = false;   ///< set iff a_inv_raw < 0
    bool b_sq_clamped = false;    ///< set iff b_sq_raw < 0
    double residual = 0.0;        ///< cumulant: |k3 model - k3|; var: weighted RSS
    std::size_t levels = 0;       ///< var: occupied intensity levels
};

/// Result of an estimator, in (1/a, b^2) space. Both are >= 0.
struct Estimate {
    Method method = Method::Cumulant;
    double a_inv = 0.0;
    double b_sq = 0.0;
    EstimateDiagnostics diagnostics;

    /// +inf when a_inv == 0.
    double a() const;
    double b() const;
};

/// The cumulant quadratic has no real root. Carries the discriminant and a
/// clamped fallback (a_inv = 0, b_sq from the second-cumulant equation).
class NoRealRoot : public Error {
public:
    NoRealRoot(double discriminant, Estimate fallback);
    double discriminant() const noexcept { return discriminant_; }
    const Estimate& fallback() const noexcept { return fallback_; }

private:
    double discriminant_;
    Estimate fallback_;
};

/// Clean image is identically zero; nothing separates 1/a from b^2.
class DegenerateImage : public Error {
public:
    using Error::Error;
};

/// Fewer than two occupied intensity levels in the variance fit.
class RankDeficient : public Error {
public:
    using Error::Error;
};

/// Solves the second/third cumulant system for (1/a, b^2):
///   k2 = xbar u + V + b^2
///   k3 = C3 + 3 V u + xbar u^2
/// with u = 1/a, V and C3 the second and third central moments of the clean image.
/// The quadratic's larger root is taken; negatives are clamped to 0 and flagged.
Estimate estimate_cumulant(const MomentSummary& moments);
Estimate estimate_cumulant(const ImagePair& pair);

/// Noisy pixels grouped by quantized clean level.
struct IntensityLevelSet {
    std::size_t level = 0;   ///< round(x (L-1))
    double mean_x = 0.0;     ///< mean clean value in the level
    std::size_t count = 0;
    double emp_var = 0.0;    ///< mean of (y_j - x_j)^2 over the level
};

struct VarOptions {
    std::size_t levels = 256;
    /// Weight each level by its pixel count (per-pixel sum) or by 1.
    bool weighted = true;
};

/// Throws InvalidArgument if levels < 2 or shapes differ.
std::vector<IntensityLevelSet> level_sets(const ImagePair& pair, std::size_t levels);

/// Weighted least squares fit of emp_var ~ u mean_x + b^2 over the level sets.
Estimate estimate_var(const ImagePair& pair, const VarOptions& opts = {});
Estimate estimate_var(std::span<const IntensityLevelSet> sets, bool weighted = true);

}  // namespace pgnoise
