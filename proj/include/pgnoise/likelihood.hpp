#pragma once

#include "pgnoise/estimators.hpp"
#include "pgnoise/image.hpp"
#include "pgnoise/noise_sim.hpp"

#include <cstddef>
#include <vector>

namespace pgnoise {

struct LikelihoodConfig {
    /// Upper bound on the Poisson probability mass left out of each pixel's sum.
    double tail_mass = 1e-12;
    /// Hard cap on the summation index.
    std::size_t k_cap = 100000;

    void validate() const;
};

/// Last summation index for Poisson rate `rate`. Starts from
/// max(7, ceil(rate + 10 sqrt(rate + 1))) and grows until the tail bound
///   P[K > m] <= pmf(m+1) / (1 - rate/(m+2))
/// drops below tail_mass, never exceeding k_cap. Rate 0 gives 0.
std::size_t poisson_k_max(double rate, const LikelihoodConfig& cfg);

/// log sum_{k=0}^{k_max} Poisson(k; a x) N(y; k/a, b^2), via log-sum-exp.
/// k_max starts at poisson_k_max and is extended while the neglected mixture
/// terms could exceed tail_mass relative to the partial sum (relevant when y
/// lies far above the Poisson bulk).
double pixel_log_likelihood(double x, double y, const NoiseParams& params,
                            const LikelihoodConfig& cfg = {});

struct LogLikelihood {
    double value = 0.0;
    std::size_t k_max_max = 0;  ///< largest per-pixel k_max used
    std::size_t pixels = 0;
};

/// Sum of per-pixel log-likelihoods. Requires a > 0 and b > 0 (finite),
/// finite pixels and clean values >= 0.
LogLikelihood log_likelihood(const ImagePair& pair, const NoiseParams& params,
                             const LikelihoodConfig& cfg = {});

/// |ll_est - ll_true| / |ll_true|; throws InvalidArgument if ll_true is 0 or either is non-finite.
double relative_gap(double ll_est, double ll_true);

/// relative_gap of the log-likelihoods at the estimate and at the truth. The estimate must map to a valid
/// NoiseParams (a_inv > 0, b_sq > 0).
double relative_ll_gap(const ImagePair& pair, const NoiseParams& true_params, const Estimate& est,
                       const LikelihoodConfig& cfg = {});

/// Converts (1/a, b^2) into NoiseParams; throws InvalidArgument if either is <= 0.
NoiseParams params_from_estimate(const Estimate& est);

struct GridRefinement {
    NoiseParams best;
    double log_likelihood = 0.0;
    std::size_t evaluations = 0;
};

/// Evaluates LL on a (2 steps + 1)^2 grid of multiplicative perturbations
/// exp(k span / steps) of (1/a, b^2) around `start` and returns the best cell.
/// Not an optimizer; a local probe for starting-point quality.
GridRefinement refine_on_grid(const ImagePair& pair, const NoiseParams& start, double span = 0.5,
                              int steps = 2, const LikelihoodConfig& cfg = {});

}  // namespace pgnoise
