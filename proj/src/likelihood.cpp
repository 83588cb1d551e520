#include "pgnoise/likelihood.hpp"

#include "pgnoise/error.hpp"
#include "pgnoise/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pgnoise {

void LikelihoodConfig::validate() const {
    if (!(tail_mass > 0.0 && tail_mass < 1.0))
        throw InvalidArgument("tail_mass must be in (0, 1)");
    if (k_cap < 1)
        throw InvalidArgument("k_cap must be >= 1");
}

std::size_t poisson_k_max(double rate, const LikelihoodConfig& cfg) {
    if (rate <= 0.0)
        return 0;
    const double start = std::max(7.0, std::ceil(rate + 10.0 * std::sqrt(rate + 1.0)));
    if (start >= static_cast<double>(cfg.k_cap))
        return cfg.k_cap;
    auto m = static_cast<std::size_t>(start);
    const double log_rate = std::log(rate);
    const double log_tail = std::log(cfg.tail_mass);
    while (m < cfg.k_cap) {
        const double next = static_cast<double>(m + 1);
        const double log_pmf = next * log_rate - rate - std::lgamma(next + 1.0);
        const double log_bound = log_pmf - std::log1p(-rate / (next + 1.0));
        if (log_bound < log_tail)
            break;
        ++m;
    }
    return m;
}

namespace {

void check_params(const NoiseParams& params) {
    params.validate();
    if (!(params.b > 0.0))
        throw InvalidArgument("log-likelihood requires b > 0");
}

class LogFactorials {
public:
    double operator()(std::size_t k) {
        while (table_.size() <= k)
            table_.push_back(std::lgamma(static_cast<double>(table_.size()) + 1.0));
        return table_[k];
    }

private:
    std::vector<double> table_;
};

struct PixelTerm {
    double value;
    std::size_t k_max;
};

PixelTerm pixel_ll(double x, double y, const NoiseParams& p, const LikelihoodConfig& cfg,
                   LogFactorials& log_fact) {
    const double log_norm = -std::log(p.b * std::sqrt(2.0 * std::numbers::pi));
    const double inv_two_var = 1.0 / (2.0 * p.b * p.b);
    const double rate = p.a * x;
    if (rate <= 0.0)
        return {log_norm - y * y * inv_two_var, 0};

    const double log_rate = std::log(rate);
    auto term = [&](std::size_t k) {
        const double kd = static_cast<double>(k);
        const double d = y - kd / p.a;
        return kd * log_rate - log_fact(k) - rate - d * d * inv_two_var;
    };
    // Streaming log-sum-exp.
    double peak = -std::numeric_limits<double>::infinity();
    double scaled = 0.0;
    auto accumulate = [&](double t) {
        if (t <= peak) {
            scaled += std::exp(t - peak);
        } else {
            scaled = scaled * std::exp(peak - t) + 1.0;
            peak = t;
        }
    };

    std::size_t k_max = poisson_k_max(rate, cfg);
    double prev = 0.0;
    for (std::size_t k = 0; k <= k_max; ++k) {
        prev = term(k);
        accumulate(prev);
    }
    // An observation far above the Poisson bulk puts the mixture's mass beyond
    // the Poisson rule. The terms are log-concave in k, so once they decrease
    // with ratio r the remainder is below t_next / (1 - r).
    const double log_tail = std::log(cfg.tail_mass);
    while (k_max < cfg.k_cap) {
        const double next = term(k_max + 1);
        if (next < prev) {
            const double log_remainder = next - std::log1p(-std::exp(next - prev));
            if (log_remainder < peak + std::log(scaled) + log_tail)
                break;
        }
        accumulate(next);
        prev = next;
        ++k_max;
    }
    return {log_norm + peak + std::log(scaled), k_max};
}

}  // namespace

double pixel_log_likelihood(double x, double y, const NoiseParams& params,
                            const LikelihoodConfig& cfg) {
    check_params(params);
    cfg.validate();
    if (!std::isfinite(x) || !std::isfinite(y) || x < 0.0)
        throw InvalidArgument("log-likelihood requires finite pixels and x >= 0");
    LogFactorials log_fact;
    return pixel_ll(x, y, params, cfg, log_fact).value;
}

LogLikelihood log_likelihood(const ImagePair& pair, const NoiseParams& params,
                             const LikelihoodConfig& cfg) {
    check_params(params);
    cfg.validate();
    const auto x = pair.clean().data();
    const auto y = pair.noisy().data();
    LogFactorials log_fact;
    CompensatedSum total;
    LogLikelihood out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]) || x[i] < 0.0)
            throw InvalidArgument("log-likelihood requires finite pixels and x >= 0");
        const auto term = pixel_ll(x[i], y[i], params, cfg, log_fact);
        total += term.value;
        out.k_max_max = std::max(out.k_max_max, term.k_max);
    }
    out.value = total.value();
    out.pixels = x.size();
    return out;
}

NoiseParams params_from_estimate(const Estimate& est) {
    if (!(est.a_inv > 0.0) || !(est.b_sq > 0.0))
        throw InvalidArgument("estimate lies on the boundary (a_inv or b_sq is 0)");
    return {1.0 / est.a_inv, std::sqrt(est.b_sq)};
}

double relative_gap(double ll_est, double ll_true) {
    if (!std::isfinite(ll_est) || !std::isfinite(ll_true))
        throw InvalidArgument("relative gap of non-finite log-likelihoods");
    if (ll_true == 0.0)
        throw InvalidArgument("log-likelihood at the true parameters is 0");
    return std::fabs((ll_est - ll_true) / ll_true);
}

double relative_ll_gap(const ImagePair& pair, const NoiseParams& true_params, const Estimate& est,
                       const LikelihoodConfig& cfg) {
    const NoiseParams est_params = params_from_estimate(est);
    const double ll_true = log_likelihood(pair, true_params, cfg).value;
    return relative_gap(log_likelihood(pair, est_params, cfg).value, ll_true);
}

GridRefinement refine_on_grid(const ImagePair& pair, const NoiseParams& start, double span,
                              int steps, const LikelihoodConfig& cfg) {
    check_params(start);
    if (steps < 0 || !(span >= 0.0))
        throw InvalidArgument("grid refinement needs steps >= 0 and span >= 0");
    GridRefinement out;
    out.best = start;
    out.log_likelihood = -std::numeric_limits<double>::infinity();
    for (int i = -steps; i <= steps; ++i) {
        for (int j = -steps; j <= steps; ++j) {
            const double fa = steps == 0 ? 1.0 : std::exp(span * i / steps);
            const double fb = steps == 0 ? 1.0 : std::exp(span * j / steps);
            const NoiseParams p{start.a / fa, start.b * std::sqrt(fb)};
            const double ll = log_likelihood(pair, p, cfg).value;
            ++out.evaluations;
            if (ll > out.log_likelihood) {
                out.log_likelihood = ll;
                out.best = p;
            }
        }
    }
    return out;
}

}  // namespace pgnoise
