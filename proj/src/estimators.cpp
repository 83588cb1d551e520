#include "pgnoise/estimators.hpp"

#include "pgnoise/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pgnoise {

std::string_view method_name(Method m) { return m == Method::Cumulant ? "cumulant" : "var"; }

Method parse_method(std::string_view name) {
    if (name == "cumulant")
        return Method::Cumulant;
    if (name == "var")
        return Method::Var;
    throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

double Estimate::a() const {
    return a_inv > 0.0 ? 1.0 / a_inv : std::numeric_limits<double>::infinity();
}

double Estimate::b() const { return std::sqrt(b_sq); }

NoRealRoot::NoRealRoot(double discriminant, Estimate fallback)
    : Error("cumulant system has no real root (discriminant " + std::to_string(discriminant) + ")"),
      discriminant_(discriminant),
      fallback_(std::move(fallback)) {}

namespace {

void clamp_into(Estimate& est, double a_inv, double b_sq) {
    est.diagnostics.a_inv_raw = a_inv;
    est.diagnostics.b_sq_raw = b_sq;
    est.diagnostics.a_inv_clamped = a_inv < 0.0;
    est.diagnostics.b_sq_clamped = b_sq < 0.0;
    est.a_inv = a_inv < 0.0 ? 0.0 : a_inv;
    est.b_sq = b_sq < 0.0 ? 0.0 : b_sq;
}

}  // namespace

Estimate estimate_cumulant(const MomentSummary& m) {
    const double xbar = m.clean.mean;
    const double var_x = m.clean.variance();
    const double c3 = m.clean.third_central();
    const double k2 = m.noisy.k2;
    const double k3 = m.noisy.k3;

    // xbar u^2 + 3 V u + (C3 - k3) = 0
    const double qa = xbar;
    const double qb = 3.0 * var_x;
    const double qc = c3 - k3;

    Estimate est;
    est.method = Method::Cumulant;

    double u;
    if (qa == 0.0) {
        if (qb == 0.0)
            throw DegenerateImage("clean image has zero mean and zero variance");
        u = -qc / qb;
        est.diagnostics.discriminant = qb * qb;
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        est.diagnostics.discriminant = disc;
        if (disc < 0.0) {
            Estimate fallback = est;
            clamp_into(fallback, 0.0, k2 - var_x);
            throw NoRealRoot(disc, std::move(fallback));
        }
        // Stable form: q = -(B + sign(B) sqrt(D)) / 2, roots q/A and C/q.
        const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        if (q == 0.0) {
            u = 0.0;
        } else {
            u = std::max(q / qa, qc / q);
        }
    }

    const double b_sq = k2 - xbar * u - var_x;
    clamp_into(est, u, b_sq);
    const double uc = est.a_inv;
    est.diagnostics.residual = std::fabs(c3 + 3.0 * var_x * uc + xbar * uc * uc - k3);
    return est;
}

Estimate estimate_cumulant(const ImagePair& pair) {
    if (pair.size() < 3)
        throw InvalidArgument("estimate_cumulant: need at least 3 pixels");
    return estimate_cumulant(moment_summary(pair));
}

std::vector<IntensityLevelSet> level_sets(const ImagePair& pair, std::size_t levels) {
    if (levels < 2)
        throw InvalidArgument("quantization needs at least 2 levels");
    const auto x = pair.clean().data();
    const auto y = pair.noisy().data();
    const double top = static_cast<double>(levels - 1);

    std::vector<CompensatedSum> sum_x(levels), sum_sq(levels);
    std::vector<std::size_t> count(levels, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw InvalidArgument("level_sets: non-finite pixel");
        const double q = std::round(std::clamp(x[i], 0.0, 1.0) * top);
        const auto level = static_cast<std::size_t>(q);
        const double d = y[i] - x[i];
        sum_x[level] += x[i];
        sum_sq[level] += d * d;
        ++count[level];
    }

    std::vector<IntensityLevelSet> sets;
    for (std::size_t l = 0; l < levels; ++l) {
        if (count[l] == 0)
            continue;
        const double c = static_cast<double>(count[l]);
        sets.push_back({l, sum_x[l].value() / c, count[l], sum_sq[l].value() / c});
    }
    return sets;
}

Estimate estimate_var(std::span<const IntensityLevelSet> sets, bool weighted) {
    if (sets.size() < 2)
        throw RankDeficient("variance fit needs at least 2 occupied intensity levels");

    // Weighted simple regression of v on m, centered in a second pass.
    auto weight = [weighted](const IntensityLevelSet& s) {
        return weighted ? static_cast<double>(s.count) : 1.0;
    };
    CompensatedSum sw, sm, sv;
    for (const auto& s : sets) {
        const double w = weight(s);
        sw += w;
        sm += w * s.mean_x;
        sv += w * s.emp_var;
    }
    const double w_tot = sw.value();
    const double m_bar = sm.value() / w_tot;
    const double v_bar = sv.value() / w_tot;
    CompensatedSum cxx, cxy;
    for (const auto& s : sets) {
        const double w = weight(s);
        const double dm = s.mean_x - m_bar;
        cxx += w * dm * dm;
        cxy += w * dm * (s.emp_var - v_bar);
    }
    const double sxx = cxx.value();
    const double sxy = cxy.value();
    if (!(sxx > 0.0))
        throw RankDeficient("intensity levels do not span distinct clean values");

    const double u = sxy / sxx;
    const double c = v_bar - u * m_bar;

    Estimate est;
    est.method = Method::Var;
    est.diagnostics.levels = sets.size();
    clamp_into(est, u, c);
    CompensatedSum rss;
    for (const auto& s : sets) {
        const double w = weight(s);
        const double r = s.emp_var - u * s.mean_x - c;
        rss += w * r * r;
    }
    est.diagnostics.residual = rss.value();
    return est;
}

Estimate estimate_var(const ImagePair& pair, const VarOptions& opts) {
    const auto sets = level_sets(pair, opts.levels);
    return estimate_var(sets, opts.weighted);
}

}  // namespace pgnoise
