#pragma once

#include "pgnoise/estimators.hpp"
#include "pgnoise/image.hpp"
#include "pgnoise/likelihood.hpp"
#include "pgnoise/stats.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pgnoise {

/// n values evenly spaced over [lo, hi], both ends included.
std::vector<double> linspace(double lo, double hi, std::size_t n);

struct NamedImage {
    std::string id;
    ImageBuffer image;
};

struct SweepConfig {
    std::vector<double> a_values = linspace(1.0, 100.0, 25);
    std::vector<double> b_values = linspace(0.01, 0.15, 25);
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<Method> methods = {Method::Cumulant, Method::Var};
    VarOptions var;
    bool with_ll = false;
    LikelihoodConfig ll;
    std::size_t workers = 1;

    /// 10 seeds, 25 x 25 grid.
    static SweepConfig paper();
    /// 3 seeds, 5 x 5 grid.
    static SweepConfig desk();

    /// Throws InvalidArgument on empty lists or non-positive a, b.
    void validate() const;
};

enum class Parameter { AInv, BSq };

std::string_view parameter_name(Parameter p);

enum class Status { Ok, NoRealRoot, RankDeficient, Degenerate, Failed };

std::string_view status_name(Status s);

struct MethodResult {
    Status status = Status::Ok;
    double a_inv = 0.0;
    double b_sq = 0.0;
    double se_a_inv = 0.0;  ///< (a_inv - 1/a)^2
    double se_b_sq = 0.0;   ///< (b_sq - b^2)^2
    bool a_inv_clamped = false;
    bool b_sq_clamped = false;
    std::optional<double> ll_gap;

    bool ok() const { return status == Status::Ok; }
    double squared_error(Parameter p) const { return p == Parameter::AInv ? se_a_inv : se_b_sq; }
};

struct EvalRecord {
    std::string image_id;
    std::uint64_t seed = 0;
    double a_true = 0.0;
    double b_true = 0.0;
    std::array<std::optional<MethodResult>, 2> results;

    const std::optional<MethodResult>& result(Method m) const {
        return results[static_cast<std::size_t>(m)];
    }
};

/// Runs every (image, seed, a, b) cell. Output is ordered by image (input order),
/// seed, a and b regardless of the worker count. Estimator failures are
/// recorded in the cell, never thrown.
std::vector<EvalRecord> run_sweep(const std::vector<NamedImage>& images, const SweepConfig& cfg);

/// Loads `paths` (PGM or float container) and runs the sweep; ids are file stems.
std::vector<EvalRecord> run_sweep(const std::vector<std::filesystem::path>& paths,
                                  const SweepConfig& cfg, const LoadOptions& load = {});

struct SummaryResult {
    StatSummary stats;
    std::size_t excluded = 0;  ///< records where the method failed
};

/// Squared-error statistics over records where `method` succeeded.
/// Throws InvalidArgument if there are none.
SummaryResult summarize(const std::vector<EvalRecord>& records, Method method, Parameter param);

struct OutlierResult {
    std::vector<EvalRecord> kept;
    double kept_fraction = 1.0;  ///< kept / successful records
};

/// Drops records whose squared error is strictly above the IQR fence. Records
/// where the method failed are dropped and not counted in the fraction.
OutlierResult filter_outliers(const std::vector<EvalRecord>& records, Method method, Parameter param);
/// Drops a record if it is an outlier in either parameter (fences computed separately).
OutlierResult filter_outliers_combined(const std::vector<EvalRecord>& records, Method method);

struct BiasPoint {
    double value = 0.0;  ///< true a or true b
    std::size_t count = 0;
    double a_inv_bias = 0.0;  ///< mean(a_inv_hat - 1/a)
    double b_sq_bias = 0.0;   ///< mean(b_sq_hat - b^2)
};

struct BiasCurves {
    std::vector<BiasPoint> by_a;
    std::vector<BiasPoint> by_b;
};

BiasCurves bias_curves(const std::vector<EvalRecord>& records, Method method);

struct PerImageMse {
    std::string image_id;
    std::size_t count = 0;
    double mse = 0.0;
    std::size_t kept = 0;
    double mse_kept = 0.0;  ///< NaN if every record of the image was an outlier
};

/// Per-image mean squared error with and without outliers. The outlier fence
/// is computed over all records of the method, then applied per image.
std::vector<PerImageMse> per_image_mse(const std::vector<EvalRecord>& records, Method method,
                                       Parameter param);

// Reporting. Numbers are written with 17 significant digits so output is
// byte-stable for identical inputs.
void write_records_csv(std::ostream& out, const std::vector<EvalRecord>& records,
                       const std::vector<Method>& methods);
void write_bias_csv(std::ostream& out, const std::vector<EvalRecord>& records,
                    const std::vector<Method>& methods);
void write_per_image_csv(std::ostream& out, const std::vector<EvalRecord>& records,
                         const std::vector<Method>& methods);
std::string summary_json(const std::vector<EvalRecord>& records, const std::vector<Method>& methods);

/// Writes records.csv, summary.json, bias.csv and per_image.csv into `dir`.
void write_outputs(const std::filesystem::path& dir, const std::vector<EvalRecord>& records,
                   const std::vector<Method>& methods);

}  // namespace pgnoise
