#include "pgnoise/eval.hpp"

#include "pgnoise/error.hpp"
#include "pgnoise/noise_sim.hpp"
#include "pgnoise/summation.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace pgnoise {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0)
        return {};
    if (n == 1)
        return {lo};
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

SweepConfig SweepConfig::paper() { return SweepConfig{}; }

SweepConfig SweepConfig::desk() {
    SweepConfig cfg;
    cfg.a_values = linspace(1.0, 100.0, 5);
    cfg.b_values = linspace(0.01, 0.15, 5);
    cfg.seeds = {0, 1, 2};
    return cfg;
}

void SweepConfig::validate() const {
    if (a_values.empty() || b_values.empty() || seeds.empty() || methods.empty())
        throw InvalidArgument("sweep grids, seeds and methods must be nonempty");
    for (double a : a_values)
        if (!(std::isfinite(a) && a > 0.0))
            throw InvalidArgument("sweep a values must be > 0");
    for (double b : b_values)
        if (!(std::isfinite(b) && b > 0.0))
            throw InvalidArgument("sweep b values must be > 0");
    if (workers == 0)
        throw InvalidArgument("worker count must be >= 1");
}

std::string_view parameter_name(Parameter p) { return p == Parameter::AInv ? "a_inv" : "b_sq"; }

std::string_view status_name(Status s) {
    switch (s) {
    case Status::Ok: return "ok";
    case Status::NoRealRoot: return "no_real_root";
    case Status::RankDeficient: return "rank_deficient";
    case Status::Degenerate: return "degenerate";
    case Status::Failed: return "failed";
    }
    return "failed";
}

namespace {

MethodResult evaluate_method(const ImagePair& pair, const NoiseParams& truth, Method method,
                             const SweepConfig& cfg) {
    MethodResult r;
    Estimate est;
    try {
        est = method == Method::Cumulant ? estimate_cumulant(pair) : estimate_var(pair, cfg.var);
    } catch (const NoRealRoot&) {
        r.status = Status::NoRealRoot;
        return r;
    } catch (const RankDeficient&) {
        r.status = Status::RankDeficient;
        return r;
    } catch (const DegenerateImage&) {
        r.status = Status::Degenerate;
        return r;
    } catch (const Error&) {
        r.status = Status::Failed;
        return r;
    }
    r.a_inv = est.a_inv;
    r.b_sq = est.b_sq;
    const double da = est.a_inv - truth.a_inv();
    const double db = est.b_sq - truth.b_sq();
    r.se_a_inv = da * da;
    r.se_b_sq = db * db;
    r.a_inv_clamped = est.diagnostics.a_inv_clamped;
    r.b_sq_clamped = est.diagnostics.b_sq_clamped;
    if (cfg.with_ll && est.a_inv > 0.0 && est.b_sq > 0.0)
        r.ll_gap = relative_ll_gap(pair, truth, est, cfg.ll);
    return r;
}

}  // namespace

std::vector<EvalRecord> run_sweep(const std::vector<NamedImage>& images, const SweepConfig& cfg) {
    cfg.validate();
    if (images.empty())
        throw InvalidArgument("sweep needs at least one image");

    const std::size_t n_a = cfg.a_values.size();
    const std::size_t n_b = cfg.b_values.size();
    const std::size_t n_s = cfg.seeds.size();
    const std::size_t total = images.size() * n_s * n_a * n_b;
    std::vector<EvalRecord> records(total);

    auto run_cell = [&](std::size_t idx) {
        const std::size_t bi = idx % n_b;
        const std::size_t ai = (idx / n_b) % n_a;
        const std::size_t si = (idx / (n_b * n_a)) % n_s;
        const std::size_t ii = idx / (n_b * n_a * n_s);

        EvalRecord& rec = records[idx];
        rec.image_id = images[ii].id;
        rec.seed = cfg.seeds[si];
        rec.a_true = cfg.a_values[ai];
        rec.b_true = cfg.b_values[bi];

        const NoiseParams truth{rec.a_true, rec.b_true};
        const ImagePair pair = synthesize(images[ii].image, truth, Seed{rec.seed});
        for (Method m : cfg.methods)
            rec.results[static_cast<std::size_t>(m)] = evaluate_method(pair, truth, m, cfg);
    };

    const std::size_t workers = std::min(cfg.workers, total);
    if (workers <= 1) {
        for (std::size_t i = 0; i < total; ++i)
            run_cell(i);
        return records;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < total && !failed; i = next++) {
                try {
                    run_cell(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    failed = true;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
    return records;
}

std::vector<EvalRecord> run_sweep(const std::vector<std::filesystem::path>& paths,
                                  const SweepConfig& cfg, const LoadOptions& load) {
    std::vector<NamedImage> images;
    images.reserve(paths.size());
    for (const auto& p : paths)
        images.push_back({p.stem().string(), load_any(p, load)});
    return run_sweep(images, cfg);
}

namespace {

struct Selection {
    std::vector<std::size_t> index;  // into records
    std::vector<double> errors;
};

Selection select_ok(const std::vector<EvalRecord>& records, Method method, Parameter param) {
    Selection sel;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i].result(method);
        if (r && r->ok()) {
            sel.index.push_back(i);
            sel.errors.push_back(r->squared_error(param));
        }
    }
    return sel;
}

double mean_of(const std::vector<double>& v) {
    CompensatedSum s;
    for (double x : v)
        s += x;
    return s.value() / static_cast<double>(v.size());
}

}  // namespace

SummaryResult summarize(const std::vector<EvalRecord>& records, Method method, Parameter param) {
    const auto sel = select_ok(records, method, param);
    if (sel.errors.empty())
        throw InvalidArgument("no successful records for method " + std::string(method_name(method)));
    std::size_t attempted = 0;
    for (const auto& r : records)
        if (r.result(method))
            ++attempted;
    return {summarize_values(sel.errors), attempted - sel.errors.size()};
}

OutlierResult filter_outliers(const std::vector<EvalRecord>& records, Method method, Parameter param) {
    const auto sel = select_ok(records, method, param);
    OutlierResult out;
    if (sel.errors.empty()) {
        out.kept_fraction = 0.0;
        return out;
    }
    const auto mask = iqr_outlier_mask(sel.errors);
    for (std::size_t k = 0; k < sel.index.size(); ++k)
        if (!mask[k])
            out.kept.push_back(records[sel.index[k]]);
    out.kept_fraction = static_cast<double>(out.kept.size()) / static_cast<double>(sel.index.size());
    return out;
}

OutlierResult filter_outliers_combined(const std::vector<EvalRecord>& records, Method method) {
    const auto sel_a = select_ok(records, method, Parameter::AInv);
    const auto sel_b = select_ok(records, method, Parameter::BSq);
    OutlierResult out;
    if (sel_a.errors.empty()) {
        out.kept_fraction = 0.0;
        return out;
    }
    const auto mask_a = iqr_outlier_mask(sel_a.errors);
    const auto mask_b = iqr_outlier_mask(sel_b.errors);
    for (std::size_t k = 0; k < sel_a.index.size(); ++k)
        if (!mask_a[k] && !mask_b[k])
            out.kept.push_back(records[sel_a.index[k]]);
    out.kept_fraction = static_cast<double>(out.kept.size()) / static_cast<double>(sel_a.index.size());
    return out;
}

BiasCurves bias_curves(const std::vector<EvalRecord>& records, Method method) {
    struct Acc {
        std::size_t n = 0;
        CompensatedSum da, db;
    };
    std::map<double, Acc> by_a, by_b;
    for (const auto& rec : records) {
        const auto& r = rec.result(method);
        if (!r || !r->ok())
            continue;
        const double da = r->a_inv - 1.0 / rec.a_true;
        const double db = r->b_sq - rec.b_true * rec.b_true;
        for (auto* acc : {&by_a[rec.a_true], &by_b[rec.b_true]}) {
            ++acc->n;
            acc->da += da;
            acc->db += db;
        }
    }
    auto flatten = [](const std::map<double, Acc>& m) {
        std::vector<BiasPoint> out;
        for (const auto& [value, acc] : m) {
            const double n = static_cast<double>(acc.n);
            out.push_back({value, acc.n, acc.da.value() / n, acc.db.value() / n});
        }
        return out;
    };
    return {flatten(by_a), flatten(by_b)};
}

std::vector<PerImageMse> per_image_mse(const std::vector<EvalRecord>& records, Method method,
                                       Parameter param) {
    const auto sel = select_ok(records, method, param);
    std::vector<PerImageMse> out;
    if (sel.errors.empty())
        return out;
    const auto mask = iqr_outlier_mask(sel.errors);

    // Preserve first-appearance order of image ids.
    std::vector<std::string> order;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (std::size_t k = 0; k < sel.index.size(); ++k) {
        const auto& id = records[sel.index[k]].image_id;
        auto [it, inserted] = groups.try_emplace(id);
        if (inserted)
            order.push_back(id);
        it->second.first.push_back(sel.errors[k]);
        if (!mask[k])
            it->second.second.push_back(sel.errors[k]);
    }
    for (const auto& id : order) {
        const auto& [all, kept] = groups[id];
        PerImageMse row;
        row.image_id = id;
        row.count = all.size();
        row.mse = mean_of(all);
        row.kept = kept.size();
        row.mse_kept = kept.empty() ? std::numeric_limits<double>::quiet_NaN() : mean_of(kept);
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

std::string num(double v) {
    if (std::isnan(v))
        return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

constexpr std::array<Parameter, 2> kParameters = {Parameter::AInv, Parameter::BSq};

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<EvalRecord>& records,
                       const std::vector<Method>& methods) {
    out << "image_id,seed,a_true,b_true";
    for (Method m : methods) {
        const auto p = std::string(method_name(m)) + "_";
        out << ',' << p << "status," << p << "a_inv," << p << "b_sq," << p << "se_a_inv," << p
            << "se_b_sq," << p << "a_inv_clamped," << p << "b_sq_clamped," << p << "ll_gap";
    }
    out << '\n';
    for (const auto& rec : records) {
        out << rec.image_id << ',' << rec.seed << ',' << num(rec.a_true) << ',' << num(rec.b_true);
        for (Method m : methods) {
            const auto& r = rec.result(m);
            if (!r) {
                out << ",,,,,,,,";
                continue;
            }
            out << ',' << status_name(r->status);
            if (r->ok()) {
                out << ',' << num(r->a_inv) << ',' << num(r->b_sq) << ',' << num(r->se_a_inv) << ','
                    << num(r->se_b_sq) << ',' << int(r->a_inv_clamped) << ',' << int(r->b_sq_clamped);
            } else {
                out << ",,,,,,";
            }
            out << ',' << (r->ll_gap ? num(*r->ll_gap) : std::string());
        }
        out << '\n';
    }
}

void write_bias_csv(std::ostream& out, const std::vector<EvalRecord>& records,
                    const std::vector<Method>& methods) {
    out << "method,axis,value,count,a_inv_bias,b_sq_bias\n";
    for (Method m : methods) {
        const auto curves = bias_curves(records, m);
        for (const auto& [axis, points] : {std::pair{"a", &curves.by_a}, std::pair{"b", &curves.by_b}})
            for (const auto& p : *points)
                out << method_name(m) << ',' << axis << ',' << num(p.value) << ',' << p.count << ','
                    << num(p.a_inv_bias) << ',' << num(p.b_sq_bias) << '\n';
    }
}

void write_per_image_csv(std::ostream& out, const std::vector<EvalRecord>& records,
                         const std::vector<Method>& methods) {
    out << "method,parameter,image_id,count,mse,kept,mse_kept\n";
    for (Method m : methods)
        for (Parameter p : kParameters)
            for (const auto& row : per_image_mse(records, m, p))
                out << method_name(m) << ',' << parameter_name(p) << ',' << row.image_id << ','
                    << row.count << ',' << num(row.mse) << ',' << row.kept << ',' << num(row.mse_kept)
                    << '\n';
}

std::string summary_json(const std::vector<EvalRecord>& records, const std::vector<Method>& methods) {
    using nlohmann::ordered_json;
    ordered_json root;
    root["records"] = records.size();
    ordered_json per_method = ordered_json::object();
    for (Method m : methods) {
        ordered_json entry;
        std::size_t attempted = 0, ok = 0;
        for (const auto& rec : records) {
            if (const auto& r = rec.result(m)) {
                ++attempted;
                ok += r->ok() ? 1 : 0;
            }
        }
        entry["attempted"] = attempted;
        entry["failed"] = attempted - ok;
        if (ok > 0) {
            for (Parameter p : kParameters) {
                const auto s = summarize(records, m, p);
                entry["mse"][std::string(parameter_name(p))] = {
                    {"mean", s.stats.mean}, {"std", s.stats.stddev}, {"q75", s.stats.q75},
                    {"max", s.stats.max},   {"count", s.stats.count}};
            }
            entry["kept_fraction"] = {
                {"a_inv", filter_outliers(records, m, Parameter::AInv).kept_fraction},
                {"b_sq", filter_outliers(records, m, Parameter::BSq).kept_fraction},
                {"combined", filter_outliers_combined(records, m).kept_fraction}};
            CompensatedSum gap;
            std::size_t gaps = 0;
            for (const auto& rec : records)
                if (const auto& r = rec.result(m); r && r->ll_gap) {
                    gap += *r->ll_gap;
                    ++gaps;
                }
            if (gaps > 0)
                entry["ll_gap"] = {{"mean", gap.value() / static_cast<double>(gaps)}, {"count", gaps}};
        }
        per_method[std::string(method_name(m))] = std::move(entry);
    }
    root["methods"] = std::move(per_method);
    return root.dump(2) + "\n";
}

void write_outputs(const std::filesystem::path& dir, const std::vector<EvalRecord>& records,
                   const std::vector<Method>& methods) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("records.csv");
        write_records_csv(f, records, methods);
    }
    {
        auto f = open("bias.csv");
        write_bias_csv(f, records, methods);
    }
    {
        auto f = open("per_image.csv");
        write_per_image_csv(f, records, methods);
    }
    {
        auto f = open("summary.json");
        f << summary_json(records, methods);
    }
}

}  // namespace pgnoise
