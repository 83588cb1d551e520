// Command-line front end: simulate, estimate, loglik, evaluate, scenes.

#include "pgnoise/error.hpp"
#include "pgnoise/estimators.hpp"
#include "pgnoise/eval.hpp"
#include "pgnoise/image.hpp"
#include "pgnoise/likelihood.hpp"
#include "pgnoise/noise_sim.hpp"
#include "pgnoise/scenes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace pgnoise;

namespace {

const std::map<std::string, ColorMode> kColorModes = {{"reject", ColorMode::Reject},
                                                      {"luma", ColorMode::Luma},
                                                      {"red", ColorMode::Red},
                                                      {"green", ColorMode::Green},
                                                      {"blue", ColorMode::Blue}};

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); }

ordered_json estimate_json(const Estimate& est) {
    const auto& d = est.diagnostics;
    ordered_json diag = {{"a_inv_raw", d.a_inv_raw},
                         {"b_sq_raw", d.b_sq_raw},
                         {"a_inv_clamped", d.a_inv_clamped},
                         {"b_sq_clamped", d.b_sq_clamped},
                         {"residual", d.residual}};
    if (est.method == Method::Cumulant)
        diag["discriminant"] = d.discriminant;
    else
        diag["levels"] = d.levels;
    return {{"a_inv", est.a_inv},
            {"b_sq", est.b_sq},
            {"a", finite_or_null(est.a())},
            {"b", est.b()},
            {"diagnostics", std::move(diag)}};
}

// "lo:hi:n"
std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0, hi = 0;
    unsigned long n = 0;
    char tail = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lu%c", &lo, &hi, &n, &tail) != 3 || n == 0)
        throw InvalidArgument("grid must look like lo:hi:n, got '" + spec + "'");
    return linspace(lo, hi, n);
}

std::vector<fs::path> resolve_images(const std::string& spec) {
    std::vector<fs::path> paths;
    if (fs::is_directory(spec)) {
        for (const auto& entry : fs::directory_iterator(spec)) {
            const auto ext = entry.path().extension().string();
            if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm" || ext == ".pgfl"))
                paths.push_back(entry.path());
        }
        std::sort(paths.begin(), paths.end());
    } else {
        std::stringstream ss(spec);
        for (std::string item; std::getline(ss, item, ',');)
            if (!item.empty())
                paths.emplace_back(item);
    }
    if (paths.empty())
        throw InvalidArgument("no images found in '" + spec + "'");
    return paths;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text))
        throw IoError("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson-Gaussian noise simulation and parameter estimation from paired images"};
    app.require_subcommand(1);

    std::string color = "luma";
    app.add_option("--color", color, "Color input handling")
        ->check(CLI::IsMember({"reject", "luma", "red", "green", "blue"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "Synthesize a noisy image from a clean one");
    std::string sim_input, sim_out;
    NoiseParams sim_params;
    std::uint64_t sim_seed = 0;
    sim->add_option("--input", sim_input, "Clean image (PGM or float container)")->required();
    sim->add_option("--a", sim_params.a, "Photon scaling a > 0")->required();
    sim->add_option("--b", sim_params.b, "Gaussian std b >= 0")->required();
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->add_option("--out", sim_out, "Output pair directory")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate (1/a, b^2) from a clean/noisy pair");
    std::string est_clean, est_noisy, est_method = "both";
    std::size_t est_levels = 256;
    bool est_unweighted = false;
    est->add_option("--clean", est_clean)->required();
    est->add_option("--noisy", est_noisy)->required();
    est->add_option("--method", est_method)->check(CLI::IsMember({"cumulant", "var", "both"}));
    est->add_option("--levels", est_levels, "Quantization levels for the variance baseline");
    est->add_flag("--var-unweighted", est_unweighted, "Weight every intensity level equally");

    // loglik
    auto* ll = app.add_subcommand("loglik", "Evaluate the truncated log-likelihood");
    std::string ll_clean, ll_noisy;
    NoiseParams ll_params;
    LikelihoodConfig ll_cfg;
    ll->add_option("--clean", ll_clean)->required();
    ll->add_option("--noisy", ll_noisy)->required();
    ll->add_option("--a", ll_params.a)->required();
    ll->add_option("--b", ll_params.b)->required();
    ll->add_option("--tail-mass", ll_cfg.tail_mass, "Neglected Poisson mass per pixel");
    ll->add_option("--k-cap", ll_cfg.k_cap, "Hard cap on the summation index");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Run a parameter sweep and write reports");
    std::string ev_images, ev_profile = "desk", ev_out, ev_agrid, ev_bgrid, ev_methods = "cumulant,var";
    std::size_t ev_seeds = 0, ev_workers = 1, ev_levels = 256;
    bool ev_with_ll = false, ev_unweighted = false;
    ev->add_option("--images", ev_images, "Directory of PGM images or comma-separated list")->required();
    ev->add_option("--profile", ev_profile)->check(CLI::IsMember({"paper", "desk", "custom"}));
    ev->add_option("--a-grid", ev_agrid, "lo:hi:n");
    ev->add_option("--b-grid", ev_bgrid, "lo:hi:n");
    ev->add_option("--seeds", ev_seeds, "Use seeds 0..n-1");
    ev->add_option("--methods", ev_methods, "Comma-separated subset of cumulant,var");
    ev->add_option("--workers", ev_workers, "Worker threads");
    ev->add_option("--levels", ev_levels, "Quantization levels for the variance baseline");
    ev->add_flag("--var-unweighted", ev_unweighted);
    ev->add_flag("--with-ll", ev_with_ll, "Compute relative log-likelihood gaps (slow)");
    ev->add_option("--out", ev_out, "Output directory")->required();

    // scenes
    auto* sc = app.add_subcommand("scenes", "Write procedural 8-bit test scenes");
    std::size_t sc_count = 3, sc_width = 481, sc_height = 321;
    std::uint64_t sc_seed = 0;
    std::string sc_out;
    sc->add_option("--count", sc_count);
    sc->add_option("--width", sc_width);
    sc->add_option("--height", sc_height);
    sc->add_option("--seed", sc_seed, "Seed of the first scene");
    sc->add_option("--out", sc_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        LoadOptions load;
        load.color = kColorModes.at(color);

        if (*sim) {
            const auto clean = load_any(sim_input, load);
            const auto pair = synthesize(clean, sim_params, Seed{sim_seed});
            fs::create_directories(sim_out);
            save_buffer(pair.clean(), fs::path(sim_out) / "clean.pgfl");
            save_buffer(pair.noisy(), fs::path(sim_out) / "noisy.pgfl");
            ordered_json meta = {{"source", sim_input},
                                 {"a", sim_params.a},
                                 {"b", sim_params.b},
                                 {"seed", sim_seed},
                                 {"width", clean.width()},
                                 {"height", clean.height()},
                                 {"rng", "philox4x32-10"},
                                 {"poisson", "inversion(<10)+ptrs"}};
            write_text(fs::path(sim_out) / "pair.json", meta.dump(2) + "\n");
        } else if (*est) {
            const ImagePair pair(load_any(est_clean, load), load_any(est_noisy, load));
            ordered_json out;
            if (est_method != "var") {
                try {
                    out["cumulant"] = estimate_json(estimate_cumulant(pair));
                } catch (const NoRealRoot& e) {
                    out["cumulant"] = {{"error", "no_real_root"},
                                       {"discriminant", e.discriminant()},
                                       {"fallback", estimate_json(e.fallback())}};
                } catch (const DegenerateImage& e) {
                    out["cumulant"] = {{"error", "degenerate_image"}, {"message", e.what()}};
                }
            }
            if (est_method != "cumulant") {
                try {
                    out["var"] = estimate_json(estimate_var(pair, {est_levels, !est_unweighted}));
                } catch (const RankDeficient& e) {
                    out["var"] = {{"error", "rank_deficient"}, {"message", e.what()}};
                }
            }
            std::cout << out.dump(2) << '\n';
        } else if (*ll) {
            const ImagePair pair(load_any(ll_clean, load), load_any(ll_noisy, load));
            const auto res = log_likelihood(pair, ll_params, ll_cfg);
            ordered_json out = {{"ll", res.value}, {"k_max_max", res.k_max_max}, {"pixels", res.pixels}};
            std::cout << out.dump(2) << '\n';
        } else if (*ev) {
            auto paths = resolve_images(ev_images);
            SweepConfig cfg = ev_profile == "desk" ? SweepConfig::desk() : SweepConfig::paper();
            if (ev_profile == "desk" && paths.size() > 3)
                paths.resize(3);
            if (!ev_agrid.empty())
                cfg.a_values = parse_grid(ev_agrid);
            if (!ev_bgrid.empty())
                cfg.b_values = parse_grid(ev_bgrid);
            if (ev_seeds > 0) {
                cfg.seeds.resize(ev_seeds);
                for (std::size_t s = 0; s < ev_seeds; ++s)
                    cfg.seeds[s] = s;
            }
            cfg.methods.clear();
            std::stringstream ss(ev_methods);
            for (std::string m; std::getline(ss, m, ',');)
                cfg.methods.push_back(parse_method(m));
            cfg.workers = ev_workers;
            cfg.with_ll = ev_with_ll;
            cfg.var = {ev_levels, !ev_unweighted};

            const auto records = run_sweep(paths, cfg, load);
            write_outputs(ev_out, records, cfg.methods);
            std::cerr << "wrote " << records.size() << " records to " << ev_out << '\n';
        } else if (*sc) {
            fs::create_directories(sc_out);
            for (std::size_t i = 0; i < sc_count; ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "scene_%02zu.pgm", i);
                export_pgm8(generate_scene(sc_width, sc_height, sc_seed + i), fs::path(sc_out) / name);
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
