#pragma once

// Subcommand front end: gen, persist, functionals, dist, curves,
// experiment, oracle-check. Every run that writes files also writes a
// manifest (config, seeds, output hashes) sufficient to reproduce them.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "torph/cubical.hpp"
#include "torph/curves.hpp"
#include "torph/field.hpp"
#include "torph/functionals.hpp"
#include "torph/io.hpp"
#include "torph/persistence.hpp"
#include "torph/stochastic.hpp"
#include "torph/transport.hpp"

namespace torph::cli {

namespace detail {

using torph::io::json;

// Collects outputs and writes the manifest beside the first one.
class RunContext {
public:
    RunContext(std::string command, std::vector<std::string> argv)
        : command_(std::move(command)),
          argv_(std::move(argv)),
          t0_(std::chrono::steady_clock::now()) {}

    json& config() { return config_; }
    std::vector<std::uint64_t>& seeds() { return seeds_; }

    void emit(const std::string& path, std::string_view content) {
        io::write_file(path, content);
        outputs_.push_back({path, content.size(), io::fnv1a64_hex(content)});
    }

    void set_manifest_path(std::string path) { manifest_path_ = std::move(path); }

    void finish() {
        if (outputs_.empty()) return;
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0_)
                              .count();
        const std::string path =
            manifest_path_.empty() ? outputs_.front().path + ".manifest.json" : manifest_path_;
        io::write_file(
            path, io::manifest_to_json(command_, argv_, config_, seeds_, outputs_, ms).dump(2) +
                      "\n");
    }

private:
    std::string command_;
    std::vector<std::string> argv_;
    json config_ = json::object();
    std::vector<std::uint64_t> seeds_;
    std::vector<io::OutputRecord> outputs_;
    std::string manifest_path_;
    std::chrono::steady_clock::time_point t0_;
};

// Deterministic uniform [0,1) grid values from a counter-mode stream.
inline ScalarField uniform_grid_field(int dim, std::array<int, 3> shape, std::uint64_t seed) {
    std::size_t n = 1;
    for (int a = 0; a < 3; ++a) n *= static_cast<std::size_t>(shape[a]);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = static_cast<double>(splitmix64(seed ^ splitmix64(i + 1)) >> 11) * 0x1.0p-53;
    return make_grid_field(std::move(v), dim, shape);
}

inline std::array<int, 3> parse_shape(const std::string& text, int dim) {
    std::array<int, 3> shape{1, 1, 1};
    std::size_t start = 0;
    int axis = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('x', start), text.size());
        if (axis >= dim) throw std::runtime_error("shape: more extents than dim");
        try {
            shape[axis] = std::stoi(text.substr(start, end - start));
        } catch (...) {
            throw std::runtime_error("shape: bad extent in '" + text + "'");
        }
        ++axis;
        if (end == text.size()) break;
        start = end + 1;
    }
    if (axis != dim) throw std::runtime_error("shape: fewer extents than dim");
    return shape;
}

inline long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline int run_oracle_check(int dim, const std::string& shape_text, int nseeds,
                            std::uint64_t seed_base) {
    const auto shape = parse_shape(shape_text, dim);
    bool all_ok = true;
    for (int s = 0; s < nseeds; ++s) {
        const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(s);
        const auto f = uniform_grid_field(dim, shape, seed);
        const auto K = build_complex(f);

        for (int k = 0; k <= dim; ++k) {
            if (static_cast<long long>(K.count[k]) !=
                binom(dim, k) * static_cast<long long>(f.size())) {
                std::cout << "seed " << seed << ": FAIL cell census degree " << k << "\n";
                all_ok = false;
            }
        }
        {
            long long chi = 0;
            for (int k = 0; k <= dim; ++k)
                chi += (k % 2 ? -1 : 1) * static_cast<long long>(K.count[k]);
            if (chi != 0) {
                std::cout << "seed " << seed << ": FAIL signed cell count " << chi << "\n";
                all_ok = false;
            }
        }
        for (const auto& c : K.cells) {
            for (std::uint32_t fi : c.boundary)
                if (K.cells[fi].value < c.value) {
                    std::cout << "seed " << seed << ": FAIL face monotonicity\n";
                    all_ok = false;
                    break;
                }
        }

        const auto diagrams = compute_diagrams(K);
        for (const auto& d : diagrams) {
            const auto viol = validate_diagram(d);
            if (!viol.empty()) {
                std::cout << "seed " << seed << ": FAIL diagram degree " << d.degree << ": "
                          << viol.front() << "\n";
                all_ok = false;
            }
            if (d.essential_count != binom(dim, d.degree)) {
                std::cout << "seed " << seed << ": FAIL essential count degree " << d.degree
                          << "\n";
                all_ok = false;
            }
        }

        std::vector<double> levels;
        levels.reserve(K.cells.size());
        for (const auto& c : K.cells) levels.push_back(c.value);
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

        int mismatches = 0;
        for (int k = 0; k <= dim; ++k)
            for (double x : levels)
                if (diagrams[k].rank_at(x) != betti_at_level_bruteforce(K, k, x)) ++mismatches;
        if (mismatches) {
            std::cout << "seed " << seed << ": FAIL rank oracle at " << mismatches
                      << " (degree, level) pairs\n";
            all_ok = false;
        }

        if (!(euler_curve(diagrams) == euler_curve_cells(K))) {
            std::cout << "seed " << seed << ": FAIL Euler curve equality\n";
            all_ok = false;
        }
        std::cout << "seed " << seed << ": ok (" << levels.size() << " levels x " << (dim + 1)
                  << " degrees)\n";
    }
    std::cout << (all_ok ? "oracle-check: all agree\n" : "oracle-check: MISMATCH\n");
    return all_ok ? 0 : 1;
}

}  // namespace detail

inline int run(std::vector<std::string> args) {
    using detail::json;

    CLI::App app{"superlevel-set persistence on flat tori"};
    app.name("torph");
    app.require_subcommand(1);
    const std::vector<std::string> argv_copy = args;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random or oscillatory field");
    int g_dim = 1, g_cutoff = 8, g_res = 0;
    double g_beta = 3.0;
    std::uint64_t g_seed = 0;
    bool g_osc = false;
    std::string g_out;
    gen->add_option("--dim", g_dim, "torus dimension")->check(CLI::Range(1, 3));
    gen->add_option("--cutoff", g_cutoff, "spectral box half-width");
    gen->add_option("--beta", g_beta, "spectral decay exponent");
    gen->add_option("--seed", g_seed, "rng seed");
    gen->add_option("--resolution", g_res, "grid points per axis (0 = 4*cutoff)");
    gen->add_flag("--oscillatory", g_osc, "deterministic 1-D e^{-1/x^2} sin(1/x) field");
    gen->add_option("-o,--output", g_out, "output field JSON")->required();

    // persist
    auto* persist = app.add_subcommand("persist", "compute persistence diagrams of a field");
    std::string p_in, p_out;
    persist->add_option("field", p_in, "input field JSON")->required();
    persist->add_option("-o,--output", p_out, "output diagrams JSON")->required();

    // functionals
    auto* funct = app.add_subcommand("functionals", "bar-length functionals of diagrams");
    std::string fn_in, fn_out;
    std::vector<double> fn_p{0.5, 1.0, 2.0, 3.0};
    std::vector<double> fn_eps;
    double fn_tail_min = 0.0, fn_tail_max = 0.0;
    int fn_tail_points = 0;
    funct->add_option("diagrams", fn_in, "input diagrams JSON")->required();
    funct->add_option("--p", fn_p, "orders for pers_p and its integral form");
    funct->add_option("--eps", fn_eps, "thresholds for bar counting");
    funct->add_option("--tail-min", fn_tail_min, "smallest eps of the tail grid");
    funct->add_option("--tail-max", fn_tail_max, "largest eps of the tail grid");
    funct->add_option("--tail-points", fn_tail_points, "tail grid size (0 = no fit)");
    funct->add_option("-o,--output", fn_out, "output JSON")->required();

    // dist
    auto* dist = app.add_subcommand("dist", "distance between two diagram files");
    std::string d_a, d_b, d_plan;
    double d_p = 1.0;
    int d_degree = 0;
    dist->add_option("a", d_a, "first diagrams JSON")->required();
    dist->add_option("b", d_b, "second diagrams JSON")->required();
    dist->add_option("--p", d_p, "order; inf selects the bottleneck distance");
    dist->add_option("--degree", d_degree, "homology degree");
    dist->add_option("--plan", d_plan, "also write the optimal plan JSON here");

    // curves
    auto* curves = app.add_subcommand("curves", "Betti/Euler curves of a field");
    std::string c_in, c_prefix;
    std::vector<double> c_thetas;
    curves->add_option("field", c_in, "input field JSON")->required();
    curves->add_option("-o,--output-prefix", c_prefix, "output path prefix")->required();
    curves->add_option("--thetas", c_thetas, "sample the Euler-curve Fourier transform");

    // experiment
    auto* exper = app.add_subcommand("experiment", "stability sweep from a config file");
    std::string e_cfg, e_prefix;
    int e_jobs = 0;
    exper->add_option("--config", e_cfg, "experiment config JSON")->required();
    exper->add_option("-o,--output-prefix", e_prefix, "output path prefix")->required();
    exper->add_option("--jobs", e_jobs, "parallel workers (0 = config value)");

    // oracle-check
    auto* oracle = app.add_subcommand("oracle-check", "diagrams vs direct rank computation");
    int o_dim = 2, o_seeds = 25;
    std::string o_shape = "6x6";
    std::uint64_t o_base = 1;
    oracle->add_option("--dim", o_dim, "torus dimension")->check(CLI::Range(1, 3));
    oracle->add_option("--shape", o_shape, "grid extents, e.g. 6x6");
    oracle->add_option("--seeds", o_seeds, "number of random fields");
    oracle->add_option("--seed-base", o_base, "first seed");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(gen)) {
            detail::RunContext ctx("gen", argv_copy);
            ScalarField f;
            if (g_osc) {
                if (g_dim != 1) throw std::runtime_error("gen: --oscillatory needs --dim 1");
                f = pathological_1d(g_res > 0 ? g_res : 1024);
            } else {
                f = sample_trig_field(g_dim, g_cutoff, g_beta, g_seed, g_res);
            }
            ctx.config() = json{{"dim", g_dim},   {"cutoff", g_cutoff},
                                {"beta", g_beta}, {"seed", g_seed},
                                {"resolution", g_res}, {"oscillatory", g_osc}};
            ctx.seeds() = {g_seed};
            ctx.emit(g_out, io::field_to_json(f).dump(2) + "\n");
            ctx.finish();
            return 0;
        }

        if (app.got_subcommand(persist)) {
            detail::RunContext ctx("persist", argv_copy);
            const auto f = io::field_from_json(json::parse(io::read_file(p_in)));
            const auto diagrams = compute_diagrams(build_complex(f));
            for (const auto& d : diagrams) {
                const auto viol = validate_diagram(d);
                if (!viol.empty())
                    throw std::runtime_error("computed diagram invalid: " + viol.front());
            }
            ctx.config() = json{{"input", p_in}};
            ctx.seeds() = {f.provenance.seed};
            ctx.emit(p_out, io::diagrams_to_json(diagrams).dump(2) + "\n");
            ctx.finish();
            return 0;
        }

        if (app.got_subcommand(funct)) {
            detail::RunContext ctx("functionals", argv_copy);
            const auto diagrams = io::diagrams_from_json(json::parse(io::read_file(fn_in)));
            json per_degree = json::array();
            for (const auto& d : diagrams) {
                json entry{{"degree", d.degree}, {"pers_infinity", pers_infinity(d)}};
                json pers = json::array(), mellin = json::array();
                for (double p : fn_p) {
                    pers.push_back(json::array({p, pers_p(d, p)}));
                    mellin.push_back(json::array({p, mellin_pers_p(d, p)}));
                }
                entry["pers_p"] = std::move(pers);
                entry["mellin_pers_p"] = std::move(mellin);
                json counts = json::array();
                for (double e : fn_eps) counts.push_back(json::array({e, count_bars_geq(d, e)}));
                entry["count_geq"] = std::move(counts);
                if (fn_tail_points > 0) {
                    std::vector<double> grid(fn_tail_points);
                    for (int i = 0; i < fn_tail_points; ++i)
                        grid[i] = fn_tail_min *
                                  std::pow(fn_tail_max / fn_tail_min,
                                           double(i) / std::max(1, fn_tail_points - 1));
                    try {
                        entry["tail"] = io::tail_to_json(tail_exponent(d, grid));
                    } catch (const std::exception& e) {
                        entry["tail"] = json{{"error", e.what()}};
                    }
                }
                per_degree.push_back(std::move(entry));
            }
            ctx.config() = json{{"input", fn_in}, {"p", fn_p}, {"eps", fn_eps},
                                {"tail_min", fn_tail_min}, {"tail_max", fn_tail_max},
                                {"tail_points", fn_tail_points}};
            ctx.emit(fn_out, json{{"per_degree", per_degree}}.dump(2) + "\n");
            ctx.finish();
            return 0;
        }

        if (app.got_subcommand(dist)) {
            detail::RunContext ctx("dist", argv_copy);
            const auto da = io::diagrams_from_json(json::parse(io::read_file(d_a)));
            const auto db = io::diagrams_from_json(json::parse(io::read_file(d_b)));
            auto pick = [&](const std::vector<Diagram>& ds) -> const Diagram& {
                for (const auto& d : ds)
                    if (d.degree == d_degree) return d;
                throw std::runtime_error("no diagram of degree " + std::to_string(d_degree));
            };
            const Diagram& A = pick(da);
            const Diagram& B = pick(db);
            double value = 0.0;
            if (std::isinf(d_p)) {
                value = bottleneck(A, B);
            } else if (!d_plan.empty()) {
                const auto plan = transport_plan(A, B, d_p);
                value = plan.cost;
                ctx.config() = json{{"a", d_a}, {"b", d_b}, {"p", d_p}, {"degree", d_degree}};
                ctx.emit(d_plan, io::plan_to_json(plan).dump(2) + "\n");
                ctx.finish();
            } else {
                value = dist_p(A, B, d_p);
            }
            std::cout << io::format_double(value) << "\n";
            return 0;
        }

        if (app.got_subcommand(curves)) {
            detail::RunContext ctx("curves", argv_copy);
            const auto f = io::field_from_json(json::parse(io::read_file(c_in)));
            const auto K = build_complex(f);
            const auto diagrams = compute_diagrams(K);
            ctx.config() = json{{"input", c_in}, {"thetas", c_thetas}};
            ctx.seeds() = {f.provenance.seed};
            for (const auto& d : diagrams)
                ctx.emit(c_prefix + "betti_" + std::to_string(d.degree) + ".csv",
                         io::curve_to_csv(betti_curve(d)));
            const auto euler = euler_curve(diagrams);
            ctx.emit(c_prefix + "euler.csv", io::curve_to_csv(euler));
            ctx.emit(c_prefix + "euler_cells.csv", io::curve_to_csv(euler_curve_cells(K)));
            if (!c_thetas.empty()) {
                const auto ft = fourier_transform(euler, c_thetas);
                std::string csv = "theta,re,im\n";
                for (std::size_t i = 0; i < c_thetas.size(); ++i)
                    csv += io::format_double(c_thetas[i]) + "," +
                           io::format_double(ft[i].real()) + "," +
                           io::format_double(ft[i].imag()) + "\n";
                ctx.emit(c_prefix + "fourier.csv", csv);
            }
            ctx.set_manifest_path(c_prefix + "manifest.json");
            ctx.finish();
            return 0;
        }

        if (app.got_subcommand(exper)) {
            detail::RunContext ctx("experiment", argv_copy);
            auto cfg = io::config_from_json(json::parse(io::read_file(e_cfg)));
            if (e_jobs > 0) cfg.jobs = e_jobs;
            const auto rep = stability_experiment(cfg);
            const auto crep = curve_stability_experiment(cfg);
            ctx.config() = io::config_to_json(cfg);
            ctx.seeds() = cfg.seeds;
            ctx.emit(e_prefix + "report_diagram.json", io::report_to_json(rep).dump(2) + "\n");
            ctx.emit(e_prefix + "report_diagram.csv", io::report_to_csv(rep));
            ctx.emit(e_prefix + "report_curves.json", io::report_to_json(crep).dump(2) + "\n");
            ctx.emit(e_prefix + "report_curves.csv", io::report_to_csv(crep));
            ctx.set_manifest_path(e_prefix + "manifest.json");
            ctx.finish();
            return 0;
        }

        if (app.got_subcommand(oracle)) {
            return detail::run_oracle_check(o_dim, o_shape, o_seeds, o_base);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace torph::cli
