#pragma once

// JSON/CSV serialization for fields, diagrams, curves, configs and
// reports. JSON doubles round-trip bitwise (shortest representation);
// CSV doubles are written with std::to_chars for the same guarantee.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "torph/field.hpp"
#include "torph/functionals.hpp"
#include "torph/persistence.hpp"
#include "torph/step_curve.hpp"
#include "torph/stochastic.hpp"
#include "torph/transport.hpp"

namespace torph::io {

using json = nlohmann::json;

inline std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

inline void write_file(const std::string& path, std::string_view content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

// ---- fields ----

inline json field_to_json(const ScalarField& f) {
    json j;
    j["dim"] = f.dim;
    j["shape"] = std::vector<int>(f.shape.begin(), f.shape.begin() + f.dim);
    j["values"] = f.values;
    if (f.has_coeffs()) {
        json arr = json::array();
        for (const auto& fc : f.coeffs) {
            json e = json::array();
            for (int a = 0; a < f.dim; ++a) e.push_back(fc.k[a]);
            e.push_back(fc.c.real());
            e.push_back(fc.c.imag());
            arr.push_back(std::move(e));
        }
        j["coeffs"] = std::move(arr);
    }
    j["provenance"] = {{"generator", f.provenance.generator},
                       {"seed", f.provenance.seed},
                       {"cutoff", f.provenance.cutoff},
                       {"beta", f.provenance.beta}};
    return j;
}

inline ScalarField field_from_json(const json& j) {
    const int dim = j.at("dim").get<int>();
    if (dim < 1 || dim > 3) throw std::runtime_error("field: dim outside {1,2,3}");
    std::array<int, 3> shape{1, 1, 1};
    const auto& sh = j.at("shape");
    if (static_cast<int>(sh.size()) != dim)
        throw std::runtime_error("field: shape length does not match dim");
    for (int a = 0; a < dim; ++a) shape[a] = sh.at(a).get<int>();
    ScalarField f = make_grid_field(j.at("values").get<std::vector<double>>(), dim, shape);
    if (j.contains("coeffs")) {
        for (const auto& e : j.at("coeffs")) {
            if (static_cast<int>(e.size()) != dim + 2)
                throw std::runtime_error("field: coeff entry has wrong arity");
            FourierCoeff fc;
            for (int a = 0; a < dim; ++a) fc.k[a] = e.at(a).get<int>();
            fc.c = {e.at(dim).get<double>(), e.at(dim + 1).get<double>()};
            f.coeffs.push_back(fc);
        }
    }
    if (j.contains("provenance")) {
        const auto& p = j.at("provenance");
        f.provenance.generator = p.value("generator", std::string("grid"));
        f.provenance.seed = p.value("seed", std::uint64_t{0});
        f.provenance.cutoff = p.value("cutoff", 0);
        f.provenance.beta = p.value("beta", 0.0);
    }
    const auto viol = validate_field(f);
    if (!viol.empty()) throw std::runtime_error("field: " + viol.front());
    return f;
}

// ---- diagrams ----

inline json diagram_to_json(const Diagram& d) {
    json pts = json::array();
    for (const auto& pt : d.points) pts.push_back(json::array({pt.birth, pt.death}));
    return json{{"degree", d.degree},
                {"range", json::array({d.range_min, d.range_max})},
                {"essential_count", d.essential_count},
                {"points", std::move(pts)}};
}

inline Diagram diagram_from_json(const json& j) {
    Diagram d;
    d.degree = j.at("degree").get<int>();
    d.range_min = j.at("range").at(0).get<double>();
    d.range_max = j.at("range").at(1).get<double>();
    d.essential_count = j.at("essential_count").get<int>();
    int i = 0;
    for (const auto& e : j.at("points")) {
        d.points.push_back(
            {e.at(0).get<double>(), e.at(1).get<double>(), i < d.essential_count});
        ++i;
    }
    const auto viol = validate_diagram(d);
    if (!viol.empty()) throw std::runtime_error("diagram: " + viol.front());
    return d;
}

inline json diagrams_to_json(const std::vector<Diagram>& ds) {
    json arr = json::array();
    for (const auto& d : ds) arr.push_back(diagram_to_json(d));
    return json{{"diagrams", std::move(arr)}};
}

inline std::vector<Diagram> diagrams_from_json(const json& j) {
    std::vector<Diagram> out;
    for (const auto& e : j.at("diagrams")) out.push_back(diagram_from_json(e));
    return out;
}

// ---- curves ----

inline std::string curve_to_csv(const StepCurve& c) {
    std::string out = "x_left,x_right,value\n";
    for (std::size_t i = 0; i < c.values.size(); ++i) {
        out += format_double(c.breakpoints[i]);
        out += ',';
        out += format_double(c.breakpoints[i + 1]);
        out += ',';
        out += format_double(c.values[i]);
        out += '\n';
    }
    return out;
}

// ---- functionals ----

inline json tail_to_json(const TailEstimate& t) {
    return json{{"epsilons", t.epsilons},      {"counts", t.counts},
                {"used", std::vector<bool>(t.used)}, {"residuals", t.residuals},
                {"slope", t.slope},            {"intercept", t.intercept}};
}

// ---- experiment config / report ----

inline json config_to_json(const ExperimentConfig& c) {
    return json{{"dim", c.dim},
                {"cutoff", c.cutoff},
                {"beta", c.beta},
                {"n", c.n},
                {"p", c.p},
                {"q", c.q},
                {"alpha", c.alpha},
                {"deltas", c.deltas},
                {"seeds", c.seeds},
                {"degrees", c.degrees},
                {"mode", c.mode == PerturbMode::smooth ? "smooth" : "shift"},
                {"thetas", c.thetas},
                {"jobs", c.jobs}};
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.dim = j.value("dim", c.dim);
    c.cutoff = j.value("cutoff", c.cutoff);
    c.beta = j.value("beta", c.beta);
    c.n = j.value("n", c.n);
    c.p = j.value("p", c.p);
    c.q = j.value("q", c.q);
    c.alpha = j.value("alpha", c.alpha);
    c.deltas = j.at("deltas").get<std::vector<double>>();
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.degrees = j.value("degrees", c.degrees);
    const std::string mode = j.value("mode", std::string("smooth"));
    if (mode == "smooth")
        c.mode = PerturbMode::smooth;
    else if (mode == "shift")
        c.mode = PerturbMode::shift;
    else
        throw std::runtime_error("config: mode must be smooth or shift");
    c.thetas = j.value("thetas", c.thetas);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

inline json report_to_json(const StabilityReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back(json{{"delta", row.delta},
                            {"mean_sup_diff", row.mean_sup_diff},
                            {"mean_norm_f", row.mean_norm_f},
                            {"mean_norm_g", row.mean_norm_g},
                            {"mean_distp_p", row.mean_distp_p},
                            {"ratio", row.ratio},
                            {"raw_distp_p", row.raw_distp_p},
                            {"raw_sup_diff", row.raw_sup_diff},
                            {"w1l1_betti", row.w1l1_betti},
                            {"w1l1_euler", row.w1l1_euler},
                            {"curve_margin", row.curve_margin},
                            {"euler_margin", row.euler_margin},
                            {"fourier_lhs", row.fourier_lhs},
                            {"fourier_rhs", row.fourier_rhs}});
    }
    return json{{"config", config_to_json(r.cfg)},
                {"rows", std::move(rows)},
                {"c_fit", r.c_fit},
                {"slope", r.slope},
                {"c_fit_curve", r.c_fit_curve},
                {"slope_curve", r.slope_curve},
                {"c_fit_euler", r.c_fit_euler},
                {"slope_euler", r.slope_euler}};
}

inline std::string report_to_csv(const StabilityReport& r) {
    std::string out = "delta,mean_sup_diff,mean_norm_f,mean_norm_g";
    for (int k : r.cfg.degrees) {
        const std::string ks = std::to_string(k);
        out += ",mean_distp_p_" + ks + ",ratio_" + ks + ",w1l1_betti_" + ks +
               ",curve_margin_" + ks;
    }
    out += ",w1l1_euler,euler_margin,fourier_lhs,fourier_rhs\n";
    for (const auto& row : r.rows) {
        out += format_double(row.delta);
        out += ',' + format_double(row.mean_sup_diff);
        out += ',' + format_double(row.mean_norm_f);
        out += ',' + format_double(row.mean_norm_g);
        for (std::size_t t = 0; t < r.cfg.degrees.size(); ++t) {
            out += ',' + (t < row.mean_distp_p.size() ? format_double(row.mean_distp_p[t])
                                                      : std::string("0"));
            out += ',' + (t < row.ratio.size() ? format_double(row.ratio[t]) : std::string("0"));
            out += ',' + (t < row.w1l1_betti.size() ? format_double(row.w1l1_betti[t])
                                                    : std::string("0"));
            out += ',' + (t < row.curve_margin.size() ? format_double(row.curve_margin[t])
                                                      : std::string("0"));
        }
        out += ',' + format_double(row.w1l1_euler);
        out += ',' + format_double(row.euler_margin);
        out += ',' + format_double(row.fourier_lhs);
        out += ',' + format_double(row.fourier_rhs);
        out += '\n';
    }
    return out;
}

// ---- transport plans ----

inline json plan_to_json(const TransportPlan& plan) {
    json pairs = json::array();
    for (const auto& pr : plan.pairs) pairs.push_back(json::array({pr.source, pr.target}));
    return json{{"p", plan.p}, {"cost", plan.cost}, {"pairs", std::move(pairs)}};
}

// ---- run manifests ----

struct OutputRecord {
    std::string path;
    std::size_t bytes = 0;
    std::string fnv1a64;
};

inline json manifest_to_json(const std::string& command, const std::vector<std::string>& argv,
                             const json& config, const std::vector<std::uint64_t>& seeds,
                             const std::vector<OutputRecord>& outputs, double wall_ms) {
    json outs = json::array();
    for (const auto& o : outputs)
        outs.push_back(json{{"path", o.path}, {"bytes", o.bytes}, {"fnv1a64", o.fnv1a64}});
    return json{{"command", command}, {"argv", argv},       {"config", config},
                {"seeds", seeds},     {"outputs", outs},    {"version", version},
                {"wall_ms", wall_ms}};
}

}  // namespace torph::io
