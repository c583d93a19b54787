#pragma once

// Experiment configuration: one JSON document describes one experiment.
// The parser validates the schema with key-accurate error messages,
// rejects unknown keys so typos cannot silently fall back to defaults,
// and computes the content hash stamped on every output artifact.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgplate/analytic.hpp"
#include "sgplate/carleman.hpp"
#include "sgplate/error.hpp"
#include "sgplate/geometry.hpp"
#include "sgplate/material.hpp"

namespace sgp {

using Json = nlohmann::json;

// FNV-1a over the canonical serialization (sorted keys, no whitespace),
// so formatting and key order in the file do not change the hash.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::uint64_t config_hash(const Json& j) { return fnv1a64(j.dump()); }

namespace detail {

inline const Json& require_key(const Json& j, const char* key, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError("config: " + ctx + " must be an object");
    const auto it = j.find(key);
    if (it == j.end())
        throw ConfigError("config: " + ctx + " is missing key \"" + key + "\"");
    return *it;
}

inline void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                       const std::string& ctx) {
    if (!j.is_object()) throw ConfigError("config: " + ctx + " must be an object");
    for (const auto& [key, val] : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("config: " + ctx + " has unknown key \"" + key + "\"");
    }
}

inline double as_number(const Json& j, const std::string& ctx) {
    if (!j.is_number()) throw ConfigError("config: " + ctx + " must be a number");
    return j.get<double>();
}

inline int as_int(const Json& j, const std::string& ctx) {
    if (!j.is_number_integer() && !j.is_number_unsigned())
        throw ConfigError("config: " + ctx + " must be an integer");
    return j.get<int>();
}

inline bool as_bool(const Json& j, const std::string& ctx) {
    if (!j.is_boolean()) throw ConfigError("config: " + ctx + " must be a boolean");
    return j.get<bool>();
}

inline std::string as_string(const Json& j, const std::string& ctx) {
    if (!j.is_string()) throw ConfigError("config: " + ctx + " must be a string");
    return j.get<std::string>();
}

inline double num_at(const Json& j, const char* key, const std::string& ctx) {
    return as_number(require_key(j, key, ctx), ctx + " key \"" + key + "\"");
}

inline double num_or(const Json& j, const char* key, double dflt, const std::string& ctx) {
    const auto it = j.find(key);
    return it == j.end() ? dflt : as_number(*it, ctx + " key \"" + key + "\"");
}

inline int int_at(const Json& j, const char* key, const std::string& ctx) {
    return as_int(require_key(j, key, ctx), ctx + " key \"" + key + "\"");
}

inline int int_or(const Json& j, const char* key, int dflt, const std::string& ctx) {
    const auto it = j.find(key);
    return it == j.end() ? dflt : as_int(*it, ctx + " key \"" + key + "\"");
}

inline bool bool_or(const Json& j, const char* key, bool dflt, const std::string& ctx) {
    const auto it = j.find(key);
    return it == j.end() ? dflt : as_bool(*it, ctx + " key \"" + key + "\"");
}

}  // namespace detail

// Analytic term list for scalar fields: every entry is an object with a
// subset of the Term members, e.g. {"c": 2.0, "px1": 3} for 2 x1^3.
inline std::vector<Term> parse_terms(const Json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty())
        throw ConfigError("config: " + ctx + " must be a nonempty array of term objects");
    std::vector<Term> terms;
    terms.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string tctx = ctx + " term " + std::to_string(i);
        const Json& tj = j[i];
        detail::check_keys(tj, {"c", "px1", "px2", "kx1", "kx2", "wx1", "wx2", "phase"}, tctx);
        Term t;
        t.c = detail::num_or(tj, "c", 1.0, tctx);
        t.px1 = detail::int_or(tj, "px1", 0, tctx);
        t.px2 = detail::int_or(tj, "px2", 0, tctx);
        if (t.px1 < 0 || t.px2 < 0)
            throw ConfigError("config: " + tctx + " has a negative monomial power");
        t.kx1 = detail::num_or(tj, "kx1", 0.0, tctx);
        t.kx2 = detail::num_or(tj, "kx2", 0.0, tctx);
        t.wx1 = detail::num_or(tj, "wx1", 0.0, tctx);
        t.wx2 = detail::num_or(tj, "wx2", 0.0, tctx);
        t.phase = detail::num_or(tj, "phase", 0.0, tctx);
        terms.push_back(t);
    }
    return terms;
}

// Scalar coefficient field: a bare number is a constant, an array is an
// analytic term list.
inline std::shared_ptr<const Field2> parse_field(const Json& j, const std::string& ctx) {
    if (j.is_number()) return std::make_shared<ConstantField>(j.get<double>());
    if (j.is_array()) return std::make_shared<AnalyticField>(parse_terms(j, ctx));
    throw ConfigError("config: " + ctx + " must be a number or an array of term objects");
}

inline Domain parse_domain(const Json& j) {
    const std::string kind = detail::as_string(detail::require_key(j, "kind", "domain"),
                                               "domain key \"kind\"");
    if (kind == "disk") {
        detail::check_keys(j, {"kind", "radius", "r0"}, "domain");
        return Domain::disk(detail::num_at(j, "radius", "domain"),
                            detail::num_or(j, "r0", 1.0, "domain"));
    }
    if (kind == "rectangle") {
        detail::check_keys(j, {"kind", "a", "b", "corner_radius", "r0"}, "domain");
        return Domain::rectangle(detail::num_at(j, "a", "domain"),
                                 detail::num_at(j, "b", "domain"),
                                 detail::num_or(j, "corner_radius", 0.0, "domain"),
                                 detail::num_or(j, "r0", 1.0, "domain"));
    }
    if (kind == "mapped") {
        detail::check_keys(j, {"kind", "a", "b", "corner_radius", "phi1", "phi2", "r0"},
                           "domain");
        MapSpec map;
        map.phi1 = parse_field(detail::require_key(j, "phi1", "domain"), "domain key \"phi1\"");
        map.phi2 = parse_field(detail::require_key(j, "phi2", "domain"), "domain key \"phi2\"");
        return Domain::mapped(detail::num_at(j, "a", "domain"),
                              detail::num_at(j, "b", "domain"),
                              detail::num_or(j, "corner_radius", 0.0, "domain"), std::move(map),
                              detail::num_or(j, "r0", 1.0, "domain"));
    }
    throw ConfigError("config: domain key \"kind\" must be \"disk\", \"rectangle\" or \"mapped\"");
}

inline MaterialField parse_material(const Json& j) {
    detail::check_keys(
        j, {"mu", "lambda", "t", "l0", "l1", "l2", "r0", "q9_ratio", "smoothness"}, "material");
    MaterialField m;
    const auto mu_it = j.find("mu");
    m.mu = mu_it == j.end() ? std::make_shared<ConstantField>(1.0)
                            : parse_field(*mu_it, "material key \"mu\"");
    const auto la_it = j.find("lambda");
    m.lambda = la_it == j.end() ? std::make_shared<ConstantField>(1.0)
                                : parse_field(*la_it, "material key \"lambda\"");
    m.t = detail::num_or(j, "t", 1.0, "material");
    m.l0 = detail::num_or(j, "l0", 1.0, "material");
    m.l1 = detail::num_or(j, "l1", 1.0, "material");
    m.l2 = detail::num_or(j, "l2", 1.0, "material");
    m.r0 = detail::num_or(j, "r0", 1.0, "material");
    m.q9_ratio = detail::num_or(j, "q9_ratio", 0.0, "material");
    const auto sm_it = j.find("smoothness");
    if (sm_it != j.end()) {
        const std::string s = detail::as_string(*sm_it, "material key \"smoothness\"");
        if (s == "C01")
            m.smoothness = SmoothnessClass::C01;
        else if (s == "C11")
            m.smoothness = SmoothnessClass::C11;
        else if (s == "C21")
            m.smoothness = SmoothnessClass::C21;
        else
            throw ConfigError(
                "config: material key \"smoothness\" must be \"C01\", \"C11\" or \"C21\"");
    }
    if (!(m.t > 0.0)) throw ConfigError("config: material key \"t\" must be positive");
    if (!(m.l0 > 0.0 && m.l1 > 0.0 && m.l2 > 0.0))
        throw ConfigError("config: material keys \"l0\", \"l1\", \"l2\" must be positive");
    if (!(m.r0 > 0.0)) throw ConfigError("config: material key \"r0\" must be positive");
    return m;
}

struct DiscretizationConfig {
    int degree = 0;
    int n_el = 0;
    int quadrature = 0;          // Gauss points per direction; 0 means degree + 2
    int boundary_quadrature = 0; // boundary points per panel; 0 means 2 degree + 4
};

inline DiscretizationConfig parse_discretization(const Json& j) {
    detail::check_keys(j, {"degree", "n_el", "quadrature", "boundary_quadrature"},
                       "discretization");
    DiscretizationConfig d;
    d.degree = detail::int_at(j, "degree", "discretization");
    d.n_el = detail::int_at(j, "n_el", "discretization");
    d.quadrature = detail::int_or(j, "quadrature", 0, "discretization");
    d.boundary_quadrature = detail::int_or(j, "boundary_quadrature", 0, "discretization");
    if (d.degree < 3)
        throw ConfigError("config: discretization key \"degree\" must be at least 3");
    if (d.degree > 8)
        throw ConfigError("config: discretization key \"degree\" must be at most 8");
    if (d.n_el < 1)
        throw ConfigError("config: discretization key \"n_el\" must be at least 1");
    return d;
}

// Boundary data source. Synthesized data come from a manufactured
// displacement; analytic data are trigonometric series in arclength with
// cosine and sine coefficients per channel; CSV data are read from the
// four-column file format (s, Vhat, Mn_hat, Mnh_hat).
struct DataConfig {
    enum class Source { Synthesize, Analytic, Csv };
    Source source = Source::Synthesize;
    std::shared_ptr<const Field2> u_star; // Synthesize
    std::string path;                     // Csv
    std::vector<double> cos_coef[3], sin_coef[3]; // Analytic, channels V, Mn, Mnh
    int samples = 1024;
};

namespace detail {

inline void parse_series(const Json& j, const std::string& ctx, std::vector<double>& cos_out,
                         std::vector<double>& sin_out) {
    check_keys(j, {"cos", "sin"}, ctx);
    for (const char* part : {"cos", "sin"}) {
        const auto it = j.find(part);
        if (it == j.end()) continue;
        const std::string pctx = ctx + " key \"" + part + "\"";
        if (!it->is_array()) throw ConfigError("config: " + pctx + " must be an array");
        std::vector<double>& out = part[0] == 'c' ? cos_out : sin_out;
        for (std::size_t i = 0; i < it->size(); ++i)
            out.push_back(as_number((*it)[i], pctx + " entry " + std::to_string(i)));
    }
}

}  // namespace detail

inline DataConfig parse_data(const Json& j) {
    const std::string source =
        detail::as_string(detail::require_key(j, "source", "data"), "data key \"source\"");
    DataConfig d;
    if (source == "synthesize") {
        detail::check_keys(j, {"source", "u_star", "samples"}, "data");
        d.source = DataConfig::Source::Synthesize;
        d.u_star = parse_field(detail::require_key(j, "u_star", "data"), "data key \"u_star\"");
    } else if (source == "analytic") {
        detail::check_keys(j, {"source", "vhat", "mn_hat", "mnh_hat", "samples"}, "data");
        d.source = DataConfig::Source::Analytic;
        const char* keys[3] = {"vhat", "mn_hat", "mnh_hat"};
        for (int c = 0; c < 3; ++c) {
            const auto it = j.find(keys[c]);
            if (it != j.end())
                detail::parse_series(*it, std::string("data key \"") + keys[c] + "\"",
                                     d.cos_coef[c], d.sin_coef[c]);
        }
    } else if (source == "csv") {
        detail::check_keys(j, {"source", "path"}, "data");
        d.source = DataConfig::Source::Csv;
        d.path = detail::as_string(detail::require_key(j, "path", "data"), "data key \"path\"");
    } else {
        throw ConfigError(
            "config: data key \"source\" must be \"synthesize\", \"analytic\" or \"csv\"");
    }
    d.samples = detail::int_or(j, "samples", 1024, "data");
    if (d.samples < 16) throw ConfigError("config: data key \"samples\" must be at least 16");
    return d;
}

struct SolveParams {
    int grid = 33; // sample points per direction in the solution CSV
};

struct ConvergenceParams {
    std::vector<int> elements = {4, 8, 16, 32};
};

struct CarlemanParams {
    std::vector<int> orders = {1, 2, 3};
    double tau_bar = 8.0;   // sweep covers [tau_bar, 4 tau_bar]
    int n_tau = 9;
    double R1 = 0.5;
    double epsilon = 0.5;   // weight exponent for orders 1 and 2
    double epsilon3 = 0.2;  // order 3 requires epsilon <= 1/5
    bool stability = false; // rerun on a refined quadrature and report drift
    PolarQuadOptions quad;
};

struct UcLabParams {
    double R1 = 0.5;
    int levels = 10;            // profile depth: radii R1/2^levels .. R1
    double caccioppoli_r = 0.5;
    bool include_solution = false; // also profile the configured solve
};

inline SolveParams parse_solve(const Json& j) {
    detail::check_keys(j, {"grid"}, "solve");
    SolveParams p;
    p.grid = detail::int_or(j, "grid", 33, "solve");
    if (p.grid < 2) throw ConfigError("config: solve key \"grid\" must be at least 2");
    return p;
}

inline ConvergenceParams parse_convergence(const Json& j) {
    detail::check_keys(j, {"elements"}, "convergence");
    ConvergenceParams p;
    const auto it = j.find("elements");
    if (it != j.end()) {
        if (!it->is_array() || it->size() < 2)
            throw ConfigError(
                "config: convergence key \"elements\" must be an array of at least 2 counts");
        p.elements.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            const int n = detail::as_int((*it)[i], "convergence key \"elements\" entry " +
                                                       std::to_string(i));
            if (n < 1 || (!p.elements.empty() && n <= p.elements.back()))
                throw ConfigError(
                    "config: convergence key \"elements\" must be strictly increasing and "
                    "positive");
            p.elements.push_back(n);
        }
    }
    return p;
}

inline CarlemanParams parse_carleman(const Json& j) {
    detail::check_keys(j,
                       {"orders", "tau_bar", "n_tau", "R1", "epsilon", "epsilon3", "stability",
                        "panels", "radial", "theta"},
                       "carleman");
    CarlemanParams p;
    const auto it = j.find("orders");
    if (it != j.end()) {
        if (!it->is_array() || it->empty())
            throw ConfigError("config: carleman key \"orders\" must be a nonempty array");
        p.orders.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            const int o =
                detail::as_int((*it)[i], "carleman key \"orders\" entry " + std::to_string(i));
            if (o < 1 || o > 3)
                throw ConfigError("config: carleman key \"orders\" entries must be 1, 2 or 3");
            p.orders.push_back(o);
        }
    }
    p.tau_bar = detail::num_or(j, "tau_bar", 8.0, "carleman");
    p.n_tau = detail::int_or(j, "n_tau", 9, "carleman");
    p.R1 = detail::num_or(j, "R1", 0.5, "carleman");
    p.epsilon = detail::num_or(j, "epsilon", 0.5, "carleman");
    p.epsilon3 = detail::num_or(j, "epsilon3", 0.2, "carleman");
    p.stability = detail::bool_or(j, "stability", false, "carleman");
    p.quad.n_panels = detail::int_or(j, "panels", p.quad.n_panels, "carleman");
    p.quad.n_radial = detail::int_or(j, "radial", p.quad.n_radial, "carleman");
    p.quad.n_theta = detail::int_or(j, "theta", p.quad.n_theta, "carleman");
    if (!(p.tau_bar > 1.0))
        throw ConfigError("config: carleman key \"tau_bar\" must exceed 1");
    if (p.n_tau < 2) throw ConfigError("config: carleman key \"n_tau\" must be at least 2");
    if (!(p.R1 > 0.0 && p.R1 <= 1.0))
        throw ConfigError("config: carleman key \"R1\" must lie in (0, 1]");
    if (!(p.epsilon > 0.0 && p.epsilon <= 0.5))
        throw ConfigError("config: carleman key \"epsilon\" must lie in (0, 1/2]");
    if (!(p.epsilon3 > 0.0 && p.epsilon3 <= 0.2))
        throw ConfigError("config: carleman key \"epsilon3\" must lie in (0, 1/5]");
    return p;
}

inline UcLabParams parse_uc_lab(const Json& j) {
    detail::check_keys(j, {"R1", "levels", "caccioppoli_r", "include_solution"}, "uc_lab");
    UcLabParams p;
    p.R1 = detail::num_or(j, "R1", 0.5, "uc_lab");
    p.levels = detail::int_or(j, "levels", 10, "uc_lab");
    p.caccioppoli_r = detail::num_or(j, "caccioppoli_r", 0.5, "uc_lab");
    p.include_solution = detail::bool_or(j, "include_solution", false, "uc_lab");
    if (!(p.R1 > 0.0 && p.R1 <= 1.0))
        throw ConfigError("config: uc_lab key \"R1\" must lie in (0, 1]");
    if (p.levels < 9 || p.levels > 30)
        throw ConfigError("config: uc_lab key \"levels\" must lie in [9, 30]");
    if (!(p.caccioppoli_r > 0.0 && p.caccioppoli_r <= 1.0))
        throw ConfigError("config: uc_lab key \"caccioppoli_r\" must lie in (0, 1]");
    return p;
}

// Parsed experiment description. Sections an experiment does not use may
// be absent; the need_* accessors turn absence into a config error naming
// the missing section.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 7;
    std::string out_dir = ".";
    std::optional<Domain> domain;
    std::optional<MaterialField> material;
    std::optional<DiscretizationConfig> disc;
    std::optional<DataConfig> data;
    SolveParams solve;
    ConvergenceParams convergence;
    CarlemanParams carleman;
    UcLabParams uc_lab;
    std::uint64_t hash = 0;

    const Domain& need_domain() const {
        if (!domain) throw ConfigError("config: missing section \"domain\"");
        return *domain;
    }
    const MaterialField& need_material() const {
        if (!material) throw ConfigError("config: missing section \"material\"");
        return *material;
    }
    const DiscretizationConfig& need_disc() const {
        if (!disc) throw ConfigError("config: missing section \"discretization\"");
        return *disc;
    }
    const DataConfig& need_data() const {
        if (!data) throw ConfigError("config: missing section \"data\"");
        return *data;
    }
};

inline ExperimentConfig parse_config(const Json& j) {
    detail::check_keys(j,
                       {"experiment", "seed", "out_dir", "domain", "material", "discretization",
                        "data", "solve", "convergence", "carleman", "uc_lab"},
                       "top level");
    ExperimentConfig cfg;
    cfg.experiment = detail::as_string(detail::require_key(j, "experiment", "top level"),
                                       "key \"experiment\"");
    const bool known = cfg.experiment == "solve" || cfg.experiment == "convergence" ||
                       cfg.experiment == "carleman-sweep" || cfg.experiment == "uc-lab" ||
                       cfg.experiment == "verify";
    if (!known)
        throw ConfigError("config: key \"experiment\" must be one of \"solve\", "
                          "\"convergence\", \"carleman-sweep\", \"uc-lab\", \"verify\"");
    const auto seed_it = j.find("seed");
    if (seed_it != j.end()) {
        if (!seed_it->is_number_integer() && !seed_it->is_number_unsigned())
            throw ConfigError("config: key \"seed\" must be an integer");
        cfg.seed = seed_it->get<std::uint64_t>();
    }
    const auto out_it = j.find("out_dir");
    if (out_it != j.end()) cfg.out_dir = detail::as_string(*out_it, "key \"out_dir\"");

    if (const auto it = j.find("domain"); it != j.end()) cfg.domain = parse_domain(*it);
    if (const auto it = j.find("material"); it != j.end()) cfg.material = parse_material(*it);
    if (const auto it = j.find("discretization"); it != j.end())
        cfg.disc = parse_discretization(*it);
    if (const auto it = j.find("data"); it != j.end()) cfg.data = parse_data(*it);
    if (const auto it = j.find("solve"); it != j.end()) cfg.solve = parse_solve(*it);
    if (const auto it = j.find("convergence"); it != j.end())
        cfg.convergence = parse_convergence(*it);
    if (const auto it = j.find("carleman"); it != j.end()) cfg.carleman = parse_carleman(*it);
    if (const auto it = j.find("uc_lab"); it != j.end()) cfg.uc_lab = parse_uc_lab(*it);

    cfg.hash = config_hash(j);
    return cfg;
}

inline Json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    try {
        return Json::parse(is);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }
}

inline ExperimentConfig load_config(const std::string& path) {
    return parse_config(load_json(path));
}

}  // namespace sgp
