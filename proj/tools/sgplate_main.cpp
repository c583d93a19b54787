// Command line front end. One JSON config describes one experiment; the
// subcommand selects which runner consumes it. Artifacts land in the
// output directory stamped with the config hash, and identical configs
// produce byte-identical artifacts.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgplate/artifact.hpp"
#include "sgplate/config.hpp"
#include "sgplate/verify.hpp"

namespace {

using namespace sgp;

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// Boundary data from the parsed source description.
NeumannData make_data(const DataConfig& dc, const Domain& dom, const MaterialField& mat) {
    switch (dc.source) {
        case DataConfig::Source::Synthesize:
            return synthesize(*dc.u_star, mat, dom, dc.samples);
        case DataConfig::Source::Csv:
            return NeumannData::read_csv_file(dc.path);
        case DataConfig::Source::Analytic:
            break;
    }
    const double P = dom.perimeter();
    // Channel c evaluates sum_i cos_i cos(2 pi i s / P) + sin_i sin(2 pi (i+1) s / P).
    const auto series = [P](const std::vector<double>& cos_c, const std::vector<double>& sin_c) {
        return [P, cos_c, sin_c](double s) {
            const double w = 2.0 * M_PI * s / P;
            double v = 0.0;
            for (std::size_t i = 0; i < cos_c.size(); ++i) v += cos_c[i] * std::cos(double(i) * w);
            for (std::size_t i = 0; i < sin_c.size(); ++i)
                v += sin_c[i] * std::sin(double(i + 1) * w);
            return v;
        };
    };
    return NeumannData::from_functions(dom, series(dc.cos_coef[0], dc.sin_coef[0]),
                                       series(dc.cos_coef[1], dc.sin_coef[1]),
                                       series(dc.cos_coef[2], dc.sin_coef[2]), dc.samples);
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

int run_solve(const ExperimentConfig& cfg, const std::string& out, int threads) {
    const Domain& dom = cfg.need_domain();
    const MaterialField& mat = cfg.need_material();
    const DiscretizationConfig& dc = cfg.need_disc();
    const DataConfig& data_cfg = cfg.need_data();
    const SplineSpace space = build_space(dom, dc.degree, dc.n_el);
    const NeumannData data = make_data(data_cfg, dom, mat);
    AssembleOptions aopts;
    aopts.n_quad = dc.quadrature;
    aopts.n_boundary = dc.boundary_quadrature;
    aopts.threads = threads;
    const SolveResult res = solve_neumann(dom, space, mat, data, aopts);

    CsvFile csv(join_path(out, "solution.csv"), cfg.hash, "x1,x2,u,u1,u2");
    const auto [lo, hi] = dom.param_bbox();
    const int g = cfg.solve.grid;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const Eigen::Vector2d xp(lo.x() + (hi.x() - lo.x()) * double(i) / (g - 1),
                                     lo.y() + (hi.y() - lo.y()) * double(j) / (g - 1));
            if (!dom.param_inside(xp)) continue;
            const DerivTable t = space.eval_field(res.coefs, xp, 1);
            const Eigen::Vector2d x = dom.to_physical(xp);
            Eigen::Vector2d grad = t.gradient();
            if (dom.kind() == DomainKind::Mapped)
                grad = dom.map_jacobians(xp).S.inverse().transpose() * grad;
            csv.row(x.x(), x.y(), t.value(), grad.x(), grad.y());
        }
    csv.close();

    Json diag;
    diag["experiment"] = "solve";
    diag["energy"] = res.energy;
    diag["h3_norm"] = res.h3_norm;
    diag["galerkin_residual"] = res.galerkin_residual;
    diag["constraint_residual"] = res.constraint_residual;
    diag["residual"] = res.residual;
    diag["stability_ratio"] = finite_or_null(stability_report(res, data));
    diag["multipliers"] = {res.multipliers[0], res.multipliers[1], res.multipliers[2]};
    diag["degree"] = dc.degree;
    diag["n_el"] = dc.n_el;
    diag["dofs_total"] = space.dim();
    if (data_cfg.source == DataConfig::Source::Synthesize)
        diag["h3_error"] =
            detail::relative_h3_error(dom, space, res.coefs, *data_cfg.u_star);
    write_json_file(join_path(out, "diagnostics.json"), diag, cfg.hash);
    return 0;
}

int run_convergence(const ExperimentConfig& cfg, const std::string& out, int threads) {
    const Domain& dom = cfg.need_domain();
    const MaterialField& mat = cfg.need_material();
    const DiscretizationConfig& dc = cfg.need_disc();
    const DataConfig& data_cfg = cfg.need_data();
    if (data_cfg.source != DataConfig::Source::Synthesize)
        throw ConfigError("config: convergence requires data source \"synthesize\"");
    const NeumannData data = make_data(data_cfg, dom, mat);
    const auto [lo, hi] = dom.param_bbox();
    const double width = std::max(hi.x() - lo.x(), hi.y() - lo.y());

    CsvFile csv(join_path(out, "convergence.csv"), cfg.hash, "n_el,h,h3_error");
    std::vector<double> hs, errs;
    for (const int n_el : cfg.convergence.elements) {
        const SplineSpace space = build_space(dom, dc.degree, n_el);
        AssembleOptions aopts;
        aopts.n_quad = dc.quadrature;
        aopts.n_boundary = dc.boundary_quadrature;
        aopts.threads = threads;
        const SolveResult res = solve_neumann(dom, space, mat, data, aopts);
        const double err = detail::relative_h3_error(dom, space, res.coefs, *data_cfg.u_star);
        const double h = width / n_el;
        csv.row(n_el, h, err);
        hs.push_back(std::log(h));
        errs.push_back(std::log(err));
    }
    csv.close();

    // Least squares slope of log error against log h.
    const double n = double(hs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        sx += hs[i];
        sy += errs[i];
        sxx += hs[i] * hs[i];
        sxy += hs[i] * errs[i];
    }
    const double rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    Json summary;
    summary["experiment"] = "convergence";
    summary["degree"] = dc.degree;
    summary["elements"] = cfg.convergence.elements;
    summary["rate"] = rate;
    write_json_file(join_path(out, "convergence.json"), summary, cfg.hash);
    return 0;
}

int run_carleman(const ExperimentConfig& cfg, const std::string& out) {
    const CarlemanParams& p = cfg.carleman;
    const std::vector<SweepMember> members = sweep_battery(p.R1, unsigned(cfg.seed));
    std::vector<double> taus(std::size_t(p.n_tau));
    for (int i = 0; i < p.n_tau; ++i)
        taus[std::size_t(i)] = p.tau_bar * (1.0 + 3.0 * double(i) / double(p.n_tau - 1));

    Json summary;
    summary["experiment"] = "carleman-sweep";
    summary["tau_min"] = taus.front();
    summary["tau_max"] = taus.back();
    Json constants = Json::object();
    Json drifts = Json::object();
    double max_drift = 0.0;
    for (const int order : p.orders) {
        const CarlemanWeight w(order == 3 ? p.epsilon3 : p.epsilon);
        SweepOptions opts;
        opts.R1 = p.R1;
        opts.quad = p.quad;
        CsvFile csv(join_path(out, "carleman_order" + std::to_string(order) + ".csv"), cfg.hash,
                    "member,tau,lhs,rhs,ratio");
        Json per_member = Json::object();
        for (const SweepMember& mem : members) {
            const SweepResult res = carleman_sweep(order, mem.bump, w, taus, opts);
            for (const SweepPoint& pt : res.points)
                csv.row(mem.name, pt.tau, pt.lhs, pt.rhs, pt.ratio);
            per_member[mem.name] = res.constant;
            if (p.stability) {
                SweepOptions fine = opts;
                fine.quad.n_panels += 16;
                fine.quad.n_radial += 2;
                fine.quad.n_theta += 24;
                const SweepResult ref = carleman_sweep(order, mem.bump, w, taus, fine);
                const double drift = std::abs(res.constant - ref.constant) /
                                     std::max(res.constant, ref.constant);
                drifts["order" + std::to_string(order)][mem.name] = drift;
                max_drift = std::max(max_drift, drift);
            }
        }
        csv.close();
        constants["order" + std::to_string(order)] = per_member;
    }
    summary["epsilon"] = p.epsilon;
    summary["epsilon3"] = p.epsilon3;
    summary["constants"] = constants;
    if (p.stability) {
        summary["quadrature_drift"] = drifts;
        summary["max_drift"] = max_drift;
    }
    write_json_file(join_path(out, "carleman_summary.json"), summary, cfg.hash);
    return 0;
}

int run_uc_lab(const ExperimentConfig& cfg, const std::string& out, int threads) {
    const UcLabParams& p = cfg.uc_lab;
    const std::vector<double> radii = dyadic_radii(p.R1, p.levels);

    struct Entry {
        std::string name;
        const Field2* field;
    };
    std::vector<TriharmonicMember> battery = triharmonic_battery();
    std::vector<Entry> entries;
    for (const TriharmonicMember& mem : battery) entries.push_back({mem.name, &mem.field});

    // The optional solver profile keeps its space and coefficients alive
    // for the duration of the measurements below.
    std::optional<SplineSpace> sol_space;
    std::optional<SplineSolutionField> sol_field;
    Eigen::VectorXd sol_coefs;
    if (p.include_solution) {
        const Domain& dom = cfg.need_domain();
        const MaterialField& mat = cfg.need_material();
        const DiscretizationConfig& dc = cfg.need_disc();
        const NeumannData data = make_data(cfg.need_data(), dom, mat);
        sol_space.emplace(build_space(dom, dc.degree, dc.n_el));
        AssembleOptions aopts;
        aopts.n_quad = dc.quadrature;
        aopts.n_boundary = dc.boundary_quadrature;
        aopts.threads = threads;
        const SolveResult res = solve_neumann(dom, *sol_space, mat, data, aopts);
        sol_coefs = res.coefs;
        sol_field.emplace(*sol_space, sol_coefs);
        entries.push_back({"solution", &*sol_field});
    }

    Json summary;
    summary["experiment"] = "uc-lab";
    summary["R1"] = p.R1;
    summary["levels"] = p.levels;
    Json per_member = Json::object();
    for (const Entry& e : entries) {
        const BallProfile prof = ball_profile(*e.field, radii, 1.0);
        const DoublingReport rep = doubling_report(prof, p.R1);
        CsvFile csv(join_path(out, "uc_" + e.name + ".csv"), cfg.hash,
                    "r,l2,doubling_ratio,N,C_cert");
        for (std::size_t i = 0; i < prof.radii.size(); ++i) {
            double ratio = std::numeric_limits<double>::quiet_NaN();
            for (const DoublingRow& row : rep.rows)
                if (row.r == prof.radii[i]) ratio = row.ratio;
            csv.row(prof.radii[i], prof.l2[i], ratio, rep.n_frequency, rep.certified_c);
        }
        csv.close();
        const ThreeSphereReport ts = three_sphere_report(prof, radii[0], radii[1], p.R1);
        const CaccioppoliReport cac = caccioppoli_report(*e.field, p.caccioppoli_r);
        Json m;
        m["doubling_N"] = rep.n_frequency;
        m["doubling_C_cert"] = rep.certified_c;
        m["three_sphere_theta"] = ts.theta;
        m["three_sphere_lhs"] = ts.lhs;
        m["three_sphere_rhs"] = ts.rhs;
        m["three_sphere_C_cert"] = ts.certified_c;
        m["caccioppoli_r"] = cac.r;
        m["caccioppoli_ratios"] = cac.ratio;
        per_member[e.name] = m;
    }
    summary["members"] = per_member;
    write_json_file(join_path(out, "uc_lab_summary.json"), summary, cfg.hash);
    return 0;
}

int run_verify(const ExperimentConfig& cfg, const std::string& out) {
    const std::vector<InvariantResult> results = run_verification(cfg.seed);
    CsvFile csv(join_path(out, "verify_report.csv"), cfg.hash,
                "module,property,status,value,tolerance");
    bool all_pass = true;
    for (const InvariantResult& r : results) {
        csv.row(r.module, r.property, r.pass ? "pass" : "fail", r.value, r.tol);
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.module << "/" << r.property
                  << " value=" << g17(r.value) << " tol=" << g17(r.tol) << "\n";
        all_pass = all_pass && r.pass;
    }
    csv.close();
    if (!all_pass) {
        std::cerr << "error: invariant suite failed\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strain-gradient plate solver and unique-continuation lab"};
    app.require_subcommand(1);

    std::string config_path, out_flag;
    int threads = 1;
    std::uint64_t seed_flag = 0;
    std::vector<CLI::Option*> seed_opts;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Path to the JSON experiment config");
        sub->add_option("--out", out_flag, "Output directory (overrides config out_dir)");
        sub->add_option("--threads", threads, "Assembly threads")->check(CLI::PositiveNumber);
        seed_opts.push_back(
            sub->add_option("--seed", seed_flag, "Seed override folded into the config"));
    };
    add_common(app.add_subcommand("solve", "Solve one Neumann problem"));
    add_common(app.add_subcommand("convergence", "Mesh refinement study"));
    add_common(app.add_subcommand("carleman-sweep", "Carleman constant sweep"));
    add_common(app.add_subcommand("uc-lab", "Doubling, three-sphere and Caccioppoli profiles"));
    add_common(app.add_subcommand("verify", "Run the cross-module invariant suite"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        Json doc;
        if (!config_path.empty()) {
            doc = load_json(config_path);
        } else if (cmd == "verify") {
            doc = Json::object();
        } else {
            throw ConfigError("config: --config is required for \"" + cmd + "\"");
        }
        if (!doc.contains("experiment")) doc["experiment"] = cmd;
        bool seed_given = false;
        for (const CLI::Option* o : seed_opts) seed_given = seed_given || o->count() > 0;
        if (seed_given) doc["seed"] = seed_flag;

        const ExperimentConfig cfg = parse_config(doc);
        if (cfg.experiment != cmd)
            throw ConfigError("config: key \"experiment\" is \"" + cfg.experiment +
                              "\" but the \"" + cmd + "\" subcommand was invoked");

        const std::string out = out_flag.empty() ? cfg.out_dir : out_flag;
        std::error_code ec;
        std::filesystem::create_directories(out, ec);
        if (ec) throw ConfigError("config: cannot create output directory " + out);

        if (cmd == "solve") return run_solve(cfg, out, threads);
        if (cmd == "convergence") return run_convergence(cfg, out, threads);
        if (cmd == "carleman-sweep") return run_carleman(cfg, out);
        if (cmd == "uc-lab") return run_uc_lab(cfg, out, threads);
        return run_verify(cfg, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
