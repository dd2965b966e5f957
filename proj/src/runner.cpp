#include "lsx/cli.hpp"

#include "lsx/asympt.hpp"
#include "lsx/csv.hpp"
#include "lsx/error.hpp"
#include "lsx/pickands.hpp"
#include "lsx/raretail.hpp"
#include "lsx/sampler.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace lsx::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) fail(ErrorKind::io, "cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    template <class Fn>
    void write(const std::string& name, Fn&& fn) {
        const fs::path p = dir_ / name;
        std::ofstream os(p, std::ios::binary);
        if (!os) fail(ErrorKind::io, "cannot write " + p.string());
        fn(os);
        os.flush();
        if (!os) fail(ErrorKind::io, "write failed for " + p.string());
        files.push_back(p);
    }

    std::vector<fs::path> files;

private:
    fs::path dir_;
};

json versions() {
    return {
        {"lsx", kVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"fftw", std::string(fftw_version)},
        {"boost", BOOST_LIB_VERSION},
        {"compiler", __VERSION__},
    };
}

/// Pickands constants known in closed form.
double pickands_constant(const json& section, double alpha) {
    if (section.contains("pickands_constant")) return section.at("pickands_constant");
    if (alpha == 1.0) return 1.0;
    if (alpha == 2.0) return 1.0 / std::sqrt(M_PI);
    throw ConfigError("pickands_constant", "required unless alpha is 1 or 2 (estimate it with `lsx pickands`)");
}

json to_json(const TailApprox& t) {
    return {{"value", t.value},         {"prefactor", t.prefactor}, {"power", t.power},
            {"log_factor", t.log_factor}, {"survival", t.survival},   {"constant", t.constant},
            {"survival_underflow", t.survival_underflow}};
}

json to_json(const ExceedanceStats& s) {
    return {{"p_hat", s.p_hat}, {"std_error", s.std_error}, {"n", s.n},
            {"hits", s.hits},   {"ess", s.ess},             {"mean_weight", s.mean_weight},
            {"mean_weight_se", s.mean_weight_se}};
}

json to_json(const RegimeParams& p) {
    return {{"alpha0", p.alpha0}, {"a0", p.a0}, {"b", p.b}, {"beta", p.beta}, {"gamma", p.gamma},
            {"c", p.c}, {"t0", p.t0}, {"T", p.T}, {"ihat", p.ihat}, {"regime", to_string(p.regime())}};
}

TiltPolicy tilt_of(const json& s) {
    return s.at("tilt") == "single_point" ? TiltPolicy::single_point : TiltPolicy::mixture;
}

json run_asympt(const ExperimentConfig& cfg, Outputs& out) {
    const json& s = cfg.doc.at("asympt");
    RegimeParams p;
    std::optional<ProcessSpec> spec;
    bool flat;
    double T, a, alpha;
    if (s.contains("params")) {
        const json& q = s.at("params");
        flat = q.at("c").get<double>() == 0.0;
        alpha = q.at("alpha0");
        a = q.at("a0");
        T = q.at("T");
        if (!flat)
            p = RegimeParams::make(alpha, a, q.at("b"), q.at("beta"), q.at("gamma"), q.at("c"), q.at("t0"), T);
    } else {
        spec.emplace(build_process(cfg.doc.at("process")));
        flat = spec->variance().c == 0.0;
        alpha = spec->index().alpha0;
        a = spec->scale().a0;
        T = spec->horizon().length();
        if (!flat) p = spec->regime_params();
    }
    std::string formula = s.at("formula");
    if (formula == "auto") formula = flat ? "stationary" : "theorem1";
    if (formula == "theorem1" && flat)
        throw ConfigError("asympt.formula", "theorem1 needs a variance maximum (c > 0)");
    const double H = pickands_constant(s, alpha);

    json rows = json::array();
    std::vector<TailApprox> tails;
    for (double u : s.at("u").get<std::vector<double>>()) {
        tails.push_back(formula == "stationary" ? stationary_tail(T, a, alpha, H, u) : theorem1_tail(p, H, u));
        json r = to_json(tails.back());
        r["u"] = u;
        rows.push_back(r);
    }
    const auto us = s.at("u").get<std::vector<double>>();
    out.write("asympt.csv", [&](std::ostream& os) {
        csv::write_row(os, {"u", "value", "prefactor", "power", "log_factor", "survival", "constant"});
        for (std::size_t i = 0; i < tails.size(); ++i) {
            const auto& t = tails[i];
            csv::write_row(os, {csv::fmt(us[i]), csv::fmt(t.value), csv::fmt(t.prefactor), csv::fmt(t.power),
                                csv::fmt(t.log_factor), csv::fmt(t.survival), csv::fmt(t.constant)});
        }
    });
    json res{{"formula", formula}, {"pickands_constant", H}, {"tails", rows}};
    if (formula == "theorem1") res["params"] = to_json(p);
    return res;
}

json run_pickands(const ExperimentConfig& cfg, Outputs& out, Exec exec) {
    const json& s = cfg.doc.at("pickands");
    PickandsOptions opt;
    opt.method = s.at("method") == "crude" ? PickandsMethod::crude : PickandsMethod::mixture;
    opt.mesh_bias = s.at("mesh_bias");
    opt.exec = exec;
    const auto ladder = s.at("S").get<std::vector<double>>();
    const auto est = estimate_pickands(s.at("alpha"), ladder, s.at("mesh"), s.at("n"), cfg.seed, opt);

    json pts = json::array();
    for (const auto& l : est.ladder)
        pts.push_back({{"S", l.S}, {"h_interval", l.h_interval}, {"h_rate", l.h_rate}, {"std_error", l.std_error}});
    out.write("pickands.csv", [&](std::ostream& os) {
        csv::write_row(os, {"S", "h_interval", "h_rate", "std_error"});
        for (const auto& l : est.ladder)
            csv::write_row(os, {csv::fmt(l.S), csv::fmt(l.h_interval), csv::fmt(l.h_rate), csv::fmt(l.std_error)});
    });
    json res{{"alpha", est.alpha}, {"method", to_string(est.method)}, {"mesh", est.mesh},
             {"n", est.n_samples}, {"ladder", pts}, {"h_rate", est.h_rate}};
    if (est.extrapolated) {
        const auto& f = *est.extrapolated;
        res["fit"] = {{"value", f.value}, {"slope", f.slope}, {"residual", f.residual},
                      {"ill_conditioned", f.ill_conditioned}};
        res["estimate"] = f.value;
    } else {
        res["estimate"] = est.h_rate;
    }
    res["mesh_bias"] = est.mesh_bias ? json(*est.mesh_bias) : json(nullptr);
    return res;
}

Grid tail_grid(const ProcessSpec& spec, double u, std::size_t points) {
    const auto& iv = spec.horizon();
    if (points == 0) {
        const double m = recommended_mesh(u, spec.index().alpha0);
        points = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(iv.length() / m)) + 1, 64, 4096);
    }
    if (points < 2) throw ConfigError("tail.points", "need at least 2 points");
    return Grid(iv.start, iv.end, points);
}

json run_tail(const ExperimentConfig& cfg, Outputs& out, Exec exec) {
    const json& s = cfg.doc.at("tail");
    const ProcessSpec spec = build_process(cfg.doc.at("process"));
    const double u = s.at("u");
    const Grid grid = tail_grid(spec, u, s.at("points"));
    const std::size_t n = s.at("n");
    const TailEstimate t = s.at("method") == "crude"
                               ? crude_tail(spec, grid, u, n, cfg.seed, exec)
                               : importance_tail(spec, grid, u, n, cfg.seed, tilt_of(s), exec);
    out.write("tail.csv", [&](std::ostream& os) {
        csv::write_row(os, {"u", "p_hat", "se", "n", "method", "mesh", "points", "ess", "mean_weight", "warning"});
        csv::write_row(os, {csv::fmt(t.u), csv::fmt(t.p_hat), csv::fmt(t.std_error), std::to_string(t.n),
                            to_string(t.method), csv::fmt(grid.mesh()), std::to_string(grid.size()),
                            csv::fmt(t.ess), csv::fmt(t.mean_weight), t.warning});
    });
    const std::size_t k = s.at("export_paths");
    if (k > 0) {
        const auto paths = sample_paths(covariance_on_grid(spec, grid), k, cfg.seed, exec);
        out.write("paths.csv", [&](std::ostream& os) { write_paths_csv(os, paths); });
    }
    return {{"u", t.u}, {"p_hat", t.p_hat}, {"std_error", t.std_error}, {"n", t.n},
            {"method", to_string(t.method)}, {"mesh", grid.mesh()}, {"points", grid.size()},
            {"ess", t.ess}, {"mean_weight", t.mean_weight}, {"mean_weight_se", t.mean_weight_se},
            {"warning", t.warning}};
}

json run_compare(const ExperimentConfig& cfg, Outputs& out, Exec exec) {
    const json& s = cfg.doc.at("compare");
    const ProcessSpec spec = build_process(cfg.doc.at("process"));
    CompareConfig cc;
    cc.n = s.at("n");
    cc.min_points = s.at("min_points");
    cc.max_points = s.at("max_points");
    cc.mesh_factor = s.at("mesh_factor");
    const std::string th = s.at("theory");
    cc.theory = th == "stationary" ? TheoryKind::stationary
              : th == "theorem1"   ? TheoryKind::theorem1
                                   : TheoryKind::automatic;
    cc.tilt = tilt_of(s);
    cc.seed = cfg.seed;
    cc.exec = exec;
    const double H = pickands_constant(s, spec.index().alpha0);
    const auto us = s.at("u").get<std::vector<double>>();
    const auto table = compare_to_theory(spec, us, H, cc);
    out.write("comparison.csv", [&](std::ostream& os) { write_comparison_csv(os, table); });
    out.write("plotdata.csv", [&](std::ostream& os) { emit_plotdata(table, os); });
    json rows = json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"u", r.u}, {"p_emp", r.p_emp}, {"se", r.se}, {"p_theory", r.p_theory},
                        {"ratio", r.ratio}, {"ratio_lo", r.ratio_lo}, {"ratio_hi", r.ratio_hi},
                        {"mesh", r.mesh}, {"n", r.n}, {"method", r.method}, {"ess", r.ess},
                        {"warning", r.warning}});
    return {{"theory", table.theory}, {"pickands_constant", H}, {"rows", rows}};
}

json run_validate(const ExperimentConfig& cfg, Outputs& out, Exec exec) {
    const json& s = cfg.doc.at("validate");
    const ProcessSpec spec = build_process(cfg.doc.at("process"));
    ValidationConfig vc;
    vc.h_ladder = s.at("h_ladder").get<std::vector<double>>();
    vc.correlation_tol = s.at("correlation_tol");
    vc.variance_tol = s.at("variance_tol");
    vc.index_tol = s.at("index_tol");
    vc.probe_points = s.at("probe_points");
    vc.uniqueness_points = s.at("uniqueness_points");
    const auto rep = validate_assumptions(spec, vc);

    out.write("validation.csv", [&](std::ostream& os) {
        csv::write_row(os, {"check", "passed", "worst_residual", "tolerance", "detail"});
        for (const auto& c : rep.checks)
            csv::write_row(os, {c.name, c.passed ? "true" : "false", csv::fmt(c.worst_residual),
                                csv::fmt(c.tolerance), c.detail});
    });
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"worst_residual", c.worst_residual},
                          {"tolerance", c.tolerance}, {"residual_trend", c.residual_trend},
                          {"detail", c.detail}});
    json res{{"all_passed", rep.all_passed()}, {"checks", checks}};

    if (s.contains("localization")) {
        const json& l = s.at("localization");
        LocalizationConfig lc;
        lc.mesh = l.at("mesh");
        lc.bound_constant = l.at("bound_constant");
        lc.tilt = tilt_of(l);
        lc.exec = exec;
        const auto r = localization_check(spec, l.at("u"), l.at("q"), l.at("n"), cfg.seed, lc);
        res["localization"] = {{"u", r.u}, {"q", r.q}, {"regime", to_string(r.regime)},
                               {"window", r.window}, {"delta", r.delta},
                               {"inner_start", r.inner_start}, {"inner_end", r.inner_end},
                               {"mesh", r.mesh}, {"inner", to_json(r.inner)},
                               {"outer", to_json(r.outer)}, {"outer_empty", r.outer_empty},
                               {"outer_is_bound", r.outer_is_bound}, {"outer_value", r.outer_value},
                               {"ratio", r.ratio}, {"bound_shape", r.bound_shape},
                               {"single_point", r.single_point}};
    }
    return res;
}

json run_sandwich(const ExperimentConfig& cfg, Outputs& out, Exec exec) {
    const json& s = cfg.doc.at("sandwich");
    const ProcessSpec spec = build_process(cfg.doc.at("process"));
    SandwichConfig sc;
    sc.u = s.at("u");
    sc.nu = s.at("nu");
    sc.S = s.at("S");
    sc.q = s.at("q");
    sc.points = s.at("points");
    sc.n = s.at("n");
    sc.exec = exec;
    const auto r = slepian_sandwich(spec, sc, cfg.seed);
    out.write("sandwich.csv", [&](std::ostream& os) {
        csv::write_row(os, {"process", "p_hat", "se", "hits", "n"});
        auto row = [&](const char* name, const ExceedanceStats& e) {
            csv::write_row(os, {name, csv::fmt(e.p_hat), csv::fmt(e.std_error), std::to_string(e.hits),
                                std::to_string(e.n)});
        };
        row("lower", r.lower);
        row("target", r.target);
        row("upper", r.upper);
    });
    return {{"u", r.u}, {"nu", r.nu}, {"S", r.S}, {"window", r.window},
            {"lower_exponent", r.lower_exponent}, {"time_scale", r.time_scale},
            {"lower", to_json(r.lower)}, {"target", to_json(r.target)}, {"upper", to_json(r.upper)},
            {"lower_cov_gap", r.lower_cov_gap}, {"upper_cov_gap", r.upper_cov_gap},
            {"ordered", r.ordered}};
}

json seed_lineage(const ExperimentConfig& cfg) {
    json streams;
    if (cfg.command == "pickands") streams = "stream i for S ladder entry i; 1000 for the half-mesh rerun";
    else if (cfg.command == "compare") streams = "stream i for u ladder entry i";
    else if (cfg.command == "validate") streams = "localization: 0 inner, 1 outer, 2 crude fallback";
    else if (cfg.command == "sandwich") streams = "0 lower, 1 target, 2 upper";
    else if (cfg.command == "tail") streams = "0";
    else streams = "none";
    return {{"root", cfg.seed}, {"batch", kDefaultBatch}, {"rng", "mt19937_64 seeded by seed_seq(root, stream, batch)"},
            {"streams", streams}};
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, const fs::path& out_dir, Exec exec) {
    const auto t0 = std::chrono::steady_clock::now();
    Outputs out(out_dir);
    json results;
    if (cfg.command == "asympt") results = run_asympt(cfg, out);
    else if (cfg.command == "pickands") results = run_pickands(cfg, out, exec);
    else if (cfg.command == "tail") results = run_tail(cfg, out, exec);
    else if (cfg.command == "compare") results = run_compare(cfg, out, exec);
    else if (cfg.command == "validate") results = run_validate(cfg, out, exec);
    else if (cfg.command == "sandwich") results = run_sandwich(cfg, out, exec);
    else throw ConfigError("command", "unknown command " + cfg.command);

    RunResult rr;
    rr.report = {{"command", cfg.command}, {"seed", cfg.seed}, {"config", cfg.doc},
                 {"results", results}, {"versions", versions()}, {"seed_lineage", seed_lineage(cfg)}};
    rr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.write("report.json", [&](std::ostream& os) { os << rr.report.dump(2) << '\n'; });
    out.write("timing.json", [&](std::ostream& os) {
        os << json{{"wall_seconds", rr.wall_seconds}, {"threads", max_threads()}}.dump(2) << '\n';
    });
    rr.files = std::move(out.files);
    return rr;
}

int main(int argc, char** argv) {
    CLI::App app{"Extremes of locally stationary Gaussian processes"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    for (const char* name : kCommands) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--seed", seed, "root seed (overrides the config)");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--threads", threads, "worker threads (default: LSX_THREADS or all cores)")
            ->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        if (threads) {
            set_threads(*threads);
        } else if (const char* env = std::getenv("LSX_THREADS"); env && *env) {
            char* end = nullptr;
            const long n = std::strtol(env, &end, 10);
            if (*end != '\0' || n <= 0) throw ConfigError("LSX_THREADS", "expected a positive integer");
            set_threads(static_cast<int>(n));
        }
        std::ifstream in(config_path);
        if (!in) throw ConfigError("", "cannot open config " + config_path);
        json doc;
        try {
            in >> doc;
        } catch (const json::parse_error& e) {
            throw ConfigError("", config_path + ": " + e.what());
        }
        if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
        if (!doc.contains("command")) doc["command"] = command;
        if (doc["command"] != command)
            throw ConfigError("command", "config is for " + doc["command"].dump() + ", not \"" + command + "\"");
        if (seed) doc["seed"] = *seed;
        ExperimentConfig cfg = parse_config(doc);
        const RunResult rr = run(cfg, out_dir.empty() ? fs::path(cfg.out) : fs::path(out_dir));
        for (const auto& f : rr.files) std::cout << f.string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << to_string(e.kind()) << " error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace lsx::cli
