#include "lsx/cli.hpp"

#include "lsx/error.hpp"
#include "lsx/expr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>

namespace lsx::cli {

using nlohmann::json;

namespace {

// Reads one JSON object, records the fields it consumed into a normalized
// copy, and refuses anything it did not consume.
class Fields {
public:
    Fields(const json& j, std::string path) : in_(j), path_(std::move(path)) {
        if (!in_.is_object()) throw ConfigError(path_, "expected an object");
        out_ = json::object();
    }

    bool has(const std::string& key) const { return in_.contains(key); }

    double number(const std::string& key, std::optional<double> def = std::nullopt) {
        const json* v = lookup(key);
        double x;
        if (!v) {
            if (!def) throw ConfigError(at(key), "missing required number");
            x = *def;
        } else {
            if (!v->is_number()) throw ConfigError(at(key), "expected a number");
            x = v->get<double>();
            if (!std::isfinite(x)) throw ConfigError(at(key), "must be finite");
        }
        out_[key] = x;
        return x;
    }

    double positive(const std::string& key, std::optional<double> def = std::nullopt) {
        const double x = number(key, def);
        if (!(x > 0.0)) throw ConfigError(at(key), "must be positive");
        return x;
    }

    std::uint64_t count(const std::string& key, std::optional<std::uint64_t> def = std::nullopt) {
        const json* v = lookup(key);
        std::uint64_t x;
        if (!v) {
            if (!def) throw ConfigError(at(key), "missing required integer");
            x = *def;
        } else if (v->is_number_unsigned()) {
            x = v->get<std::uint64_t>();
        } else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
            x = static_cast<std::uint64_t>(v->get<std::int64_t>());
        } else {
            throw ConfigError(at(key), "expected a non-negative integer");
        }
        out_[key] = x;
        return x;
    }

    std::string text(const std::string& key, const std::string& def) {
        const json* v = lookup(key);
        std::string x = def;
        if (v) {
            if (!v->is_string() || v->get<std::string>().empty())
                throw ConfigError(at(key), "expected a non-empty string");
            x = v->get<std::string>();
        }
        out_[key] = x;
        return x;
    }

    bool flag(const std::string& key, bool def) {
        const json* v = lookup(key);
        bool x = def;
        if (v) {
            if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
            x = v->get<bool>();
        }
        out_[key] = x;
        return x;
    }

    std::string choice(const std::string& key, std::initializer_list<const char*> allowed,
                       std::optional<std::string> def = std::nullopt) {
        const json* v = lookup(key);
        std::string x;
        if (!v) {
            if (!def) throw ConfigError(at(key), "missing required string");
            x = *def;
        } else {
            if (!v->is_string()) throw ConfigError(at(key), "expected a string");
            x = v->get<std::string>();
        }
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return x == a; })) {
            std::string msg = "must be one of";
            for (const char* a : allowed) msg += std::string(" ") + a;
            throw ConfigError(at(key), msg);
        }
        out_[key] = x;
        return x;
    }

    std::vector<double> numbers(const std::string& key,
                                std::optional<std::vector<double>> def = std::nullopt) {
        const json* v = lookup(key);
        std::vector<double> xs;
        if (!v) {
            if (!def) throw ConfigError(at(key), "missing required list");
            xs = *def;
        } else {
            if (!v->is_array() || v->empty()) throw ConfigError(at(key), "expected a non-empty list of numbers");
            for (std::size_t i = 0; i < v->size(); ++i) {
                const json& e = (*v)[i];
                if (!e.is_number() || !std::isfinite(e.get<double>()))
                    throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a finite number");
                xs.push_back(e.get<double>());
            }
        }
        out_[key] = xs;
        return xs;
    }

    /// Optional nested object; returns nullptr when absent.
    const json* object(const std::string& key) {
        const json* v = lookup(key);
        if (v && !v->is_object()) throw ConfigError(at(key), "expected an object");
        return v;
    }

    /// Copies an expression verbatim after checking that it parses.
    void profile(const std::string& key) {
        const json* v = lookup(key);
        if (!v) return;
        (void)parse_profile(*v, at(key));
        out_[key] = *v;
    }

    void put(const std::string& key, json value) {
        seen_.insert(key);
        out_[key] = std::move(value);
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    json finish() {
        for (const auto& [k, v] : in_.items())
            if (!seen_.count(k)) throw ConfigError(at(k), "unknown key");
        return out_;
    }

private:
    const json* lookup(const std::string& key) {
        seen_.insert(key);
        auto it = in_.find(key);
        return it == in_.end() ? nullptr : &*it;
    }

    const json& in_;
    std::string path_;
    json out_;
    std::set<std::string> seen_;
};

json normalize_interval(Fields& f, const std::string& key) {
    const auto v = f.numbers(key);
    if (v.size() != 2 || !(v[1] > v[0])) throw ConfigError(f.at(key), "expected [start, end] with start < end");
    return v;
}

json normalize_process(const json& j, const std::string& path) {
    Fields f(j, path);
    const std::string family = f.choice("family", {"powexp", "mfbm"});
    if (family == "powexp") {
        normalize_interval(f, "horizon");
        f.number("t0");
        {
            const json empty = json::object();
            const json* v = f.object("variance");
            Fields g(v ? *v : empty, f.at("variance"));
            const std::string kind = g.choice("kind", {"bump", "constant", "expr"}, "bump");
            if (kind != "constant") {
                g.positive("c", 1.0);
                g.positive("gamma", 1.0);
            }
            if (kind == "expr") {
                if (!g.has("profile")) throw ConfigError(g.at("profile"), "required when kind is expr");
                g.profile("profile");
            }
            f.put("variance", g.finish());
        }
        {
            const json* v = f.object("index");
            if (!v) throw ConfigError(f.at("index"), "missing required object");
            Fields g(*v, f.at("index"));
            g.number("alpha0");
            const double b = g.number("b", 0.0);
            if (b < 0.0) throw ConfigError(g.at("b"), "must be >= 0");
            g.positive("beta", 1.0);
            g.positive("delta", 1.0);
            g.profile("profile");
            f.put("index", g.finish());
        }
        {
            const json empty = json::object();
            const json* v = f.object("scale");
            Fields g(v ? *v : empty, f.at("scale"));
            g.positive("a0", 1.0);
            g.profile("profile");
            f.put("scale", g.finish());
        }
    } else {
        normalize_interval(f, "interval");
        f.number("t0");
        f.positive("gamma", 1.0);
        f.positive("holder_exponent", 1.0);
        const json* v = f.object("hurst");
        if (!v) throw ConfigError(f.at("hurst"), "missing required object");
        Fields g(*v, f.at("hurst"));
        g.number("H0");
        g.number("b");
        g.positive("beta", 1.0);
        g.positive("delta", 1.0);
        f.put("hurst", g.finish());
    }
    return f.finish();
}

const std::vector<double> kDefaultLadder{3.0, 3.5, 4.0, 4.5, 5.0};

json normalize_section(const std::string& command, const json& j, const std::string& path,
                       bool has_process) {
    Fields f(j, path);
    if (command == "asympt") {
        f.choice("formula", {"auto", "theorem1", "stationary"}, "auto");
        f.numbers("u", kDefaultLadder);
        if (f.has("pickands_constant")) f.positive("pickands_constant");
        if (const json* p = f.object("params")) {
            Fields g(*p, f.at("params"));
            g.number("alpha0");
            g.positive("a0", 1.0);
            g.number("b", 0.0);
            g.positive("beta", 1.0);
            g.positive("gamma", 1.0);
            g.number("c", 1.0);
            g.number("t0");
            g.positive("T");
            f.put("params", g.finish());
        } else if (!has_process) {
            throw ConfigError(f.at("params"), "asympt needs either a process or params");
        }
    } else if (command == "pickands") {
        f.number("alpha");
        f.numbers("S", std::vector<double>{8, 16, 32, 64, 128});
        f.positive("mesh", 1.0 / 64.0);
        f.count("n", 100000);
        f.choice("method", {"mixture", "crude"}, "mixture");
        f.flag("mesh_bias", false);
    } else if (command == "tail") {
        f.positive("u");
        f.count("n", 100000);
        f.choice("method", {"importance", "crude"}, "importance");
        f.choice("tilt", {"mixture", "single_point"}, "mixture");
        f.count("points", 0);
        f.count("export_paths", 0);
    } else if (command == "compare") {
        f.numbers("u", kDefaultLadder);
        f.count("n", 100000);
        if (f.has("pickands_constant")) f.positive("pickands_constant");
        f.choice("theory", {"auto", "stationary", "theorem1"}, "auto");
        f.choice("tilt", {"mixture", "single_point"}, "mixture");
        f.count("min_points", 64);
        f.count("max_points", 4096);
        f.positive("mesh_factor", 0.1);
    } else if (command == "validate") {
        f.numbers("h_ladder", std::vector<double>{1e-2, 1e-3, 1e-4});
        f.positive("correlation_tol", 0.05);
        f.positive("variance_tol", 0.05);
        f.positive("index_tol", 0.05);
        f.count("probe_points", 9);
        f.count("uniqueness_points", 2001);
        if (const json* l = f.object("localization")) {
            Fields g(*l, f.at("localization"));
            g.positive("u", 4.0);
            g.positive("q", 2.0);
            g.count("n", 100000);
            g.number("mesh", 0.0);
            g.positive("bound_constant", 1.0);
            g.choice("tilt", {"mixture", "single_point"}, "mixture");
            f.put("localization", g.finish());
        }
    } else if (command == "sandwich") {
        f.positive("u", 3.0);
        f.positive("nu", 0.3);
        f.positive("S", 4.0);
        f.positive("q", 2.0);
        f.count("points", 65);
        f.count("n", 1000000);
    }
    return f.finish();
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    Fields f(doc, "");
    ExperimentConfig cfg;
    cfg.command = f.choice("command", {"asympt", "pickands", "tail", "compare", "validate", "sandwich"});
    cfg.seed = f.count("seed", 1);
    cfg.out = f.text("out", "lsx-out");

    const bool needs_process = cfg.command != "asympt" && cfg.command != "pickands";
    if (f.has("process")) {
        if (cfg.command == "pickands") throw ConfigError("process", "not used by pickands");
        const json* p = f.object("process");
        f.put("process", normalize_process(*p, "process"));
    } else {
        (void)f.object("process");
        if (needs_process) throw ConfigError("process", "missing required object");
    }
    const json empty = json::object();
    const json* s = f.object(cfg.command);
    f.put(cfg.command, normalize_section(cfg.command, s ? *s : empty, cfg.command, f.has("process")));
    cfg.doc = f.finish();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

ProcessSpec build_process(const json& p) {
    if (p.at("family") == "mfbm") {
        const auto iv = p.at("interval");
        const auto& h = p.at("hurst");
        return mfbm_to_process_spec(MfbmSpec::with_power_hurst(
            h.at("H0"), h.at("b"), h.at("beta"), h.at("delta"), iv[0], iv[1], p.at("t0"),
            p.at("gamma"), p.at("holder_exponent")));
    }
    const Interval horizon{p.at("horizon")[0].get<double>(), p.at("horizon")[1].get<double>()};
    const double t0 = p.at("t0");

    const auto& v = p.at("variance");
    VarianceProfile variance;
    variance.t0 = t0;
    const std::string kind = v.at("kind");
    if (kind == "constant") {
        variance.c = 0.0;
        variance.sigma = [](double) { return 1.0; };
    } else {
        variance.c = v.at("c");
        variance.gamma = v.at("gamma");
        variance.sigma = kind == "bump" ? variance_bump(variance.c, variance.gamma, t0)
                                        : parse_profile(v.at("profile"), "process.variance.profile");
    }

    const auto& ix = p.at("index");
    const auto& sc = p.at("scale");
    const double alpha0 = ix.at("alpha0");
    const double a0 = sc.at("a0");
    const double b = ix.at("b");
    if (b == 0.0 && !ix.contains("profile") && !sc.contains("profile"))
        return make_stationary_powexp_spec(horizon, alpha0, a0, std::move(variance));

    IndexProfile index{alpha0, b, ix.at("beta"), ix.at("delta"), {}};
    index.alpha = ix.contains("profile") ? parse_profile(ix.at("profile"), "process.index.profile")
                                         : index_power(alpha0, b, index.beta, t0);
    LocalScale scale{a0, {}};
    scale.a = sc.contains("profile") ? parse_profile(sc.at("profile"), "process.scale.profile")
                                     : Profile([a0](double) { return a0; });
    return make_powexp_spec(horizon, std::move(index), std::move(variance), std::move(scale));
}

}  // namespace lsx::cli
