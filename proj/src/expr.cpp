#include "lsx/expr.hpp"

#include "lsx/error.hpp"

#include <cmath>
#include <set>
#include <vector>

namespace lsx {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& path, std::set<std::string> allowed) {
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(path + "." + k, "unknown key");
}

double number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(path + "." + key, "missing");
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path + "." + key, "must be finite");
    return x;
}

Profile parse_named(const json& j, const std::string& path) {
    const auto name = j.at("named");
    if (!name.is_string()) throw ConfigError(path + ".named", "expected a string");
    const auto n = name.get<std::string>();
    if (n == "variance_bump") {
        only_keys(j, path, {"named", "c", "gamma", "t0"});
        return variance_bump(number(j, path, "c"), number(j, path, "gamma"),
                             number(j, path, "t0"));
    }
    if (n == "mfbm_variance") {
        only_keys(j, path, {"named", "gamma", "t0"});
        const double g = number(j, path, "gamma");
        const double t0 = number(j, path, "t0");
        return [g, t0](double t) { return 1.0 - std::exp(-std::pow(std::abs(t - t0), -g)); };
    }
    if (n == "index_power") {
        only_keys(j, path, {"named", "alpha0", "b", "beta", "t0"});
        return index_power(number(j, path, "alpha0"), number(j, path, "b"),
                           number(j, path, "beta"), number(j, path, "t0"));
    }
    throw ConfigError(path + ".named", "unknown profile '" + n + "'");
}

std::vector<Profile> parse_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array");
    std::vector<Profile> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_profile(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

Profile parse_profile(const json& j, const std::string& path) {
    if (j.is_number()) {
        const double v = j.get<double>();
        return [v](double) { return v; };
    }
    if (!j.is_object() || j.empty()) throw ConfigError(path, "expected a number or an expression object");
    if (j.contains("named")) return parse_named(j, path);
    if (j.size() != 1) throw ConfigError(path, "expression objects take exactly one operator");

    const auto it = j.begin();
    const std::string op = it.key();
    const json& arg = it.value();
    const std::string sub = path + "." + op;
    if (op == "const") {
        if (!arg.is_number()) throw ConfigError(sub, "expected a number");
        const double v = arg.get<double>();
        return [v](double) { return v; };
    }
    if (op == "abs_pow") {
        if (!arg.is_object()) throw ConfigError(sub, "expected an object");
        only_keys(arg, sub, {"center", "exponent"});
        const double c = number(arg, sub, "center");
        const double p = number(arg, sub, "exponent");
        return [c, p](double t) { return std::pow(std::abs(t - c), p); };
    }
    if (op == "exp") {
        auto f = parse_profile(arg, sub);
        return [f](double t) { return std::exp(f(t)); };
    }
    if (op == "neg") {
        auto f = parse_profile(arg, sub);
        return [f](double t) { return -f(t); };
    }
    if (op == "inv") {
        auto f = parse_profile(arg, sub);
        return [f](double t) { return 1.0 / f(t); };
    }
    if (op == "sum") {
        auto fs = parse_list(arg, sub);
        return [fs](double t) {
            double s = 0.0;
            for (const auto& f : fs) s += f(t);
            return s;
        };
    }
    if (op == "mul") {
        auto fs = parse_list(arg, sub);
        return [fs](double t) {
            double p = 1.0;
            for (const auto& f : fs) p *= f(t);
            return p;
        };
    }
    throw ConfigError(sub, "unknown operator");
}

}  // namespace lsx
