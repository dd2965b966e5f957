#pragma once

#include "lsx/model.hpp"

#include <json.hpp>

#include <string>

namespace lsx {

/// Builds a profile t -> f(t) from the declarative expression vocabulary:
///
///   3.5                                 constant
///   {"const": 3.5}                      constant
///   {"abs_pow": {"center": c, "exponent": p}}   |t - c|^p  (0^p = inf for p < 0)
///   {"exp": e}  {"neg": e}  {"inv": e}  {"sum": [e...]}  {"mul": [e...]}
///   {"named": "variance_bump", "c": .., "gamma": .., "t0": ..}
///   {"named": "mfbm_variance", "gamma": .., "t0": ..}
///   {"named": "index_power", "alpha0": .., "b": .., "beta": .., "t0": ..}
///
/// Throws ConfigError naming `path` on malformed input.
Profile parse_profile(const nlohmann::json& j, const std::string& path);

}  // namespace lsx
