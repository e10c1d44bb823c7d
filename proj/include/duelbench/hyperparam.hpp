#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "duelbench/rng.hpp"

namespace duelbench {

/// One tunable knob. Integer and real ranges are inclusive; log ranges sample
/// uniformly in log space and require positive bounds.
struct HyperParam {
    enum class Kind { IntegerRange, RealRange, LogRealRange, Categorical };

    std::string name;
    Kind kind = Kind::RealRange;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<std::string> choices;

    static HyperParam integer_range(std::string name, std::int64_t lo, std::int64_t hi);
    static HyperParam real_range(std::string name, double lo, double hi);
    static HyperParam log_real_range(std::string name, double lo, double hi);
    static HyperParam categorical(std::string name, std::vector<std::string> choices);
};

using ParamValue = std::variant<std::int64_t, double, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

/// Draws one value; log-real integer-valued knobs are handled by the caller
/// rounding at use. Consumes a fixed number of rng draws per kind.
ParamValue sample_param(const HyperParam& param, CounterRng& rng);
ParamMap sample_params(const std::vector<HyperParam>& space, CounterRng& rng);

bool param_in_space(const HyperParam& param, const ParamValue& value);

/// Structural check used at fit time: every key must belong to the space and
/// carry the right type / a known category, but numeric values may fall
/// outside the sampling bounds (e.g. a zero-round boosting null model).
void validate_param_types(const std::vector<HyperParam>& space, const ParamMap& params);

/// Full check used by the sampler and for registry defaults: types plus bounds.
void validate_params_in_space(const std::vector<HyperParam>& space, const ParamMap& params);

std::int64_t get_int(const ParamMap& params, const std::string& key);
double get_real(const ParamMap& params, const std::string& key);
const std::string& get_str(const ParamMap& params, const std::string& key);

/// Canonical JSON object with sorted keys and shortest round-trip numbers.
std::string params_to_json(const ParamMap& params);
ParamMap params_from_json(const std::string& text);

}  // namespace duelbench
