#include "duelbench/hyperparam.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "duelbench/errors.hpp"

namespace duelbench {

namespace {

const HyperParam* find_param(const std::vector<HyperParam>& space, const std::string& name) {
    for (const auto& p : space)
        if (p.name == name) return &p;
    return nullptr;
}

[[noreturn]] void bad_param(const std::string& name, const std::string& why) {
    throw ConfigError("hyperparameter '" + name + "': " + why);
}

void check_type(const HyperParam& param, const ParamValue& value) {
    switch (param.kind) {
        case HyperParam::Kind::IntegerRange:
            if (!std::holds_alternative<std::int64_t>(value))
                bad_param(param.name, "expected an integer");
            break;
        case HyperParam::Kind::RealRange:
        case HyperParam::Kind::LogRealRange:
            if (!std::holds_alternative<double>(value)) bad_param(param.name, "expected a real");
            break;
        case HyperParam::Kind::Categorical: {
            if (!std::holds_alternative<std::string>(value))
                bad_param(param.name, "expected a category name");
            const auto& s = std::get<std::string>(value);
            if (std::find(param.choices.begin(), param.choices.end(), s) == param.choices.end())
                bad_param(param.name, "unknown category '" + s + "'");
            break;
        }
    }
}

}  // namespace

HyperParam HyperParam::integer_range(std::string name, std::int64_t lo, std::int64_t hi) {
    if (lo >= hi) throw ConfigError("hyperparameter '" + name + "': need lower < upper");
    return {std::move(name), Kind::IntegerRange, static_cast<double>(lo), static_cast<double>(hi), {}};
}

HyperParam HyperParam::real_range(std::string name, double lo, double hi) {
    if (!(lo < hi)) throw ConfigError("hyperparameter '" + name + "': need lower < upper");
    return {std::move(name), Kind::RealRange, lo, hi, {}};
}

HyperParam HyperParam::log_real_range(std::string name, double lo, double hi) {
    if (!(lo < hi) || lo <= 0.0)
        throw ConfigError("hyperparameter '" + name + "': need 0 < lower < upper");
    return {std::move(name), Kind::LogRealRange, lo, hi, {}};
}

HyperParam HyperParam::categorical(std::string name, std::vector<std::string> choices) {
    if (choices.empty()) throw ConfigError("hyperparameter '" + name + "': choices are empty");
    return {std::move(name), Kind::Categorical, 0.0, 0.0, std::move(choices)};
}

ParamValue sample_param(const HyperParam& param, CounterRng& rng) {
    switch (param.kind) {
        case HyperParam::Kind::IntegerRange:
            return rng.uniform_int(static_cast<std::int64_t>(param.lower),
                                   static_cast<std::int64_t>(param.upper));
        case HyperParam::Kind::RealRange:
            return rng.uniform(param.lower, param.upper);
        case HyperParam::Kind::LogRealRange:
            return rng.log_uniform(param.lower, param.upper);
        case HyperParam::Kind::Categorical:
            return param.choices[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(param.choices.size()) - 1))];
    }
    throw ConfigError("unreachable hyperparameter kind");
}

ParamMap sample_params(const std::vector<HyperParam>& space, CounterRng& rng) {
    ParamMap out;
    for (const auto& p : space) out[p.name] = sample_param(p, rng);
    return out;
}

bool param_in_space(const HyperParam& param, const ParamValue& value) {
    switch (param.kind) {
        case HyperParam::Kind::IntegerRange: {
            if (!std::holds_alternative<std::int64_t>(value)) return false;
            const double v = static_cast<double>(std::get<std::int64_t>(value));
            return v >= param.lower && v <= param.upper;
        }
        case HyperParam::Kind::RealRange:
        case HyperParam::Kind::LogRealRange: {
            if (!std::holds_alternative<double>(value)) return false;
            const double v = std::get<double>(value);
            return v >= param.lower && v <= param.upper;
        }
        case HyperParam::Kind::Categorical:
            return std::holds_alternative<std::string>(value) &&
                   std::find(param.choices.begin(), param.choices.end(),
                             std::get<std::string>(value)) != param.choices.end();
    }
    return false;
}

void validate_param_types(const std::vector<HyperParam>& space, const ParamMap& params) {
    for (const auto& [name, value] : params) {
        const HyperParam* p = find_param(space, name);
        if (!p) bad_param(name, "not in the search space");
        check_type(*p, value);
    }
}

void validate_params_in_space(const std::vector<HyperParam>& space, const ParamMap& params) {
    validate_param_types(space, params);
    for (const auto& [name, value] : params)
        if (!param_in_space(*find_param(space, name), value))
            bad_param(name, "value outside the search range");
}

std::int64_t get_int(const ParamMap& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end()) bad_param(key, "missing");
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
    bad_param(key, "expected an integer");
}

double get_real(const ParamMap& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end()) bad_param(key, "missing");
    if (const auto* v = std::get_if<double>(&it->second)) return *v;
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*v);
    bad_param(key, "expected a number");
}

const std::string& get_str(const ParamMap& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end()) bad_param(key, "missing");
    if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
    bad_param(key, "expected a string");
}

std::string params_to_json(const ParamMap& params) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [name, value] : params) {
        std::visit([&](const auto& v) { obj[name] = v; }, value);
    }
    return obj.dump();
}

ParamMap params_from_json(const std::string& text) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("hyperparameters: ") + e.what());
    }
    if (!obj.is_object()) throw ConfigError("hyperparameters: expected a JSON object");
    ParamMap out;
    for (const auto& [name, value] : obj.items()) {
        if (value.is_number_integer())
            out[name] = value.get<std::int64_t>();
        else if (value.is_number_float())
            out[name] = value.get<double>();
        else if (value.is_string())
            out[name] = value.get<std::string>();
        else
            bad_param(name, "unsupported JSON value type");
    }
    return out;
}

}  // namespace duelbench
