#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtq/distribution.hpp"
#include "rtq/experiments.hpp"
#include "rtq/policy.hpp"

namespace rtq {

/// Error carrying the process exit code: 2 for an unknown policy name,
/// 1 for any other configuration problem.
struct ConfigError : std::runtime_error {
    int exit_code;
    explicit ConfigError(const std::string& msg, int code = 1)
        : std::runtime_error(msg), exit_code(code) {}
};

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

inline double require_number(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number())
        throw ConfigError("config: field '" + field + "' must be a number");
    return j[field].get<double>();
}

inline double number_or(const json& j, const std::string& field, double dflt) {
    if (!j.contains(field)) return dflt;
    if (!j[field].is_number())
        throw ConfigError("config: field '" + field + "' must be a number");
    return j[field].get<double>();
}

inline DistributionSpec spec_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw ConfigError("config: '" + where + "' must be an object with a "
                          "'family' string");
    Family fam;
    try {
        fam = family_from_name(j["family"].get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: '" + where + "': " + e.what());
    }
    try {
        switch (fam) {
        case Family::Deterministic:
            return DistributionSpec::deterministic(
                j.contains("value") ? require_number(j, "value")
                                    : require_number(j, "mean"));
        case Family::Exponential:
            return DistributionSpec::exponential(require_number(j, "mean"));
        case Family::Uniform:
            if (j.contains("lo") || j.contains("hi"))
                return DistributionSpec::uniform(require_number(j, "lo"),
                                                 require_number(j, "hi"));
            return DistributionSpec::uniform_with_mean(require_number(j, "mean"));
        case Family::LogNormal:
            return DistributionSpec::log_normal(require_number(j, "mean"),
                                                number_or(j, "cv", 1.0));
        case Family::TwoPoint:
            if (j.contains("x1"))
                return DistributionSpec::two_point(
                    require_number(j, "x1"), require_number(j, "p1"),
                    require_number(j, "x2"), require_number(j, "p2"));
            return DistributionSpec::two_point_with_mean(require_number(j, "mean"));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: '" + where + "': " + e.what());
    }
    throw ConfigError("config: '" + where + "': bad family");
}

inline json spec_to_json(const DistributionSpec& s) {
    json j;
    j["family"] = family_name(s.family());
    switch (s.family()) {
    case Family::Deterministic: j["value"] = s.mean(); break;
    case Family::Exponential: j["mean"] = s.mean(); break;
    case Family::Uniform:
        j["lo"] = s.uniform_lo();
        j["hi"] = s.uniform_hi();
        break;
    case Family::LogNormal:
        j["mean"] = s.mean();
        j["cv"] = s.log_normal_cv();
        break;
    case Family::TwoPoint:
        j["x1"] = s.two_point_x1();
        j["p1"] = s.two_point_p1();
        j["x2"] = s.two_point_x2();
        j["p2"] = s.two_point_p2();
        break;
    }
    return j;
}

/// One (trace, policy) run described by a JSON document.
struct SimulateConfig {
    PolicySpec policy;
    std::uint64_t arrivals = 1000;
    double rate = 1.0; // lambda/mu; arrival process defaults to Poisson(rate)
    std::optional<DistributionSpec> arrival;
    DistributionSpec service = DistributionSpec::exponential(1.0);
    DistributionSpec deadline = DistributionSpec::exponential(1.0);
    std::uint64_t seed = 1;
    double warmup_fraction = 0.1;
    int batches = 30;
    std::optional<std::string> trace_csv;        // import instead of generating
    std::optional<std::string> export_trace;     // write the generated trace
    std::optional<std::string> export_disposals; // write the disposal log

    DistributionSpec arrival_spec() const {
        return arrival ? *arrival : DistributionSpec::exponential(1.0 / rate);
    }
};

inline SimulateConfig simulate_config_from_json(json j) {
    // A manifest echoes its config under "config"; accept those directly.
    if (j.contains("config") && j["config"].is_object()) j = j["config"];
    SimulateConfig cfg;
    if (!j.contains("policy") || !j["policy"].is_string())
        throw ConfigError("config: field 'policy' must be a string");
    try {
        cfg.policy = PolicySpec::parse(j["policy"].get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), 2);
    }
    cfg.arrivals = static_cast<std::uint64_t>(number_or(j, "arrivals", 1000));
    if (cfg.arrivals < 1) throw ConfigError("config: 'arrivals' must be >= 1");
    if (j.contains("rate")) cfg.rate = require_number(j, "rate");
    if (!(cfg.rate > 0.0)) throw ConfigError("config: 'rate' must be > 0");
    if (j.contains("arrival")) cfg.arrival = spec_from_json(j["arrival"], "arrival");
    if (j.contains("service")) cfg.service = spec_from_json(j["service"], "service");
    if (!j.contains("deadline"))
        throw ConfigError("config: field 'deadline' is required");
    cfg.deadline = spec_from_json(j["deadline"], "deadline");
    cfg.seed = static_cast<std::uint64_t>(number_or(j, "seed", 1));
    cfg.warmup_fraction = number_or(j, "warmup_fraction", 0.1);
    if (cfg.warmup_fraction < 0.0 || cfg.warmup_fraction >= 1.0)
        throw ConfigError("config: 'warmup_fraction' must lie in [0, 1)");
    cfg.batches = static_cast<int>(number_or(j, "batches", 30));
    if (j.contains("trace_csv")) cfg.trace_csv = j["trace_csv"].get<std::string>();
    if (j.contains("export_trace"))
        cfg.export_trace = j["export_trace"].get<std::string>();
    if (j.contains("export_disposals"))
        cfg.export_disposals = j["export_disposals"].get<std::string>();
    return cfg;
}

inline json simulate_config_to_json(const SimulateConfig& cfg) {
    json j;
    j["policy"] = cfg.policy.name();
    j["arrivals"] = cfg.arrivals;
    j["rate"] = cfg.rate;
    if (cfg.arrival) j["arrival"] = spec_to_json(*cfg.arrival);
    j["service"] = spec_to_json(cfg.service);
    j["deadline"] = spec_to_json(cfg.deadline);
    j["seed"] = cfg.seed;
    j["warmup_fraction"] = cfg.warmup_fraction;
    j["batches"] = cfg.batches;
    if (cfg.trace_csv) j["trace_csv"] = *cfg.trace_csv;
    if (cfg.export_trace) j["export_trace"] = *cfg.export_trace;
    if (cfg.export_disposals) j["export_disposals"] = *cfg.export_disposals;
    return j;
}

inline std::vector<Family> families_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty())
        throw ConfigError("config: '" + where + "' must be a non-empty array");
    std::vector<Family> out;
    for (const auto& v : arr) {
        if (!v.is_string())
            throw ConfigError("config: '" + where + "' entries must be strings");
        try {
            out.push_back(family_from_name(v.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("config: '" + where + "': " + e.what());
        }
    }
    return out;
}

/// The verification harness scale: one document covering the stochastic
/// sweep, the per-path suite, and the equivalence checks.
struct VerifyConfig {
    ScenarioConfig stochastic;
    PerPathOptions per_path;
    DetEqOptions det_eq;
};

inline VerifyConfig verify_config_from_json(const json& j) {
    VerifyConfig cfg;
    auto numbers = [&](const char* field, std::vector<double>& target) {
        if (!j.contains(field)) return;
        if (!j[field].is_array() || j[field].empty())
            throw ConfigError(std::string("config: '") + field +
                              "' must be a non-empty array of numbers");
        target.clear();
        for (const auto& v : j[field]) {
            if (!v.is_number())
                throw ConfigError(std::string("config: '") + field +
                                  "' entries must be numbers");
            target.push_back(v.get<double>());
            if (!(target.back() > 0.0))
                throw ConfigError(std::string("config: '") + field +
                                  "' entries must be > 0");
        }
    };
    numbers("rates", cfg.stochastic.rates);
    numbers("mean_deadlines", cfg.stochastic.mean_deadlines);
    if (j.contains("families"))
        cfg.stochastic.deadline_families = families_from_json(j["families"], "families");
    cfg.stochastic.arrivals =
        static_cast<std::uint64_t>(number_or(j, "arrivals", 100000));
    cfg.stochastic.seeds = static_cast<int>(number_or(j, "seeds", 10));
    cfg.stochastic.master_seed =
        static_cast<std::uint64_t>(number_or(j, "master_seed", 20260808));
    cfg.stochastic.warmup_fraction = number_or(j, "warmup_fraction", 0.1);
    cfg.stochastic.batches = static_cast<int>(number_or(j, "batches", 30));
    cfg.stochastic.workers = static_cast<int>(number_or(j, "workers", 1));

    cfg.per_path.rates = cfg.stochastic.rates;
    cfg.per_path.arrivals =
        static_cast<std::uint64_t>(number_or(j, "per_path_arrivals", 10000));
    cfg.per_path.seeds_per_combo =
        static_cast<int>(number_or(j, "per_path_seeds", 5));
    cfg.per_path.master_seed = cfg.stochastic.master_seed;
    cfg.per_path.workers = cfg.stochastic.workers;

    cfg.det_eq.rates = cfg.stochastic.rates;
    cfg.det_eq.arrivals =
        static_cast<std::uint64_t>(number_or(j, "det_eq_arrivals", 10000));
    cfg.det_eq.traces = static_cast<int>(number_or(j, "det_eq_traces", 50));
    cfg.det_eq.master_seed = cfg.stochastic.master_seed;
    cfg.det_eq.workers = cfg.stochastic.workers;
    return cfg;
}

inline json verify_config_to_json(const VerifyConfig& cfg) {
    json j;
    j["rates"] = cfg.stochastic.rates;
    j["mean_deadlines"] = cfg.stochastic.mean_deadlines;
    json fams = json::array();
    for (Family f : cfg.stochastic.deadline_families) fams.push_back(family_name(f));
    j["families"] = fams;
    j["arrivals"] = cfg.stochastic.arrivals;
    j["seeds"] = cfg.stochastic.seeds;
    j["master_seed"] = cfg.stochastic.master_seed;
    j["warmup_fraction"] = cfg.stochastic.warmup_fraction;
    j["batches"] = cfg.stochastic.batches;
    j["workers"] = cfg.stochastic.workers;
    j["per_path_arrivals"] = cfg.per_path.arrivals;
    j["per_path_seeds"] = cfg.per_path.seeds_per_combo;
    j["det_eq_arrivals"] = cfg.det_eq.arrivals;
    j["det_eq_traces"] = cfg.det_eq.traces;
    return j;
}

} // namespace rtq
