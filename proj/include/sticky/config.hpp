#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sticky/chain.hpp"
#include "sticky/errors.hpp"
#include "sticky/gibbs.hpp"
#include "sticky/sampler.hpp"

namespace sticky {

struct ModelBlock {
    int d = 1;
    int N = 1;
    std::string family = "gaussian";
    double a = 1.0;
    double c = 0.0;
    double s = 1.0;
};

struct SchemeBlock {
    double h = 0.05;
    double L = 4.0;
    double T = 50.0;   // physical horizon per replica; steps = round(T / delta)
    long burn_in = 0;  // unobserved steps before accumulation
};

struct DiagnosticsBlock {
    std::string catalog = "default";  // or "none"
    double z_threshold = 3.0;
    bool dump_trajectory = false;
};

struct RunConfig {
    ModelBlock model;
    SchemeBlock scheme;
    SamplerConfig sampler{0, 1.0, 0.25};  // sweeps filled from n when left 0
    DiagnosticsBlock diagnostics;
    long replicas = 32;
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";

    Potential potential() const {
        return model.family == "quartic" ? Potential::quartic(model.a, model.c)
                                         : Potential::gaussian(model.a);
    }

    long steps_per_replica() const {
        const double delta = 0.5 * scheme.h * scheme.h;
        return std::llround(scheme.T / delta);
    }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const char* where,
                                std::initializer_list<const char*> allowed,
                                std::vector<std::string>& errors) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (key == k) known = true;
        if (!known)
            errors.push_back(std::string("runner: unknown key '") + key + "' in " + where);
    }
}

template <class T>
void read_field(const nlohmann::json& obj, const char* key, T& out,
                std::vector<std::string>& errors, const char* where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        errors.push_back(std::string("runner: field '") + key + "' in " + where +
                         " has the wrong type");
    }
}

}  // namespace detail

// Parses and validates; throws err::Parse for malformed JSON and
// err::Validation carrying every violated constraint otherwise.
inline RunConfig parse_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw err::Parse(std::string("runner: config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw err::Parse("runner: config root must be a JSON object");

    std::vector<std::string> errors;
    RunConfig cfg;

    detail::reject_unknown_keys(
        doc, "config",
        {"model", "scheme", "sampler", "diagnostics", "replicas", "master_seed", "out_dir"},
        errors);

    if (!doc.contains("model")) {
        errors.push_back("runner: missing required 'model' block");
    } else {
        const auto& m = doc["model"];
        detail::reject_unknown_keys(m, "model", {"d", "N", "potential", "s"}, errors);
        detail::read_field(m, "d", cfg.model.d, errors, "model");
        detail::read_field(m, "N", cfg.model.N, errors, "model");
        detail::read_field(m, "s", cfg.model.s, errors, "model");
        if (m.contains("potential")) {
            const auto& p = m["potential"];
            detail::reject_unknown_keys(p, "model.potential", {"family", "a", "c"}, errors);
            detail::read_field(p, "family", cfg.model.family, errors, "model.potential");
            detail::read_field(p, "a", cfg.model.a, errors, "model.potential");
            detail::read_field(p, "c", cfg.model.c, errors, "model.potential");
        }
    }
    if (doc.contains("scheme")) {
        const auto& s = doc["scheme"];
        detail::reject_unknown_keys(s, "scheme", {"h", "L", "T", "burn_in"}, errors);
        detail::read_field(s, "h", cfg.scheme.h, errors, "scheme");
        detail::read_field(s, "L", cfg.scheme.L, errors, "scheme");
        detail::read_field(s, "T", cfg.scheme.T, errors, "scheme");
        detail::read_field(s, "burn_in", cfg.scheme.burn_in, errors, "scheme");
    }
    if (doc.contains("sampler")) {
        const auto& s = doc["sampler"];
        detail::reject_unknown_keys(
            s, "sampler", {"sweeps", "proposal_sigma", "atom_proposal_prob"}, errors);
        detail::read_field(s, "sweeps", cfg.sampler.sweeps, errors, "sampler");
        detail::read_field(s, "proposal_sigma", cfg.sampler.proposal_sigma, errors, "sampler");
        detail::read_field(s, "atom_proposal_prob", cfg.sampler.atom_proposal_prob, errors,
                           "sampler");
    }
    if (doc.contains("diagnostics")) {
        const auto& d = doc["diagnostics"];
        detail::reject_unknown_keys(d, "diagnostics",
                                    {"catalog", "z_threshold", "dump_trajectory"}, errors);
        detail::read_field(d, "catalog", cfg.diagnostics.catalog, errors, "diagnostics");
        detail::read_field(d, "z_threshold", cfg.diagnostics.z_threshold, errors, "diagnostics");
        detail::read_field(d, "dump_trajectory", cfg.diagnostics.dump_trajectory, errors,
                           "diagnostics");
    }
    detail::read_field(doc, "replicas", cfg.replicas, errors, "config");
    detail::read_field(doc, "master_seed", cfg.master_seed, errors, "config");
    detail::read_field(doc, "out_dir", cfg.out_dir, errors, "config");

    if (!errors.empty()) throw err::Validation(std::move(errors));

    // Cross-module constraint checks, aggregated before any work starts.
    if (cfg.model.family != "gaussian" && cfg.model.family != "quartic")
        errors.push_back("gibbs: unknown potential family '" + cfg.model.family + "'");
    if (!(cfg.model.s > 0.0))
        errors.push_back("strata InvalidStickiness: s must lie in (0,inf), got " +
                         std::to_string(cfg.model.s));
    if (!(cfg.scheme.h > 0.0)) errors.push_back("dynamics StepTooLarge: h must be positive");
    if (!(cfg.scheme.L > 0.0)) errors.push_back("dynamics: cap L must be positive");
    if (!(cfg.scheme.T > 0.0)) errors.push_back("runner: horizon T must be positive");
    if (cfg.scheme.burn_in < 0) errors.push_back("runner: burn_in must be >= 0");
    if (cfg.replicas < 1) errors.push_back("runner: replicas must be >= 1");
    if (!(cfg.diagnostics.z_threshold > 0.0))
        errors.push_back("diagnostics: z_threshold must be positive");
    if (cfg.diagnostics.catalog != "default" && cfg.diagnostics.catalog != "none")
        errors.push_back("diagnostics: catalog must be 'default' or 'none'");
    if (cfg.out_dir.empty()) errors.push_back("runner: out_dir must not be empty");
    validate_sampler_config(cfg.sampler, errors);

    if (errors.empty()) {
        try {
            const GibbsModel model =
                make_gibbs_model(cfg.model.d, cfg.model.N, cfg.potential(), cfg.model.s);
            if (cfg.sampler.sweeps == 0) cfg.sampler.sweeps = 100 * model.dimension() + 100;
            if (cfg.sampler.sweeps < 100 * model.dimension())
                errors.push_back("sampler: sweeps below the 100*n burn-in heuristic");
            try {
                (void)build_chain(model, cfg.scheme.h, cfg.scheme.L);
            } catch (const err::StepTooLarge& e) {
                errors.push_back(std::string("dynamics StepTooLarge: ") + e.what());
            } catch (const err::CapTooSmall& e) {
                errors.push_back(std::string("dynamics CapTooSmall: ") + e.what());
            }
            if (cfg.steps_per_replica() < 1)
                errors.push_back("runner: T shorter than one time step");
        } catch (const err::DimensionTooLarge& e) {
            errors.push_back(std::string("gibbs DimensionTooLarge: ") + e.what());
        } catch (const err::InvalidStickiness& e) {
            errors.push_back(std::string("strata InvalidStickiness: ") + e.what());
        } catch (const err::NotSymmetric& e) {
            errors.push_back(std::string("gibbs NotSymmetric: ") + e.what());
        } catch (const err::NotC1& e) {
            errors.push_back(std::string("gibbs NotC1: ") + e.what());
        } catch (const err::KappaDiverges& e) {
            errors.push_back(std::string("gibbs KappaDiverges: ") + e.what());
        }
    }

    if (!errors.empty()) throw err::Validation(std::move(errors));
    return cfg;
}

// FNV-1a over the canonical (sorted-key) dump; identifies reruns.
inline std::uint64_t config_hash(const nlohmann::json& canonical) {
    const std::string dump = canonical.dump();
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char byte : dump) {
        hash ^= byte;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

inline nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["model"] = {{"d", cfg.model.d},
                  {"N", cfg.model.N},
                  {"s", cfg.model.s},
                  {"potential", {{"family", cfg.model.family}, {"a", cfg.model.a}, {"c", cfg.model.c}}}};
    j["scheme"] = {{"h", cfg.scheme.h},
                   {"L", cfg.scheme.L},
                   {"T", cfg.scheme.T},
                   {"burn_in", cfg.scheme.burn_in}};
    j["sampler"] = {{"sweeps", cfg.sampler.sweeps},
                    {"proposal_sigma", cfg.sampler.proposal_sigma},
                    {"atom_proposal_prob", cfg.sampler.atom_proposal_prob}};
    j["diagnostics"] = {{"catalog", cfg.diagnostics.catalog},
                        {"z_threshold", cfg.diagnostics.z_threshold},
                        {"dump_trajectory", cfg.diagnostics.dump_trajectory}};
    j["replicas"] = cfg.replicas;
    j["master_seed"] = cfg.master_seed;
    j["out_dir"] = cfg.out_dir;
    return j;
}

}  // namespace sticky
