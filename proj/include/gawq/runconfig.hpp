// runconfig.hpp — Configuration document for the CLI: schema validation,
// preset resolution and key=value overrides. All physical quantities are
// dimensionless (frequencies in units of xi, times in 1/xi).

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gawq/configs.hpp"
#include "gawq/disorder.hpp"
#include "gawq/model.hpp"

namespace gawq {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require_keys(const nlohmann::json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("key '" + key + "' has the wrong type");
    }
}

}  // namespace detail

struct RunConfig {
    nlohmann::json doc;
    std::uint64_t seed = 0;
    std::optional<ConfigName> preset;
    std::optional<SystemSpec> explicit_spec;

    bool has_spec() const { return preset.has_value() || explicit_spec.has_value(); }

    const nlohmann::json& experiment() const {
        static const nlohmann::json empty = nlohmann::json::object();
        return doc.contains("experiment") ? doc.at("experiment") : empty;
    }

    double exp_num(const std::string& key, double fallback) const {
        return detail::get_or<double>(experiment(), key, fallback);
    }
    int exp_int(const std::string& key, int fallback) const {
        return detail::get_or<int>(experiment(), key, fallback);
    }
    std::string exp_str(const std::string& key, const std::string& fallback) const {
        return detail::get_or<std::string>(experiment(), key, fallback);
    }

    // "auto" (nullopt) or a number
    std::optional<double> drive_duration(const nlohmann::json& section) const {
        if (!section.contains("t0")) return std::nullopt;
        const auto& v = section.at("t0");
        if (v.is_string()) {
            if (v.get<std::string>() == "auto") return std::nullopt;
            throw ConfigError("t0 must be a number or \"auto\"");
        }
        return v.get<double>();
    }

    SystemSpec resolve_spec() const {
        if (explicit_spec) return *explicit_spec;
        if (preset) {
            ConfigOptions copts;
            copts.n_sites = exp_int("n_sites", copts.n_sites);
            copts.g = exp_num("g", copts.g);
            return named_configuration(*preset, copts).spec;
        }
        throw ConfigError("configuration defines neither waveguide/atoms nor experiment.name");
    }

    ClassifyOptions classify_options() const {
        ClassifyOptions c;
        c.guard = exp_int("guard", c.guard);
        c.tol_loc = exp_num("tol_loc", c.tol_loc);
        c.band_margin = exp_num("band_margin", c.band_margin);
        return c;
    }
};

inline RunConfig parse_run_config(const nlohmann::json& doc) {
    detail::require_keys(doc, "config",
                         {"seed", "waveguide", "atoms", "experiment", "disorder", "drive"});
    RunConfig rc;
    rc.doc = doc;
    rc.seed = detail::get_or<std::uint64_t>(doc, "seed", 0);

    if (doc.contains("waveguide") != doc.contains("atoms"))
        throw ConfigError("waveguide and atoms sections must be given together");

    if (doc.contains("waveguide")) {
        const auto& w = doc.at("waveguide");
        detail::require_keys(w, "waveguide", {"n_sites", "omega_c", "xi", "boundary",
                                              "onsite_offsets", "hopping_offsets"});
        WaveguideSpec wg;
        wg.n_sites = detail::get_or<int>(w, "n_sites", 0);
        wg.omega_c = detail::get_or<double>(w, "omega_c", 0.0);
        wg.xi = detail::get_or<double>(w, "xi", 1.0);
        const std::string b = detail::get_or<std::string>(w, "boundary", "ring");
        if (b == "ring")
            wg.boundary = Boundary::ring;
        else if (b == "open")
            wg.boundary = Boundary::open;
        else
            throw ConfigError("waveguide.boundary must be 'ring' or 'open'");
        wg.onsite_offsets = detail::get_or<std::vector<double>>(w, "onsite_offsets", {});
        wg.hopping_offsets = detail::get_or<std::vector<double>>(w, "hopping_offsets", {});

        SystemSpec spec;
        spec.waveguide = wg;
        for (const auto& a : doc.at("atoms")) {
            detail::require_keys(a, "atom", {"omega", "legs", "g"});
            GiantAtomSpec atom;
            atom.omega = detail::get_or<double>(a, "omega", 0.0);
            atom.legs = detail::get_or<std::vector<int>>(a, "legs", {});
            atom.g = detail::get_or<double>(a, "g", 0.0);
            spec.atoms.push_back(atom);
        }
        auto rep = validate_spec(spec);
        if (!rep.ok()) throw ConfigError("invalid system: " + rep.joined());
        rc.explicit_spec = spec;
    }

    if (doc.contains("experiment")) {
        detail::require_keys(doc.at("experiment"), "experiment",
                             {"name", "n_sites", "g", "eta", "t0", "t_end", "grid_dt", "g_min",
                              "g_max", "g_steps", "scattering_index", "band_margin", "tol_loc",
                              "guard", "local_decay", "initial", "target_energy", "coarse_step",
                              "search_window", "refine_tol", "oracle_t_end", "leg_spacing"});
        if (doc.at("experiment").contains("name")) {
            if (rc.explicit_spec)
                throw ConfigError("give either an explicit waveguide/atoms or experiment.name, not both");
            rc.preset = config_from_string(doc.at("experiment").at("name").get<std::string>());
        }
    }

    if (doc.contains("disorder"))
        detail::require_keys(doc.at("disorder"), "disorder",
                             {"kind", "delta", "delta_grid", "n_realizations"});
    if (doc.contains("drive"))
        detail::require_keys(doc.at("drive"), "drive", {"target_atom", "eta", "omega_d", "t0"});
    return rc;
}

inline DisorderSpec parse_disorder(const RunConfig& rc) {
    DisorderSpec d;
    d.master_seed = rc.seed;
    if (!rc.doc.contains("disorder")) return d;
    const auto& j = rc.doc.at("disorder");
    const std::string kind = detail::get_or<std::string>(j, "kind", "onsite");
    if (kind == "onsite")
        d.kind = DisorderKind::onsite;
    else if (kind == "hopping")
        d.kind = DisorderKind::hopping;
    else
        throw ConfigError("disorder.kind must be 'onsite' or 'hopping'");
    d.delta = detail::get_or<double>(j, "delta", 0.0);
    d.n_realizations = detail::get_or<int>(j, "n_realizations", 50);
    return d;
}

// Dotted-path override, e.g. "waveguide.n_sites=301" or "experiment.t0=auto".
// The value is parsed as JSON when possible, otherwise taken as a string.
inline void apply_override(nlohmann::json& doc, const std::string& key, const std::string& value) {
    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError("bad override key: " + key);
        parts.push_back(part);
    }
    if (parts.empty()) throw ConfigError("bad override key: " + key);
    nlohmann::json* node = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i])) (*node)[parts[i]] = nlohmann::json::object();
        node = &(*node)[parts[i]];
        if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + key);
    }
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
        parsed = value;
    }
    (*node)[parts.back()] = parsed;
}

}  // namespace gawq
