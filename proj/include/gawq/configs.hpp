// configs.hpp — Named atom-waveguide layouts used throughout the experiments.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gawq/model.hpp"

namespace gawq {

enum class ConfigName { braided2, separate2, nested2, braided3 };

inline std::string to_string(ConfigName n) {
    switch (n) {
        case ConfigName::braided2: return "braided2";
        case ConfigName::separate2: return "separate2";
        case ConfigName::nested2: return "nested2";
        default: return "braided3";
    }
}

inline ConfigName config_from_string(const std::string& s) {
    if (s == "braided2") return ConfigName::braided2;
    if (s == "separate2") return ConfigName::separate2;
    if (s == "nested2") return ConfigName::nested2;
    if (s == "braided3") return ConfigName::braided3;
    throw std::invalid_argument("unknown configuration name: " + s);
}

struct NamedConfiguration {
    ConfigName name = ConfigName::braided2;
    SystemSpec spec;
};

struct ConfigOptions {
    int n_sites = 201;
    double g = 0.5;
    double omega = 0.0;
    double omega_c = 0.0;
    double xi = 1.0;
    Boundary boundary = Boundary::ring;
};

// Leg layouts relative to the first atom's left leg x1:
//   braided2 : {x1, x1+8}, {x1+2, x1+10}                (dx = 2, n = 8)
//   separate2: {x1, x1+8}, {x1+10, x1+18}               (dx = 10, n = 8)
//   nested2  : outer {x1, x1+8}, inner {x1+2, x1+6}     (dx = 2, n_in = 4, n_out = 8)
//   braided3 : {x1, x1+8}, {x1+2, x1+10}, {x1+10, x1+18} (dx = 2, ds = 2, n = 8)
// The atomic region is centered on the lattice.
inline NamedConfiguration named_configuration(ConfigName name, const ConfigOptions& opts = {}) {
    std::vector<std::vector<int>> rel;
    switch (name) {
        case ConfigName::braided2: rel = {{0, 8}, {2, 10}}; break;
        case ConfigName::separate2: rel = {{0, 8}, {10, 18}}; break;
        case ConfigName::nested2: rel = {{0, 8}, {2, 6}}; break;
        case ConfigName::braided3: rel = {{0, 8}, {2, 10}, {10, 18}}; break;
    }
    int span = 0;
    for (const auto& legs : rel)
        for (int p : legs) span = std::max(span, p);
    const int x1 = (opts.n_sites - span + 1) / 2;
    if (x1 < 0) throw std::invalid_argument("named_configuration: lattice too small for layout");

    NamedConfiguration cfg;
    cfg.name = name;
    cfg.spec.waveguide =
        WaveguideSpec{opts.n_sites, opts.omega_c, opts.xi, opts.boundary, {}, {}};
    for (const auto& legs : rel) {
        GiantAtomSpec atom;
        atom.omega = opts.omega;
        atom.g = opts.g;
        for (int p : legs) atom.legs.push_back(x1 + p);
        cfg.spec.atoms.push_back(atom);
    }
    return cfg;
}

}  // namespace gawq
