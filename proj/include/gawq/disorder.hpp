// disorder.hpp — Gaussian waveguide disorder and the Monte-Carlo fidelity scan.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gawq/kernel.hpp"
#include "gawq/model.hpp"
#include "gawq/spectral.hpp"

namespace gawq {

enum class DisorderKind { onsite, hopping };

inline std::string to_string(DisorderKind k) {
    return k == DisorderKind::onsite ? "onsite" : "hopping";
}

// delta is a full width at half maximum; offsets are drawn i.i.d. Gaussian
// with sigma = delta / (2 sqrt(2 ln 2)).
struct DisorderSpec {
    DisorderKind kind = DisorderKind::onsite;
    double delta = 0.0;
    int n_realizations = 50;
    std::uint64_t master_seed = 0;
};

inline double sigma_from_fwhm(double delta) {
    return delta / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Order-independent substream: one seed per (master, kind, delta, index).
inline std::uint64_t stream_seed(std::uint64_t master, DisorderKind kind, double delta, int index) {
    std::uint64_t x = master;
    std::uint64_t s = splitmix64(x);
    x ^= (kind == DisorderKind::onsite ? 0x6f6e736974650000ULL : 0x686f7070696e6700ULL);
    s ^= splitmix64(x);
    x ^= std::bit_cast<std::uint64_t>(delta);
    s ^= splitmix64(x);
    x ^= static_cast<std::uint64_t>(index) + 1;
    s ^= splitmix64(x);
    return s;
}

}  // namespace detail

inline std::vector<double> sample_disorder(const DisorderSpec& dis, const WaveguideSpec& wg,
                                           int realization_index) {
    if (dis.delta < 0.0) throw std::invalid_argument("sample_disorder: delta must be >= 0");
    const int n = dis.kind == DisorderKind::onsite ? wg.n_sites : wg.bond_count();
    std::vector<double> offsets(n, 0.0);
    if (dis.delta == 0.0) return offsets;
    std::mt19937_64 rng(detail::stream_seed(dis.master_seed, dis.kind, dis.delta, realization_index));
    std::normal_distribution<double> gauss(0.0, sigma_from_fwhm(dis.delta));
    for (double& v : offsets) v = gauss(rng);
    return offsets;
}

inline SystemSpec apply_disorder(const SystemSpec& base, DisorderKind kind,
                                 const std::vector<double>& offsets) {
    SystemSpec spec = base;
    if (kind == DisorderKind::onsite)
        spec.waveguide.onsite_offsets = offsets;
    else
        spec.waveguide.hopping_offsets = offsets;
    return spec;
}

// The in-band eigenstate with maximal localization metric; under disorder this
// is the surviving (hybridized) BIC.
struct BicIdentification {
    int index = -1;
    double energy = 0.0;
    double localization_metric = 0.0;
    double atomic_weight = 0.0;
    double fidelity_to_bell = 0.0;
    bool flagged = false;
};

inline BicIdentification identify_bic(const SystemSpec& spec, const ClassifyOptions& opts = {},
                                      double flag_threshold = 0.5) {
    auto sys = eigendecompose(spec);
    auto cls = classify_states(sys, spec, opts);
    BicIdentification best;
    for (const auto& st : cls.states) {
        if (st.cls == StateClass::BOC_above || st.cls == StateClass::BOC_below) continue;
        if (best.index < 0 || st.localization_metric > best.localization_metric) {
            best.index = st.index;
            best.energy = st.energy;
            best.localization_metric = st.localization_metric;
            best.atomic_weight = st.atomic_weight;
        }
    }
    if (best.index < 0) {
        best.flagged = true;
        return best;
    }
    best.flagged = best.localization_metric < flag_threshold;
    if (spec.atom_count() == 2 && best.atomic_weight > 1e-14) {
        auto state = sys.state(best.index);
        best.fidelity_to_bell =
            std::abs((bell_state().adjoint() * projected_atomic_state(state, 2))(0, 0));
    }
    return best;
}

struct DisorderScanRow {
    double delta = 0.0;
    DisorderKind kind = DisorderKind::onsite;
    double mean_f = 0.0;
    double std_f = 0.0;
    int n_used = 0;
    int n_flagged = 0;
};

// Per delta: rebuild the Hamiltonian per realization, re-identify the BIC and
// accumulate F(projected rho_BIC, rho_Bell) in realization-index order.
// Realizations whose best candidate is delocalized (metric < flag threshold)
// are excluded from the mean and counted.
inline std::vector<DisorderScanRow> disorder_fidelity_scan(const SystemSpec& base_spec,
                                                           const DisorderSpec& dis,
                                                           const std::vector<double>& delta_grid,
                                                           const ClassifyOptions& opts = {}) {
    if (dis.n_realizations < 1)
        throw std::invalid_argument("disorder_fidelity_scan: n_realizations must be >= 1");
    auto base_rep = validate_spec(base_spec);
    if (!base_rep.ok())
        throw std::invalid_argument("disorder_fidelity_scan: invalid base spec: " + base_rep.joined());

    std::vector<DisorderScanRow> rows;
    for (double delta : delta_grid) {
        DisorderSpec d = dis;
        d.delta = delta;
        DisorderScanRow row;
        row.delta = delta;
        row.kind = dis.kind;
        double sum = 0.0, sum2 = 0.0;
        for (int r = 0; r < dis.n_realizations; ++r) {
            auto offsets = sample_disorder(d, base_spec.waveguide, r);
            auto spec = apply_disorder(base_spec, dis.kind, offsets);
            auto bic = identify_bic(spec, opts);
            if (bic.flagged) {
                ++row.n_flagged;
                continue;
            }
            sum += bic.fidelity_to_bell;
            sum2 += bic.fidelity_to_bell * bic.fidelity_to_bell;
            ++row.n_used;
        }
        if (row.n_used > 0) {
            row.mean_f = sum / row.n_used;
            row.std_f = row.n_used > 1
                            ? std::sqrt(std::max(0.0, (sum2 - sum * sum / row.n_used) / (row.n_used - 1)))
                            : 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gawq
