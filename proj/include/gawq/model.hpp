// model.hpp — System description types and the single-excitation Hamiltonian
// of giant atoms coupled to a coupled-resonator waveguide.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gawq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;

enum class Boundary { ring, open };

inline std::string to_string(Boundary b) {
    return b == Boundary::ring ? "ring" : "open";
}

// 1D coupled-resonator waveguide. xi is the nearest-neighbor hopping and the
// global energy unit (all frequencies in units of xi, times in 1/xi).
// Offset arrays model disorder; empty means all zero. Hopping offsets add to
// xi before negation: bond j couples sites (j, j+1), plus the wrap bond
// (n_sites-1, 0) for a ring.
struct WaveguideSpec {
    int n_sites = 0;
    double omega_c = 0.0;
    double xi = 1.0;
    Boundary boundary = Boundary::ring;
    std::vector<double> onsite_offsets;
    std::vector<double> hopping_offsets;

    int bond_count() const { return boundary == Boundary::ring ? n_sites : n_sites - 1; }

    bool is_clean() const {
        for (double v : onsite_offsets)
            if (v != 0.0) return false;
        for (double v : hopping_offsets)
            if (v != 0.0) return false;
        return true;
    }
};

// Two-level emitter coupled to the waveguide at every site listed in `legs`
// with uniform strength g; a two-leg atom of size n has legs = {x, x+n}.
struct GiantAtomSpec {
    double omega = 0.0;
    std::vector<int> legs;
    double g = 0.0;
};

struct SystemSpec {
    WaveguideSpec waveguide;
    std::vector<GiantAtomSpec> atoms;

    int atom_count() const { return static_cast<int>(atoms.size()); }
    int dimension() const { return atom_count() + waveguide.n_sites; }
};

// One vector of the single-excitation sector: amplitudes c_i on "atom i
// excited, field vacuum" plus f_j on "all atoms ground, one photon at site j".
struct SingleExcitationState {
    Vector atomic;
    Vector photonic;
    std::optional<double> energy;

    double atomic_weight() const { return atomic.squaredNorm(); }
    double photonic_weight() const { return photonic.squaredNorm(); }
    double norm_squared() const { return atomic_weight() + photonic_weight(); }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string joined() const {
        std::string s;
        for (const auto& v : violations) {
            if (!s.empty()) s += "; ";
            s += v;
        }
        return s;
    }
};

inline ValidationReport validate_spec(const SystemSpec& spec) {
    ValidationReport rep;
    const auto& wg = spec.waveguide;
    auto fail = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

    if (wg.n_sites < 3) fail("n_sites must be >= 3");
    if (!(wg.xi > 0.0)) fail("xi must be > 0");
    if (!wg.onsite_offsets.empty() &&
        static_cast<int>(wg.onsite_offsets.size()) != wg.n_sites)
        fail("onsite_offsets length must equal n_sites");
    if (!wg.hopping_offsets.empty() &&
        static_cast<int>(wg.hopping_offsets.size()) != wg.bond_count())
        fail("hopping_offsets length must equal bond count");
    if (spec.atoms.empty()) fail("at least one atom required");

    for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
        const auto& a = spec.atoms[i];
        const std::string tag = "atom " + std::to_string(i) + ": ";
        if (a.legs.empty()) fail(tag + "legs must be non-empty");
        if (a.g < 0.0) fail(tag + "coupling g must be >= 0");
        for (std::size_t k = 0; k < a.legs.size(); ++k) {
            if (a.legs[k] < 0 || a.legs[k] >= wg.n_sites) {
                fail(tag + "leg out of range: " + std::to_string(a.legs[k]));
                continue;
            }
            if (k > 0 && a.legs[k] == a.legs[k - 1])
                fail(tag + "duplicate leg: " + std::to_string(a.legs[k]));
            else if (k > 0 && a.legs[k] < a.legs[k - 1])
                fail(tag + "legs must be strictly increasing");
        }
    }
    return rep;
}

// omega_k = omega_c - 2 xi cos k. Defined for the clean lattice only.
inline double dispersion(double k, const WaveguideSpec& wg) {
    if (!wg.is_clean())
        throw std::invalid_argument("dispersion: defined for the clean lattice only (nonzero disorder offsets present)");
    return wg.omega_c - 2.0 * wg.xi * std::cos(k);
}

// Basis convention (fixed, relied on downstream): indices 0..M-1 are the atomic
// excitations in listed order, indices M..M+n_sites-1 the photon sites.
// The matrix is real symmetric by construction.
inline RealMatrix build_single_excitation_hamiltonian(const SystemSpec& spec) {
    auto rep = validate_spec(spec);
    if (!rep.ok())
        throw std::invalid_argument("invalid SystemSpec: " + rep.joined());

    const auto& wg = spec.waveguide;
    const int M = spec.atom_count();
    const int N = wg.n_sites;
    RealMatrix H = RealMatrix::Zero(M + N, M + N);

    for (int i = 0; i < M; ++i) H(i, i) = spec.atoms[i].omega;
    for (int j = 0; j < N; ++j) {
        double on = wg.onsite_offsets.empty() ? 0.0 : wg.onsite_offsets[j];
        H(M + j, M + j) = wg.omega_c + on;
    }
    const int nb = wg.bond_count();
    for (int b = 0; b < nb; ++b) {
        const int j = b;
        const int k = (b + 1) % N;
        double t = wg.xi + (wg.hopping_offsets.empty() ? 0.0 : wg.hopping_offsets[b]);
        H(M + j, M + k) -= t;
        H(M + k, M + j) -= t;
    }
    for (int i = 0; i < M; ++i)
        for (int leg : spec.atoms[i].legs) {
            H(i, M + leg) += spec.atoms[i].g;
            H(M + leg, i) += spec.atoms[i].g;
        }
    return H;
}

// Lattice-only block (atoms removed); used for band-edge determination.
inline RealMatrix build_lattice_hamiltonian(const WaveguideSpec& wg) {
    SystemSpec tmp{wg, {GiantAtomSpec{0.0, {0}, 0.0}}};
    RealMatrix full = build_single_excitation_hamiltonian(tmp);
    return full.bottomRightCorner(wg.n_sites, wg.n_sites);
}

}  // namespace gawq
