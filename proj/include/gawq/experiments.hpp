// experiments.hpp — Drive protocols for Bell/W generation, optimal-duration
// search, scattering-state selection and the exact single-excitation oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gawq/configs.hpp"
#include "gawq/disorder.hpp"
#include "gawq/kernel.hpp"
#include "gawq/lindblad.hpp"
#include "gawq/model.hpp"
#include "gawq/spectral.hpp"

namespace gawq {

struct DurationSearchOptions {
    double coarse_step = 1.0;
    double refine_tol = 0.1;
    double window = 0.0;          // 0 = auto: 10 / eta
    double min_prominence = 0.5;  // fraction of the window maximum a peak must reach
    RK45Options ode;
};

class NoMaximumError : public std::runtime_error {
public:
    NoMaximumError(std::string msg, std::vector<std::pair<double, double>> samples)
        : std::runtime_error(std::move(msg)), curve(std::move(samples)) {}
    std::vector<std::pair<double, double>> curve;  // (t, F) of the monotone scan
};

// First local maximum of F(t) under continuous drive: coarse scan at
// coarse_step, then golden-section refinement to +-refine_tol. Micro-ripples
// are rejected by requiring a peak to reach min_prominence of the window max.
inline double find_optimal_duration(const LindbladGenerator& continuous_gen, const Matrix& rho0,
                                    const Vector& target, double eta,
                                    const DurationSearchOptions& opts = {}) {
    if (!(eta > 0.0)) throw std::invalid_argument("find_optimal_duration: eta must be > 0");
    const double window = opts.window > 0.0 ? opts.window : 10.0 / eta;
    auto grid = linspace_grid(0.0, window, opts.coarse_step);
    auto traj = evolve(rho0, continuous_gen, grid, {{"target", target}});
    const auto& f = traj.series("F_target");
    const double fmax = *std::max_element(f.begin(), f.end());

    int peak = -1;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        if (f[i] >= f[i - 1] && f[i] > f[i + 1] && f[i] >= opts.min_prominence * fmax) {
            peak = static_cast<int>(i);
            break;
        }
    }
    if (peak < 0) {
        std::vector<std::pair<double, double>> samples;
        for (std::size_t i = 0; i < f.size(); ++i) samples.emplace_back(grid[i], f[i]);
        throw NoMaximumError("find_optimal_duration: no local maximum in window [0, " +
                                 std::to_string(window) + "]",
                             std::move(samples));
    }

    auto rhs = [&continuous_gen](double tt, const Matrix& r) { return continuous_gen.rhs(tt, r); };
    auto eval = [&](double t) {
        Matrix rho = rho0;
        if (t > 0.0) rk45_integrate(rho, 0.0, t, rhs, opts.ode);
        return fidelity_to_pure(rho, target);
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = grid[peak - 1], b = grid[peak + 1];
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    while (b - a > 2.0 * opts.refine_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        }
    }
    return 0.5 * (a + b);
}

struct ProtocolOptions {
    double eta = 0.01;
    std::optional<double> t0;  // drive duration; nullopt = optimize first
    double t_end = 2000.0;
    double grid_dt = 1.0;
    double local_decay = 0.0;
    DurationSearchOptions search;
    EvolveOptions evolve;
};

struct ProtocolResult {
    Trajectory trajectory;
    double t_max = 0.0;
    double f_max = 0.0;
    double f_final = 0.0;
    std::string target_name;
    std::string config_name;
    double eta = 0.0;
};

namespace detail {

inline ProtocolResult drive_protocol(const NamedConfiguration& config, const Vector& target,
                                     const std::string& target_name, const ProtocolOptions& opts) {
    const auto& spec = config.spec;
    const int M = spec.atom_count();
    auto kernel = coupling_matrix(spec);
    const double omega_d = spec.atoms.front().omega;  // resonant drive
    const double detuning = spec.atoms.front().omega - omega_d;

    Matrix rho0 = Matrix::Zero(1 << M, 1 << M);
    rho0(0, 0) = 1.0;  // all atoms in the ground state

    double t0;
    if (opts.t0) {
        t0 = *opts.t0;
    } else {
        LindbladGenerator cont(kernel, DriveSpec{0, opts.eta, omega_d}, detuning, opts.local_decay);
        t0 = find_optimal_duration(cont, rho0, target, opts.eta, opts.search);
    }

    LindbladGenerator gen(kernel, DriveSpec{0, opts.eta, omega_d, t0}, detuning, opts.local_decay);
    auto grid = linspace_grid(0.0, opts.t_end, opts.grid_dt);
    if (t0 < opts.t_end) {
        auto it = std::lower_bound(grid.begin(), grid.end(), t0);
        if (it == grid.end() || std::abs(*it - t0) > 1e-12) grid.insert(it, t0);
    }
    auto traj = evolve(rho0, gen, grid, {{target_name, target}}, opts.evolve);
    const auto& f = traj.series("F_" + target_name);

    ProtocolResult res;
    res.trajectory = std::move(traj);
    res.t_max = t0;
    res.f_max = *std::max_element(f.begin(), f.end());
    res.f_final = f.back();
    res.target_name = target_name;
    res.config_name = to_string(config.name);
    res.eta = opts.eta;
    return res;
}

}  // namespace detail

// Drive atom 1 of a two-atom layout from |gg>, release at t0 (or at the
// optimized first fidelity maximum), track F_Bell.
inline ProtocolResult bell_protocol(const NamedConfiguration& config,
                                    const ProtocolOptions& opts = {}) {
    if (config.spec.atom_count() != 2)
        throw std::invalid_argument("bell_protocol: requires a two-atom configuration");
    return detail::drive_protocol(config, bell_state(), "bell", opts);
}

// Same protocol shape for three atoms with the W state as target.
inline ProtocolResult w_protocol(const NamedConfiguration& config, const ProtocolOptions& opts = {}) {
    if (config.spec.atom_count() != 3)
        throw std::invalid_argument("w_protocol: requires a three-atom configuration");
    return detail::drive_protocol(config, w_state(), "w", opts);
}

// --- scattering-state selection for the stability experiment ---

struct ScatteringSelection {
    int index = -1;
    double energy = 0.0;
    double dark_weight = 0.0;
    Vector projected;  // projected atomic state, 2^M
};

// In-band state nearest target_energy whose atomic component is not dominated
// by the decay-free subspace (those never decay and cannot serve as a decaying
// reference). Tie-broken deterministically by energy order.
inline ScatteringSelection select_scattering_state(const EigenSystem& sys, const SystemSpec& spec,
                                                   double target_energy,
                                                   double max_dark_weight = 0.5,
                                                   std::optional<int> override_index = {},
                                                   const ClassifyOptions& opts = {}) {
    auto kernel = coupling_matrix(spec);
    RealMatrix dark = dark_subspace(kernel);
    const int M = spec.atom_count();
    auto cls = classify_states(sys, spec, opts);

    auto selection_for = [&](const ClassifiedState& st) {
        ScatteringSelection sel;
        sel.index = st.index;
        sel.energy = st.energy;
        auto state = sys.state(st.index);
        sel.projected = projected_atomic_state(state, M);
        Vector chat = state.atomic / std::sqrt(state.atomic_weight());
        sel.dark_weight = (dark.transpose().cast<Complex>() * chat).squaredNorm();
        return sel;
    };

    if (override_index) {
        for (const auto& st : cls.states)
            if (st.index == *override_index) {
                if (st.cls == StateClass::BOC_above || st.cls == StateClass::BOC_below)
                    throw std::invalid_argument("select_scattering_state: override index is not in-band");
                return selection_for(st);
            }
        throw std::invalid_argument("select_scattering_state: override index out of range");
    }

    std::vector<const ClassifiedState*> candidates;
    for (const auto& st : cls.states)
        if (st.cls == StateClass::Scattering && st.atomic_weight > 1e-14)
            candidates.push_back(&st);
    std::sort(candidates.begin(), candidates.end(),
              [target_energy](const ClassifiedState* a, const ClassifiedState* b) {
                  double da = std::abs(a->energy - target_energy);
                  double db = std::abs(b->energy - target_energy);
                  return da != db ? da < db : a->index < b->index;
              });
    for (const auto* st : candidates) {
        auto sel = selection_for(*st);
        if (sel.dark_weight <= max_dark_weight) return sel;
    }
    throw std::runtime_error("select_scattering_state: no suitable state found");
}

// --- exact single-excitation dynamics (validation oracle for the kernel) ---

struct OracleOptions {
    double grid_dt = 0.1;
    std::optional<int> n_sites_override;
    int margin_sites = 17;
    RK45Options ode;
};

struct OracleResult {
    Trajectory trajectory;  // states are the reduced atomic density matrices
    SystemSpec used_spec;
};

inline int oracle_required_sites(const SystemSpec& spec, double t_end) {
    int lo = spec.waveguide.n_sites, hi = 0;
    for (const auto& a : spec.atoms)
        for (int leg : a.legs) {
            lo = std::min(lo, leg);
            hi = std::max(hi, leg);
        }
    const int extent = hi - lo;
    return static_cast<int>(std::ceil(4.0 * spec.waveguide.xi * t_end)) + extent + 1;
}

// Full Schrödinger evolution of (atoms + ring) in the single-excitation
// sector, no drive. The ring is auto-sized so that no emitted wavefront can
// wrap around and revisit the atoms within t_end.
inline OracleResult oracle_exact_dynamics(const SystemSpec& spec, const Vector& atomic0,
                                          double t_end, const OracleOptions& opts = {}) {
    const int M = spec.atom_count();
    if (atomic0.size() != M)
        throw std::invalid_argument("oracle_exact_dynamics: atomic0 must have one amplitude per atom");
    if (std::abs(atomic0.squaredNorm() - 1.0) > 1e-8)
        throw std::invalid_argument("oracle_exact_dynamics: initial atomic amplitudes must be normalized");

    const int required = oracle_required_sites(spec, t_end);
    int n_sites = required + opts.margin_sites;
    if (opts.n_sites_override) {
        if (*opts.n_sites_override <= required)
            throw std::invalid_argument("oracle_exact_dynamics: ring too small for t_end = " +
                                        std::to_string(t_end) + "; need n_sites > " +
                                        std::to_string(required));
        n_sites = *opts.n_sites_override;
    }

    // re-center the same relative leg layout on the enlarged ring
    int lo = spec.waveguide.n_sites, hi = 0;
    for (const auto& a : spec.atoms)
        for (int leg : a.legs) {
            lo = std::min(lo, leg);
            hi = std::max(hi, leg);
        }
    SystemSpec big = spec;
    big.waveguide.n_sites = n_sites;
    big.waveguide.onsite_offsets.clear();
    big.waveguide.hopping_offsets.clear();
    const int shift = (n_sites - (hi - lo) + 1) / 2 - lo;
    for (auto& a : big.atoms)
        for (int& leg : a.legs) leg += shift;

    const Matrix H = build_single_excitation_hamiltonian(big).cast<Complex>();
    Vector psi = Vector::Zero(M + n_sites);
    psi.head(M) = atomic0;

    auto rhs = [&H](double, const Vector& y) { return Vector(Complex(0.0, -1.0) * (H * y)); };

    OracleResult out;
    out.used_spec = big;
    auto grid = linspace_grid(0.0, t_end, opts.grid_dt);
    double t = 0.0, h_carry = 0.0;
    auto record = [&](double tt) {
        out.trajectory.times.push_back(tt);
        out.trajectory.observables["norm"].push_back(psi.squaredNorm());
        double pat = psi.head(M).squaredNorm();
        out.trajectory.observables["P_atomic"].push_back(pat);
        for (int i = 0; i < M; ++i)
            out.trajectory.observables["P_atom" + std::to_string(i)].push_back(std::norm(psi(i)));
        SingleExcitationState st;
        st.atomic = psi.head(M);
        st.photonic = psi.tail(n_sites);
        out.trajectory.states.push_back(reduced_atomic_density(st, M));
    };
    record(0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        rk45_integrate(psi, t, grid[i], rhs, opts.ode, &h_carry);
        t = grid[i];
        record(t);
    }
    return out;
}

// --- kernel calibration against the exact oracle ---

struct CalibrationResult {
    std::vector<double> times;
    std::vector<double> p_exact;
    std::vector<double> p_master;
    double max_abs_diff = 0.0;
    double fitted_prefactor = 0.0;   // C_fit from the exact decay
    double nominal_prefactor = 0.0;  // g^2 / (2 xi)
    double ratio = 0.0;
};

// Single two-leg atom initialized excited: exact P_e(t) vs the Markovian
// prediction exp(-2 Re(A_11) t). The fitted prefactor comes from a
// least-squares line through ln P_e over the full window.
inline CalibrationResult calibrate_kernel(double g = 0.1, int leg_spacing = 8, double t_end = 50.0,
                                          double grid_dt = 0.1, double xi = 1.0) {
    SystemSpec spec;
    spec.waveguide = WaveguideSpec{3 + leg_spacing, 0.0, xi, Boundary::ring, {}, {}};
    spec.atoms = {GiantAtomSpec{0.0, {0, leg_spacing}, g}};
    auto kernel = coupling_matrix(spec);
    const double gamma11 = kernel.gamma(0, 0);
    const double phase_sum = gamma11 / (g * g / (2.0 * xi));
    if (!(phase_sum > 0.0))
        throw std::invalid_argument("calibrate_kernel: leg spacing gives a dark atom (no decay to fit)");

    Vector a0(1);
    a0(0) = 1.0;
    OracleOptions oopts;
    oopts.grid_dt = grid_dt;
    auto oracle = oracle_exact_dynamics(spec, a0, t_end, oopts);

    CalibrationResult res;
    res.times = oracle.trajectory.times;
    res.p_exact = oracle.trajectory.series("P_atom0");
    res.nominal_prefactor = g * g / (2.0 * xi);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(res.times.size());
    for (int i = 0; i < n; ++i) {
        const double t = res.times[i];
        res.p_master.push_back(std::exp(-2.0 * gamma11 * t));
        res.max_abs_diff = std::max(res.max_abs_diff, std::abs(res.p_exact[i] - res.p_master[i]));
        const double y = std::log(std::max(res.p_exact[i], 1e-300));
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    res.fitted_prefactor = (-slope / 2.0) / phase_sum;
    res.ratio = res.fitted_prefactor / res.nominal_prefactor;
    return res;
}

}  // namespace gawq
