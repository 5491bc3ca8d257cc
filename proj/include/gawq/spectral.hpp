// spectral.hpp — Eigendecomposition, BIC/BOC classification, reduced atomic
// states and Uhlmann fidelity.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gawq/model.hpp"

namespace gawq {

struct EigenSystem {
    RealVector energies;   // ascending
    RealMatrix vectors;    // orthonormal columns, same order
    int n_atoms = 0;

    int size() const { return static_cast<int>(energies.size()); }

    SingleExcitationState state(int idx) const {
        SingleExcitationState s;
        s.atomic = vectors.col(idx).head(n_atoms).cast<Complex>();
        s.photonic = vectors.col(idx).tail(vectors.rows() - n_atoms).cast<Complex>();
        s.energy = energies(idx);
        return s;
    }
};

inline EigenSystem eigendecompose(const RealMatrix& H, int n_atoms) {
    if (H.rows() != H.cols())
        throw std::invalid_argument("eigendecompose: matrix must be square");
    const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
        throw std::invalid_argument("eigendecompose: matrix is not Hermitian (max asymmetry " +
                                    std::to_string(asym) + ")");
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(H);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: eigensolver failed");
    EigenSystem sys;
    sys.energies = solver.eigenvalues();
    sys.vectors = solver.eigenvectors();
    sys.n_atoms = n_atoms;
    return sys;
}

inline EigenSystem eigendecompose(const SystemSpec& spec) {
    return eigendecompose(build_single_excitation_hamiltonian(spec), spec.atom_count());
}

enum class StateClass { BIC, BOC_above, BOC_below, Scattering };

inline std::string to_string(StateClass c) {
    switch (c) {
        case StateClass::BIC: return "BIC";
        case StateClass::BOC_above: return "BOC_above";
        case StateClass::BOC_below: return "BOC_below";
        default: return "Scattering";
    }
}

struct ClassifiedState {
    int index = 0;
    double energy = 0.0;
    StateClass cls = StateClass::Scattering;
    // 1 = everything inside the atomic region (atoms + sites within the
    // guarded leg interval); the BIC test is outside_weight < tol_loc.
    double localization_metric = 0.0;
    double outside_weight = 1.0;
    double atomic_weight = 0.0;
};

struct ClassifyOptions {
    int guard = 2;
    double tol_loc = 1e-4;
    double band_margin = 1e-6;
    double degeneracy_tol = 1e-9;
};

struct BandInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double e, double margin) const { return e >= lo - margin && e <= hi + margin; }
};

// Propagating band of the given lattice: union of the ideal continuum
// [omega_c - 2xi, omega_c + 2xi] and the discrete lattice-block spectrum.
// The union handles both finite-size rounding (odd ring tops out below the
// continuum edge) and disorder-broadened bands.
inline BandInterval band_interval(const WaveguideSpec& wg) {
    RealMatrix Hl = build_lattice_hamiltonian(wg);
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(Hl, Eigen::EigenvaluesOnly);
    BandInterval b;
    b.lo = std::min(wg.omega_c - 2.0 * wg.xi, solver.eigenvalues().minCoeff());
    b.hi = std::max(wg.omega_c + 2.0 * wg.xi, solver.eigenvalues().maxCoeff());
    return b;
}

struct ClassifyResult {
    std::vector<ClassifiedState> states;
    bool decoupled_atoms = false;
    BandInterval band;
};

namespace detail {

// Photonic weight outside [min leg - guard, max leg + guard].
inline double outside_weight_of(const RealVector& column, const SystemSpec& spec, int guard) {
    const int M = spec.atom_count();
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (const auto& a : spec.atoms)
        for (int leg : a.legs) {
            lo = std::min(lo, leg);
            hi = std::max(hi, leg);
        }
    lo -= guard;
    hi += guard;
    double w = 0.0;
    const int N = spec.waveguide.n_sites;
    for (int j = 0; j < N; ++j)
        if (j < lo || j > hi) w += column(M + j) * column(M + j);
    return w;
}

}  // namespace detail

// Classifies every eigenpair. BOC when the energy lies outside the band by
// more than the margin; inside the band a state is a BIC when its photonic
// weight outside the guarded leg interval is below tol_loc and it carries
// atomic weight above tol_loc. Within numerically degenerate in-band groups
// the localization metric is re-diagonalized so a compact vector is not
// hidden inside an arbitrary eigensolver mixture.
inline ClassifyResult classify_states(const EigenSystem& sys, const SystemSpec& spec,
                                      const ClassifyOptions& opts = {}) {
    ClassifyResult res;
    res.band = band_interval(spec.waveguide);
    const int M = spec.atom_count();
    const int n = sys.size();

    bool any_coupled = false;
    for (const auto& a : spec.atoms)
        if (a.g > 0.0) any_coupled = true;
    if (!any_coupled) {
        res.decoupled_atoms = true;
        for (int i = 0; i < n; ++i) {
            ClassifiedState st;
            st.index = i;
            st.energy = sys.energies(i);
            st.cls = StateClass::Scattering;
            st.outside_weight = detail::outside_weight_of(sys.vectors.col(i), spec, opts.guard);
            st.localization_metric = 1.0 - st.outside_weight;
            st.atomic_weight = sys.vectors.col(i).head(M).squaredNorm();
            res.states.push_back(st);
        }
        return res;
    }

    RealMatrix vecs = sys.vectors;  // local copy; degenerate groups get rotated

    int i = 0;
    while (i < n) {
        int j = i + 1;
        while (j < n && sys.energies(j) - sys.energies(j - 1) <= opts.degeneracy_tol) ++j;
        const int k = j - i;
        const bool inband = res.band.contains(sys.energies(i), opts.band_margin);
        if (k > 1 && inband) {
            // Re-diagonalize the outside-weight quadratic form within the group.
            RealMatrix Q = RealMatrix::Zero(k, k);
            int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
            for (const auto& a : spec.atoms)
                for (int leg : a.legs) {
                    lo = std::min(lo, leg);
                    hi = std::max(hi, leg);
                }
            lo -= opts.guard;
            hi += opts.guard;
            for (int s = 0; s < spec.waveguide.n_sites; ++s) {
                if (s >= lo && s <= hi) continue;
                RealVector row(k);
                for (int c = 0; c < k; ++c) row(c) = vecs(M + s, i + c);
                Q += row * row.transpose();
            }
            Eigen::SelfAdjointEigenSolver<RealMatrix> qs(Q);
            vecs.middleCols(i, k) = vecs.middleCols(i, k) * qs.eigenvectors();
        }
        for (int c = i; c < j; ++c) {
            ClassifiedState st;
            st.index = c;
            st.energy = sys.energies(c);
            st.outside_weight = detail::outside_weight_of(vecs.col(c), spec, opts.guard);
            st.localization_metric = 1.0 - st.outside_weight;
            st.atomic_weight = vecs.col(c).head(M).squaredNorm();
            if (st.energy > res.band.hi + opts.band_margin)
                st.cls = StateClass::BOC_above;
            else if (st.energy < res.band.lo - opts.band_margin)
                st.cls = StateClass::BOC_below;
            else if (st.outside_weight < opts.tol_loc && st.atomic_weight > opts.tol_loc)
                st.cls = StateClass::BIC;
            else
                st.cls = StateClass::Scattering;
            res.states.push_back(st);
        }
        i = j;
    }
    return res;
}

// --- atomic-space states (qubit tensor order atom1 x atom2 x ..., |g>=0, |e>=1) ---

inline int excited_index(int atom, int M) { return 1 << (M - 1 - atom); }

inline Vector basis_state(int index, int M) {
    Vector v = Vector::Zero(1 << M);
    v(index) = 1.0;
    return v;
}

inline Vector bell_state() {
    Vector v = Vector::Zero(4);
    v(excited_index(0, 2)) = 1.0 / std::sqrt(2.0);
    v(excited_index(1, 2)) = 1.0 / std::sqrt(2.0);
    return v;
}

inline Vector antisymmetric_bell_state() {
    Vector v = Vector::Zero(4);
    v(excited_index(0, 2)) = 1.0 / std::sqrt(2.0);
    v(excited_index(1, 2)) = -1.0 / std::sqrt(2.0);
    return v;
}

inline Vector w_state() {
    Vector v = Vector::Zero(8);
    for (int a = 0; a < 3; ++a) v(excited_index(a, 3)) = 1.0 / std::sqrt(3.0);
    return v;
}

// Partial trace over the field: rho = |psi_a><psi_a| + (sum |f_j|^2) |G><G|
// with the unnormalized atomic component psi_a embedded in the 2^M space.
inline Matrix reduced_atomic_density(const SingleExcitationState& state, int M) {
    const double norm2 = state.norm_squared();
    if (std::abs(norm2 - 1.0) > 1e-8)
        throw std::invalid_argument("reduced_atomic_density: state not normalized (|psi|^2 = " +
                                    std::to_string(norm2) + ")");
    const int dim = 1 << M;
    Vector psi_a = Vector::Zero(dim);
    for (int a = 0; a < M; ++a) psi_a(excited_index(a, M)) = state.atomic(a);
    Matrix rho = psi_a * psi_a.adjoint();
    rho(0, 0) += state.photonic_weight();
    return rho;
}

// Atomic component conditioned on the field being in vacuum, renormalized to
// a pure state in the 2^M space.
inline Vector projected_atomic_state(const SingleExcitationState& state, int M) {
    const double w = state.atomic_weight();
    if (w < 1e-14)
        throw std::invalid_argument("projected_atomic_state: vanishing atomic weight");
    const int dim = 1 << M;
    Vector psi = Vector::Zero(dim);
    for (int a = 0; a < M; ++a) psi(excited_index(a, M)) = state.atomic(a) / std::sqrt(w);
    return psi;
}

struct DensityCheckOptions {
    double tol_herm = 1e-12;
    double tol_trace = 1e-10;
    double tol_pos = -1e-9;
};

inline void check_density_matrix(const Matrix& rho, const DensityCheckOptions& opts = {}) {
    if (rho.rows() != rho.cols())
        throw std::invalid_argument("density matrix must be square");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > opts.tol_herm)
        throw std::invalid_argument("density matrix not Hermitian (deviation " + std::to_string(herm) + ")");
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > opts.tol_trace)
        throw std::invalid_argument("density matrix trace != 1 (trace " + std::to_string(tr) + ")");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    const double mineig = es.eigenvalues().minCoeff();
    if (mineig < opts.tol_pos)
        throw std::invalid_argument("density matrix has eigenvalue " + std::to_string(mineig) +
                                    " below tolerance");
}

namespace detail {

inline Matrix hermitian_sqrt(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    RealVector lam = es.eigenvalues();
    for (int i = 0; i < lam.size(); ++i) lam(i) = std::sqrt(std::max(0.0, lam(i)));
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Uhlmann fidelity F = Tr sqrt( sqrt(rho) sigma sqrt(rho) ), in [0, 1].
inline double uhlmann_fidelity(const Matrix& rho, const Matrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
    check_density_matrix(rho);
    check_density_matrix(sigma);
    const Matrix sr = detail::hermitian_sqrt(rho);
    Matrix m = sr * sigma * sr;
    m = 0.5 * (m + Matrix(m.adjoint()));  // kill roundoff asymmetry
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    // roundoff leaves |lambda| ~ eps noise on rank-deficient products whose
    // square roots would otherwise pollute the sum
    const double floor_tol = 1e-13 * std::max(0.0, es.eigenvalues().cwiseAbs().maxCoeff());
    double f = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > floor_tol) f += std::sqrt(es.eigenvalues()(i));
    return std::min(f, 1.0);
}

// F(rho, |psi><psi|) = sqrt(<psi|rho|psi>); fast path for pure targets.
inline double fidelity_to_pure(const Matrix& rho, const Vector& psi) {
    const double v = (psi.adjoint() * rho * psi)(0, 0).real();
    return std::sqrt(std::max(0.0, v));
}

// --- spectrum sweep over the coupling strength (Fig. 2a style) ---

struct SweepRow {
    double g = 0.0;
    int index = 0;
    double energy = 0.0;
    StateClass cls = StateClass::Scattering;
    double localization_metric = 0.0;
};

inline std::vector<SweepRow> spectrum_sweep(const SystemSpec& spec_template,
                                            const std::vector<double>& g_values,
                                            const ClassifyOptions& opts = {}) {
    std::vector<SweepRow> rows;
    for (double g : g_values) {
        if (g < 0.0) throw std::invalid_argument("spectrum_sweep: g must be nonnegative");
        SystemSpec spec = spec_template;
        for (auto& a : spec.atoms) a.g = g;
        auto sys = eigendecompose(spec);
        auto cls = classify_states(sys, spec, opts);
        for (const auto& st : cls.states)
            rows.push_back({g, st.index, st.energy, st.cls, st.localization_metric});
    }
    return rows;
}

}  // namespace gawq
