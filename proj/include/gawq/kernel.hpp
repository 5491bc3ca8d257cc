// kernel.hpp — Collective coupling kernel A_ij of the Markovian master
// equation, evaluated at band-center resonance (k0 = pi/2).

#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gawq/model.hpp"

namespace gawq {

// A_ij = (g_i g_j / 2 xi) sum_{p in legs_i, q in legs_j} e^{i (pi/2) |p-q|}.
// Gamma = Re A drives collective decay (excited population of a single atom
// decays at 2 Gamma_ii); J = Im A holds Lamb shifts and exchange couplings.
// Phase factors are evaluated exactly as i^{|p-q| mod 4}, so kernel entries
// for integer leg spacings are exact integer multiples of g_i g_j / (2 xi).
struct CouplingKernel {
    Matrix A;
    RealMatrix gamma;
    RealMatrix lamb;

    int size() const { return static_cast<int>(A.rows()); }
};

namespace detail {

inline Complex quarter_phase(int distance) {
    switch (std::abs(distance) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace detail

inline CouplingKernel coupling_matrix(const std::vector<GiantAtomSpec>& atoms, double xi,
                                      double omega_c) {
    if (atoms.empty()) throw std::invalid_argument("coupling_matrix: no atoms");
    if (!(xi > 0.0)) throw std::invalid_argument("coupling_matrix: xi must be > 0");
    for (const auto& a : atoms)
        if (std::abs(a.omega - omega_c) > 1e-12)
            throw std::invalid_argument(
                "coupling_matrix: kernel valid only at band-center resonance (atom with Omega != omega_c)");

    const int M = static_cast<int>(atoms.size());
    CouplingKernel k;
    k.A = Matrix::Zero(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            Complex sum = 0.0;
            for (int p : atoms[i].legs)
                for (int q : atoms[j].legs) sum += detail::quarter_phase(p - q);
            k.A(i, j) = atoms[i].g * atoms[j].g / (2.0 * xi) * sum;
        }
    k.gamma = k.A.real();
    k.lamb = k.A.imag();
    return k;
}

inline CouplingKernel coupling_matrix(const SystemSpec& spec) {
    return coupling_matrix(spec.atoms, spec.waveguide.xi, spec.waveguide.omega_c);
}

// Orthonormal basis of the decay-free (dark) subspace: eigenvectors of Gamma
// with eigenvalue below tol relative to the largest one.
inline RealMatrix dark_subspace(const CouplingKernel& k, double tol = 1e-12) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(k.gamma);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    int count = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) < tol * scale) ++count;
    RealMatrix basis(k.size(), count);
    int c = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) < tol * scale) basis.col(c++) = es.eigenvectors().col(i);
    return basis;
}

}  // namespace gawq
