// lindblad.hpp — Master-equation generator with the collective kernel and
// optional classical drive, plus the trajectory integrator.

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gawq/kernel.hpp"
#include "gawq/model.hpp"
#include "gawq/rk45.hpp"
#include "gawq/spectral.hpp"

namespace gawq {

// Resonant classical drive on one atom, Rabi frequency eta, switched off at t0
// (Heaviside cutoff). Frame: everything rotates at omega_d, so the drive term
// is eta (sigma_target^+ + sigma_target^-) for t < t0 and the atomic detuning
// is Delta = Omega - omega_d.
struct DriveSpec {
    int target_atom = 0;
    double eta = 0.0;
    double omega_d = 0.0;
    double t0 = std::numeric_limits<double>::infinity();
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
    std::map<std::string, std::vector<double>> observables;

    const std::vector<double>& series(const std::string& name) const {
        auto it = observables.find(name);
        if (it == observables.end())
            throw std::invalid_argument("trajectory: no observable named '" + name + "'");
        return it->second;
    }
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// dim = 2^M qubit-space generator:
//   drho/dt = -i[H(t), rho]
//             + sum_ij Gamma_ij (2 s_i rho s_j^+ - s_j^+ s_i rho - rho s_j^+ s_i)
//             + gamma_loc sum_i (s_i rho s_i^+ - 1/2 {s_i^+ s_i, rho})
// with H(t) = Delta sum_i n_i + sum_i J_ii n_i + sum_{i<j} J_ij (s_i^+ s_j + h.c.)
//             + [t < t0] eta (s_target^+ + s_target).
class LindbladGenerator {
public:
    LindbladGenerator(const CouplingKernel& kernel, std::optional<DriveSpec> drive = {},
                      double detuning = 0.0, double local_decay = 0.0)
        : kernel_(kernel), drive_(std::move(drive)), detuning_(detuning), local_decay_(local_decay) {
        const int M = kernel.size();
        n_atoms_ = M;
        dim_ = 1 << M;
        if (drive_ && (drive_->target_atom < 0 || drive_->target_atom >= M))
            throw std::invalid_argument("lindblad_generator: drive target out of range");
        if (drive_ && drive_->eta < 0.0)
            throw std::invalid_argument("lindblad_generator: eta must be >= 0");

        Matrix sm1(2, 2), id = Matrix::Identity(2, 2);
        sm1.setZero();
        sm1(0, 1) = 1.0;  // |g><e| with |g>=0, |e>=1
        for (int i = 0; i < M; ++i) {
            Matrix op = Matrix::Identity(1, 1);
            for (int k = 0; k < M; ++k) {
                const Matrix& factor = (k == i) ? sm1 : id;
                Matrix next(op.rows() * 2, op.cols() * 2);
                for (int r = 0; r < op.rows(); ++r)
                    for (int c = 0; c < op.cols(); ++c)
                        next.block(r * 2, c * 2, 2, 2) = op(r, c) * factor;
                op = std::move(next);
            }
            sm_.push_back(op);
            sp_.push_back(op.adjoint());
        }

        h_static_ = Matrix::Zero(dim_, dim_);
        damping_ = Matrix::Zero(dim_, dim_);
        number_op_ = Matrix::Zero(dim_, dim_);
        for (int i = 0; i < M; ++i) {
            number_op_ += sp_[i] * sm_[i];
            h_static_ += (detuning_ + kernel.lamb(i, i)) * sp_[i] * sm_[i];
            for (int j = 0; j < M; ++j) {
                if (j > i) h_static_ += kernel.lamb(i, j) * (sp_[i] * sm_[j] + sp_[j] * sm_[i]);
                damping_ += kernel.gamma(i, j) * sp_[j] * sm_[i];
            }
        }
        damping_ += 0.5 * local_decay_ * number_op_;
        if (drive_) drive_term_ = drive_->eta * (sp_[drive_->target_atom] + sm_[drive_->target_atom]);
    }

    int n_atoms() const { return n_atoms_; }
    int dim() const { return dim_; }
    const CouplingKernel& kernel() const { return kernel_; }
    double switch_time() const {
        return drive_ ? drive_->t0 : std::numeric_limits<double>::infinity();
    }
    bool drive_active(double t) const { return drive_ && drive_->eta != 0.0 && t < drive_->t0; }

    Matrix hamiltonian(double t) const {
        if (drive_active(t)) return h_static_ + drive_term_;
        return h_static_;
    }

    Matrix rhs(double t, const Matrix& rho) const { return rhs_forced(rho, drive_active(t)); }

    // Segment-frozen form: integrators split at t0 and must not re-sample the
    // Heaviside factor inside a step.
    Matrix rhs_forced(const Matrix& rho, bool with_drive) const {
        Matrix h = h_static_;
        if (with_drive && drive_) h += drive_term_;
        Matrix d = Complex(0.0, -1.0) * (h * rho - rho * h);
        d -= damping_ * rho + rho * damping_;
        for (int i = 0; i < n_atoms_; ++i)
            for (int j = 0; j < n_atoms_; ++j) {
                const double gij = kernel_.gamma(i, j);
                if (gij != 0.0) d += (2.0 * gij) * (sm_[i] * rho * sp_[j]);
            }
        if (local_decay_ != 0.0)
            for (int i = 0; i < n_atoms_; ++i) d += local_decay_ * (sm_[i] * rho * sp_[i]);
        return d;
    }

    double excitation_number(const Matrix& rho) const { return (number_op_ * rho).trace().real(); }

private:
    CouplingKernel kernel_;
    std::optional<DriveSpec> drive_;
    double detuning_ = 0.0;
    double local_decay_ = 0.0;
    int n_atoms_ = 0;
    int dim_ = 0;
    std::vector<Matrix> sm_, sp_;
    Matrix h_static_, drive_term_, damping_, number_op_;
};

inline LindbladGenerator lindblad_generator(const CouplingKernel& kernel,
                                            std::optional<DriveSpec> drive = {},
                                            double detuning = 0.0, double local_decay = 0.0) {
    return LindbladGenerator(kernel, std::move(drive), detuning, local_decay);
}

struct EvolveOptions {
    RK45Options ode;
    double trace_tol = 1e-7;
    double herm_tol = 1e-9;
    double positivity_tol = -1e-8;
    bool record_states = true;
};

// Integrates rho through the time grid, splitting exactly at the drive cutoff
// so no step straddles the discontinuity. Records, per grid point, the state,
// trace, excitation number, and the fidelity to each named pure target.
inline Trajectory evolve(const Matrix& rho0, const LindbladGenerator& gen,
                         const std::vector<double>& t_grid,
                         const std::vector<std::pair<std::string, Vector>>& targets = {},
                         const EvolveOptions& opts = {}) {
    if (t_grid.empty()) throw std::invalid_argument("evolve: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1])
            throw std::invalid_argument("evolve: time grid must be strictly increasing");
    if (t_grid.front() < 0.0) throw std::invalid_argument("evolve: grid must start at t >= 0");
    check_density_matrix(rho0, {1e-10, 1e-8, -1e-8});
    for (const auto& [name, psi] : targets)
        if (psi.size() != gen.dim())
            throw std::invalid_argument("evolve: target '" + name + "' has wrong dimension");

    Trajectory traj;
    auto record = [&](double t, const Matrix& rho) {
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        if (herm > opts.herm_tol)
            throw NumericalError("evolve: Hermiticity drift " + std::to_string(herm) + " at t = " +
                                 std::to_string(t));
        const double tr = rho.trace().real();
        if (std::abs(tr - 1.0) > opts.trace_tol)
            throw NumericalError("evolve: trace drift " + std::to_string(tr - 1.0) + " at t = " +
                                 std::to_string(t));
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < opts.positivity_tol)
            throw NumericalError("evolve: positivity violation " +
                                 std::to_string(es.eigenvalues().minCoeff()) + " at t = " +
                                 std::to_string(t));
        traj.times.push_back(t);
        if (opts.record_states) traj.states.push_back(rho);
        traj.observables["trace"].push_back(tr);
        traj.observables["excitation"].push_back(gen.excitation_number(rho));
        for (const auto& [name, psi] : targets)
            traj.observables["F_" + name].push_back(fidelity_to_pure(rho, psi));
    };

    Matrix rho = rho0;
    double t = t_grid.front();
    double h_carry = 0.0;
    const double t_switch = gen.switch_time();
    auto rhs_on = [&gen](double, const Matrix& r) { return gen.rhs_forced(r, true); };
    auto rhs_off = [&gen](double, const Matrix& r) { return gen.rhs_forced(r, false); };

    record(t, rho);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        double t_next = t_grid[i];
        if (t < t_switch && t_switch < t_next) {
            rk45_integrate(rho, t, t_switch, rhs_on, opts.ode, &h_carry);
            t = t_switch;
            h_carry = 0.0;  // restart step-size control after the discontinuity
        }
        if (t < t_switch)
            rk45_integrate(rho, t, t_next, rhs_on, opts.ode, &h_carry);
        else
            rk45_integrate(rho, t, t_next, rhs_off, opts.ode, &h_carry);
        t = t_next;
        record(t, rho);
    }
    return traj;
}

inline std::vector<double> linspace_grid(double t0, double t1, double dt) {
    if (!(t1 > t0)) return {t0};
    if (!(dt > 0.0)) throw std::invalid_argument("linspace_grid: dt must be > 0");
    std::vector<double> g;
    const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-12)));
    g.reserve(n + 1);
    for (int i = 0; i <= n; ++i) g.push_back(t0 + (t1 - t0) * static_cast<double>(i) / n);
    return g;
}

}  // namespace gawq
