// acceptance.cpp — End-to-end acceptance suite. Each criterion prints one
// PASS/FAIL line with the measured numbers; the process exit code is the
// number of failed criteria.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gawq/gawq.hpp"

#include "oracles.hpp"

using namespace gawq;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::string&)> run;
};

std::string num(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

// ---- 1: kernel prefactor calibration against the exact oracle ----
bool criterion_calibration(std::string& detail) {
    auto res = calibrate_kernel(0.1, 8, 50.0, 0.1);
    const bool pass = res.max_abs_diff <= 0.01 && std::abs(res.ratio - 1.0) <= 0.02;
    auto weak = calibrate_kernel(0.02, 8, 50.0, 0.1);
    detail = "g=0.1: max|P_exact-P_master| = " + num(res.max_abs_diff) +
             " (required <= 0.01), fitted/nominal prefactor = " + num(res.ratio) +
             " (required within 2%); retardation offset scales as g^2 "
             "[Markov-limit check at g=0.02: gap " +
             num(weak.max_abs_diff) + ", ratio " + num(weak.ratio) + "]";
    return pass;
}

// ---- 2: BIC/BOC census ----
bool criterion_census(std::string& detail) {
    bool pass = true;
    std::ostringstream out;
    for (auto name : {ConfigName::braided2, ConfigName::separate2, ConfigName::nested2}) {
        auto cfg = named_configuration(name);
        auto cls = classify_states(eigendecompose(cfg.spec), cfg.spec);
        int bic = 0, boc = 0;
        for (const auto& st : cls.states) {
            if (st.cls == StateClass::BIC) ++bic;
            if (st.cls == StateClass::BOC_above || st.cls == StateClass::BOC_below) ++boc;
        }
        out << to_string(name) << ": " << bic << " BIC, " << boc << " BOC; ";
        if (bic != 1 || boc != 2) pass = false;
    }
    detail = out.str() + "(required: exactly 1 BIC and 2 BOC each)";
    return pass;
}

// ---- 3: BIC -> Bell fidelity ----
bool criterion_bic_fidelity(std::string& detail) {
    auto cfg = named_configuration(ConfigName::braided2);
    auto sys = eigendecompose(cfg.spec);
    auto cls = classify_states(sys, cfg.spec);
    for (const auto& st : cls.states) {
        if (st.cls != StateClass::BIC) continue;
        auto state = sys.state(st.index);
        const double f =
            std::abs((bell_state().adjoint() * projected_atomic_state(state, 2))(0, 0));
        const double f_trace = fidelity_to_pure(reduced_atomic_density(state, 2), bell_state());
        detail = "F(projected rho_BIC, Bell) = " + num(f, 10) + " (required >= 0.99); photonic weight = " +
                 num(1.0 - st.atomic_weight) + ", partial-trace fidelity = " + num(f_trace);
        return f >= 0.99;
    }
    detail = "no BIC found";
    return false;
}

// ---- 4: disorder robustness ----
bool criterion_disorder(std::string& detail) {
    auto cfg = named_configuration(ConfigName::braided2);
    DisorderSpec d;
    d.n_realizations = 50;
    d.master_seed = 20260809ULL;
    double mean[2], stdev[2], se[2];
    int flagged[2];
    for (int k = 0; k < 2; ++k) {
        d.kind = k == 0 ? DisorderKind::onsite : DisorderKind::hopping;
        auto rows = disorder_fidelity_scan(cfg.spec, d, {0.2});
        mean[k] = rows[0].mean_f;
        stdev[k] = rows[0].std_f;
        se[k] = rows[0].n_used > 0 ? rows[0].std_f / std::sqrt(rows[0].n_used) : 1e9;
        flagged[k] = rows[0].n_flagged;
    }
    const double se_diff = std::sqrt(se[0] * se[0] + se[1] * se[1]);
    const bool pass =
        mean[0] >= 0.96 && mean[1] >= 0.96 && mean[1] >= mean[0] - 2.0 * se_diff;
    detail = "delta=0.2: onsite mean = " + num(mean[0], 8) + " +- " + num(stdev[0]) +
             ", hopping mean = " + num(mean[1], 8) + " +- " + num(stdev[1]) + ", flagged " +
             std::to_string(flagged[0]) + "/" + std::to_string(flagged[1]) +
             " (required: both >= 0.96, hopping >= onsite within 2 SE)";
    return pass;
}

// ---- 5: BIC stability (fig 3) ----
bool criterion_stability(std::string& detail) {
    auto cfg = named_configuration(ConfigName::braided2);
    auto kernel = coupling_matrix(cfg.spec);
    LindbladGenerator gen(kernel);
    auto grid = linspace_grid(0.0, 1000.0, 1.0);

    Matrix rho_bell = bell_state() * bell_state().adjoint();
    auto traj = evolve(rho_bell, gen, grid, {{"bell", bell_state()}});
    double max_dev = 0.0;
    for (double f : traj.series("F_bell")) max_dev = std::max(max_dev, std::abs(f - 1.0));

    auto sys = eigendecompose(cfg.spec);
    auto sel = select_scattering_state(sys, cfg.spec, cfg.spec.waveguide.omega_c + 1.0);
    Matrix rho_s = sel.projected * sel.projected.adjoint();
    auto traj_s = evolve(rho_s, gen, linspace_grid(0.0, 50.0, 0.25), {{"init", sel.projected}});
    const double f_final = traj_s.series("F_init").back();

    detail = "Bell-initialized max|F-1| = " + num(max_dev) +
             " over [0,1000] (required <= 1e-6); scattering-initialized F(end) = " + num(f_final) +
             " (required < 0.1, state E = " + num(sel.energy) + ")";
    return max_dev <= 1e-6 && f_final < 0.1;
}

// ---- 6: Bell protocol timings and fidelities ----
bool criterion_bell_protocol(std::string& detail) {
    auto cfg = named_configuration(ConfigName::braided2);
    ProtocolOptions weak;
    weak.eta = 0.01;
    auto r1 = bell_protocol(cfg, weak);
    ProtocolOptions strong;
    strong.eta = 0.05;
    auto r5 = bell_protocol(cfg, strong);
    const bool tmax_ok = r1.t_max >= 223.0 * 0.95 && r1.t_max <= 223.0 * 1.05;
    const bool pass = tmax_ok && r1.f_max >= 0.99 && r1.f_final >= 0.99 && r5.f_final >= 0.95 &&
                      r5.t_max < r1.t_max;
    detail = "eta=0.01: t_max = " + num(r1.t_max, 7) + " (required 223 +- 5%), F_max = " +
             num(r1.f_max, 8) + ", F(2000) = " + num(r1.f_final, 8) +
             " (required >= 0.99); eta=0.05: F(2000) = " + num(r5.f_final, 8) +
             " (required >= 0.95), t_max = " + num(r5.t_max, 7);
    return pass;
}

// ---- 7: separate and nested Bell generation ----
bool criterion_other_configs(std::string& detail) {
    bool pass = true;
    std::ostringstream out;
    for (auto name : {ConfigName::separate2, ConfigName::nested2}) {
        ProtocolOptions opts;
        opts.eta = 0.01;
        auto res = bell_protocol(named_configuration(name), opts);
        out << to_string(name) << ": F(2000) = " << num(res.f_final, 8)
            << " (t_max = " << num(res.t_max, 7) << "); ";
        if (res.f_final < 0.98) pass = false;
    }
    detail = out.str() + "(required: >= 0.98 both)";
    return pass;
}

// ---- 8: W protocol ----
bool criterion_w_protocol(std::string& detail) {
    auto cfg = named_configuration(ConfigName::braided3);
    ProtocolOptions weak;
    weak.eta = 0.01;
    auto r1 = w_protocol(cfg, weak);
    ProtocolOptions strong;
    strong.eta = 0.05;
    auto r5 = w_protocol(cfg, strong);

    auto kernel = coupling_matrix(cfg.spec);
    LindbladGenerator gen(kernel);
    Matrix rho_w = w_state() * w_state().adjoint();
    auto traj = evolve(rho_w, gen, linspace_grid(0.0, 300.0, 1.0), {{"w", w_state()}});
    const double f_forced = traj.series("F_w").back();

    const bool pass = r1.f_final >= 0.85 && r5.f_final >= 0.85 &&
                      std::abs(r1.f_final - r5.f_final) < 0.02 &&
                      std::abs(f_forced - 8.0 / 9.0) <= 1e-3;
    detail = "F_W(2000): eta=0.01 -> " + num(r1.f_final, 8) + ", eta=0.05 -> " +
             num(r5.f_final, 8) + " (required >= 0.85, difference < 0.02); forced-W release -> " +
             num(f_forced, 10) + " vs 8/9 = " + num(8.0 / 9.0, 10) + " (required +- 1e-3)";
    return pass;
}

// ---- 9: invariant battery ----
bool criterion_invariants(std::string& detail) {
    std::ostringstream out;
    bool pass = true;

    // Gamma PSD and exact dark annihilation
    for (auto name : {ConfigName::braided2, ConfigName::separate2, ConfigName::nested2,
                      ConfigName::braided3}) {
        auto k = coupling_matrix(named_configuration(name).spec);
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(k.gamma);
        if (es.eigenvalues().minCoeff() < -1e-10) {
            pass = false;
            out << to_string(name) << ": Gamma not PSD; ";
        }
        if (name != ConfigName::braided3) {
            Eigen::Vector2d ones(1.0, 1.0);
            if ((k.gamma * ones).cwiseAbs().maxCoeff() != 0.0 || k.lamb(0, 1) != 0.0) {
                pass = false;
                out << to_string(name) << ": dark annihilation not exact; ";
            }
        }
    }

    // trajectory invariants from a driven + released run and a mixed state
    auto cfg = named_configuration(ConfigName::braided2);
    LindbladGenerator gen(coupling_matrix(cfg.spec), DriveSpec{0, 0.05, 0.0, 20.0});
    std::mt19937_64 rng(5);
    double worst_trace = 0.0, worst_herm = 0.0, worst_eig = 0.0;
    for (const Matrix& rho0 :
         {Matrix(basis_state(excited_index(0, 2), 2) * basis_state(excited_index(0, 2), 2).adjoint()),
          testing::random_density(4, rng)}) {
        auto traj = evolve(rho0, gen, linspace_grid(0.0, 200.0, 1.0));
        for (const auto& rho : traj.states) {
            worst_trace = std::max(worst_trace, std::abs(rho.trace().real() - 1.0));
            worst_herm = std::max(worst_herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
            Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
            worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff());
        }
    }
    if (worst_trace > 1e-9 || worst_herm > 1e-9 || worst_eig < -1e-8) pass = false;

    // Uhlmann symmetry and pure-state consistency
    double worst_sym = 0.0, worst_pure = 0.0;
    for (int rep = 0; rep < 25; ++rep) {
        Matrix a = testing::random_density(4, rng);
        Matrix b = testing::random_density(4, rng);
        worst_sym = std::max(worst_sym, std::abs(uhlmann_fidelity(a, b) - uhlmann_fidelity(b, a)));
        Vector psi = testing::random_pure(4, rng);
        worst_pure = std::max(worst_pure, std::abs(uhlmann_fidelity(a, psi * psi.adjoint()) -
                                                   fidelity_to_pure(a, psi)));
    }
    if (worst_sym > 1e-10 || worst_pure > 1e-10) pass = false;

    detail = out.str() + "trajectory worst: |trace-1| = " + num(worst_trace) + ", herm = " +
             num(worst_herm) + ", min eig = " + num(worst_eig) +
             "; uhlmann worst: symmetry = " + num(worst_sym) + ", pure = " + num(worst_pure);
    return pass;
}

// ---- 10: determinism ----
bool criterion_determinism(std::string& detail) {
    const fs::path root = fs::temp_directory_path() / "gawq_acceptance_det";
    fs::remove_all(root);
    auto read = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool pass = true;
    std::ostringstream out;
    for (const std::string fig : {"fig3", "fig2a"}) {
        reproduce_figure(fig, root / "a", 12345);
        reproduce_figure(fig, root / "b", 12345);
        for (const auto& entry : fs::directory_iterator(root / "a" / fig)) {
            if (entry.path().extension() != ".csv") continue;
            const std::string fa = read(entry.path());
            const std::string fb = read(root / "b" / fig / entry.path().filename());
            const bool same = !fa.empty() && fa == fb;
            out << fig << "/" << entry.path().filename().string() << (same ? " identical; " : " DIFFERS; ");
            if (!same) pass = false;
        }
    }
    fs::remove_all(root);
    detail = out.str() + "(identical config + seed must give byte-identical CSVs)";
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> criteria = {
        {1, "kernel calibration vs exact oracle", criterion_calibration},
        {2, "BIC census (1 BIC, 2 BOC per two-atom config)", criterion_census},
        {3, "BIC-Bell fidelity", criterion_bic_fidelity},
        {4, "disorder robustness at delta = 0.2", criterion_disorder},
        {5, "BIC stability vs scattering decay", criterion_stability},
        {6, "Bell protocol (braided)", criterion_bell_protocol},
        {7, "Bell protocol (separate, nested)", criterion_other_configs},
        {8, "W protocol", criterion_w_protocol},
        {9, "invariant battery", criterion_invariants},
        {10, "deterministic CSV output", criterion_determinism},
    };

    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
    }

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << " (" << c.name
                  << "): " << detail << "\n";
    }
    return failures;
}
