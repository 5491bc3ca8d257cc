// gawq_cli.cpp — Command-line front end: config parsing, subcommand dispatch,
// deterministic seeding and CSV/JSON output.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gawq/gawq.hpp"

namespace fs = std::filesystem;
using namespace gawq;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
};

Json load_config(const GlobalArgs& args) {
    Json doc = Json::object();
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw ConfigError("config file not found: " + args.config_path);
        try {
            in >> doc;
        } catch (const Json::exception& e) {
            throw ConfigError("config parse error: " + std::string(e.what()));
        }
    }
    for (const auto& kv : args.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got: " + kv);
        apply_override(doc, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed) doc["seed"] = *args.seed;
    return doc;
}

Json resolved_config_json(const RunConfig& rc) {
    Json out = rc.doc;
    if (rc.has_spec()) {
        const SystemSpec spec = rc.resolve_spec();
        Json w;
        w["n_sites"] = spec.waveguide.n_sites;
        w["omega_c"] = spec.waveguide.omega_c;
        w["xi"] = spec.waveguide.xi;
        w["boundary"] = to_string(spec.waveguide.boundary);
        Json atoms = Json::array();
        for (const auto& a : spec.atoms) {
            Json ja;
            ja["omega"] = a.omega;
            ja["legs"] = a.legs;
            ja["g"] = a.g;
            atoms.push_back(ja);
        }
        out["resolved_system"] = {{"waveguide", w}, {"atoms", atoms}};
    }
    out["seed"] = rc.seed;
    return out;
}

void finalize(const std::string& subcommand, const RunConfig& rc, const fs::path& dir,
              std::vector<std::string> files, const WallClock& clock) {
    write_metadata(dir, make_metadata(subcommand, resolved_config_json(rc), rc.seed, files,
                                      clock.seconds()));
}

Matrix initial_state(const std::string& name, int M) {
    const int dim = 1 << M;
    Vector psi;
    if (name == "ground") {
        psi = basis_state(0, M);
    } else if (name == "bell" && M == 2) {
        psi = bell_state();
    } else if (name == "antisym_bell" && M == 2) {
        psi = antisymmetric_bell_state();
    } else if (name == "w" && M == 3) {
        psi = w_state();
    } else if (name.rfind("excited", 0) == 0) {
        const int atom = std::stoi(name.substr(7));
        if (atom < 0 || atom >= M) throw ConfigError("initial state atom index out of range");
        psi = basis_state(excited_index(atom, M), M);
    } else {
        throw ConfigError("unknown initial state '" + name + "' for " + std::to_string(M) + " atoms");
    }
    Matrix rho = psi * psi.adjoint();
    (void)dim;
    return rho;
}

int run_spectrum(const RunConfig& rc, const fs::path& dir) {
    WallClock clock;
    const SystemSpec spec = rc.resolve_spec();
    const double g_min = rc.exp_num("g_min", 0.0);
    const double g_max = rc.exp_num("g_max", 1.0);
    const int steps = rc.exp_int("g_steps", 41);
    std::vector<double> grid;
    for (int i = 0; i < steps; ++i)
        grid.push_back(steps == 1 ? g_min : g_min + (g_max - g_min) * i / (steps - 1));
    auto rows = spectrum_sweep(spec, grid, rc.classify_options());

    CsvTable table;
    table.header = {"g", "index", "energy", "class", "localization_metric"};
    for (const auto& r : rows) {
        auto& row = table.add_row();
        row = {format_number(r.g), format_number(r.index), format_number(r.energy),
               to_string(r.cls), format_number(r.localization_metric)};
    }
    write_csv(dir / "spectrum.csv", table);
    finalize("spectrum", rc, dir, {(dir / "spectrum.csv").string()}, clock);
    std::cout << "spectrum: " << rows.size() << " rows over " << steps << " coupling values -> "
              << (dir / "spectrum.csv").string() << "\n";
    return 0;
}

int run_bic(const RunConfig& rc, const fs::path& dir) {
    WallClock clock;
    const SystemSpec spec = rc.resolve_spec();
    const int M = spec.atom_count();
    auto sys = eigendecompose(spec);
    auto cls = classify_states(sys, spec, rc.classify_options());

    CsvTable table;
    table.header = {"index", "energy", "class", "localization_metric", "atomic_weight"};
    for (const auto& st : cls.states) {
        auto& row = table.add_row();
        row = {format_number(st.index), format_number(st.energy), to_string(st.cls),
               format_number(st.localization_metric), format_number(st.atomic_weight)};
    }
    write_csv(dir / "states.csv", table);

    const ClassifiedState* best = nullptr;
    for (const auto& st : cls.states)
        if (st.cls == StateClass::BIC && (!best || st.localization_metric > best->localization_metric))
            best = &st;
    if (!best) {
        std::cout << "bic: no bound state in the continuum found\n";
        finalize("bic", rc, dir, {(dir / "states.csv").string()}, clock);
        return 0;
    }
    auto state = sys.state(best->index);
    const Vector target = M == 3 ? w_state() : bell_state();
    const Vector projected = projected_atomic_state(state, M);
    const Matrix reduced = reduced_atomic_density(state, M);
    const double f_projected = std::abs((target.adjoint() * projected)(0, 0));
    const double f_trace = fidelity_to_pure(reduced, target);

    std::cout << "bic: energy = " << format_number(best->energy)
              << ", localization_metric = " << format_number(best->localization_metric)
              << ", photonic_weight = " << format_number(1.0 - best->atomic_weight) << "\n"
              << "     F(projected atomic state, target) = " << format_number(f_projected) << "\n"
              << "     F(partial-trace density, target)  = " << format_number(f_trace) << "\n";
    finalize("bic", rc, dir, {(dir / "states.csv").string()}, clock);
    return 0;
}

int run_disorder(const RunConfig& rc, const fs::path& dir) {
    WallClock clock;
    const SystemSpec spec = rc.resolve_spec();
    DisorderSpec d = parse_disorder(rc);
    std::vector<double> delta_grid;
    if (rc.doc.contains("disorder") && rc.doc.at("disorder").contains("delta_grid"))
        delta_grid = rc.doc.at("disorder").at("delta_grid").get<std::vector<double>>();
    else
        delta_grid = {d.delta};
    auto rows = disorder_fidelity_scan(spec, d, delta_grid, rc.classify_options());

    CsvTable table;
    table.header = {"delta", "kind", "mean_F", "std_F", "n_used", "n_flagged"};
    for (const auto& r : rows) {
        auto& row = table.add_row();
        row = {format_number(r.delta), to_string(r.kind),       format_number(r.mean_f),
               format_number(r.std_f), format_number(r.n_used), format_number(r.n_flagged)};
        std::cout << "disorder: delta = " << format_number(r.delta) << " " << to_string(r.kind)
                  << ": mean_F = " << format_number(r.mean_f) << " +- " << format_number(r.std_f)
                  << " (n = " << r.n_used << ", flagged " << r.n_flagged << ")\n";
    }
    write_csv(dir / "disorder.csv", table);
    finalize("disorder", rc, dir, {(dir / "disorder.csv").string()}, clock);
    return 0;
}

int run_evolve(const RunConfig& rc, const fs::path& dir) {
    WallClock clock;
    const SystemSpec spec = rc.resolve_spec();
    const int M = spec.atom_count();
    auto kernel = coupling_matrix(spec);

    std::optional<DriveSpec> drive;
    if (rc.doc.contains("drive")) {
        const auto& j = rc.doc.at("drive");
        DriveSpec ds;
        ds.target_atom = detail::get_or<int>(j, "target_atom", 0);
        ds.eta = detail::get_or<double>(j, "eta", 0.0);
        ds.omega_d = detail::get_or<double>(j, "omega_d", spec.atoms.front().omega);
        if (j.contains("t0") && j.at("t0").is_string())
            throw ConfigError("evolve integrates a given drive as-is; use bell/wstate for t0 = \"auto\"");
        auto t0 = rc.drive_duration(j);
        if (t0) ds.t0 = *t0;
        drive = ds;
    }
    const double detuning = spec.atoms.front().omega - (drive ? drive->omega_d : spec.atoms.front().omega);
    LindbladGenerator gen(kernel, drive, detuning, rc.exp_num("local_decay", 0.0));

    Matrix rho0 = initial_state(rc.exp_str("initial", "ground"), M);
    std::vector<std::pair<std::string, Vector>> targets;
    if (M == 2) targets.emplace_back("bell", bell_state());
    if (M == 3) targets.emplace_back("w", w_state());

    auto grid = linspace_grid(0.0, rc.exp_num("t_end", 100.0), rc.exp_num("grid_dt", 0.5));
    auto traj = evolve(rho0, gen, grid, targets);

    CsvTable table;
    table.header = {"t"};
    std::vector<std::string> names;
    for (const auto& [name, _] : traj.observables) names.push_back(name);
    for (const auto& n : names) table.header.push_back(n);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        auto& row = table.add_row();
        row.push_back(format_number(traj.times[i]));
        for (const auto& n : names) row.push_back(format_number(traj.observables.at(n)[i]));
    }
    write_csv(dir / "trajectory.csv", table);
    std::vector<std::string> files{(dir / "trajectory.csv").string()};

    if (rc.experiment().contains("dump_states") && rc.experiment().at("dump_states").get<bool>()) {
        Json snaps = Json::array();
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            Json s;
            s["t"] = traj.times[i];
            Json re = Json::array(), im = Json::array();
            const Matrix& rho = traj.states[i];
            for (int r = 0; r < rho.rows(); ++r) {
                Json rr = Json::array(), ri = Json::array();
                for (int c = 0; c < rho.cols(); ++c) {
                    rr.push_back(rho(r, c).real());
                    ri.push_back(rho(r, c).imag());
                }
                re.push_back(rr);
                im.push_back(ri);
            }
            s["rho_re"] = re;
            s["rho_im"] = im;
            snaps.push_back(s);
        }
        std::ofstream out(dir / "states.json", std::ios::binary);
        out << snaps.dump(2) << '\n';
        files.push_back((dir / "states.json").string());
    }
    finalize("evolve", rc, dir, files, clock);
    std::cout << "evolve: " << traj.times.size() << " samples -> "
              << (dir / "trajectory.csv").string() << "\n";
    return 0;
}

int run_protocol(const RunConfig& rc, const fs::path& dir, bool wstate_mode) {
    WallClock clock;
    const SystemSpec spec = rc.resolve_spec();
    NamedConfiguration cfg;
    cfg.name = rc.preset.value_or(wstate_mode ? ConfigName::braided3 : ConfigName::braided2);
    cfg.spec = spec;

    ProtocolOptions opts;
    opts.eta = rc.exp_num("eta", 0.01);
    opts.t_end = rc.exp_num("t_end", 2000.0);
    opts.grid_dt = rc.exp_num("grid_dt", 1.0);
    opts.local_decay = rc.exp_num("local_decay", 0.0);
    opts.search.coarse_step = rc.exp_num("coarse_step", 1.0);
    opts.search.refine_tol = rc.exp_num("refine_tol", 0.1);
    opts.search.window = rc.exp_num("search_window", 0.0);
    opts.t0 = rc.drive_duration(rc.experiment());

    auto res = wstate_mode ? w_protocol(cfg, opts) : bell_protocol(cfg, opts);

    CsvTable table;
    const std::string fcol = "F_" + res.target_name;
    table.header = {"t", fcol, "excitation"};
    for (std::size_t i = 0; i < res.trajectory.times.size(); ++i) {
        auto& row = table.add_row();
        row = {format_number(res.trajectory.times[i]), format_number(res.trajectory.series(fcol)[i]),
               format_number(res.trajectory.series("excitation")[i])};
    }
    write_csv(dir / "protocol.csv", table);
    finalize(wstate_mode ? "wstate" : "bell", rc, dir, {(dir / "protocol.csv").string()}, clock);
    std::cout << (wstate_mode ? "wstate" : "bell") << ": config = " << res.config_name
              << ", eta = " << format_number(res.eta) << ", t_max = " << format_number(res.t_max)
              << ", F_max = " << format_number(res.f_max)
              << ", F_final = " << format_number(res.f_final) << "\n";
    return 0;
}

int run_calibrate(const RunConfig& rc, const fs::path& dir) {
    WallClock clock;
    auto res = calibrate_kernel(rc.exp_num("g", 0.1), rc.exp_int("leg_spacing", 8),
                                rc.exp_num("oracle_t_end", 50.0), rc.exp_num("grid_dt", 0.1));
    CsvTable table;
    table.header = {"t", "P_exact", "P_master"};
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        auto& row = table.add_row();
        row = {format_number(res.times[i]), format_number(res.p_exact[i]),
               format_number(res.p_master[i])};
    }
    write_csv(dir / "calibration.csv", table);
    finalize("calibrate", rc, dir, {(dir / "calibration.csv").string()}, clock);
    std::cout << "calibrate: fitted prefactor = " << format_number(res.fitted_prefactor)
              << ", nominal g^2/(2 xi) = " << format_number(res.nominal_prefactor)
              << ", ratio = " << format_number(res.ratio)
              << ", max |P_exact - P_master| = " << format_number(res.max_abs_diff) << "\n";
    return 0;
}

int run_figure(const RunConfig& rc, const fs::path& out_root, const std::string& name) {
    WallClock clock;
    auto files = reproduce_figure(name, out_root, rc.seed);
    std::cout << "figure " << name << ": " << files.size() << " files under "
              << (out_root / name).string() << "\n";
    (void)clock;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gawq — giant atoms in a coupled-resonator waveguide: spectra, master-equation "
                 "dynamics, entangling protocols and disorder scans (units: xi = 1)"};
    app.require_subcommand(1);
    GlobalArgs args;
    app.add_option("--config", args.config_path, "JSON configuration file");
    app.add_option("--out", args.out_dir, "output directory (default: out)");
    app.add_option("--set", args.overrides, "override config entries, key=value (repeatable)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the RNG master seed");
    app.fallthrough();

    std::string figure_name;
    auto* sub_spectrum = app.add_subcommand("spectrum", "eigenvalue sweep over coupling strength");
    auto* sub_bic = app.add_subcommand("bic", "classify states, report the BIC and its fidelities");
    auto* sub_disorder = app.add_subcommand("disorder", "Monte-Carlo disorder fidelity scan");
    auto* sub_evolve = app.add_subcommand("evolve", "integrate the master equation");
    auto* sub_bell = app.add_subcommand("bell", "drive-and-release Bell-state protocol");
    auto* sub_wstate = app.add_subcommand("wstate", "drive-and-release W-state protocol");
    auto* sub_calibrate = app.add_subcommand("calibrate", "kernel prefactor check against the exact oracle");
    auto* sub_figure = app.add_subcommand("figure", "reproduce a figure dataset");
    sub_figure->add_option("name", figure_name, "figure name (fig2a ... fig6c)")->required();

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) args.seed = seed_value;

    try {
        const Json doc = load_config(args);
        const RunConfig rc = parse_run_config(doc);
        const fs::path out_dir(args.out_dir);
        std::filesystem::create_directories(out_dir);

        if (sub_spectrum->parsed()) return run_spectrum(rc, out_dir);
        if (sub_bic->parsed()) return run_bic(rc, out_dir);
        if (sub_disorder->parsed()) return run_disorder(rc, out_dir);
        if (sub_evolve->parsed()) return run_evolve(rc, out_dir);
        if (sub_bell->parsed()) return run_protocol(rc, out_dir, false);
        if (sub_wstate->parsed()) return run_protocol(rc, out_dir, true);
        if (sub_calibrate->parsed()) return run_calibrate(rc, out_dir);
        if (sub_figure->parsed()) return run_figure(rc, out_dir, figure_name);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
