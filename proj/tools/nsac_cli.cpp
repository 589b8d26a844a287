// nsac_cli.cpp — command-line driver: simulate, sweep, validate-calibration, report
//
// Exit codes: 0 success, 2 configuration error, 3 solver divergence,
// 4 acceptance-check failure (with --assert).

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsac/calibration.hpp"
#include "nsac/harness.hpp"

namespace {

std::vector<double> parse_eps_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool assert_checks) {
    nsac::RunConfig cfg = nsac::parse_config_file(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    for (const auto& w : cfg.validate()) std::cerr << "warning: " << w << '\n';

    nsac::RunResult res = nsac::run_simulation(cfg);
    nsac::GronwallFit gf = nsac::gronwall_fit(res.snapshots, res.dt);

    std::cout << "steps=" << res.steps << " dt=" << nsac::format_double(res.dt) << '\n';
    std::cout << "E(0)+E_vol(0)=" << nsac::format_double(res.E0_plus_Evol0()) << '\n';
    const auto& last = res.snapshots.back().rec;
    std::cout << "E(T)=" << nsac::format_double(last.E)
              << " E_vol(T)=" << nsac::format_double(last.E_vol)
              << " L1_err(T)=" << nsac::format_double(last.L1_err)
              << " L2_vel(T)=" << nsac::format_double(last.L2_vel) << '\n';
    std::cout << "gronwall C_hat=" << nsac::format_double(gf.C_hat)
              << " envelope_violation=" << nsac::format_double(gf.max_violation) << '\n';
    std::cout << "max|div v|=" << nsac::format_double(res.max_divergence)
              << " max|phi|=" << nsac::format_double(res.max_abs_phi)
              << " dissipation_violations=" << res.dissipation_violations << '\n';
    std::cout << "energy_inequality_defect=" << nsac::format_double(res.energy_inequality_defect)
              << " bridge_C=" << nsac::format_double(res.bridge_C) << '\n';

    if (assert_checks) {
        bool ok = true;
        double worst_radius = 0.0;
        for (const auto& sd : res.snapshots)
            worst_radius = std::max(worst_radius, std::abs(sd.radius_measured - sd.radius_exact));
        if (worst_radius > 3.0 * cfg.eps) ok = false;
        if (res.dissipation_violations > 0) ok = false;
        if (res.max_abs_phi > 1.0 + 1e-3) ok = false;
        if (gf.max_violation > 1e-12) ok = false;
        std::cout << "radius_max_error=" << nsac::format_double(worst_radius)
                  << " bound=" << nsac::format_double(3.0 * cfg.eps) << '\n';
        if (!ok) {
            std::cerr << "acceptance checks failed\n";
            return 4;
        }
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& eps_csv,
              const std::string& out_dir, bool assert_checks, bool serial) {
    nsac::RunConfig cfg = nsac::parse_config_file(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    std::vector<double> eps_list = parse_eps_list(eps_csv);
    nsac::SweepResult sw = nsac::sweep_epsilon(cfg, eps_list, !serial);
    for (const auto& f : sw.failures) std::cerr << "run failed: " << f << '\n';
    auto show = [](const nsac::RateTable& t) {
        std::cout << t.name << ": slope=" << nsac::format_double(t.slope)
                  << " r2=" << nsac::format_double(t.r2) << (t.saturated ? " (saturated)" : "")
                  << '\n';
        for (const auto& r : t.rows)
            std::cout << "  eps=" << nsac::format_double(r.first) << " -> "
                      << nsac::format_double(r.second) << '\n';
    };
    show(sw.l1_rate);
    show(sw.e0_rate);
    show(sw.l2_vel_rate);
    if (!sw.failures.empty()) return 3;
    if (assert_checks) {
        bool ok = true;
        if (!(sw.l1_rate.slope >= 0.8 && sw.l1_rate.slope <= 1.3 && sw.l1_rate.r2 >= 0.95))
            ok = false;
        if (!(sw.e0_rate.slope >= 1.7 && sw.e0_rate.slope <= 2.3)) ok = false;
        if (!sw.l2_vel_rate.saturated && !(sw.l2_vel_rate.slope >= 0.8)) ok = false;
        if (!ok) {
            std::cerr << "acceptance rate checks failed\n";
            return 4;
        }
    }
    return 0;
}

int cmd_validate_calibration(const std::string& config_path, const std::string& out_dir) {
    nsac::RunConfig cfg = nsac::parse_config_file(config_path);
    cfg.validate();
    nsac::Grid2D grid(cfg.n, cfg.bc);
    nsac::CircleReference ref = cfg.reference();
    const double t0 = 0.25 * cfg.t_ext();
    const double dt_probe = 1e-5 * cfg.t_ext();
    nsac::CalibrationSnapshot snap = nsac::build_calibration(ref, t0, cfg.delta, grid);
    nsac::CalibrationSnapshot snap_next = nsac::build_calibration(ref, t0 + dt_probe, cfg.delta, grid);
    nsac::ConditionReport rep = nsac::validate_calibration(snap, snap_next, ref, grid);
    for (const auto& row : rep.rows)
        std::cout << row.condition_id << ": C_meas=" << nsac::format_double(row.measured_constant)
                  << " max_residual=" << nsac::format_double(row.max_residual) << '\n';
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        rep.write_csv(out_dir + "/calibration_conditions.csv");
        std::cout << "wrote " << out_dir << "/calibration_conditions.csv\n";
    }
    return 0;
}

int cmd_report(const std::string& in_dir) {
    const auto files = nsac::render_report(in_dir);
    for (const auto& f : files) std::cout << "wrote " << in_dir << '/' << f << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Navier-Stokes/Allen-Cahn phase-field laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir, in_dir, eps_csv = "0.16,0.08,0.04";
    bool assert_checks = false, serial = false;

    auto* sim = app.add_subcommand("simulate", "run one simulation with diagnostics");
    sim->add_option("--config", config_path, "run config (key=value lines)")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_flag("--assert", assert_checks, "exit 4 when acceptance checks fail");

    auto* sweep = app.add_subcommand("sweep", "epsilon sweep with rate fitting");
    sweep->add_option("--config", config_path, "run config (key=value lines)")->required();
    sweep->add_option("--eps", eps_csv, "comma-separated eps list, decreasing");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_flag("--assert", assert_checks, "exit 4 when acceptance checks fail");
    sweep->add_flag("--serial", serial, "run members serially instead of concurrently");

    auto* val = app.add_subcommand("validate-calibration", "check the (xi,B,theta) conditions");
    val->add_option("--config", config_path, "run config (key=value lines)")->required();
    val->add_option("--out", out_dir, "output directory");

    auto* rep = app.add_subcommand("report", "render summary CSV and SVG plots");
    rep->add_option("--in", in_dir, "directory with diagnostics/rates CSVs")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, assert_checks);
        if (sweep->parsed()) return cmd_sweep(config_path, eps_csv, out_dir, assert_checks, serial);
        if (val->parsed()) return cmd_validate_calibration(config_path, out_dir);
        if (rep->parsed()) return cmd_report(in_dir);
    } catch (const nsac::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const nsac::input_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const nsac::solver_error& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
