// harness.hpp — run orchestration: config parsing, single runs with diagnostics
// time series, epsilon sweeps with rate fitting, Gronwall envelope fitting,
// CSV/SVG report emission
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nsac/calibration.hpp"
#include "nsac/common.hpp"
#include "nsac/dwell.hpp"
#include "nsac/functionals.hpp"
#include "nsac/grid.hpp"
#include "nsac/reference.hpp"
#include "nsac/solver.hpp"
#include "nsac/svg.hpp"

namespace nsac {

struct RunConfig {
    int n = 128;
    double eps = 0.08;
    double cfl_c1 = 0.2, cfl_c2 = 0.4;
    double t_end = -1.0;  // < 0: default 0.5 * t_ext
    double r0 = 0.25;
    double center_x = 0.5, center_y = 0.5;
    double delta = 0.125;
    Bc bc = Bc::dirichlet;
    Scheme scheme = Scheme::convex_split;
    std::string v_mode = "zero";
    int snapshot_every = 0;  // 0: auto
    std::string output_dir;
    long seed = 0;  // randomized property tests only; the PDE run is deterministic
    double poisson_tol = 1e-10;
    int dump_fields = 0;

    double t_ext() const { return 0.5 * r0 * r0; }
    double h() const { return 1.0 / n; }
    double dt_max() const {
        return std::min(cfl_c1 * h() * h() / 4.0, cfl_c2 * eps * eps);
    }
    double resolved_t_end() const { return t_end < 0.0 ? 0.5 * t_ext() : t_end; }

    int n_steps() const {
        const double T = resolved_t_end();
        return std::max(1, static_cast<int>(std::ceil(T / dt_max() - 1e-12)));
    }
    double dt() const { return resolved_t_end() / n_steps(); }

    CircleReference reference() const {
        CircleReference ref;
        ref.cx = center_x;
        ref.cy = center_y;
        ref.r0 = r0;
        ref.v_mode = (v_mode == "prescribed") ? CircleReference::VMode::prescribed
                                              : CircleReference::VMode::zero;
        return ref;
    }

    // Hard invariants throw; soft ones come back as warnings.
    std::vector<std::string> validate() const {
        std::vector<std::string> warnings;
        if (n < 16 || n % 2 != 0) throw config_error("config: n must be even and >= 16");
        const double T = resolved_t_end();
        if (!(T > 0.0) && T != 0.0) throw config_error("config: t_end must be >= 0");
        if (T >= t_ext()) throw config_error("config: t_end must be < t_ext = r0^2/2");
        if (T > 0.8 * t_ext() + 1e-12)
            throw config_error("config: t_end must be <= 0.8 * t_ext (curvature blow-up guard)");
        if (delta < 8.0 * h()) throw config_error("config: delta must be >= 8h (tube resolution)");
        if (eps > 2.0 * delta) throw config_error("config: eps > 2*delta, profile cannot fit the tube");
        if (eps > delta / 4.0)
            warnings.push_back("eps > delta/4: the eps^2 initial-data constant degrades");
        if (v_mode != "zero" && v_mode != "prescribed")
            throw config_error("config: v_mode must be zero or prescribed");
        reference().validate(delta);  // interface + 2 delta tube inside the domain
        return warnings;
    }
};

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        auto to_d = [&](const std::string& s) {
            try {
                std::size_t pos = 0;
                const double d = std::stod(s, &pos);
                if (pos != s.size()) throw std::invalid_argument(s);
                return d;
            } catch (const std::exception&) {
                throw config_error("config: bad numeric value for " + key + ": " + s);
            }
        };
        if (key == "n") cfg.n = static_cast<int>(to_d(val));
        else if (key == "eps") cfg.eps = to_d(val);
        else if (key == "cfl_c1") cfg.cfl_c1 = to_d(val);
        else if (key == "cfl_c2") cfg.cfl_c2 = to_d(val);
        else if (key == "t_end") cfg.t_end = to_d(val);
        else if (key == "r0") cfg.r0 = to_d(val);
        else if (key == "center_x") cfg.center_x = to_d(val);
        else if (key == "center_y") cfg.center_y = to_d(val);
        else if (key == "delta") cfg.delta = to_d(val);
        else if (key == "bc") {
            if (val == "dirichlet") cfg.bc = Bc::dirichlet;
            else if (val == "periodic") cfg.bc = Bc::periodic;
            else throw config_error("config: bc must be dirichlet or periodic");
        } else if (key == "scheme") {
            if (val == "semi-implicit") cfg.scheme = Scheme::semi_implicit;
            else if (val == "convex-split") cfg.scheme = Scheme::convex_split;
            else throw config_error("config: scheme must be semi-implicit or convex-split");
        } else if (key == "v_mode") cfg.v_mode = val;
        else if (key == "snapshot_every") cfg.snapshot_every = static_cast<int>(to_d(val));
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "seed") cfg.seed = static_cast<long>(to_d(val));
        else if (key == "poisson_tol") cfg.poisson_tol = to_d(val);
        else if (key == "dump_fields") cfg.dump_fields = static_cast<int>(to_d(val));
        else throw config_error("config: unknown key '" + key + "'");
    }
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// Zero-level-set radius: bilinear samples of phi along rays from the center,
// first + -> - crossing located by linear interpolation, averaged over rays.
inline double measure_radius(const ScalarField& phi, double cx, double cy) {
    const double h = phi.grid.h();
    const int rays = 64;
    std::vector<double> found;
    for (int k = 0; k < rays; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / rays;
        const double dx = std::cos(a), dy = std::sin(a);
        double prev_r = 2.0 * h;
        double prev_v = sample_bilinear(phi, cx + prev_r * dx, cy + prev_r * dy);
        bool hit = false;
        for (double r = prev_r + 0.5 * h; r < 0.5 - 2.0 * h; r += 0.5 * h) {
            const double x = cx + r * dx, y = cy + r * dy;
            if (x < 2.0 * h || x > 1.0 - 2.0 * h || y < 2.0 * h || y > 1.0 - 2.0 * h) break;
            const double v = sample_bilinear(phi, x, y);
            if (prev_v > 0.0 && v <= 0.0) {
                found.push_back(prev_r + (r - prev_r) * prev_v / (prev_v - v));
                hit = true;
                break;
            }
            prev_r = r;
            prev_v = v;
        }
        (void)hit;
    }
    if (found.empty()) return 0.0;
    return pairwise_sum(found) / static_cast<double>(found.size());
}

struct SnapshotData {
    DiagnosticsRecord rec;
    NamedTerms re_terms;  // relative energy inequality RHS integrals
    NamedTerms be_terms;  // bulk error evolution RHS integrals
    double radius_measured = 0.0;
    double radius_exact = 0.0;
    double mixed_gap = 0.0;
    int pointwise_violations = 0;
};

// All functionals and term lists at one instant. dt_probe feeds the one-sided
// time differences of xi and theta.
inline SnapshotData compute_diagnostics(const SimState& st, const CircleReference& ref,
                                        double delta, const DoubleWellSpec& spec,
                                        double dt_probe) {
    const Grid2D& g = st.phi.grid;
    const GhostRule rule = default_ghost(g);
    SnapshotData out;

    CalibrationSnapshot snap = build_calibration(ref, st.t, delta, g);
    CalibrationSnapshot snap_next = build_calibration(ref, st.t + dt_probe, delta, g);
    CalibrationStencils cs = assemble_calibration_stencils(snap, snap_next);

    PhaseFieldBundle b = assemble_bundle(st.phi, st.eps, spec, rule, -1.0);
    VectorField v_cell = to_cell_centers(st.vel);
    VectorField v_ref_cell = sample_reference_velocity(ref, g, st.t);
    TensorField grad_v = gradient_tensor(v_cell);
    TensorField grad_v_ref = gradient_tensor(v_ref_cell);
    ScalarField chi = sample_indicator(ref, g, st.t);
    ScalarField s_dist = sample_signed_distance(ref, g, st.t);
    const double c0 = surface_tension_c0(spec);

    EnergyParts ep = relative_energy(b, v_cell, v_ref_cell, snap.xi);
    CoercivityValues cv = coercivity_report(b, v_cell, v_ref_cell, snap.xi, s_dist, chi, c0);
    out.re_terms = rhs_terms_relative_energy(b, v_cell, v_ref_cell, grad_v, grad_v_ref, chi, snap,
                                             cs, c0);
    out.be_terms = rhs_terms_bulk_error(b, v_cell, v_ref_cell, chi, snap, cs, c0);

    out.rec.t = st.t;
    out.rec.E = ep.E;
    out.rec.E_kin = ep.E_kin;
    out.rec.E_equip = ep.E_equip;
    out.rec.E_tilt = ep.E_tilt;
    out.rec.E_vol = bulk_error(b.psi, chi, snap.theta, c0);
    out.rec.E_total = total_energy(st, spec);
    out.rec.D_visc = -out.re_terms.get("viscous_square");
    out.rec.D1 = -out.re_terms.get("dissip_curvature_sq");
    out.rec.D2 = -out.re_terms.get("dissip_transport_sq");
    out.rec.L1_err = cv.L1_err;
    out.rec.L2_vel = cv.L2_vel;
    out.rec.c36 = cv.kin;
    out.rec.c37 = cv.tilt;
    out.rec.c38 = cv.equip;
    out.rec.c39 = cv.tilt_dist_psi;
    out.rec.c310 = cv.tilt_dist_phi;
    out.rec.c319 = cv.weighted_L1;
    out.mixed_gap = cv.mixed_gap;
    out.pointwise_violations = cv.pointwise_violations;
    out.radius_measured = measure_radius(st.phi, ref.cx, ref.cy);
    out.radius_exact = ref.radius(st.t);
    return out;
}

struct RunResult {
    std::vector<SnapshotData> snapshots;
    double dt = 0.0;
    int steps = 0;
    double max_abs_phi = 0.0;
    double max_divergence = 0.0;
    int dissipation_violations = 0;
    double worst_dissipation_defect = 0.0;  // max over steps of dE - tol*(1+E)
    // discrete echo of the relative energy inequality:
    // E(T) - E(0) - trapz(sum of RHS terms); should be <= tol_acc
    double energy_inequality_defect = 0.0;
    double bridge_C = 0.0;  // max over snapshots of L1_err^2 / E_vol

    double E0_plus_Evol0() const {
        return snapshots.front().rec.E + snapshots.front().rec.E_vol;
    }
};

namespace detail {
inline std::vector<int> snapshot_steps(int n_steps, int every) {
    std::vector<int> steps;
    // geometric refinement early (captures the initial relaxation transient),
    // uniform cadence afterwards
    for (int s = 0; s <= std::min(8, n_steps); ++s) steps.push_back(s);
    for (int s = 16; s < n_steps; s *= 2) steps.push_back(s);
    for (int s = every; s < n_steps; s += every) steps.push_back(s);
    steps.push_back(n_steps);
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    return steps;
}
}  // namespace detail

inline RunResult run_simulation(const RunConfig& cfg) {
    cfg.validate();
    const Grid2D grid(cfg.n, cfg.bc);
    const CircleReference ref = cfg.reference();
    const DoubleWellSpec spec;
    SolverConfig scfg;
    scfg.dt = cfg.dt();
    scfg.scheme = cfg.scheme;
    scfg.bc = cfg.bc;
    scfg.poisson_tol = cfg.poisson_tol;
    scfg.cfl_c1 = cfg.cfl_c1;
    scfg.cfl_c2 = cfg.cfl_c2;

    const int n_steps = cfg.resolved_t_end() > 0.0 ? cfg.n_steps() : 0;
    const int every = cfg.snapshot_every > 0 ? cfg.snapshot_every
                                             : std::max(1, n_steps / 32);
    std::vector<int> snaps = detail::snapshot_steps(n_steps, every);
    if (n_steps == 0) snaps = {0};

    RunResult res;
    res.dt = scfg.dt;
    res.steps = n_steps;

    const bool dump = cfg.dump_fields != 0 && !cfg.output_dir.empty();
    if (!cfg.output_dir.empty()) std::filesystem::create_directories(cfg.output_dir);

    SimState state = initialize_well_prepared(ref, cfg.eps, grid, spec, cfg.delta);
    const double dt_probe = n_steps > 0 ? scfg.dt : 1e-6 * ref.t_ext();

    std::size_t snap_idx = 0;
    auto take_snapshot = [&](int step_no) {
        try {
            SnapshotData sd = compute_diagnostics(state, ref, cfg.delta, spec, dt_probe);
            res.snapshots.push_back(std::move(sd));
        } catch (const std::exception& e) {
            throw solver_error("diagnostics failed at step " + std::to_string(step_no) + ": " +
                               e.what());
        }
        if (dump) {
            write_csv(state.phi,
                      cfg.output_dir + "/phi_" + std::to_string(step_no) + ".csv");
            write_csv(state.pressure,
                      cfg.output_dir + "/pressure_" + std::to_string(step_no) + ".csv");
        }
    };

    take_snapshot(0);
    ++snap_idx;

    double prev_total = total_energy(state, spec);
    for (int s = 1; s <= n_steps; ++s) {
        StepStats stats;
        SimState next;
        try {
            next = step(state, scfg, spec, &stats);
        } catch (const solver_error& e) {
            throw solver_error("step " + std::to_string(s) + ": " + e.what());
        }
        res.max_divergence = std::max(res.max_divergence, stats.max_div);
        const double cur_total = total_energy(next, spec);
        const double tol =
            (cfg.scheme == Scheme::convex_split ? 1e-6 : 1e-4) * (1.0 + prev_total);
        const double defect = (cur_total - prev_total) - tol;
        if (defect > 0.0) ++res.dissipation_violations;
        res.worst_dissipation_defect = std::max(res.worst_dissipation_defect, defect);
        prev_total = cur_total;
        state = std::move(next);
        res.max_abs_phi = std::max(res.max_abs_phi, max_abs(state.phi.values));
        if (snap_idx < snaps.size() && snaps[snap_idx] == s) {
            take_snapshot(s);
            ++snap_idx;
        }
    }

    // trapezoidal accumulation of the relative-energy RHS across snapshots
    {
        double acc = 0.0;
        for (std::size_t k = 1; k < res.snapshots.size(); ++k) {
            const double dtk = res.snapshots[k].rec.t - res.snapshots[k - 1].rec.t;
            acc += 0.5 * dtk *
                   (res.snapshots[k - 1].re_terms.sum() + res.snapshots[k].re_terms.sum());
        }
        res.energy_inequality_defect =
            res.snapshots.back().rec.E - res.snapshots.front().rec.E - acc;
    }
    for (const auto& sd : res.snapshots)
        if (sd.rec.E_vol > 0.0)
            res.bridge_C = std::max(res.bridge_C, sd.rec.L1_err * sd.rec.L1_err / sd.rec.E_vol);

    if (!cfg.output_dir.empty()) {
        std::ofstream diag(cfg.output_dir + "/diagnostics.csv");
        if (!diag) throw config_error("cannot write diagnostics.csv in " + cfg.output_dir);
        diag << DiagnosticsRecord::csv_header() << '\n';
        for (const auto& sd : res.snapshots) diag << sd.rec.csv_row() << '\n';

        std::ofstream rhs(cfg.output_dir + "/rhs_terms.csv");
        rhs << "t";
        for (const auto& tpair : res.snapshots.front().re_terms.terms) rhs << ",re_" << tpair.first;
        for (const auto& tpair : res.snapshots.front().be_terms.terms) rhs << ",be_" << tpair.first;
        rhs << ",radius_measured,radius_exact,mixed_gap\n";
        for (const auto& sd : res.snapshots) {
            rhs << format_double(sd.rec.t);
            for (const auto& tpair : sd.re_terms.terms) rhs << ',' << format_double(tpair.second);
            for (const auto& tpair : sd.be_terms.terms) rhs << ',' << format_double(tpair.second);
            rhs << ',' << format_double(sd.radius_measured) << ',' << format_double(sd.radius_exact)
                << ',' << format_double(sd.mixed_gap) << '\n';
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Rate tables and sweeps
// ---------------------------------------------------------------------------
struct RateTable {
    std::string name;
    std::vector<std::pair<double, double>> rows;  // (eps, value), eps strictly decreasing
    double slope = 0.0;
    double r2 = 0.0;
    bool saturated = false;  // all values below the absolute floor; no fit

    void fit(double saturation_floor_factor = 0.0) {
        if (rows.size() < 2) throw input_error("RateTable: need >= 2 rows");
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i].first < rows[i - 1].first))
                throw input_error("RateTable: eps must be strictly decreasing");
        saturated = true;
        for (const auto& r : rows)
            if (!(r.second < saturation_floor_factor * r.first)) saturated = false;
        if (saturated) {
            slope = 0.0;
            r2 = 0.0;
            return;
        }
        std::vector<double> lx, ly;
        for (const auto& r : rows) {
            if (!(r.second > 0.0)) throw input_error("RateTable: nonpositive value, cannot fit");
            lx.push_back(std::log(r.first));
            ly.push_back(std::log(r.second));
        }
        const LineFit f = fit_line(lx, ly);
        slope = f.slope;
        r2 = f.r2;
    }
};

struct SweepResult {
    RateTable l1_rate;      // ||c0 chi - psi||_L1 at t_end vs eps
    RateTable e0_rate;      // E(0) + E_vol(0) vs eps
    RateTable l2_vel_rate;  // ||v_eps - v||_L2 at t_end vs eps
    std::vector<RunConfig> member_configs;
    std::vector<std::string> failures;  // per-eps error markers, empty on success
};

// Member grid: h <= eps/4 by default, but never coarser than the tube needs.
inline int sweep_grid_n(double eps, double delta) {
    int n = static_cast<int>(std::ceil(std::max(4.0 / eps, 8.0 / delta)));
    n = std::max(n, 16);
    if (n % 2) ++n;
    return n;
}

inline SweepResult sweep_epsilon(const RunConfig& base, const std::vector<double>& eps_list,
                                 bool concurrent = true) {
    if (eps_list.size() < 2) throw config_error("sweep: need at least two eps values");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw config_error("sweep: eps list must be strictly decreasing");

    SweepResult sw;
    sw.l1_rate.name = "L1_err_tend";
    sw.e0_rate.name = "E0_plus_Evol0";
    sw.l2_vel_rate.name = "L2_vel_tend";

    std::vector<RunConfig> cfgs;
    for (double e : eps_list) {
        RunConfig c = base;
        c.eps = e;
        c.n = sweep_grid_n(e, base.delta);
        if (!base.output_dir.empty())
            c.output_dir = base.output_dir + "/eps_" + format_double(e);
        cfgs.push_back(c);
    }
    sw.member_configs = cfgs;

    std::vector<RunResult> results(cfgs.size());
    std::vector<std::string> errors(cfgs.size());
    auto worker = [&](std::size_t i) {
        try {
            results[i] = run_simulation(cfgs[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    if (concurrent) {
        std::vector<std::future<void>> futs;
        for (std::size_t i = 0; i < cfgs.size(); ++i)
            futs.push_back(std::async(std::launch::async, worker, i));
        for (auto& f : futs) f.get();
    } else {
        for (std::size_t i = 0; i < cfgs.size(); ++i) worker(i);
    }

    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        if (!errors[i].empty()) {
            sw.failures.push_back("eps=" + format_double(eps_list[i]) + ": " + errors[i]);
            continue;
        }
        const auto& first = results[i].snapshots.front().rec;
        const auto& last = results[i].snapshots.back().rec;
        sw.l1_rate.rows.push_back({eps_list[i], last.L1_err});
        sw.e0_rate.rows.push_back({eps_list[i], first.E + first.E_vol});
        sw.l2_vel_rate.rows.push_back({eps_list[i], last.L2_vel});
    }
    if (sw.l1_rate.rows.size() >= 2) {
        sw.l1_rate.fit();
        sw.e0_rate.fit();
        sw.l2_vel_rate.fit(1e-3);  // velocity may sit at the discretization floor
    }

    if (!base.output_dir.empty()) {
        std::filesystem::create_directories(base.output_dir);
        std::ofstream out(base.output_dir + "/rates.csv");
        out << "table,eps,value,slope,r2,saturated\n";
        for (const RateTable* t : {&sw.l1_rate, &sw.e0_rate, &sw.l2_vel_rate})
            for (const auto& r : t->rows)
                out << t->name << ',' << format_double(r.first) << ',' << format_double(r.second)
                    << ',' << format_double(t->slope) << ',' << format_double(t->r2) << ','
                    << (t->saturated ? 1 : 0) << '\n';
        for (auto f : sw.failures) {
            std::replace(f.begin(), f.end(), ',', ';');
            out << "failed,," << f << ",,,\n";
        }
    }
    return sw;
}

// ---------------------------------------------------------------------------
// Gronwall envelope
// ---------------------------------------------------------------------------
struct GronwallFit {
    double C_hat = 0.0;
    double max_violation = 0.0;  // of e^{C t}(E0+Evol0) >= E(t)+E_vol(t); >= 0
    bool degenerate = false;     // zero initial error: absolute values reported instead
    double max_absolute = 0.0;
};

inline GronwallFit gronwall_fit(const std::vector<SnapshotData>& series, double dt) {
    if (series.empty()) throw input_error("gronwall_fit: empty series");
    GronwallFit out;
    const double x0 = series.front().rec.E + series.front().rec.E_vol;
    if (!(x0 > 0.0)) {
        out.degenerate = true;
        for (const auto& sd : series)
            out.max_absolute = std::max(out.max_absolute, sd.rec.E + sd.rec.E_vol);
        return out;
    }
    for (const auto& sd : series) {
        if (sd.rec.t < 10.0 * dt) continue;  // early-time noise guard
        const double ratio = (sd.rec.E + sd.rec.E_vol) / x0;
        if (ratio > 0.0) out.C_hat = std::max(out.C_hat, std::log(ratio) / sd.rec.t);
    }
    out.C_hat = std::max(0.0, out.C_hat);
    for (const auto& sd : series) {
        if (sd.rec.t < 10.0 * dt) continue;
        const double defect = std::exp(out.C_hat * sd.rec.t) * x0 - (sd.rec.E + sd.rec.E_vol);
        out.max_violation = std::max(out.max_violation, -defect);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------
namespace detail {
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw config_error("report: missing column " + name);
    }
    std::vector<double> numeric(const std::string& name) const {
        const int c = col(name);
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(std::stod(r[c]));
        return out;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("report: expected file " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            const auto c = line.find(',', pos);
            cells.push_back(line.substr(pos, c == std::string::npos ? c : c - pos));
            if (c == std::string::npos) break;
            pos = c + 1;
        }
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}
}  // namespace detail

// Emits summary.csv plus SVG plots from the CSVs a run or sweep left behind.
inline std::vector<std::string> render_report(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    const std::string diag_path = dir + "/diagnostics.csv";
    const std::string rates_path = dir + "/rates.csv";
    const bool has_diag = fs::exists(diag_path);
    const bool has_rates = fs::exists(rates_path);
    if (!has_diag && !has_rates)
        throw config_error("report: expected " + diag_path + " or " + rates_path);

    std::ofstream summary(dir + "/summary.csv");
    summary << "quantity,value\n";

    if (has_diag) {
        detail::CsvTable t = detail::read_csv(diag_path);
        const auto ts = t.numeric("t");
        const auto E = t.numeric("E");
        const auto Evol = t.numeric("E_vol");
        const auto Etot = t.numeric("E_total");
        const auto L1 = t.numeric("L1_err");
        const auto L2 = t.numeric("L2_vel");
        summary << "E_final," << format_double(E.back()) << '\n';
        summary << "E_vol_final," << format_double(Evol.back()) << '\n';
        summary << "E_total_final," << format_double(Etot.back()) << '\n';
        summary << "L1_err_final," << format_double(L1.back()) << '\n';
        summary << "L2_vel_final," << format_double(L2.back()) << '\n';
        {
            SvgPlot p("Energy functionals", "t", "value");
            p.add_line(ts, E, "#1f77b4", "E");
            p.add_line(ts, Evol, "#d62728", "E_vol");
            p.add_line(ts, Etot, "#2ca02c", "E_total");
            p.write(dir + "/plot_energies.svg");
            written.push_back("plot_energies.svg");
        }
        {
            SvgPlot p("Error norms", "t", "value");
            p.add_line(ts, L1, "#1f77b4", "L1_err");
            p.add_line(ts, L2, "#d62728", "L2_vel");
            p.write(dir + "/plot_errors.svg");
            written.push_back("plot_errors.svg");
        }
    }
    if (has_rates) {
        detail::CsvTable t = detail::read_csv(rates_path);
        const int ctab = t.col("table");
        std::vector<std::string> names;
        for (const auto& r : t.rows)
            if (names.empty() || names.back() != r[ctab]) names.push_back(r[ctab]);
        for (const auto& name : names) {
            std::vector<double> es, vs;
            double slope = 0.0, r2 = 0.0;
            int saturated = 0;
            for (const auto& r : t.rows) {
                if (r[ctab] != name) continue;
                es.push_back(std::stod(r[t.col("eps")]));
                vs.push_back(std::stod(r[t.col("value")]));
                slope = std::stod(r[t.col("slope")]);
                r2 = std::stod(r[t.col("r2")]);
                saturated = static_cast<int>(std::stod(r[t.col("saturated")]));
            }
            summary << name << "_slope," << format_double(slope) << '\n';
            summary << name << "_r2," << format_double(r2) << '\n';
            SvgPlot p("Rate: " + name, "eps", name, /*loglog=*/true);
            p.add_markers(es, vs, "#1f77b4", name);
            if (!saturated) {
                // fitted line through the extreme abscissae
                const double lo = es.back(), hi = es.front();
                const double c = std::log(vs.front()) - slope * std::log(es.front());
                std::vector<double> fx = {hi, lo};
                std::vector<double> fy = {std::exp(slope * std::log(hi) + c),
                                          std::exp(slope * std::log(lo) + c)};
                p.add_line(fx, fy, "#d62728",
                           "fit slope=" + format_double(slope));
            }
            p.write(dir + "/plot_rate_" + name + ".svg");
            written.push_back("plot_rate_" + name + ".svg");
        }
    }
    written.push_back("summary.csv");
    return written;
}

}  // namespace nsac
