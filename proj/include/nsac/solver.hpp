// solver.hpp — coupled Navier-Stokes/Allen-Cahn stepping on the MAC grid:
// semi-implicit viscous/diffusive solves, explicit skew-symmetric advection,
// explicit capillary stress in divergence form, pressure projection
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "nsac/common.hpp"
#include "nsac/dwell.hpp"
#include "nsac/grid.hpp"
#include "nsac/reference.hpp"

namespace nsac {

enum class Scheme { semi_implicit, convex_split };

struct SimState {
    ScalarField phi;
    VectorField vel;       // MAC staggered
    ScalarField pressure;  // zero-mean gauge
    double t = 0.0;
    double eps = 0.0;
};

struct SolverConfig {
    double dt = 0.0;
    Scheme scheme = Scheme::convex_split;
    Bc bc = Bc::dirichlet;
    double poisson_tol = 1e-10;
    double cfl_c1 = 0.2, cfl_c2 = 0.4;
    bool enable_viscosity = true;  // test switch (skew-advection conservation probe)
    bool enable_capillary = true;

    double dt_limit(double h, double eps) const {
        return std::min(cfl_c1 * h * h / 4.0, cfl_c2 * eps * eps);
    }
    void validate(double h, double eps) const {
        if (!(dt > 0.0)) throw config_error("SolverConfig: dt must be positive");
        if (dt > dt_limit(h, eps) * (1.0 + 1e-12))
            throw config_error("SolverConfig: dt violates min(c1 h^2/4, c2 eps^2)");
    }
};

// ---------------------------------------------------------------------------
// Deterministic conjugate gradient (fixed iteration order, pairwise reductions)
// ---------------------------------------------------------------------------
struct CgResult {
    int iterations = 0;
    double residual_inf = 0.0;
};

template <class Apply>
CgResult cg_solve(std::vector<double>& x, const std::vector<double>& b, Apply&& apply,
                  double tol_inf, int max_iter, bool remove_mean) {
    const std::size_t m = x.size();
    std::vector<double> r(m), p(m), ap(m);
    auto mean_of = [&](std::vector<double>& v) { return pairwise_sum(v) / static_cast<double>(m); };

    std::vector<double> rhs = b;
    if (remove_mean) {
        const double mb = mean_of(rhs);
        for (auto& v : rhs) v -= mb;
    }
    apply(x, ap);
    for (std::size_t k = 0; k < m; ++k) r[k] = rhs[k] - ap[k];
    if (remove_mean) {
        const double mr = mean_of(r);
        for (auto& v : r) v -= mr;
    }
    CgResult res;
    res.residual_inf = max_abs(r);
    if (res.residual_inf <= tol_inf) return res;
    p = r;
    double rr = dot(r, r);
    for (int it = 1; it <= max_iter; ++it) {
        apply(p, ap);
        const double pap = dot(p, ap);
        if (pap <= 0.0) throw solver_error("cg_solve: operator lost positivity");
        const double alpha = rr / pap;
        for (std::size_t k = 0; k < m; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if (remove_mean) {
            const double mr = mean_of(r);
            for (auto& v : r) v -= mr;
        }
        res.iterations = it;
        res.residual_inf = max_abs(r);
        if (res.residual_inf <= tol_inf) {
            if (remove_mean) {
                const double mx = mean_of(x);
                for (auto& v : x) v -= mx;
            }
            return res;
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < m; ++k) p[k] = r[k] + beta * p[k];
    }
    throw solver_error("cg_solve: no convergence, residual_inf = " +
                       format_double(res.residual_inf));
}

// ---------------------------------------------------------------------------
// Implicit operators
// ---------------------------------------------------------------------------
namespace detail {

// (I - dt lap) on cell fields; homogeneous Dirichlet elimination (ghost = -x)
// or periodic wrap; optional variable extra diagonal (convex splitting).
struct CellHelmholtz {
    const Grid2D* grid;
    double dt;
    const std::vector<double>* extra_diag = nullptr;  // may be null

    void operator()(const std::vector<double>& x, std::vector<double>& out) const {
        const int n = grid->n;
        const double invh2 = static_cast<double>(n) * n;
        const bool per = grid->bc == Bc::periodic;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * n + i;
                const double c = x[k];
                double nb = 0.0;
                nb += (i > 0) ? x[k - 1] : (per ? x[k + (n - 1)] : -c);
                nb += (i < n - 1) ? x[k + 1] : (per ? x[k - (n - 1)] : -c);
                nb += (j > 0) ? x[k - n] : (per ? x[k + static_cast<std::size_t>(n) * (n - 1)] : -c);
                nb += (j < n - 1) ? x[k + n]
                                  : (per ? x[k - static_cast<std::size_t>(n) * (n - 1)] : -c);
                double val = c - dt * (nb - 4.0 * c) * invh2;
                if (extra_diag) val += (*extra_diag)[k] * c;
                out[k] = val;
            }
        }
    }
};

// -lap with homogeneous Neumann (reflect) or periodic; SPD on mean-zero fields.
struct CellPoisson {
    const Grid2D* grid;

    void operator()(const std::vector<double>& x, std::vector<double>& out) const {
        const int n = grid->n;
        const double invh2 = static_cast<double>(n) * n;
        const bool per = grid->bc == Bc::periodic;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * n + i;
                const double c = x[k];
                double nb = 0.0;
                nb += (i > 0) ? x[k - 1] : (per ? x[k + (n - 1)] : c);
                nb += (i < n - 1) ? x[k + 1] : (per ? x[k - (n - 1)] : c);
                nb += (j > 0) ? x[k - n] : (per ? x[k + static_cast<std::size_t>(n) * (n - 1)] : c);
                nb += (j < n - 1) ? x[k + n]
                                  : (per ? x[k - static_cast<std::size_t>(n) * (n - 1)] : c);
                out[k] = -(nb - 4.0 * c) * invh2;
            }
        }
    }
};

// (I - dt lap) on u faces. Dirichlet: wall faces (i = 0, n) are identity rows,
// tangential ghosts reflect odd (no slip). Periodic: n x n faces, wrap.
struct UFaceHelmholtz {
    const Grid2D* grid;
    double dt;

    void operator()(const std::vector<double>& x, std::vector<double>& out) const {
        const int n = grid->n;
        const double invh2 = static_cast<double>(n) * n;
        if (grid->bc == Bc::periodic) {
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const std::size_t k = static_cast<std::size_t>(j) * n + i;
                    const double c = x[k];
                    const double w = x[static_cast<std::size_t>(j) * n + (i + n - 1) % n];
                    const double e = x[static_cast<std::size_t>(j) * n + (i + 1) % n];
                    const double s = x[static_cast<std::size_t>((j + n - 1) % n) * n + i];
                    const double no = x[static_cast<std::size_t>((j + 1) % n) * n + i];
                    out[k] = c - dt * (w + e + s + no - 4.0 * c) * invh2;
                }
            return;
        }
        const int stride = n + 1;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i <= n; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * stride + i;
                if (i == 0 || i == n) {
                    out[k] = x[k];
                    continue;
                }
                const double c = x[k];
                const double w = x[k - 1];
                const double e = x[k + 1];
                const double s = (j > 0) ? x[k - stride] : -c;
                const double no = (j < n - 1) ? x[k + stride] : -c;
                out[k] = c - dt * (w + e + s + no - 4.0 * c) * invh2;
            }
        }
    }
};

struct VFaceHelmholtz {
    const Grid2D* grid;
    double dt;

    void operator()(const std::vector<double>& x, std::vector<double>& out) const {
        const int n = grid->n;
        const double invh2 = static_cast<double>(n) * n;
        if (grid->bc == Bc::periodic) {
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const std::size_t k = static_cast<std::size_t>(j) * n + i;
                    const double c = x[k];
                    const double w = x[static_cast<std::size_t>(j) * n + (i + n - 1) % n];
                    const double e = x[static_cast<std::size_t>(j) * n + (i + 1) % n];
                    const double s = x[static_cast<std::size_t>((j + n - 1) % n) * n + i];
                    const double no = x[static_cast<std::size_t>((j + 1) % n) * n + i];
                    out[k] = c - dt * (w + e + s + no - 4.0 * c) * invh2;
                }
            return;
        }
        for (int j = 0; j <= n; ++j) {
            for (int i = 0; i < n; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * n + i;
                if (j == 0 || j == n) {
                    out[k] = x[k];
                    continue;
                }
                const double c = x[k];
                const double w = (i > 0) ? x[k - 1] : -c;
                const double e = (i < n - 1) ? x[k + 1] : -c;
                const double s = x[k - n];
                const double no = x[k + n];
                out[k] = c - dt * (w + e + s + no - 4.0 * c) * invh2;
            }
        }
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Explicit terms
// ---------------------------------------------------------------------------

// Capillary stress -div(eps grad phi ox grad phi) sampled at faces; the
// cell tensor uses the public cell-centered gradient, out-of-domain cells
// contribute zero (phi is constant near the walls by construction).
inline void capillary_force(const ScalarField& phi, double eps, VectorField& f) {
    const Grid2D& g = phi.grid;
    const int n = g.n;
    const double invh = n;
    VectorField gp = gradient(phi);
    std::vector<double> t11(gp.u.size()), t12(gp.u.size()), t22(gp.u.size());
    for (std::size_t k = 0; k < gp.u.size(); ++k) {
        t11[k] = eps * gp.u[k] * gp.u[k];
        t12[k] = eps * gp.u[k] * gp.v[k];
        t22[k] = eps * gp.v[k] * gp.v[k];
    }
    const bool per = g.bc == Bc::periodic;
    auto cell = [&](const std::vector<double>& a, int i, int j) -> double {
        if (per) {
            i = (i % n + n) % n;
            j = (j % n + n) % n;
        } else if (i < 0 || i >= n || j < 0 || j >= n) {
            return 0.0;
        }
        return a[static_cast<std::size_t>(j) * n + i];
    };
    auto corner12 = [&](int i, int j) {
        return 0.25 * (cell(t12, i - 1, j - 1) + cell(t12, i, j - 1) + cell(t12, i - 1, j) +
                       cell(t12, i, j));
    };
    const int iu_end = per ? n : n + 1;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < iu_end; ++i) {
            if (!per && (i == 0 || i == n)) {
                f.u_at(i, j) = 0.0;
                continue;
            }
            f.u_at(i, j) = -((cell(t11, i, j) - cell(t11, i - 1, j)) * invh +
                             (corner12(i, j + 1) - corner12(i, j)) * invh);
        }
    const int jv_end = per ? n : n + 1;
    for (int j = 0; j < jv_end; ++j)
        for (int i = 0; i < n; ++i) {
            if (!per && (j == 0 || j == n)) {
                f.v_at(i, j) = 0.0;
                continue;
            }
            f.v_at(i, j) = -((corner12(i + 1, j) - corner12(i, j)) * invh +
                             (cell(t22, i, j) - cell(t22, i, j - 1)) * invh);
        }
}

// Skew-symmetric momentum advection: average of divergence and advective forms
// with centered interpolations; discretely energy-neutral for solenoidal fields.
inline void momentum_advection(const VectorField& w, VectorField& adv) {
    const Grid2D& g = w.grid;
    const int n = g.n;
    const double invh = n, inv2h = 0.5 * n;
    const bool per = g.bc == Bc::periodic;
    auto u = [&](int i, int j) -> double {
        if (per) {
            i = (i % n + n) % n;
            j = (j % n + n) % n;
            return w.u[static_cast<std::size_t>(j) * n + i];
        }
        if (i < 0 || i > n) return 0.0;  // beyond ghost, unused
        if (j < 0) return -w.u_at(i, 0);
        if (j >= n) return -w.u_at(i, n - 1);
        return w.u_at(i, j);
    };
    auto v = [&](int i, int j) -> double {
        if (per) {
            i = (i % n + n) % n;
            j = (j % n + n) % n;
            return w.v[static_cast<std::size_t>(j) * n + i];
        }
        if (j < 0 || j > n) return 0.0;
        if (i < 0) return -w.v_at(0, j);
        if (i >= n) return -w.v_at(n - 1, j);
        return w.v_at(i, j);
    };
    const int iu_end = per ? n : n + 1;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < iu_end; ++i) {
            if (!per && (i == 0 || i == n)) {
                adv.u_at(i, j) = 0.0;
                continue;
            }
            // divergence form
            const double ucE = 0.5 * (u(i, j) + u(i + 1, j));
            const double ucW = 0.5 * (u(i - 1, j) + u(i, j));
            const double vN = 0.5 * (v(i - 1, j + 1) + v(i, j + 1));
            const double vS = 0.5 * (v(i - 1, j) + v(i, j));
            const double uN = 0.5 * (u(i, j) + u(i, j + 1));
            const double uS = 0.5 * (u(i, j - 1) + u(i, j));
            const double divf = (ucE * ucE - ucW * ucW) * invh + (vN * uN - vS * uS) * invh;
            // advective form
            const double vbar = 0.25 * (v(i - 1, j) + v(i, j) + v(i - 1, j + 1) + v(i, j + 1));
            const double advf = u(i, j) * (u(i + 1, j) - u(i - 1, j)) * inv2h +
                                vbar * (u(i, j + 1) - u(i, j - 1)) * inv2h;
            adv.u_at(i, j) = 0.5 * (divf + advf);
        }
    const int jv_end = per ? n : n + 1;
    for (int j = 0; j < jv_end; ++j)
        for (int i = 0; i < n; ++i) {
            if (!per && (j == 0 || j == n)) {
                adv.v_at(i, j) = 0.0;
                continue;
            }
            const double vcN = 0.5 * (v(i, j) + v(i, j + 1));
            const double vcS = 0.5 * (v(i, j - 1) + v(i, j));
            const double uE = 0.5 * (u(i + 1, j - 1) + u(i + 1, j));
            const double uW = 0.5 * (u(i, j - 1) + u(i, j));
            const double vE = 0.5 * (v(i, j) + v(i + 1, j));
            const double vW = 0.5 * (v(i - 1, j) + v(i, j));
            const double divf = (uE * vE - uW * vW) * invh + (vcN * vcN - vcS * vcS) * invh;
            const double ubar = 0.25 * (u(i, j - 1) + u(i + 1, j - 1) + u(i, j) + u(i + 1, j));
            const double advf = ubar * (v(i + 1, j) - v(i - 1, j)) * inv2h +
                                v(i, j) * (v(i, j + 1) - v(i, j - 1)) * inv2h;
            adv.v_at(i, j) = 0.5 * (divf + advf);
        }
}

// (v . grad) phi at cell centers with face velocities averaged to centers.
inline ScalarField phi_advection(const ScalarField& phi, const VectorField& w, GhostRule rule,
                                 double trace) {
    const Grid2D& g = phi.grid;
    const int n = g.n;
    const double inv2h = 0.5 * n;
    ScalarField out(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double uc = 0.5 * (w.u_at(i, j) + w.u_at(i + 1, j));
            const double vc = 0.5 * (w.v_at(i, j) + w.v_at(i, j + 1));
            const double pw = detail::ghost_value(phi, i - 1, j, rule, trace);
            const double pe = detail::ghost_value(phi, i + 1, j, rule, trace);
            const double ps = detail::ghost_value(phi, i, j - 1, rule, trace);
            const double pn = detail::ghost_value(phi, i, j + 1, rule, trace);
            out(i, j) = uc * (pe - pw) * inv2h + vc * (pn - ps) * inv2h;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Initialization and stepping
// ---------------------------------------------------------------------------

// Optimal profile of the signed distance, smoothly clamped to +-1 over
// |s| in [0.4 delta, 0.9 delta]. The clamp keeps all psi-variation inside the
// calibration tube, which is what makes E(0) + E_vol(0) = O(eps^2) measurable;
// the raw tanh tails outside the tube would otherwise dominate at coarse eps.
inline double well_prepared_phi(const DoubleWellSpec& spec, double s, double eps, double delta) {
    const double a1 = 0.4 * delta, a2 = 0.9 * delta;
    const double a = std::abs(s);
    const double sg = (s > 0.0) ? 1.0 : -1.0;
    if (a >= a2) return sg;
    const double t = optimal_profile(spec, s, eps);
    if (a <= a1) return t;
    const double x = (a - a1) / (a2 - a1);
    const double z = 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
    return sg + z * (t - sg);
}

inline SimState initialize_well_prepared(const CircleReference& ref, double eps, const Grid2D& grid,
                                         const DoubleWellSpec& spec, double delta) {
    if (eps > 2.0 * delta)
        throw config_error("initialize_well_prepared: eps too large relative to delta");
    SimState st;
    st.eps = eps;
    st.t = 0.0;
    st.phi = ScalarField(grid);
    for (int j = 0; j < grid.n; ++j)
        for (int i = 0; i < grid.n; ++i)
            st.phi(i, j) = well_prepared_phi(
                spec, ref.signed_distance(grid.x_center(i), grid.y_center(j), 0.0), eps, delta);
    st.vel = VectorField(grid, Staggering::mac);
    if (ref.v_mode == CircleReference::VMode::prescribed) {
        const int n = grid.n;
        const int iu_end = grid.bc == Bc::periodic ? n : n + 1;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < iu_end; ++i)
                st.vel.u_at(i, j) = ref.velocity_x(static_cast<double>(i) / n, grid.y_center(j), 0.0);
        const int jv_end = grid.bc == Bc::periodic ? n : n + 1;
        for (int j = 0; j < jv_end; ++j)
            for (int i = 0; i < n; ++i)
                st.vel.v_at(i, j) = ref.velocity_y(grid.x_center(i), static_cast<double>(j) / n, 0.0);
    }
    st.pressure = ScalarField(grid);
    return st;
}

struct StepStats {
    CgResult poisson;
    double max_div = 0.0;
};

inline SimState step(const SimState& state, const SolverConfig& cfg, const DoubleWellSpec& spec,
                     StepStats* stats = nullptr) {
    const Grid2D& g = state.phi.grid;
    if ((cfg.bc == Bc::periodic) != (g.bc == Bc::periodic))
        throw config_error("step: config bc does not match grid bc");
    cfg.validate(g.h(), state.eps);
    const int n = g.n;
    const double dt = cfg.dt;
    const double eps = state.eps;
    const GhostRule phi_ghost = g.bc == Bc::periodic ? GhostRule::periodic : GhostRule::dirichlet_trace;

    // 1. capillary stress from the old phi
    VectorField fcap(g, Staggering::mac);
    if (cfg.enable_capillary) capillary_force(state.phi, eps, fcap);

    // 2. momentum predictor
    VectorField adv(g, Staggering::mac);
    momentum_advection(state.vel, adv);
    VectorField vstar(g, Staggering::mac);
    {
        std::vector<double> bu(state.vel.u.size()), bv(state.vel.v.size());
        for (std::size_t k = 0; k < bu.size(); ++k)
            bu[k] = state.vel.u[k] + dt * (-adv.u[k] + fcap.u[k]);
        for (std::size_t k = 0; k < bv.size(); ++k)
            bv[k] = state.vel.v[k] + dt * (-adv.v[k] + fcap.v[k]);
        if (g.bc == Bc::dirichlet) {
            // wall faces: identity rows pinned to zero
            for (int j = 0; j < n; ++j) {
                bu[static_cast<std::size_t>(j) * (n + 1)] = 0.0;
                bu[static_cast<std::size_t>(j) * (n + 1) + n] = 0.0;
            }
            for (int i = 0; i < n; ++i) {
                bv[i] = 0.0;
                bv[static_cast<std::size_t>(n) * n + i] = 0.0;
            }
        }
        if (cfg.enable_viscosity) {
            vstar.u = state.vel.u;
            vstar.v = state.vel.v;
            detail::UFaceHelmholtz au{&g, dt};
            detail::VFaceHelmholtz av{&g, dt};
            const double tol_u = 1e-12 * std::max(1.0, max_abs(bu));
            const double tol_v = 1e-12 * std::max(1.0, max_abs(bv));
            cg_solve(vstar.u, bu, au, tol_u, 10000, false);
            cg_solve(vstar.v, bv, av, tol_v, 10000, false);
        } else {
            vstar.u = bu;
            vstar.v = bv;
        }
    }

    // 3. projection
    SimState next;
    next.eps = eps;
    next.vel = vstar;
    next.pressure = ScalarField(g);
    {
        ScalarField div_star = divergence(vstar);
        std::vector<double> b(div_star.values.size());
        for (std::size_t k = 0; k < b.size(); ++k) b[k] = -div_star.values[k] / dt;
        detail::CellPoisson pois{&g};
        std::vector<double> pi = state.pressure.values;  // warm start
        const double tol = cfg.poisson_tol * std::max(1.0, max_abs(b));
        CgResult pres = cg_solve(pi, b, pois, tol, 50000, true);
        next.pressure.values = pi;
        // correct: v = v* - dt grad pi on interior/periodic faces
        const double invh = n;
        if (g.bc == Bc::periodic) {
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    next.vel.u_at(i, j) -=
                        dt * (next.pressure(i, j) - next.pressure((i + n - 1) % n, j)) * invh;
                    next.vel.v_at(i, j) -=
                        dt * (next.pressure(i, j) - next.pressure(i, (j + n - 1) % n)) * invh;
                }
        } else {
            for (int j = 0; j < n; ++j)
                for (int i = 1; i < n; ++i)
                    next.vel.u_at(i, j) -=
                        dt * (next.pressure(i, j) - next.pressure(i - 1, j)) * invh;
            for (int j = 1; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    next.vel.v_at(i, j) -=
                        dt * (next.pressure(i, j) - next.pressure(i, j - 1)) * invh;
        }
        ScalarField div_new = divergence(next.vel);
        const double max_div = max_abs(div_new.values);
        if (stats) {
            stats->poisson = pres;
            stats->max_div = max_div;
        }
        if (max_div > 1e-8)
            throw solver_error("step: post-projection divergence " + format_double(max_div));
    }

    // 4. phase field, advected with the corrected velocity
    {
        ScalarField advphi = phi_advection(state.phi, next.vel, phi_ghost, -1.0);
        std::vector<double> b(state.phi.values.size());
        const double inve2 = 1.0 / (eps * eps);
        std::vector<double> extra;
        if (cfg.scheme == Scheme::semi_implicit) {
            for (std::size_t k = 0; k < b.size(); ++k) {
                const double p = state.phi.values[k];
                b[k] = p + dt * (-advphi.values[k] - potential(spec, p).dw * inve2);
            }
        } else {
            // convex splitting with one Newton sweep:
            // W = (s/2) r^4 + s/2 - s r^2; implicit part W_cx' = 2 s r^3 linearized
            extra.assign(b.size(), 0.0);
            const double s = spec.scale;
            for (std::size_t k = 0; k < b.size(); ++k) {
                const double p = state.phi.values[k];
                extra[k] = dt * inve2 * 6.0 * s * p * p;
                b[k] = p + dt * (-advphi.values[k] + inve2 * (4.0 * s * p * p * p + 2.0 * s * p));
            }
        }
        if (g.bc == Bc::dirichlet) {
            // affine Dirichlet ghost contribution: ghost = 2g - phi, g = -1
            const double invh2 = static_cast<double>(n) * n;
            const double gtrace = -1.0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    int walls = 0;
                    if (i == 0) ++walls;
                    if (i == n - 1) ++walls;
                    if (j == 0) ++walls;
                    if (j == n - 1) ++walls;
                    if (walls)
                        b[static_cast<std::size_t>(j) * n + i] +=
                            dt * invh2 * 2.0 * gtrace * walls;
                }
        }
        detail::CellHelmholtz aphi{&g, dt, extra.empty() ? nullptr : &extra};
        next.phi = state.phi;  // warm start
        const double tol = 1e-12 * std::max(1.0, max_abs(b));
        cg_solve(next.phi.values, b, aphi, tol, 10000, false);
    }

    next.t = state.t + dt;
    if (!all_finite(next.phi.values) || !all_finite(next.vel.u) || !all_finite(next.vel.v))
        throw solver_error("step: non-finite state (divergence) at t = " + format_double(next.t));
    return next;
}

// Total energy: face-based kinetic part plus staggered-gradient interfacial
// part (the discrete Lyapunov candidate of the scheme) plus the potential.
inline double total_energy(const SimState& st, const DoubleWellSpec& spec) {
    const Grid2D& g = st.phi.grid;
    const int n = g.n;
    const double h = g.h(), h2 = h * h;
    const double eps = st.eps;
    std::vector<double> parts;
    parts.reserve(st.phi.values.size() * 3);
    // kinetic
    {
        std::vector<double> kin;
        kin.reserve(st.vel.u.size() + st.vel.v.size());
        const int iu_end = g.bc == Bc::periodic ? n : n + 1;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < iu_end; ++i) {
                const double u = st.vel.u_at(i, j);
                kin.push_back(0.5 * u * u * h2);
            }
        const int jv_end = g.bc == Bc::periodic ? n : n + 1;
        for (int j = 0; j < jv_end; ++j)
            for (int i = 0; i < n; ++i) {
                const double v = st.vel.v_at(i, j);
                kin.push_back(0.5 * v * v * h2);
            }
        parts.push_back(pairwise_sum(kin));
    }
    // interfacial gradient at faces
    {
        std::vector<double> gr;
        const double invh = n;
        if (g.bc == Bc::periodic) {
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const double dx = (st.phi(i, j) - st.phi((i + n - 1) % n, j)) * invh;
                    const double dy = (st.phi(i, j) - st.phi(i, (j + n - 1) % n)) * invh;
                    gr.push_back(0.5 * eps * (dx * dx + dy * dy) * h2);
                }
        } else {
            for (int j = 0; j < n; ++j)
                for (int i = 1; i < n; ++i) {
                    const double dx = (st.phi(i, j) - st.phi(i - 1, j)) * invh;
                    gr.push_back(0.5 * eps * dx * dx * h2);
                }
            for (int j = 1; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const double dy = (st.phi(i, j) - st.phi(i, j - 1)) * invh;
                    gr.push_back(0.5 * eps * dy * dy * h2);
                }
            // wall half-cells, trace -1
            for (int j = 0; j < n; ++j) {
                const double dl = (st.phi(0, j) + 1.0) / (0.5 * h);
                const double dr = (st.phi(n - 1, j) + 1.0) / (0.5 * h);
                gr.push_back(0.25 * eps * (dl * dl + dr * dr) * h2);
            }
            for (int i = 0; i < n; ++i) {
                const double db = (st.phi(i, 0) + 1.0) / (0.5 * h);
                const double dtp = (st.phi(i, n - 1) + 1.0) / (0.5 * h);
                gr.push_back(0.25 * eps * (db * db + dtp * dtp) * h2);
            }
        }
        parts.push_back(pairwise_sum(gr));
    }
    // potential
    {
        std::vector<double> pw(st.phi.values.size());
        for (std::size_t k = 0; k < pw.size(); ++k)
            pw[k] = potential(spec, st.phi.values[k]).w / eps * h2;
        parts.push_back(pairwise_sum(pw));
    }
    return pairwise_sum(parts);
}

struct DissipationCheck {
    double dE = 0.0;
    bool ok = false;
};

inline DissipationCheck dissipation_check(const SimState& prev, const SimState& next,
                                          const DoubleWellSpec& spec, Scheme scheme) {
    const double e0 = total_energy(prev, spec);
    const double e1 = total_energy(next, spec);
    DissipationCheck out;
    out.dE = e1 - e0;
    const double tol = (scheme == Scheme::convex_split) ? 1e-6 : 1e-4;
    out.ok = out.dE <= tol * (1.0 + e0);
    return out;
}

}  // namespace nsac
