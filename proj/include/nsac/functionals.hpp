// functionals.hpp — relative energy, bulk error, coercivity quantities, the
// phase-field curvature, and the full RHS term lists of the two evolution
// identities (relative energy inequality and bulk-error evolution)
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "nsac/calibration.hpp"
#include "nsac/common.hpp"
#include "nsac/dwell.hpp"
#include "nsac/grid.hpp"
#include "nsac/reference.hpp"

namespace nsac {

// psi = psi(phi) cellwise; grad psi by the chain rule sqrt(2W(phi)) * grad phi,
// never by differencing psi, so |grad psi| = sqrt(2W)|grad phi| holds exactly.
inline std::pair<ScalarField, VectorField> psi_field(const ScalarField& phi,
                                                     const DoubleWellSpec& spec) {
    ScalarField psi(phi.grid);
    for (std::size_t k = 0; k < phi.values.size(); ++k)
        psi.values[k] = psi_primitive(spec, phi.values[k]);
    VectorField gphi = gradient(phi);
    VectorField gpsi(phi.grid, Staggering::cell);
    for (std::size_t k = 0; k < phi.values.size(); ++k) {
        const double r2w = potential(spec, phi.values[k]).root2w;
        gpsi.u[k] = r2w * gphi.u[k];
        gpsi.v[k] = r2w * gphi.v[k];
    }
    return {std::move(psi), std::move(gpsi)};
}

// n_eps = grad phi / |grad phi| above the degeneracy threshold, a fixed unit
// vector elsewhere. |n_eps| = 1 everywhere.
inline VectorField normal_field(const ScalarField& phi, double fallback_x = 1.0,
                                double fallback_y = 0.0) {
    VectorField g = gradient(phi);
    double gmax = 0.0;
    for (std::size_t k = 0; k < g.u.size(); ++k)
        gmax = std::max(gmax, std::sqrt(g.u[k] * g.u[k] + g.v[k] * g.v[k]));
    const double tau = 1e-12 * (gmax + 1.0);
    VectorField out(phi.grid, Staggering::cell);
    for (std::size_t k = 0; k < g.u.size(); ++k) {
        const double m = std::sqrt(g.u[k] * g.u[k] + g.v[k] * g.v[k]);
        if (m > tau) {
            out.u[k] = g.u[k] / m;
            out.v[k] = g.v[k] / m;
        } else {
            out.u[k] = fallback_x;
            out.v[k] = fallback_y;
        }
    }
    return out;
}

// H_eps = -eps * lap(phi) + W'(phi)/eps; vanishes on the exact 1D profile.
inline ScalarField curvature_field(const ScalarField& phi, double eps, const DoubleWellSpec& spec,
                                   GhostRule rule, double trace = -1.0) {
    ScalarField lap = laplacian(phi, rule, trace);
    ScalarField out(phi.grid);
    for (std::size_t k = 0; k < phi.values.size(); ++k)
        out.values[k] = -eps * lap.values[k] + potential(spec, phi.values[k]).dw / eps;
    return out;
}

// Everything cellwise that the functionals reuse, assembled once per snapshot.
struct PhaseFieldBundle {
    double eps = 0.0;
    ScalarField phi;
    ScalarField psi, w, root2w;
    VectorField grad_phi, grad_psi;
    ScalarField abs_grad_phi, abs_grad_psi;
    VectorField n;
    ScalarField H;
};

inline PhaseFieldBundle assemble_bundle(const ScalarField& phi, double eps,
                                        const DoubleWellSpec& spec, GhostRule rule,
                                        double trace = -1.0) {
    PhaseFieldBundle b;
    b.eps = eps;
    b.phi = phi;
    auto [psi, gpsi] = psi_field(phi, spec);
    b.psi = std::move(psi);
    b.grad_psi = std::move(gpsi);
    b.grad_phi = gradient(phi);
    b.w = ScalarField(phi.grid);
    b.root2w = ScalarField(phi.grid);
    b.abs_grad_phi = ScalarField(phi.grid);
    b.abs_grad_psi = ScalarField(phi.grid);
    for (std::size_t k = 0; k < phi.values.size(); ++k) {
        const auto p = potential(spec, phi.values[k]);
        b.w.values[k] = p.w;
        b.root2w.values[k] = p.root2w;
        const double m =
            std::sqrt(b.grad_phi.u[k] * b.grad_phi.u[k] + b.grad_phi.v[k] * b.grad_phi.v[k]);
        b.abs_grad_phi.values[k] = m;
        b.abs_grad_psi.values[k] = p.root2w * m;
    }
    b.n = normal_field(phi);
    b.H = curvature_field(phi, eps, spec, rule, trace);
    return b;
}

struct EnergyParts {
    double E = 0.0, E_kin = 0.0, E_equip = 0.0, E_tilt = 0.0;
};

// E per the defining formula; the three parts per the sum-of-squares split.
// Identity E = E_kin + E_equip + E_tilt is algebraic given the chain-rule
// grad psi, so it holds to rounding with the shared quadrature.
inline EnergyParts relative_energy(const PhaseFieldBundle& b, const VectorField& v_cell,
                                   const VectorField& v_ref_cell, const VectorField& xi) {
    const Grid2D& g = b.phi.grid;
    const std::size_t m = b.phi.values.size();
    for (std::size_t k = 0; k < m; ++k) {
        const double xn = std::sqrt(xi.u[k] * xi.u[k] + xi.v[k] * xi.v[k]);
        if (xn > 1.0 + 1e-12)
            throw input_error("relative_energy: |xi| > 1 at a cell, energy could go negative");
    }
    const double eps = b.eps;
    const double sqe = std::sqrt(eps);
    std::vector<double> ie(m), ikin(m), iequip(m), itilt(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double dvx = v_cell.u[k] - v_ref_cell.u[k];
        const double dvy = v_cell.v[k] - v_ref_cell.v[k];
        const double kin = 0.5 * (dvx * dvx + dvy * dvy);
        const double gp = b.abs_grad_phi.values[k];
        const double xidotgpsi = xi.u[k] * b.grad_psi.u[k] + xi.v[k] * b.grad_psi.v[k];
        ie[k] = kin + 0.5 * eps * gp * gp + b.w.values[k] / eps - xidotgpsi;
        ikin[k] = kin;
        const double d = sqe * gp - b.root2w.values[k] / sqe;
        iequip[k] = 0.5 * d * d;
        const double xidotn = xi.u[k] * b.n.u[k] + xi.v[k] * b.n.v[k];
        itilt[k] = (1.0 - xidotn) * b.abs_grad_psi.values[k];
    }
    const double h2 = g.h() * g.h();
    EnergyParts out;
    out.E = h2 * pairwise_sum(ie);
    out.E_kin = h2 * pairwise_sum(ikin);
    out.E_equip = h2 * pairwise_sum(iequip);
    out.E_tilt = h2 * pairwise_sum(itilt);
    return out;
}

// E_vol = int |psi(phi) - c0 chi| |theta| dx >= 0.
inline double bulk_error(const ScalarField& psi, const ScalarField& chi, const ScalarField& theta,
                         double c0) {
    const std::size_t m = psi.values.size();
    std::vector<double> integ(m);
    for (std::size_t k = 0; k < m; ++k)
        integ[k] = std::abs(psi.values[k] - c0 * chi.values[k]) * std::abs(theta.values[k]);
    const double h2 = psi.grid.h() * psi.grid.h();
    return h2 * pairwise_sum(integ);
}

// Stencil realizations of the calibration fields needed by the RHS lists.
struct CalibrationStencils {
    ScalarField div_xi;
    VectorField grad_div_xi;  // cell-centered gradient of div xi
    TensorField grad_xi;      // [d xi_x/dx, d xi_x/dy; d xi_y/dx, d xi_y/dy]
    TensorField grad_B;
    ScalarField div_B;
    VectorField dt_xi;      // forward difference of snapshots
    ScalarField dt_theta;   // forward difference
    VectorField grad_theta;
};

inline CalibrationStencils assemble_calibration_stencils(const CalibrationSnapshot& snap,
                                                         const CalibrationSnapshot& snap_next) {
    const double dt_probe = snap_next.t - snap.t;
    if (!(dt_probe > 0.0))
        throw usage_error("assemble_calibration_stencils: need snapshot at t + dt_probe");
    CalibrationStencils cs;
    cs.div_xi = divergence_centered(snap.xi);
    cs.grad_div_xi = gradient(cs.div_xi);
    cs.grad_xi = gradient_tensor(snap.xi);
    cs.grad_B = gradient_tensor(snap.B);
    cs.div_B = ScalarField(snap.theta.grid);
    for (std::size_t k = 0; k < cs.div_B.values.size(); ++k)
        cs.div_B.values[k] = cs.grad_B.xx.values[k] + cs.grad_B.yy.values[k];
    cs.dt_xi = VectorField(snap.theta.grid, Staggering::cell);
    cs.dt_theta = ScalarField(snap.theta.grid);
    for (std::size_t k = 0; k < cs.dt_theta.values.size(); ++k) {
        cs.dt_xi.u[k] = (snap_next.xi.u[k] - snap.xi.u[k]) / dt_probe;
        cs.dt_xi.v[k] = (snap_next.xi.v[k] - snap.xi.v[k]) / dt_probe;
        cs.dt_theta.values[k] = (snap_next.theta.values[k] - snap.theta.values[k]) / dt_probe;
    }
    cs.grad_theta = gradient(snap.theta);
    return cs;
}

struct NamedTerms {
    std::vector<std::pair<std::string, double>> terms;

    double sum() const {
        std::vector<double> v(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i) v[i] = terms[i].second;
        return pairwise_sum(v);
    }
    double get(const std::string& name) const {
        for (const auto& t : terms)
            if (t.first == name) return t.second;
        throw usage_error("NamedTerms: no term " + name);
    }
};

// Every spatial integral on the right-hand side of the relative energy
// inequality, evaluated at one time with its sign, so that
// E(T) <= E(0) + int_0^T sum(terms) dt is the discrete echo of the estimate.
// D1, D2 and the viscous square are also reported unsigned via get().
inline NamedTerms rhs_terms_relative_energy(const PhaseFieldBundle& b, const VectorField& v_cell,
                                            const VectorField& v_ref_cell,
                                            const TensorField& grad_v, const TensorField& grad_v_ref,
                                            const ScalarField& chi, const CalibrationSnapshot& snap,
                                            const CalibrationStencils& cs, double c0) {
    const Grid2D& g = b.phi.grid;
    const std::size_t m = b.phi.values.size();
    const double eps = b.eps;
    const double sqe = std::sqrt(eps);
    const double h2 = g.h() * g.h();

    std::vector<double> tv[15];
    for (auto& t : tv) t.assign(m, 0.0);

    for (std::size_t k = 0; k < m; ++k) {
        const double dvx = v_cell.u[k] - v_ref_cell.u[k];
        const double dvy = v_cell.v[k] - v_ref_cell.v[k];
        const double gvxx = grad_v.xx.values[k] - grad_v_ref.xx.values[k];
        const double gvxy = grad_v.xy.values[k] - grad_v_ref.xy.values[k];
        const double gvyx = grad_v.yx.values[k] - grad_v_ref.yx.values[k];
        const double gvyy = grad_v.yy.values[k] - grad_v_ref.yy.values[k];
        const double H = b.H.values[k];
        const double r2w = b.root2w.values[k];
        const double agp = b.abs_grad_phi.values[k];
        const double agpsi = b.abs_grad_psi.values[k];
        const double dxi = cs.div_xi.values[k];
        const double xix = snap.xi.u[k], xiy = snap.xi.v[k];
        const double nx = b.n.u[k], ny = b.n.v[k];
        const double Bx = snap.B.u[k], By = snap.B.v[k];
        const double vrx = v_ref_cell.u[k], vry = v_ref_cell.v[k];
        const double Bvx = Bx - vrx, Bvy = By - vry;
        const double Bvxi = Bvx * xix + Bvy * xiy;
        const double psi_def = c0 * chi.values[k] - b.psi.values[k];
        const double equip_lin = r2w / sqe - sqe * agp;  // sqrt(2W)/sqrt(eps) - sqrt(eps)|gphi|
        const double meas_gap = eps * agp * agp - agpsi;  // eps|gphi|^2 - |gpsi|

        // 1: -|grad v_eps - grad v|^2
        tv[0][k] = -(gvxx * gvxx + gvxy * gvxy + gvyx * gvyx + gvyy * gvyy);
        // 2: -(1/2eps)|H + sqrt(2W) div xi|^2
        const double d1 = H + r2w * dxi;
        tv[1][k] = -0.5 / eps * d1 * d1;
        // 3: -(1/2eps)|H - ((B-v).xi) eps |grad phi||^2
        const double d2 = H - Bvxi * eps * agp;
        tv[2][k] = -0.5 / eps * d2 * d2;
        // 4: -(v_eps - v).((v_eps - v).grad) v
        tv[3][k] = -(dvx * (dvx * grad_v_ref.xx.values[k] + dvy * grad_v_ref.xy.values[k]) +
                     dvy * (dvx * grad_v_ref.yx.values[k] + dvy * grad_v_ref.yy.values[k]));
        // 5: -(c0 chi - psi)((v_eps - v).grad)(div xi)
        tv[4][k] = -psi_def * (dvx * cs.grad_div_xi.u[k] + dvy * cs.grad_div_xi.v[k]);
        // 6: +|(B-v).xi + div xi|^2 eps |grad phi|^2
        const double nvel = Bvxi + dxi;
        tv[5][k] = nvel * nvel * eps * agp * agp;
        // 7: +|div xi|^2 (sqrt(2W)/sqrt(eps) - sqrt(eps)|grad phi|)^2
        tv[6][k] = dxi * dxi * equip_lin * equip_lin;
        // 8: -(1/sqrt(eps))(H + sqrt(2W) div xi)((v-B).(n-xi)) sqrt(eps)|grad phi|
        const double vBnxi = (vrx - Bx) * (nx - xix) + (vry - By) * (ny - xiy);
        tv[7][k] = -d1 * vBnxi * agp;
        // 9: -(dt xi + (B.grad) xi + (grad B)^T xi).(n - xi)|grad psi|
        const double trx = cs.dt_xi.u[k] + Bx * cs.grad_xi.xx.values[k] +
                           By * cs.grad_xi.xy.values[k] + cs.grad_B.xx.values[k] * xix +
                           cs.grad_B.yx.values[k] * xiy;
        const double try_ = cs.dt_xi.v[k] + Bx * cs.grad_xi.yx.values[k] +
                            By * cs.grad_xi.yy.values[k] + cs.grad_B.xy.values[k] * xix +
                            cs.grad_B.yy.values[k] * xiy;
        tv[8][k] = -(trx * (nx - xix) + try_ * (ny - xiy)) * agpsi;
        // 10: -xi.(dt xi + (B.grad) xi)|grad psi|
        const double adx = cs.dt_xi.u[k] + Bx * cs.grad_xi.xx.values[k] + By * cs.grad_xi.xy.values[k];
        const double ady = cs.dt_xi.v[k] + Bx * cs.grad_xi.yx.values[k] + By * cs.grad_xi.yy.values[k];
        tv[9][k] = -(xix * adx + xiy * ady) * agpsi;
        // 11: -grad B : (xi - n) ox (xi - n) |grad psi|
        const double ex = xix - nx, ey = xiy - ny;
        const double quad = cs.grad_B.xx.values[k] * ex * ex + cs.grad_B.xy.values[k] * ex * ey +
                            cs.grad_B.yx.values[k] * ey * ex + cs.grad_B.yy.values[k] * ey * ey;
        tv[10][k] = -quad * agpsi;
        // 12: +(div B)(1 - xi.n)|grad psi|
        tv[11][k] = cs.div_B.values[k] * (1.0 - (xix * nx + xiy * ny)) * agpsi;
        // 13: +(div B) (1/2)(sqrt(eps)|grad phi| - sqrt(2W)/sqrt(eps))^2
        tv[12][k] = cs.div_B.values[k] * 0.5 * equip_lin * equip_lin;
        // 14: -(n ox n - xi ox xi) : grad B (eps|grad phi|^2 - |grad psi|)
        const double nBn = cs.grad_B.xx.values[k] * nx * nx + cs.grad_B.xy.values[k] * nx * ny +
                           cs.grad_B.yx.values[k] * ny * nx + cs.grad_B.yy.values[k] * ny * ny;
        const double xBx = cs.grad_B.xx.values[k] * xix * xix + cs.grad_B.xy.values[k] * xix * xiy +
                           cs.grad_B.yx.values[k] * xiy * xix + cs.grad_B.yy.values[k] * xiy * xiy;
        tv[13][k] = -(nBn - xBx) * meas_gap;
        // 15: -xi ox xi : grad B (eps|grad phi|^2 - |grad psi|)
        tv[14][k] = -xBx * meas_gap;
    }

    static const char* names[15] = {
        "viscous_square",      "dissip_curvature_sq",  "dissip_transport_sq", "advection_vv",
        "indicator_advection", "normal_vel_comp_sq",   "divxi_equip_sq",      "curvature_cross",
        "xi_transport",        "xi_length_transport",  "stretch_quadratic",   "divB_tilt",
        "divB_equip",          "anisotropy_meas_gap",  "xixi_meas_gap"};
    NamedTerms out;
    out.terms.reserve(15);
    for (int q = 0; q < 15; ++q) out.terms.push_back({names[q], h2 * pairwise_sum(tv[q])});
    return out;
}

// RHS integrals of the bulk-error evolution identity, signed so that
// E_vol(T) = E_vol(0) + int_0^T sum(terms) dt up to discretization.
inline NamedTerms rhs_terms_bulk_error(const PhaseFieldBundle& b, const VectorField& v_cell,
                                       const VectorField& v_ref_cell, const ScalarField& chi,
                                       const CalibrationSnapshot& snap,
                                       const CalibrationStencils& cs, double c0) {
    const Grid2D& g = b.phi.grid;
    const std::size_t m = b.phi.values.size();
    const double eps = b.eps;
    const double sqe = std::sqrt(eps);
    const double h2 = g.h() * g.h();

    std::vector<double> tv[9];
    for (auto& t : tv) t.assign(m, 0.0);

    for (std::size_t k = 0; k < m; ++k) {
        const double th = snap.theta.values[k];
        const double psi_err = b.psi.values[k] - c0 * chi.values[k];
        const double agp = b.abs_grad_phi.values[k];
        const double agpsi = b.abs_grad_psi.values[k];
        const double H = b.H.values[k];
        const double r2w = b.root2w.values[k];
        const double dxi = cs.div_xi.values[k];
        const double xix = snap.xi.u[k], xiy = snap.xi.v[k];
        const double nx = b.n.u[k], ny = b.n.v[k];
        const double Bx = snap.B.u[k], By = snap.B.v[k];
        const double vrx = v_ref_cell.u[k], vry = v_ref_cell.v[k];
        const double Bvxi = (Bx - vrx) * xix + (By - vry) * xiy;
        const double equip_dev = sqe * agp - r2w / sqe;  // sqrt(eps)|gphi| - sqrt(2W)/sqrt(eps)

        // 1: (psi - c0 chi)(dt theta + (B.grad) theta)
        tv[0][k] = psi_err * (cs.dt_theta.values[k] + Bx * cs.grad_theta.u[k] +
                              By * cs.grad_theta.v[k]);
        // 2: (psi - c0 chi) theta div B
        tv[1][k] = psi_err * th * cs.div_B.values[k];
        // 3: theta ((B - v).(n - xi))|grad psi|
        tv[2][k] = th * ((Bx - vrx) * (nx - xix) + (By - vry) * (ny - xiy)) * agpsi;
        // 4: -(psi - c0 chi)((v - v_eps).grad) theta
        tv[3][k] = -psi_err * ((vrx - v_cell.u[k]) * cs.grad_theta.u[k] +
                               (vry - v_cell.v[k]) * cs.grad_theta.v[k]);
        // 5: theta ((B - v).xi)(|grad psi| - eps|grad phi|^2)
        tv[4][k] = th * Bvxi * (agpsi - eps * agp * agp);
        // 6: (((B - v).xi) sqrt(eps)|grad phi| - H/sqrt(eps)) theta sqrt(eps)|grad phi|
        tv[5][k] = (Bvxi * sqe * agp - H / sqe) * th * sqe * agp;
        // 7: theta (H/sqrt(eps) + sqrt(2W)/sqrt(eps) div xi)(sqrt(eps)|grad phi| - sqrt(2W)/sqrt(eps))
        tv[6][k] = th * (H / sqe + r2w / sqe * dxi) * equip_dev;
        // 8: theta (div xi)|sqrt(eps)|grad phi| - sqrt(2W)/sqrt(eps)|^2
        tv[7][k] = th * dxi * equip_dev * equip_dev;
        // 9: -theta sqrt(eps)|grad phi| (sqrt(eps)|grad phi| - sqrt(2W)/sqrt(eps))
        tv[8][k] = -th * sqe * agp * equip_dev;
    }

    static const char* names[9] = {"theta_transport",   "theta_divB",       "tilt_advection",
                                   "indicator_advection", "meas_gap",        "curvature_pairing",
                                   "equip_pairing",       "divxi_equip_sq",  "equip_linear"};
    NamedTerms out;
    out.terms.reserve(9);
    for (int q = 0; q < 9; ++q) out.terms.push_back({names[q], h2 * pairwise_sum(tv[q])});
    return out;
}

// Left-hand sides of the coercivity estimates plus the raw error norms.
struct CoercivityValues {
    double kin = 0.0;           // int 1/2 |v_eps - v|^2              (<= E)
    double tilt = 0.0;          // int (1 - n.xi)|grad psi|           (<= E)
    double equip = 0.0;         // int 1/2 (sqrt(eps)|gphi| - ...)^2  (<= E)
    double tilt_dist_psi = 0.0; // int |n-xi|^2|gpsi| + min{s^2,1}|gpsi|      (<= C E)
    double tilt_dist_phi = 0.0; // same with eps|gphi|^2 in place of |gpsi|   (<= C E)
    double mixed_gap = 0.0;     // int (min{|s|,1}+sqrt(1-n.xi))|eps|gphi|^2-|gpsi||  (<= C E)
    double weighted_L1 = 0.0;   // int min{|s|,1}|psi - c0 chi|       (<= C E_vol)
    double L1_err = 0.0;        // ||c0 chi - psi||_L1
    double L2_vel = 0.0;        // ||v_eps - v||_L2
    int pointwise_violations = 0;  // cells violating 2(1 - n.xi) >= |n - xi|^2
};

inline CoercivityValues coercivity_report(const PhaseFieldBundle& b, const VectorField& v_cell,
                                          const VectorField& v_ref_cell, const VectorField& xi,
                                          const ScalarField& s_dist, const ScalarField& chi,
                                          double c0) {
    const std::size_t m = b.phi.values.size();
    const double eps = b.eps;
    std::vector<double> ikin(m), itilt(m), iequip(m), i39(m), i310(m), imix(m), iw1(m), il1(m),
        il2(m);
    int violations = 0;
    const double sqe = std::sqrt(eps);
    for (std::size_t k = 0; k < m; ++k) {
        const double dvx = v_cell.u[k] - v_ref_cell.u[k];
        const double dvy = v_cell.v[k] - v_ref_cell.v[k];
        ikin[k] = 0.5 * (dvx * dvx + dvy * dvy);
        il2[k] = dvx * dvx + dvy * dvy;
        const double ndotxi = b.n.u[k] * xi.u[k] + b.n.v[k] * xi.v[k];
        const double agpsi = b.abs_grad_psi.values[k];
        const double agp = b.abs_grad_phi.values[k];
        itilt[k] = (1.0 - ndotxi) * agpsi;
        const double d = sqe * agp - b.root2w.values[k] / sqe;
        iequip[k] = 0.5 * d * d;
        const double ex = b.n.u[k] - xi.u[k], ey = b.n.v[k] - xi.v[k];
        const double n_minus_xi2 = ex * ex + ey * ey;
        if (2.0 * (1.0 - ndotxi) < n_minus_xi2 - 1e-12 * (1.0 + n_minus_xi2)) ++violations;
        const double sv = s_dist.values[k];
        const double d1 = std::min(std::abs(sv), 1.0);
        const double d2 = std::min(sv * sv, 1.0);
        i39[k] = n_minus_xi2 * agpsi + d2 * agpsi;
        i310[k] = n_minus_xi2 * eps * agp * agp + d2 * eps * agp * agp;
        imix[k] = (d1 + std::sqrt(std::max(0.0, 1.0 - ndotxi))) *
                  std::abs(eps * agp * agp - agpsi);
        const double perr = std::abs(b.psi.values[k] - c0 * chi.values[k]);
        iw1[k] = d1 * perr;
        il1[k] = perr;
    }
    const double h2 = b.phi.grid.h() * b.phi.grid.h();
    CoercivityValues out;
    out.kin = h2 * pairwise_sum(ikin);
    out.tilt = h2 * pairwise_sum(itilt);
    out.equip = h2 * pairwise_sum(iequip);
    out.tilt_dist_psi = h2 * pairwise_sum(i39);
    out.tilt_dist_phi = h2 * pairwise_sum(i310);
    out.mixed_gap = h2 * pairwise_sum(imix);
    out.weighted_L1 = h2 * pairwise_sum(iw1);
    out.L1_err = h2 * pairwise_sum(il1);
    out.L2_vel = std::sqrt(h2 * pairwise_sum(il2));
    out.pointwise_violations = violations;
    return out;
}

// One snapshot row of the diagnostics time series; fixed CSV column order.
struct DiagnosticsRecord {
    double t = 0.0;
    double E = 0.0, E_kin = 0.0, E_equip = 0.0, E_tilt = 0.0;
    double E_vol = 0.0, E_total = 0.0;
    double D_visc = 0.0, D1 = 0.0, D2 = 0.0;
    double L1_err = 0.0, L2_vel = 0.0;
    double c36 = 0.0, c37 = 0.0, c38 = 0.0, c39 = 0.0, c310 = 0.0, c319 = 0.0;

    static std::string csv_header() {
        return "t,E,E_kin,E_equip,E_tilt,E_vol,E_total,D_visc,D1,D2,L1_err,L2_vel,c36,c37,c38,"
               "c39,c310,c319";
    }
    std::string csv_row() const {
        const double vals[] = {t,  E,  E_kin,  E_equip, E_tilt, E_vol, E_total, D_visc, D1,
                               D2, L1_err, L2_vel, c36,    c37,    c38,   c39,     c310,   c319};
        std::string row;
        for (std::size_t i = 0; i < sizeof(vals) / sizeof(double); ++i) {
            if (i) row += ',';
            row += format_double(vals[i]);
        }
        return row;
    }
};

}  // namespace nsac
