// reference.hpp — analytic strong solution: the shrinking circle under MCF
#pragma once

#include <cmath>

#include "nsac/common.hpp"
#include "nsac/grid.hpp"

namespace nsac {

// Orientation conventions, used consistently everywhere downstream:
//   s(x,t) = R(t) - |x - c|   (positive inside the disc Omega_+)
//   n = grad s = -(x-c)/|x-c| (points into Omega_+)
//   Delta s = -H on I  =>  H = 1/R  (positive for the shrinking circle)
//   V = n.v + H; with v = 0: V = H = -dR/dt, hence R(t) = sqrt(r0^2 - 2t).
struct CircleReference {
    enum class VMode { zero, prescribed };

    double cx = 0.5, cy = 0.5;
    double r0 = 0.25;
    VMode v_mode = VMode::zero;
    double v_amp = 0.05;  // stream-function amplitude for the synthetic mode

    double t_ext() const { return 0.5 * r0 * r0; }

    double radius(double t) const {
        if (!(t >= 0.0) || t >= t_ext())
            throw input_error("CircleReference::radius: t outside [0, t_ext)");
        return std::sqrt(r0 * r0 - 2.0 * t);
    }

    double signed_distance(double x, double y, double t) const {
        const double dx = x - cx, dy = y - cy;
        return radius(t) - std::sqrt(dx * dx + dy * dy);
    }

    struct Geometry {
        double nx, ny;  // unit normal, points into the disc
        double H;       // scalar mean curvature of I(t)
        double V;       // normal speed
        double px, py;  // nearest point on I(t)
    };

    Geometry geometry(double x, double y, double t) const {
        const double dx = x - cx, dy = y - cy;
        const double r = std::sqrt(dx * dx + dy * dy);
        if (r < 1e-14) throw input_error("CircleReference::geometry: projection undefined at center");
        const double R = radius(t);
        Geometry g;
        g.nx = -dx / r;
        g.ny = -dy / r;
        g.H = 1.0 / R;
        g.px = cx + dx / r * R;
        g.py = cy + dy / r * R;
        g.V = g.H + (velocity_x(g.px, g.py, t) * g.nx + velocity_y(g.px, g.py, t) * g.ny);
        return g;
    }

    int indicator(double x, double y, double t) const {
        return signed_distance(x, y, t) > 0.0 ? 1 : 0;
    }

    // Synthetic solenoidal velocity (stream function A sin^2(pi x) sin^2(pi y)).
    // Smooth, vanishes with its tangential derivative on the walls. It does not
    // solve Navier-Stokes; it only exercises the v-dependent calibration terms.
    double velocity_x(double x, double y, double /*t*/) const {
        if (v_mode == VMode::zero) return 0.0;
        const double pi = 3.14159265358979323846;
        const double sx = std::sin(pi * x), sy = std::sin(pi * y), cyv = std::cos(pi * y);
        return v_amp * 2.0 * pi * sx * sx * sy * cyv;  // d(psi)/dy
    }
    double velocity_y(double x, double y, double /*t*/) const {
        if (v_mode == VMode::zero) return 0.0;
        const double pi = 3.14159265358979323846;
        const double sx = std::sin(pi * x), cxv = std::cos(pi * x), sy = std::sin(pi * y);
        return -v_amp * 2.0 * pi * sx * cxv * sy * sy;  // -d(psi)/dx
    }

    // Interface must keep a 2*delta tube inside the unit square (no boundary
    // contact); checked at t = 0, the radius only shrinks afterwards.
    void validate(double delta) const {
        const double margin = std::min(std::min(cx, 1.0 - cx), std::min(cy, 1.0 - cy));
        if (!(r0 > 0.0)) throw config_error("CircleReference: r0 must be positive");
        if (r0 + 2.0 * delta > margin + 1e-12)
            throw config_error("CircleReference: tube of width 2*delta around I(0) leaves the domain");
    }
};

// Grid realizations of the reference quantities at cell centers.
inline ScalarField sample_signed_distance(const CircleReference& ref, const Grid2D& g, double t) {
    ScalarField s(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            s(i, j) = ref.signed_distance(g.x_center(i), g.y_center(j), t);
    return s;
}

inline ScalarField sample_indicator(const CircleReference& ref, const Grid2D& g, double t) {
    ScalarField chi(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            chi(i, j) = ref.indicator(g.x_center(i), g.y_center(j), t);
    return chi;
}

inline VectorField sample_reference_velocity(const CircleReference& ref, const Grid2D& g,
                                             double t) {
    VectorField w(g, Staggering::cell);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            w.u_at(i, j) = ref.velocity_x(g.x_center(i), g.y_center(j), t);
            w.v_at(i, j) = ref.velocity_y(g.x_center(i), g.y_center(j), t);
        }
    return w;
}

}  // namespace nsac
