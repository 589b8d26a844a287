// dwell.hpp — double-well potential, its BV primitive and the 1D optimal profile
#pragma once

#include <cmath>

#include "nsac/common.hpp"

namespace nsac {

// W(r) = scale * (1 - r^2)^2 / 2 on [r_min, r_max] = [-1, 1].
// scale != 1 is only exercised by tests (c0 scaling law); production runs use 1.
struct DoubleWellSpec {
    enum class Kind { quartic };
    Kind kind = Kind::quartic;
    double scale = 1.0;
    double r_min = -1.0;
    double r_max = 1.0;

    double clamp(double r) const { return std::min(r_max, std::max(r_min, r)); }
};

struct PotentialValues {
    double w;       // W(r)
    double dw;      // W'(r)
    double root2w;  // sqrt(2 W(clamp(r)))
};

inline PotentialValues potential(const DoubleWellSpec& spec, double r) {
    if (!std::isfinite(r)) throw input_error("potential: non-finite argument");
    const double one_m_r2 = 1.0 - r * r;
    PotentialValues out;
    out.w = 0.5 * spec.scale * one_m_r2 * one_m_r2;
    out.dw = -2.0 * spec.scale * r * one_m_r2;
    const double rc = spec.clamp(r);
    out.root2w = std::sqrt(spec.scale) * (1.0 - rc * rc);
    return out;
}

// psi(r) = int_{-1}^{r} sqrt(2W(s)) ds; closed form for the quartic well.
// Monotone, psi(-1) = 0, psi(1) = c0.
inline double psi_primitive(const DoubleWellSpec& spec, double r) {
    if (!std::isfinite(r)) throw input_error("psi_primitive: non-finite argument");
    const double rc = spec.clamp(r);
    // (r + 1) - (r^3 + 1)/3: exactly zero at the lower well
    return std::sqrt(spec.scale) * ((rc + 1.0) - (rc * rc * rc + 1.0) / 3.0);
}

// c0 = int_{-1}^{1} sqrt(2W); quadrature (exact here: the integrand is a parabola).
inline double surface_tension_c0(const DoubleWellSpec& spec) {
    return adaptive_simpson([&](double r) { return potential(spec, r).root2w; }, spec.r_min,
                            spec.r_max, 1e-12);
}

// Heteroclinic solution of eps * p' = sqrt(2W(p)), p(0) = 0: tanh for the quartic well.
inline double optimal_profile(const DoubleWellSpec& spec, double s, double eps) {
    if (!(eps > 0.0)) throw input_error("optimal_profile: eps must be positive");
    return std::tanh(std::sqrt(spec.scale) * s / eps);
}

// d/ds of the profile, used by equipartition checks.
inline double optimal_profile_deriv(const DoubleWellSpec& spec, double s, double eps) {
    if (!(eps > 0.0)) throw input_error("optimal_profile_deriv: eps must be positive");
    const double c = std::sqrt(spec.scale);
    const double t = std::tanh(c * s / eps);
    return c / eps * (1.0 - t * t);
}

}  // namespace nsac
