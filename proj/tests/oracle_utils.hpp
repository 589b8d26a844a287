// oracle_utils.hpp — test-only oracles, kept independent of the library paths
// they are used to check: Romberg quadrature (vs adaptive Simpson), RK4 (vs
// closed forms), deterministic RNG for property tests, refinement-order fits.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Romberg integration on [a, b].
inline double romberg(const std::function<double(double)>& f, double a, double b, int levels = 16) {
    std::vector<double> prev(1), cur;
    prev[0] = 0.5 * (b - a) * (f(a) + f(b));
    for (int k = 1; k < levels; ++k) {
        const long m = 1L << k;
        const double h = (b - a) / static_cast<double>(m);
        double s = 0.0;
        for (long i = 1; i < m; i += 2) s += f(a + i * h);
        cur.assign(k + 1, 0.0);
        cur[0] = 0.5 * prev[0] + h * s;
        double pow4 = 1.0;
        for (int j = 1; j <= k; ++j) {
            pow4 *= 4.0;
            cur[j] = cur[j - 1] + (cur[j - 1] - prev[j - 1]) / (pow4 - 1.0);
        }
        if (k > 3 && std::abs(cur[k] - prev[k - 1]) < 1e-14 * (1.0 + std::abs(cur[k])))
            return cur[k];
        prev = cur;
    }
    return prev.back();
}

// Classical RK4 for scalar ODE y' = f(t, y).
inline double rk4(const std::function<double(double, double)>& f, double y0, double t0, double t1,
                  int steps) {
    double y = y0, t = t0;
    const double h = (t1 - t0) / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = f(t, y);
        const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        const double k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return y;
}

// splitmix64: tiny deterministic generator for property tests.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

// Centered finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Log-log least squares slope of err vs h (refinement order).
inline double order_fit(const std::vector<double>& h, const std::vector<double>& err) {
    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
