// grid.hpp — uniform MAC grid on the unit square, discrete calculus, quadrature
#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include "nsac/common.hpp"

namespace nsac {

enum class Bc { dirichlet, periodic };

// How ghost cells are filled when a stencil reaches past the boundary.
enum class GhostRule { dirichlet_trace, neumann_reflect, periodic };

struct Grid2D {
    int n = 0;  // cells per side, even, >= 16
    Bc bc = Bc::dirichlet;

    Grid2D() = default;
    Grid2D(int n_, Bc bc_) : n(n_), bc(bc_) {
        if (n < 16) throw config_error("Grid2D: n must be >= 16");
        if (n % 2 != 0) throw config_error("Grid2D: n must be even");
    }

    double h() const { return 1.0 / n; }
    double x_center(int i) const { return (i + 0.5) / n; }
    double y_center(int j) const { return (j + 0.5) / n; }
    int cells() const { return n * n; }

    bool operator==(const Grid2D& o) const { return n == o.n && bc == o.bc; }
};

struct ScalarField {
    Grid2D grid;
    std::vector<double> values;  // row-major, idx = j*n + i

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.cells()), fill) {}

    double& operator()(int i, int j) { return values[static_cast<std::size_t>(j) * grid.n + i]; }
    double operator()(int i, int j) const {
        return values[static_cast<std::size_t>(j) * grid.n + i];
    }
};

enum class Staggering { mac, cell };

// MAC layout: u on vertical faces (x = i*h), v on horizontal faces (y = j*h).
// Periodic grids store n x n per component (face n aliases face 0);
// Dirichlet grids store the wall faces explicitly (they stay pinned at the trace).
// cell staggering keeps both components at cell centers (diagnostic fields).
struct VectorField {
    Grid2D grid;
    Staggering stag = Staggering::cell;
    std::vector<double> u, v;

    VectorField() = default;
    VectorField(const Grid2D& g, Staggering s) : grid(g), stag(s) {
        const int n = g.n;
        if (s == Staggering::cell) {
            u.assign(static_cast<std::size_t>(n) * n, 0.0);
            v.assign(static_cast<std::size_t>(n) * n, 0.0);
        } else if (g.bc == Bc::periodic) {
            u.assign(static_cast<std::size_t>(n) * n, 0.0);
            v.assign(static_cast<std::size_t>(n) * n, 0.0);
        } else {
            u.assign(static_cast<std::size_t>(n + 1) * n, 0.0);
            v.assign(static_cast<std::size_t>(n) * (n + 1), 0.0);
        }
    }

    int u_stride() const {
        return (stag == Staggering::mac && grid.bc == Bc::dirichlet) ? grid.n + 1 : grid.n;
    }

    // u-face (i, j), i in [0..n] for Dirichlet MAC; wraps on periodic grids.
    double& u_at(int i, int j) {
        if (stag == Staggering::mac && grid.bc == Bc::periodic) i = (i % grid.n + grid.n) % grid.n;
        return u[static_cast<std::size_t>(j) * u_stride() + i];
    }
    double u_at(int i, int j) const {
        if (stag == Staggering::mac && grid.bc == Bc::periodic) i = (i % grid.n + grid.n) % grid.n;
        return u[static_cast<std::size_t>(j) * u_stride() + i];
    }
    double& v_at(int i, int j) {
        if (stag == Staggering::mac && grid.bc == Bc::periodic) j = (j % grid.n + grid.n) % grid.n;
        return v[static_cast<std::size_t>(j) * grid.n + i];
    }
    double v_at(int i, int j) const {
        if (stag == Staggering::mac && grid.bc == Bc::periodic) j = (j % grid.n + grid.n) % grid.n;
        return v[static_cast<std::size_t>(j) * grid.n + i];
    }
};

namespace detail {
// Value of f at (i, j) with ghost handling; i or j may be -1 or n.
inline double ghost_value(const ScalarField& f, int i, int j, GhostRule rule, double trace) {
    const int n = f.grid.n;
    if (rule == GhostRule::periodic) {
        i = (i % n + n) % n;
        j = (j % n + n) % n;
        return f(i, j);
    }
    int ii = i, jj = j;
    bool outside = false;
    if (ii < 0) {
        ii = 0;
        outside = true;
    } else if (ii >= n) {
        ii = n - 1;
        outside = true;
    }
    if (jj < 0) {
        jj = 0;
        outside = true;
    } else if (jj >= n) {
        jj = n - 1;
        outside = true;
    }
    if (!outside) return f(ii, jj);
    if (rule == GhostRule::neumann_reflect) return f(ii, jj);
    return 2.0 * trace - f(ii, jj);  // linear extrapolation through the wall value
}
}  // namespace detail

inline GhostRule default_ghost(const Grid2D& g) {
    return g.bc == Bc::periodic ? GhostRule::periodic : GhostRule::dirichlet_trace;
}

// Cell-centered gradient: centered interior differences, one-sided second-order
// at Dirichlet boundaries, wraparound on periodic grids. Exact for linears.
inline VectorField gradient(const ScalarField& f) {
    const Grid2D& g = f.grid;
    const int n = g.n;
    const double inv2h = 0.5 * n;
    VectorField out(g, Staggering::cell);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            double gx, gy;
            if (g.bc == Bc::periodic) {
                gx = (f((i + 1) % n, j) - f((i + n - 1) % n, j)) * inv2h;
                gy = (f(i, (j + 1) % n) - f(i, (j + n - 1) % n)) * inv2h;
            } else {
                if (i == 0)
                    gx = (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) * inv2h;
                else if (i == n - 1)
                    gx = (3.0 * f(n - 1, j) - 4.0 * f(n - 2, j) + f(n - 3, j)) * inv2h;
                else
                    gx = (f(i + 1, j) - f(i - 1, j)) * inv2h;
                if (j == 0)
                    gy = (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) * inv2h;
                else if (j == n - 1)
                    gy = (3.0 * f(i, n - 1) - 4.0 * f(i, n - 2) + f(i, n - 3)) * inv2h;
                else
                    gy = (f(i, j + 1) - f(i, j - 1)) * inv2h;
            }
            out.u_at(i, j) = gx;
            out.v_at(i, j) = gy;
        }
    }
    return out;
}

// Staggered divergence at cell centers; adjoint (up to sign) of gradient_staggered.
inline ScalarField divergence(const VectorField& w) {
    if (w.stag != Staggering::mac)
        throw usage_error("divergence: expected a staggered (MAC) field");
    const Grid2D& g = w.grid;
    const int n = g.n;
    const double invh = n;
    ScalarField out(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out(i, j) = (w.u_at(i + 1, j) - w.u_at(i, j)) * invh +
                        (w.v_at(i, j + 1) - w.v_at(i, j)) * invh;
    return out;
}

// Face-located differences of a cell field; the transpose of divergence.
// Dirichlet-trace rule fills wall faces from the trace; neumann zeroes them.
inline VectorField gradient_staggered(const ScalarField& f, GhostRule rule, double trace = 0.0) {
    const Grid2D& g = f.grid;
    const int n = g.n;
    const double invh = n;
    VectorField out(g, Staggering::mac);
    if (rule == GhostRule::periodic) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                out.u_at(i, j) = (f(i, j) - f((i + n - 1) % n, j)) * invh;
                out.v_at(i, j) = (f(i, j) - f(i, (j + n - 1) % n)) * invh;
            }
        return out;
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i) {
            double d;
            if (i == 0)
                d = (rule == GhostRule::neumann_reflect) ? 0.0 : (f(0, j) - (2.0 * trace - f(0, j))) * invh;
            else if (i == n)
                d = (rule == GhostRule::neumann_reflect) ? 0.0 : ((2.0 * trace - f(n - 1, j)) - f(n - 1, j)) * invh;
            else
                d = (f(i, j) - f(i - 1, j)) * invh;
            out.u_at(i, j) = d;
        }
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) {
            double d;
            if (j == 0)
                d = (rule == GhostRule::neumann_reflect) ? 0.0 : (f(i, 0) - (2.0 * trace - f(i, 0))) * invh;
            else if (j == n)
                d = (rule == GhostRule::neumann_reflect) ? 0.0 : ((2.0 * trace - f(i, n - 1)) - f(i, n - 1)) * invh;
            else
                d = (f(i, j) - f(i, j - 1)) * invh;
            out.v_at(i, j) = d;
        }
    return out;
}

// 5-point Laplacian with the requested ghost rule.
inline ScalarField laplacian(const ScalarField& f, GhostRule rule, double trace = 0.0) {
    const Grid2D& g = f.grid;
    const int n = g.n;
    const double invh2 = static_cast<double>(n) * n;
    ScalarField out(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double fw = detail::ghost_value(f, i - 1, j, rule, trace);
            const double fe = detail::ghost_value(f, i + 1, j, rule, trace);
            const double fs = detail::ghost_value(f, i, j - 1, rule, trace);
            const double fn = detail::ghost_value(f, i, j + 1, rule, trace);
            out(i, j) = (fw + fe + fs + fn - 4.0 * f(i, j)) * invh2;
        }
    return out;
}

inline ScalarField laplacian(const ScalarField& f) { return laplacian(f, default_ghost(f.grid)); }

// Midpoint rule, h^2 * sum; deterministic pairwise reduction.
inline double integrate(const ScalarField& f) {
    const double h = f.grid.h();
    return h * h * pairwise_sum(f.values);
}

// Second-order averaging of a MAC field to cell centers.
inline VectorField to_cell_centers(const VectorField& w) {
    if (w.stag != Staggering::mac) throw usage_error("to_cell_centers: expected a MAC field");
    const Grid2D& g = w.grid;
    const int n = g.n;
    VectorField out(g, Staggering::cell);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            out.u_at(i, j) = 0.5 * (w.u_at(i, j) + w.u_at(i + 1, j));
            out.v_at(i, j) = 0.5 * (w.v_at(i, j) + w.v_at(i, j + 1));
        }
    return out;
}

// Cell-centered divergence of a cell-centered vector field (diagnostics:
// div xi, div B). Same stencil family as gradient().
inline ScalarField divergence_centered(const VectorField& w) {
    if (w.stag != Staggering::cell)
        throw usage_error("divergence_centered: expected a cell-centered field");
    ScalarField fu(w.grid), fv(w.grid);
    fu.values = w.u;
    fv.values = w.v;
    VectorField gu = gradient(fu);
    VectorField gv = gradient(fv);
    ScalarField out(w.grid);
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = gu.u[k] + gv.v[k];
    return out;
}

// Cell-centered gradient of each component: [xx xy; yx yy] with
// xx = d(u)/dx, xy = d(u)/dy, yx = d(v)/dx, yy = d(v)/dy.
struct TensorField {
    ScalarField xx, xy, yx, yy;
};

inline TensorField gradient_tensor(const VectorField& w) {
    if (w.stag != Staggering::cell)
        throw usage_error("gradient_tensor: expected a cell-centered field");
    ScalarField fu(w.grid), fv(w.grid);
    fu.values = w.u;
    fv.values = w.v;
    VectorField gu = gradient(fu);
    VectorField gv = gradient(fv);
    TensorField t{ScalarField(w.grid), ScalarField(w.grid), ScalarField(w.grid),
                  ScalarField(w.grid)};
    t.xx.values = gu.u;
    t.xy.values = gu.v;
    t.yx.values = gv.u;
    t.yy.values = gv.v;
    return t;
}

// Bilinear interpolation of a cell-centered field at a physical point.
inline double sample_bilinear(const ScalarField& f, double x, double y) {
    const int n = f.grid.n;
    const double gx = x * n - 0.5, gy = y * n - 0.5;
    int i0 = static_cast<int>(std::floor(gx));
    int j0 = static_cast<int>(std::floor(gy));
    const double fx = gx - i0, fy = gy - j0;
    auto at = [&](int i, int j) {
        if (f.grid.bc == Bc::periodic) {
            i = (i % n + n) % n;
            j = (j % n + n) % n;
        } else {
            i = std::min(n - 1, std::max(0, i));
            j = std::min(n - 1, std::max(0, j));
        }
        return f(i, j);
    };
    return (1 - fx) * (1 - fy) * at(i0, j0) + fx * (1 - fy) * at(i0 + 1, j0) +
           (1 - fx) * fy * at(i0, j0 + 1) + fx * fy * at(i0 + 1, j0 + 1);
}

// CSV dump, row-major, header "i,j,value".
inline void write_csv(const ScalarField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("write_csv: cannot open " + path);
    out << "i,j,value\n";
    for (int j = 0; j < f.grid.n; ++j)
        for (int i = 0; i < f.grid.n; ++i)
            out << i << ',' << j << ',' << format_double(f(i, j)) << '\n';
}

}  // namespace nsac
