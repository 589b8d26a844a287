#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nsac/grid.hpp"
#include "oracle_utils.hpp"

using namespace nsac;

namespace {
constexpr double kPi = 3.14159265358979323846;

ScalarField fill(const Grid2D& g, double (*f)(double, double)) {
    ScalarField out(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) out(i, j) = f(g.x_center(i), g.y_center(j));
    return out;
}
}  // namespace

TEST_CASE("grid invariants") {
    Grid2D g(64, Bc::dirichlet);
    CHECK(g.h() * g.n == 1.0);
    CHECK_THROWS_AS(Grid2D(15, Bc::dirichlet), config_error);
    CHECK_THROWS_AS(Grid2D(33, Bc::dirichlet), config_error);
    CHECK_THROWS_AS(Grid2D(8, Bc::dirichlet), config_error);
}

TEST_CASE("gradient: constants and linears") {
    Grid2D g(32, Bc::periodic);
    ScalarField c = fill(g, [](double, double) { return 3.7; });
    VectorField gc = gradient(c);
    CHECK(max_abs(gc.u) == 0.0);
    CHECK(max_abs(gc.v) == 0.0);

    // f = x on a periodic grid: exact (1,0) away from the wrap line
    ScalarField fx = fill(g, [](double x, double) { return x; });
    VectorField gx = gradient(fx);
    for (int j = 0; j < g.n; ++j)
        for (int i = 1; i < g.n - 1; ++i) {
            CHECK(std::abs(gx.u_at(i, j) - 1.0) < 1e-12);
            CHECK(std::abs(gx.v_at(i, j)) < 1e-12);
        }

    // Dirichlet one-sided closure is exact on linears everywhere
    Grid2D gd(32, Bc::dirichlet);
    ScalarField fl = fill(gd, [](double x, double y) { return 2.0 * x - 0.5 * y; });
    VectorField gl = gradient(fl);
    for (std::size_t k = 0; k < gl.u.size(); ++k) {
        CHECK(std::abs(gl.u[k] - 2.0) < 1e-12);
        CHECK(std::abs(gl.v[k] + 0.5) < 1e-12);
    }
}

TEST_CASE("gradient: second order on smooth fields") {
    std::vector<double> hs, errs;
    for (int n : {64, 128, 256}) {
        Grid2D g(n, Bc::periodic);
        ScalarField f = fill(g, [](double x, double) { return std::sin(2.0 * kPi * x); });
        VectorField gf = gradient(f);
        double err = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                err = std::max(err,
                               std::abs(gf.u_at(i, j) - 2.0 * kPi * std::cos(2.0 * kPi * g.x_center(i))));
        hs.push_back(g.h());
        errs.push_back(err);
    }
    // refinement ratio n=64 vs n=128 within [3.6, 4.4]
    CHECK(errs[0] / errs[1] > 3.6);
    CHECK(errs[0] / errs[1] < 4.4);
    const double order = oracle::order_fit(hs, errs);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("divergence: staggered identities") {
    Grid2D g(64, Bc::dirichlet);
    VectorField w(g, Staggering::mac);
    // constant field
    for (auto& u : w.u) u = 1.25;
    for (auto& v : w.v) v = -0.5;
    ScalarField d = divergence(w);
    CHECK(max_abs(d.values) == 0.0);

    // u = (x, -y): solenoidal, exact for linear components
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i <= g.n; ++i) w.u_at(i, j) = static_cast<double>(i) / g.n;
    for (int j = 0; j <= g.n; ++j)
        for (int i = 0; i < g.n; ++i) w.v_at(i, j) = -static_cast<double>(j) / g.n;
    d = divergence(w);
    CHECK(max_abs(d.values) < 1e-12);

    VectorField cellw(g, Staggering::cell);
    CHECK_THROWS_AS(divergence(cellw), usage_error);
}

TEST_CASE("divergence: refinement order") {
    std::vector<double> hs, errs;
    for (int n : {64, 128, 256}) {
        Grid2D g(n, Bc::periodic);
        VectorField w(g, Staggering::mac);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                w.u_at(i, j) = std::sin(2.0 * kPi * static_cast<double>(i) / n);
        ScalarField d = divergence(w);
        double err = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                err = std::max(err, std::abs(d(i, j) - 2.0 * kPi * std::cos(2.0 * kPi * g.x_center(i))));
        hs.push_back(g.h());
        errs.push_back(err);
    }
    CHECK(errs[0] / errs[1] > 3.6);
    CHECK(errs[0] / errs[1] < 4.4);
}

TEST_CASE("laplacian: exactness and refinement") {
    Grid2D g(64, Bc::dirichlet);
    // linear: zero at interior
    ScalarField lin = fill(g, [](double x, double y) { return 1.0 + 2.0 * x - y; });
    ScalarField l = laplacian(lin, GhostRule::neumann_reflect);
    for (int j = 2; j < g.n - 2; ++j)
        for (int i = 2; i < g.n - 2; ++i) CHECK(std::abs(l(i, j)) < 1e-10);

    // quadratic: stencil exact, interior
    ScalarField quad = fill(g, [](double x, double y) { return x * x + y * y; });
    l = laplacian(quad, GhostRule::neumann_reflect);
    for (int j = 2; j < g.n - 2; ++j)
        for (int i = 2; i < g.n - 2; ++i) CHECK(l(i, j) == Catch::Approx(4.0).margin(1e-10));

    // periodic smooth: O(h^2)
    std::vector<double> hs, errs;
    for (int n : {64, 128, 256}) {
        Grid2D gp(n, Bc::periodic);
        ScalarField f = fill(gp, [](double x, double y) {
            return std::sin(2.0 * kPi * x) * std::sin(2.0 * kPi * y);
        });
        ScalarField lf = laplacian(f, GhostRule::periodic);
        double err = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                err = std::max(err, std::abs(lf(i, j) + 8.0 * kPi * kPi * f(i, j)));
        hs.push_back(gp.h());
        errs.push_back(err);
    }
    const double order = oracle::order_fit(hs, errs);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("integrate: exactness and disc area") {
    Grid2D g(256, Bc::dirichlet);
    ScalarField one = fill(g, [](double, double) { return 1.0; });
    CHECK(integrate(one) == Catch::Approx(1.0).epsilon(1e-14));
    ScalarField zero(g);
    CHECK(integrate(zero) == 0.0);

    // indicator of a disc of radius 1/4 around the center: area pi/16 within 2h
    ScalarField chi = fill(g, [](double x, double y) {
        const double dx = x - 0.5, dy = y - 0.5;
        return dx * dx + dy * dy < 0.0625 ? 1.0 : 0.0;
    });
    CHECK(std::abs(integrate(chi) - kPi / 16.0) < 2.0 * g.h());
}

TEST_CASE("integration by parts on periodic grids") {
    Grid2D g(64, Bc::periodic);
    oracle::Rng rng(1234);
    ScalarField f(g);
    VectorField w(g, Staggering::mac);
    for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
    for (auto& v : w.u) v = rng.uniform(-1.0, 1.0);
    for (auto& v : w.v) v = rng.uniform(-1.0, 1.0);
    ScalarField d = divergence(w);
    std::vector<double> prod(f.values.size());
    for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = f.values[k] * d.values[k];
    const double a = g.h() * g.h() * pairwise_sum(prod);
    VectorField gs = gradient_staggered(f, GhostRule::periodic);
    std::vector<double> prod2(gs.u.size() + gs.v.size());
    for (std::size_t k = 0; k < gs.u.size(); ++k) prod2[k] = gs.u[k] * w.u[k];
    for (std::size_t k = 0; k < gs.v.size(); ++k) prod2[gs.u.size() + k] = gs.v[k] * w.v[k];
    const double b = g.h() * g.h() * pairwise_sum(prod2);
    CHECK(std::abs(a + b) < 1e-12);
}

TEST_CASE("stencils are linear") {
    Grid2D g(32, Bc::periodic);
    oracle::Rng rng(99);
    ScalarField f(g), q(g);
    for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
    for (auto& v : q.values) v = rng.uniform(-1.0, 1.0);
    const double al = 1.7, be = -0.3;
    ScalarField comb(g);
    for (std::size_t k = 0; k < comb.values.size(); ++k)
        comb.values[k] = al * f.values[k] + be * q.values[k];
    VectorField gf = gradient(f), gq = gradient(q), gc = gradient(comb);
    for (std::size_t k = 0; k < gc.u.size(); ++k) {
        CHECK(std::abs(gc.u[k] - (al * gf.u[k] + be * gq.u[k])) < 1e-12);
        CHECK(std::abs(gc.v[k] - (al * gf.v[k] + be * gq.v[k])) < 1e-12);
    }
    ScalarField lf = laplacian(f), lq = laplacian(q), lc = laplacian(comb);
    for (std::size_t k = 0; k < lc.values.size(); ++k) {
        const double want = al * lf.values[k] + be * lq.values[k];
        CHECK(std::abs(lc.values[k] - want) < 1e-12 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("csv round trip format") {
    Grid2D g(16, Bc::dirichlet);
    ScalarField f(g);
    f(3, 5) = 0.1 + 0.2;  // not exactly 0.3
    write_csv(f, "/tmp/nsac_test_field.csv");
    std::ifstream in("/tmp/nsac_test_field.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "i,j,value");
    // row-major: row for (i=3, j=5) is line 2 + 5*16 + 3
    std::string line;
    for (int k = 0; k < 5 * 16 + 3 + 1; ++k) std::getline(in, line);
    CHECK(line == "3,5," + format_double(0.1 + 0.2));
}
