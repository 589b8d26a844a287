#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nsac/calibration.hpp"
#include "nsac/reference.hpp"
#include "oracle_utils.hpp"

using namespace nsac;

TEST_CASE("radius law") {
    CircleReference ref;
    ref.r0 = 0.25;
    CHECK(ref.radius(0.0) == 0.25);
    CHECK(ref.t_ext() == Catch::Approx(0.03125).margin(0));
    // closed form sqrt(0.0625 - 0.04) = 0.15, cross-checked by RK4 on -R' = 1/R
    CHECK(ref.radius(0.02) == Catch::Approx(0.15).epsilon(1e-14));
    const double rk = oracle::rk4([](double, double R) { return -1.0 / R; }, 0.25, 0.0, 0.02, 20000);
    CHECK(ref.radius(0.02) == Catch::Approx(rk).epsilon(1e-10));
    // monotone to zero
    double prev = ref.radius(0.0);
    for (int k = 1; k <= 30; ++k) {
        const double t = 0.999 * ref.t_ext() * k / 30.0;
        const double R = ref.radius(t);
        CHECK(R < prev);
        prev = R;
    }
    CHECK(prev < 0.01);
    CHECK_THROWS_AS(ref.radius(ref.t_ext()), input_error);
    CHECK_THROWS_AS(ref.radius(1.0), input_error);
}

TEST_CASE("signed distance") {
    CircleReference ref;
    const double t = 0.02;  // R = 0.15
    CHECK(ref.signed_distance(0.5, 0.5, t) == Catch::Approx(0.15).epsilon(1e-14));
    CHECK(ref.signed_distance(0.5, 0.7, t) == Catch::Approx(-0.05).epsilon(1e-12));
    // any point on the circle
    for (int k = 0; k < 16; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / 16.0;
        CHECK(std::abs(ref.signed_distance(0.5 + 0.15 * std::cos(a), 0.5 + 0.15 * std::sin(a), t)) <
              1e-14);
    }
}

TEST_CASE("geometry") {
    CircleReference ref;
    const double t = 0.0;  // R = 0.25 -> H = 4
    auto geo = ref.geometry(0.5, 0.7, t);
    CHECK(geo.H == Catch::Approx(4.0).epsilon(1e-14));
    CHECK(geo.V == Catch::Approx(geo.H).margin(0));  // zero-velocity mode: V = H exactly
    CHECK(geo.nx == Catch::Approx(0.0).margin(1e-15));
    CHECK(geo.ny == Catch::Approx(-1.0).epsilon(1e-15));
    CHECK(std::sqrt(geo.nx * geo.nx + geo.ny * geo.ny) == Catch::Approx(1.0).epsilon(1e-12));

    // projection example: R = 0.15 at t = 0.02
    auto geo2 = ref.geometry(0.5, 0.7, 0.02);
    CHECK(geo2.px == Catch::Approx(0.5).margin(1e-14));
    CHECK(geo2.py == Catch::Approx(0.65).epsilon(1e-12));

    CHECK_THROWS_AS(ref.geometry(0.5, 0.5, t), input_error);

    // H = -lap(s) on I: discrete Laplacian of the sampled distance on a fine grid
    Grid2D g(512, Bc::dirichlet);
    ScalarField s = sample_signed_distance(ref, g, 0.0);
    ScalarField lap = laplacian(s, GhostRule::neumann_reflect);
    // probe cells adjacent to the circle along +x from the center
    const int jc = 256;
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double sv = s(i, jc);
        if (std::abs(sv) < g.h() && g.x_center(i) > 0.5)
            worst = std::max(worst, std::abs(-lap(i, jc) - 4.0));
    }
    CHECK(worst < 0.1);  // -lap s = 1/r, r within h of R = 0.25
}

TEST_CASE("indicator") {
    CircleReference ref;
    CHECK(ref.indicator(0.5, 0.5, 0.0) == 1);
    CHECK(ref.indicator(0.5 + 2.0 * 0.25, 0.5, 0.0) == 0);
    Grid2D g(256, Bc::dirichlet);
    ScalarField chi = sample_indicator(ref, g, 0.0);
    const double area = integrate(chi);
    CHECK(std::abs(area - 3.14159265358979323846 * 0.0625) < 2.0 * g.h());
    // chi = 1 exactly on sampled cells with s > 0
    ScalarField s = sample_signed_distance(ref, g, 0.0);
    for (std::size_t k = 0; k < chi.values.size(); ++k)
        CHECK(chi.values[k] == (s.values[k] > 0.0 ? 1.0 : 0.0));
}

TEST_CASE("eikonal property of the analytic normal") {
    CircleReference ref;
    Grid2D g(128, Bc::dirichlet);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x_center(i), y = g.y_center(j);
            const double r = std::hypot(x - ref.cx, y - ref.cy);
            if (r <= 4.0 * g.h()) continue;
            auto geo = ref.geometry(x, y, 0.01);
            CHECK(std::abs(std::hypot(geo.nx, geo.ny) - 1.0) < 1e-6);
        }
}

TEST_CASE("stencil gradient of the distance is near-unit away from the center") {
    CircleReference ref;
    Grid2D g(256, Bc::dirichlet);
    ScalarField s = sample_signed_distance(ref, g, 0.01);
    VectorField gs = gradient(s);
    double worst = 0.0;
    for (int j = 4; j < g.n - 4; ++j)
        for (int i = 4; i < g.n - 4; ++i) {
            const double r = std::hypot(g.x_center(i) - ref.cx, g.y_center(j) - ref.cy);
            if (r <= 16.0 * g.h()) continue;
            worst = std::max(worst, std::abs(std::hypot(gs.u_at(i, j), gs.v_at(i, j)) - 1.0));
        }
    CHECK(worst < 5e-3);
}

TEST_CASE("transport identity of the signed distance") {
    // dt s + (B . grad) s = 0 on the tube {|s| <= delta}, B from the calibration
    CircleReference ref;
    const double delta = 0.125;
    Grid2D g(256, Bc::dirichlet);
    const double t = 0.01, dt = 1e-5;
    CalibrationSnapshot snap = build_calibration(ref, t, delta, g);
    ScalarField sm = sample_signed_distance(ref, g, t - dt);
    ScalarField sp = sample_signed_distance(ref, g, t + dt);
    ScalarField s0 = sample_signed_distance(ref, g, t);
    VectorField gs = gradient(s0);
    double worst = 0.0;
    for (int j = 2; j < g.n - 2; ++j)
        for (int i = 2; i < g.n - 2; ++i) {
            if (std::abs(s0(i, j)) > delta - 2.0 * g.h()) continue;
            const double dts = (sp(i, j) - sm(i, j)) / (2.0 * dt);
            const double adv = snap.B.u_at(i, j) * gs.u_at(i, j) + snap.B.v_at(i, j) * gs.v_at(i, j);
            worst = std::max(worst, std::abs(dts + adv));
        }
    const double tol = 10.0 * (g.h() * g.h() / (0.1 * 0.1) + dt * dt);  // O(h^2 + dt^2)
    CHECK(worst < tol);
}

TEST_CASE("time derivative of s on the interface is -V") {
    CircleReference ref;
    const double t = 0.01, dt = 1e-7;
    // points on the circle
    for (int k = 0; k < 8; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / 8.0;
        const double R = ref.radius(t);
        const double x = 0.5 + R * std::cos(a), y = 0.5 + R * std::sin(a);
        const double dts = (ref.signed_distance(x, y, t + dt) - ref.signed_distance(x, y, t)) / dt;
        const double V = ref.geometry(x, y, t).V;
        CHECK(std::abs(dts + V) < 1e-4);  // one-sided difference, O(dt)
    }
}

TEST_CASE("prescribed velocity mode is solenoidal and boundary-compatible") {
    CircleReference ref;
    ref.v_mode = CircleReference::VMode::prescribed;
    Grid2D g(128, Bc::dirichlet);
    // analytic divergence by finite differences of the stream construction
    oracle::Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        const double x = rng.uniform(0.05, 0.95), y = rng.uniform(0.05, 0.95);
        const double h = 1e-6;
        const double div = (ref.velocity_x(x + h, y, 0.0) - ref.velocity_x(x - h, y, 0.0)) / (2 * h) +
                           (ref.velocity_y(x, y + h, 0.0) - ref.velocity_y(x, y - h, 0.0)) / (2 * h);
        CHECK(std::abs(div) < 1e-6);
    }
    // walls
    for (int k = 0; k < 50; ++k) {
        const double y = rng.uniform(0.0, 1.0);
        CHECK(std::abs(ref.velocity_x(0.0, y, 0.0)) < 1e-14);
        CHECK(std::abs(ref.velocity_y(0.0, y, 0.0)) < 1e-14);
        CHECK(std::abs(ref.velocity_x(1.0, y, 0.0)) < 1e-14);
        CHECK(std::abs(ref.velocity_y(1.0, y, 0.0)) < 1e-14);
    }
    // V = n.v + H holds by construction in geometry()
    auto geo = ref.geometry(0.61, 0.52, 0.01);
    const double vdotn =
        ref.velocity_x(geo.px, geo.py, 0.01) * geo.nx + ref.velocity_y(geo.px, geo.py, 0.01) * geo.ny;
    CHECK(geo.V == Catch::Approx(geo.H + vdotn).margin(1e-15));
}

TEST_CASE("domain margin validation") {
    CircleReference ref;          // r0 = 0.25 centered
    ref.validate(0.125);          // r0 + 2 delta = 0.5 <= 0.5: admissible
    CHECK_THROWS_AS(ref.validate(0.2), config_error);
    CircleReference off;
    off.cx = 0.3;
    CHECK_THROWS_AS(off.validate(0.125), config_error);
}
