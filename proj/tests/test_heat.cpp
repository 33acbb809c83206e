#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wlab/entropy.hpp"
#include "wlab/flows.hpp"
#include "wlab/heat.hpp"

using namespace wlab;

namespace {

Field gaussian_density(const Grid1D& grid, double t, double center = 0.0) {
    Field u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = grid.x[i] - center;
        u[i] = std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
    }
    return u;
}

double l1_distance(const WeightedGeometry& geom, const Field& u, const Field& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]) * geom.measure[i];
    return s;
}

}  // namespace

TEST_CASE("uniform density is stationary and mass is conserved") {
    FlowFamily circ = make_flat_circle(2.0 * kPi, 128);
    WeightedGeometry geom = circ.geometry_at(0.0);
    Trajectory traj = solve_heat(circ, Field(128, 1.0), 0.0, 1.0, 0.01);
    const double mass0 = geom.integrate(traj.states.front().u);
    for (const HeatState& st : traj.states) {
        for (double v : st.u)
            REQUIRE(v == Catch::Approx(traj.states.front().u[0]).margin(1e-13));
        REQUIRE(geom.integrate(st.u) == Catch::Approx(mass0).epsilon(1e-12));
    }
}

TEST_CASE("narrow Gaussian evolves into the exact kernel") {
    const std::size_t n = 8193;  // h = 1/256 on [-16, 16]
    FlowFamily line = make_flat_line(32.0, n);
    WeightedGeometry geom = line.geometry_at(0.0);
    const double dt = 1.0 / 256.0;
    const double t0 = 16.0 * dt;
    Trajectory traj = solve_heat(line, gaussian_density(line.grid, t0), t0, 1.0, dt);
    Field exact = gaussian_density(line.grid, 1.0);
    REQUIRE(l1_distance(geom, traj.states.back().u, exact) <= 1e-3);
}

TEST_CASE("kernel trajectory mass, positivity, and Gaussian sup bound") {
    const std::size_t n = 8193;
    FlowFamily line = make_flat_line(32.0, n);
    WeightedGeometry geom = line.geometry_at(0.0);
    Trajectory traj = kernel_trajectory(line, n / 2, 1.0, 1.0 / 256.0);
    for (const HeatState& st : traj.states) {
        REQUIRE(geom.integrate(st.u) == Catch::Approx(1.0).epsilon(1e-10));
    }
    const HeatState& last = traj.states[traj.index_near(1.0)];
    Field exact = gaussian_density(line.grid, last.t);
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) sup = std::max(sup, std::abs(last.u[i] - exact[i]));
    REQUIRE(sup <= 1e-4);
}

TEST_CASE("circle kernel matches its spectral series") {
    const std::size_t n = 2048;
    FlowFamily circ = make_flat_circle(2.0 * kPi, n);
    const double dt = 1e-3;
    Trajectory traj = kernel_trajectory(circ, 0, 0.5, dt);
    const HeatState& st = traj.states[traj.index_near(0.5)];
    const double t = st.t;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = circ.grid.x[i];
        double p = 1.0 / (2.0 * kPi);
        for (int k = 1; k <= 40; ++k)
            p += std::exp(-static_cast<double>(k) * k * t) * std::cos(k * x) / kPi;
        worst = std::max(worst, std::abs(st.u[i] - p));
    }
    REQUIRE(worst <= 1e-6);
}

TEST_CASE("stepping is a semigroup") {
    FlowFamily circ = make_flat_circle(2.0 * kPi, 256);
    Field u0(256);
    for (std::size_t i = 0; i < 256; ++i) u0[i] = 1.0 + 0.5 * std::sin(circ.grid.x[i]);
    Trajectory whole = solve_heat(circ, u0, 0.0, 1.0, 0.01);
    Trajectory first = solve_heat(circ, u0, 0.0, 0.5, 0.01);
    Trajectory second = solve_heat(circ, first.states.back().u, 0.5, 1.0, 0.01);
    for (std::size_t i = 0; i < 256; ++i)
        REQUIRE(second.states.back().u[i] ==
                Catch::Approx(whole.states.back().u[i]).margin(1e-10));
}

TEST_CASE("propagator adjoint against the weighted pairing") {
    FlowFamily ou = make_ou_line(96, 4.0);
    WeightedGeometry geom = ou.geometry_at(0.0);
    DenseMatrix P = propagator(ou, 0.0, 0.2, 0.02);
    DenseMatrix A = adjoint_propagator(ou, 0.0, 0.2, 0.02);
    // static self-adjoint generator: P* = P
    for (std::size_t i = 0; i < P.n; ++i)
        for (std::size_t j = 0; j < P.n; ++j)
            REQUIRE(A(i, j) == Catch::Approx(P(i, j)).margin(1e-12));
    // and <Pf, g> = <f, P*g> for arbitrary fields
    Field f(96), g(96);
    for (std::size_t i = 0; i < 96; ++i) {
        f[i] = std::sin(3.0 * geom.grid.x[i]) + 0.1 * geom.grid.x[i];
        g[i] = std::exp(-(geom.grid.x[i] - 0.5) * (geom.grid.x[i] - 0.5));
    }
    REQUIRE(geom.inner(P.apply(f), g) ==
            Catch::Approx(geom.inner(f, A.apply(g))).epsilon(1e-12));
}

TEST_CASE("heat kernel is symmetric in its endpoints") {
    FlowFamily ou = make_ou_line(257, 6.0);
    const std::size_t a = 100, b = 170;
    HeatState from_a = heat_kernel(ou, a, 0.5, 0.01);
    HeatState from_b = heat_kernel(ou, b, 0.5, 0.01);
    REQUIRE(from_a.u[b] == Catch::Approx(from_b.u[a]).epsilon(1e-9).margin(1e-12));
    const std::size_t c = 130;  // nearby pair with non-negligible mass
    HeatState from_c = heat_kernel(ou, c, 0.5, 0.01);
    REQUIRE(from_a.u[c] == Catch::Approx(from_c.u[a]).epsilon(1e-9));
}

TEST_CASE("maximum principle for smooth data") {
    FlowFamily circ = make_flat_circle(2.0 * kPi, 256);
    Field u0(256);
    for (std::size_t i = 0; i < 256; ++i) u0[i] = 2.0 + std::sin(circ.grid.x[i]);
    Trajectory traj = solve_heat(circ, u0, 0.0, 2.0, 0.02);
    // solve_heat normalizes the initial mass; bound by the first slice
    double lo = traj.states.front().u[0], hi = lo;
    for (double v : traj.states.front().u) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (const HeatState& st : traj.states)
        for (double v : st.u) {
            REQUIRE(v >= lo - 1e-9);
            REQUIRE(v <= hi + 1e-9);
        }
}

TEST_CASE("fourth-order shrinking of the kernel error under joint halving") {
    auto error_at = [](std::size_t n) {
        FlowFamily line = make_flat_line(32.0, n);
        WeightedGeometry geom = line.geometry_at(0.0);
        const double h = line.grid.h;
        const double t0 = 0.05;
        Trajectory traj = solve_heat(line, gaussian_density(line.grid, t0), t0, t0 + 0.75, h);
        return l1_distance(geom, traj.states.back().u, gaussian_density(line.grid, t0 + 0.75));
    };
    const double coarse = error_at(1025);   // h = 1/32
    const double fine = error_at(2049);     // h = 1/64
    REQUIRE(coarse / fine >= 3.5);
    REQUIRE(coarse / fine <= 4.6);
}

TEST_CASE("input validation") {
    FlowFamily circ = make_flat_circle(2.0, 64);
    REQUIRE_THROWS_AS(solve_heat(circ, Field(64, 1.0), 0.0, 1.0, -0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(solve_heat(circ, Field(64, -1.0), 0.0, 1.0, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(solve_heat(circ, Field(64, 1.0), 0.0, 1.05, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(kernel_trajectory(circ, 999, 1.0, 0.1), std::domain_error);
    REQUIRE_THROWS_AS(kernel_trajectory(circ, 0, 1e-6, 0.1), std::domain_error);
}
