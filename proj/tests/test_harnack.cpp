#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wlab/entropy.hpp"
#include "wlab/flows.hpp"
#include "wlab/harnack.hpp"
#include "wlab/heat.hpp"

using namespace wlab;

namespace {

HeatState gaussian_state(const Grid1D& grid, double t) {
    HeatState st;
    st.t = t;
    st.u.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x[i];
        st.u[i] = std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
    }
    return st;
}

}  // namespace

TEST_CASE("Gaussian Harnack fields vanish identically") {
    FlowFamily line = make_flat_line(32.0, 4097);
    WeightedGeometry geom = line.geometry_at(0.0);
    OperatorSet ops(geom);
    const double t = 1.0;
    HeatState st = gaussian_state(line.grid, t);
    HarnackField hf = harnack_field(geom, ops, st, 1.0, 0.0);
    for (std::size_t i = 0; i < geom.size(); ++i) {
        const double x = geom.grid.x[i];
        if (std::abs(x) > 8.0) continue;
        // w = 2 L f - |grad f|^2 with f = x^2/4t: equals 1/t - x^2/(4t^2)
        REQUIRE(hf.w[i] == Catch::Approx(1.0 / t - x * x / (4.0 * t * t)).margin(2e-3));
        // and the Perelman-type pointwise quantity is exactly zero for N = 1
        REQUIRE(std::abs(hf.w_N[i]) <= 2e-3);
    }
}

TEST_CASE("integral of nu matches its integration-by-parts assembly") {
    FlowFamily ou = make_ou_line(513, 6.0);
    WeightedGeometry geom = ou.geometry_at(0.0);
    OperatorSet ops(geom);
    Trajectory traj = kernel_trajectory(ou, 250, 0.5, 0.01);
    const HeatState& st = traj.states.back();
    const double N = 3.0;
    HarnackField hf = harnack_field(geom, ops, st, N, 0.0);

    Field f = f_field(st.u, st.t, N);
    Field gff = ops.carre_du_champ(f, f);
    // <Lf, u> = -dirichlet(f, u) exactly
    const double lf_u = -ops.dirichlet_form(f, st.u);
    double gff_u = 0.0, fu = 0.0;
    for (std::size_t i = 0; i < geom.size(); ++i) {
        gff_u += gff[i] * st.u[i] * geom.measure[i];
        fu += (f[i] - N) * st.u[i] * geom.measure[i];
    }
    const double assembled = st.t * (2.0 * lf_u - gff_u) + fu;
    REQUIRE(std::abs(hf.integral_nu - assembled) <= 1e-8 * (1.0 + std::abs(assembled)));
}

TEST_CASE("evolution residual shrinks about fourfold under joint halving") {
    auto residual = [](std::size_t n) {
        FlowFamily circ = make_flat_circle(2.0 * kPi, n);
        const double dt = 2.0 * kPi / static_cast<double>(n);
        Trajectory traj = kernel_trajectory(circ, 0, 1.0, dt);
        const std::size_t k = traj.index_near(0.5);
        return evolution_residual(traj, 1.0, k).l1_interior;
    };
    const double coarse = residual(512);
    const double fine = residual(1024);
    REQUIRE(coarse / fine >= 3.4);
    REQUIRE(coarse / fine <= 4.8);
}

TEST_CASE("generator commutator: closed form against secants") {
    FlowFamily shr = make_shrinking_sphere(2, 0.5, 512);
    const double t = 0.1;
    Field f(shr.grid.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(shr.grid.x[i]);
    Field comm = commutator(shr, f, t);

    const double eps = 1e-4;
    WeightedGeometry gm = shr.geometry_at(t - eps);
    WeightedGeometry gp = shr.geometry_at(t + eps);
    Field lm = OperatorSet(gm).apply(f);
    Field lp = OperatorSet(gp).apply(f);
    InteriorWindow w = interior_window(gm, shr.collar);
    for (std::size_t i = w.first; i <= w.last; ++i) {
        const double secant = (lp[i] - lm[i]) / (2.0 * eps);
        REQUIRE(std::abs(comm[i] - secant) <= 1e-5 * (1.0 + std::abs(secant)));
    }

    // static families commute with their own clock
    FlowFamily circ = make_flat_circle(2.0, 96);
    Field g(96, 0.0);
    for (std::size_t i = 0; i < 96; ++i) g[i] = std::sin(3.0 * circ.grid.x[i]);
    Field czero = commutator(circ, g, 0.5);
    for (double v : czero) REQUIRE(std::abs(v) <= 1e-12);
}

TEST_CASE("Li-Yau residual is nonnegative on nonnegatively curved models") {
    FlowFamily circ = make_flat_circle(2.0 * kPi, 512);
    Trajectory traj = kernel_trajectory(circ, 0, 1.0, 2.0 * kPi / 512.0);
    // early times probe the kernel tail, where the relative error in
    // Gamma(u,u)/u^2 is largest; the slack is a grid quantity
    const double tol = 150.0 * circ.grid.h * circ.grid.h;
    for (double t : {0.3, 0.6, 0.9}) {
        const std::size_t k = traj.index_near(t);
        Field res = liyau_residual(traj, 1.0, k);
        for (double v : res) REQUIRE(v >= -tol);
    }
}

TEST_CASE("propagated Harnack quantity is non-increasing") {
    FlowFamily circ = make_flat_circle(2.0 * kPi, 256);
    Trajectory traj = kernel_trajectory(circ, 0, 1.5, 2.0 * kPi / 256.0);
    auto curve = propagated_monotonicity(traj, 1.0, 0.0, 0.3, 1.4, 12);
    REQUIRE(curve.size() >= 5);
    for (std::size_t j = 1; j < curve.size(); ++j)
        REQUIRE(curve[j].second <= curve[j - 1].second + 1e-4);
}

TEST_CASE("signed fields propagate on the same partition as densities") {
    FlowFamily circ = make_flat_circle(2.0 * kPi, 128);
    Field v(128);
    for (std::size_t i = 0; i < 128; ++i) v[i] = std::sin(circ.grid.x[i]);
    Field out = propagate_field(circ, v, 0.0, 0.5, 0.01);
    // the first nontrivial mode decays like e^{-t}
    for (std::size_t i = 0; i < 128; ++i)
        REQUIRE(out[i] ==
                Catch::Approx(std::exp(-0.5) * std::sin(circ.grid.x[i])).margin(2e-4));
    REQUIRE_THROWS_AS(propagate_field(circ, v, 0.5, 0.0, 0.01), std::domain_error);
}
