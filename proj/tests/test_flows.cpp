#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wlab/flows.hpp"
#include "wlab/grid.hpp"
#include "wlab/operators.hpp"

using namespace wlab;

TEST_CASE("canonical families declare their classes") {
    FlowFamily circ = make_flat_circle(2.0, 128);
    REQUIRE(circ.declared.K == 0.0);
    REQUIRE(circ.declared.N == 1.0);
    REQUIRE(circ.is_static);
    REQUIRE(circ.conjugate);

    FlowFamily ou = make_ou_line(128);
    REQUIRE(ou.declared.K == 1.0);
    REQUIRE(std::isinf(ou.declared.N));

    FlowFamily cone = make_cone(3.0, 8.0, 128);
    REQUIRE(cone.declared.N == 3.0);
    REQUIRE(cone.collar == 3);

    FlowFamily sph = make_weighted_sphere(2, 128);
    REQUIRE(sph.declared.K == 1.0);
    REQUIRE(sph.declared.N == 2.0);

    FlowFamily shr = make_shrinking_sphere(2, 0.5, 128);
    REQUIRE(shr.declared.K == 0.0);
    REQUIRE(shr.declared.N == 2.0);
    REQUIRE_FALSE(shr.is_static);
    REQUIRE(shr.horizon == Catch::Approx(0.25));
    REQUIRE(shr.model_dimension == 2.0);
}

TEST_CASE("defect certification at sampled times") {
    // flat circle: exactly zero
    FlowFamily circ = make_flat_circle(2.0, 128);
    for (int j = 0; j <= 4; ++j) {
        FlowDefect d = super_ricci_defect(circ, 1.0, 0.0, 0.25 * j);
        REQUIRE(std::abs(d.min_defect) <= 1e-13);
    }

    // cone(3) is a (0,1,3) model; the defect stays nonnegative up to O(h^2)
    FlowFamily cone = make_cone(3.0, 8.0, 1024);
    const double tol = 100.0 * cone.grid.h * cone.grid.h;
    for (int j = 0; j <= 4; ++j) {
        FlowDefect d = super_ricci_defect(cone, 3.0, 0.0, 0.25 * j);
        REQUIRE(d.min_defect >= -tol);
    }

    // probing the cone against a strictly positive K must fail
    FlowDefect probed = super_ricci_defect(cone, 3.0, 0.1, 0.0);
    REQUIRE(probed.min_defect < 0.0);

    // static sphere meets (n-1, n) with near equality
    FlowFamily sph = make_weighted_sphere(3, 512);
    FlowDefect sd = super_ricci_defect(sph, 3.0, 2.0, 0.0);
    REQUIRE(std::abs(sd.min_defect) <= 5e-3);
}

TEST_CASE("shrinking sphere is an exact conjugate soliton") {
    FlowFamily shr = make_shrinking_sphere(2, 0.5, 256);
    WeightedGeometry g0 = shr.geometry_at(0.0);
    for (int j = 1; j <= 4; ++j) {
        const double t = shr.horizon * j / 4.0;
        WeightedGeometry g = shr.geometry_at(t);
        for (std::size_t i = 0; i < g.size(); ++i)
            REQUIRE(std::abs(g.measure[i] - g0.measure[i]) <= 1e-12 * (1.0 + g0.measure[i]));
        // defect of the (0,1,n) inequality vanishes identically up to O(h^2)
        FlowDefect d = super_ricci_defect(shr, 2.0, 0.0, t);
        REQUIRE(std::abs(d.min_defect) <= 100.0 * shr.grid.h * shr.grid.h);
    }
}

TEST_CASE("declared rates agree with secants") {
    REQUIRE(validate_rates(make_shrinking_sphere(2, 0.5, 128)) <= 1e-6);
    REQUIRE(validate_rates(make_flat_circle(2.0, 128)) <= 1e-12);

    // custom family with synthesized rates
    Grid1D grid = Grid1D::circle(2.0, 96);
    auto metric = [](double t) { return Field(96, 1.0 + 0.3 * t * t); };
    auto potential = [](double t) { return Field(96, 0.1 * t); };
    FlowFamily custom = make_custom(grid, metric, potential, 1.0, {0.0, 1.0, 1.0});
    REQUIRE(validate_rates(custom) <= 1e-6);
}

TEST_CASE("conjugate enforcement freezes the measure") {
    // shrinking metric with a potential that does not compensate
    Grid1D grid = Grid1D::circle(2.0, 96);
    auto metric = [](double t) { return Field(96, 1.0 - 0.5 * t); };
    auto potential = [](double) { return Field(96, 0.0); };
    FlowFamily raw = make_custom(grid, metric, potential, 1.0, {0.0, 1.0, 1.0});
    WeightedGeometry r0 = raw.geometry_at(0.0);
    WeightedGeometry r1 = raw.geometry_at(0.8);
    REQUIRE(std::abs(r1.total_measure() - r0.total_measure()) > 1e-3);

    FlowFamily fixed = enforce_conjugate(raw);
    REQUIRE(fixed.conjugate);
    WeightedGeometry f0 = fixed.geometry_at(0.0);
    for (double t : {0.2, 0.5, 0.8}) {
        WeightedGeometry ft = fixed.geometry_at(t);
        for (std::size_t i = 0; i < ft.size(); ++i)
            REQUIRE(std::abs(ft.measure[i] - f0.measure[i]) <= 1e-10 * (1.0 + f0.measure[i]));
    }
}

TEST_CASE("time rescaling maps positive curvature to zero") {
    const double K = 1.0, C = 1.0;
    FlowFamily base = make_weighted_sphere(2, 192);
    FlowFamily scaled = time_rescale(base, K, C);
    REQUIRE(scaled.declared.K == 0.0);

    // tau(0.25) = -(1/2) log(0.5)
    const double tau = 0.5 * std::log(2.0);
    Field a = scaled.metric_at(0.25);
    REQUIRE(a[0] == Catch::Approx(std::exp(-2.0 * K * tau)).epsilon(1e-12));

    REQUIRE(validate_rates(scaled) <= 1e-6);

    // the rescaled family satisfies the K = 0 inequality on the window
    for (double t : {0.05, 0.15, 0.25, 0.35}) {
        FlowDefect d = super_ricci_defect(scaled, 2.0, 0.0, t);
        REQUIRE(d.min_defect >= -5e-3);
    }

    // K = 0 rescaling is a pure clock change
    FlowFamily unit = time_rescale(make_flat_circle(2.0, 96), 0.0, 2.0);
    Field a0 = unit.metric_at(0.7);
    REQUIRE(a0[0] == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE_THROWS_AS(time_rescale(base, 1.0, -1.0), std::domain_error);
}

TEST_CASE("time bounds and validation errors") {
    FlowFamily shr = make_shrinking_sphere(2, 0.5, 96);
    REQUIRE_THROWS_AS(shr.geometry_at(shr.horizon * 2.0), std::domain_error);
    REQUIRE_THROWS_AS(shr.geometry_at(-1.0), std::domain_error);
    REQUIRE_THROWS_AS(make_shrinking_sphere(2, 1.5, 96), std::invalid_argument);
    REQUIRE_THROWS_AS(make_cone(0.5, 8.0, 96), std::invalid_argument);
    REQUIRE_THROWS_AS(make_weighted_sphere(1, 96), std::invalid_argument);
}
