#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "wlab/flows.hpp"
#include "wlab/grid.hpp"
#include "wlab/operators.hpp"
#include "wlab/tridiag.hpp"

namespace wlab {

constexpr double kLogFloor = 1e-300;  // applied inside logarithms only

/// smallest time at which a point mass is resolvable on the grid
inline double kernel_time_floor(const Grid1D& grid) { return 4.0 * grid.h * grid.h; }

struct HeatState {
    double t = 0.0;
    Field u;  // positive density, mass one against the slice measure
};

/// f with the normalization u = e^{-f} / (4 pi t)^{N/2}
inline Field f_field(const Field& u, double t, double N) {
    Field f(u.size());
    const double shift = 0.5 * N * std::log(4.0 * 3.14159265358979323846 * t);
    for (std::size_t i = 0; i < u.size(); ++i)
        f[i] = -std::log(std::max(u[i], kLogFloor)) - shift;
    return f;
}

struct Trajectory {
    FlowFamily flow;
    double dt = 0.0;
    std::vector<HeatState> states;

    std::size_t size() const { return states.size(); }
    const HeatState& at(std::size_t k) const { return states.at(k); }

    /// index of the trajectory time closest to t
    std::size_t index_near(double t) const {
        if (states.empty()) throw std::logic_error("Trajectory: empty");
        std::size_t best = 0;
        double d = std::abs(states[0].t - t);
        for (std::size_t k = 1; k < states.size(); ++k) {
            const double dk = std::abs(states[k].t - t);
            if (dk < d) { d = dk; best = k; }
        }
        return best;
    }
};

namespace detail {

/// one trapezoidal step with the generator frozen at the half-step time
inline Field crank_nicolson_step(const FlowFamily& flow, const Field& u, double t, double dt) {
    WeightedGeometry geom = flow.geometry_at(t + 0.5 * dt);
    OperatorSet ops(geom);
    Field lu = ops.apply(u);
    Field rhs(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) rhs[i] = u[i] + 0.5 * dt * lu[i];
    TridiagSystem sys = ops.shifted_identity(-0.5 * dt);
    return solve(sys, rhs);
}

/// one backward Euler step; L-stable and positivity preserving (the
/// system matrix is an M-matrix), used only to mollify rough data
inline Field backward_euler_step(const FlowFamily& flow, const Field& u, double t, double dt) {
    WeightedGeometry geom = flow.geometry_at(t + dt);
    OperatorSet ops(geom);
    TridiagSystem sys = ops.shifted_identity(-dt);
    return solve(sys, u);
}

}  // namespace detail

inline Field normalize_density(const WeightedGeometry& geom, Field u) {
    double mass = geom.integrate(u);
    if (!(mass > 0.0)) throw std::invalid_argument("normalize_density: nonpositive mass");
    for (double& v : u) v /= mass;
    return u;
}

/// Forward heat flow d/dt u = L_t u by Crank-Nicolson from t0 to T in
/// uniform steps. The divergence-form generator conserves mass against
/// the (frozen, on conjugate flows) measure to round-off.
inline Trajectory solve_heat(const FlowFamily& flow, Field u0, double t0, double T, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("solve_heat: dt must be positive");
    if (T < t0) throw std::invalid_argument("solve_heat: T < t0");
    for (double v : u0)
        if (v < 0.0) throw std::invalid_argument("solve_heat: negative initial density");
    const double span = T - t0;
    const std::size_t steps = static_cast<std::size_t>(std::llround(span / dt));
    if (std::abs(steps * dt - span) > 1e-9 * (1.0 + span))
        throw std::invalid_argument("solve_heat: (T - t0) must be a multiple of dt");

    Trajectory traj;
    traj.flow = flow;
    traj.dt = dt;
    traj.states.reserve(steps + 1);
    Field u = normalize_density(flow.geometry_at(t0), std::move(u0));
    traj.states.push_back({t0, u});
    double t = t0;
    for (std::size_t k = 0; k < steps; ++k) {
        u = detail::crank_nicolson_step(flow, u, t, dt);
        t = t0 + (k + 1) * dt;
        traj.states.push_back({t, u});
    }
    return traj;
}

/// dense propagator P_{t,s}: marches every basis column with the same
/// Crank-Nicolson partition
inline DenseMatrix propagator(const FlowFamily& flow, double s, double t, double dt) {
    if (t < s) throw std::domain_error("propagator: need s <= t");
    const std::size_t n = flow.grid.size();
    DenseMatrix P = DenseMatrix::identity(n);
    const double span = t - s;
    if (span == 0.0) return P;
    const std::size_t steps = static_cast<std::size_t>(std::llround(span / dt));
    if (steps == 0 || std::abs(steps * dt - span) > 1e-9 * (1.0 + span))
        throw std::invalid_argument("propagator: (t - s) must be a multiple of dt");
    Field col(n);
    for (std::size_t k = 0; k < steps; ++k) {
        const double tk = s + k * dt;
        WeightedGeometry geom = flow.geometry_at(tk + 0.5 * dt);
        OperatorSet ops(geom);
        TridiagSystem sys = ops.shifted_identity(-0.5 * dt);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = P(i, j);
            Field lu = ops.apply(col);
            for (std::size_t i = 0; i < n; ++i) col[i] += 0.5 * dt * lu[i];
            Field next = solve(sys, col);
            for (std::size_t i = 0; i < n; ++i) P(i, j) = next[i];
        }
    }
    return P;
}

/// adjoint against the mu-weighted pairing: P* = M^{-1} P^T M
inline DenseMatrix adjoint_propagator(const FlowFamily& flow, double s, double t, double dt) {
    DenseMatrix P = propagator(flow, s, t, dt);
    WeightedGeometry geom = flow.geometry_at(s);
    const std::size_t n = P.n;
    DenseMatrix A(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A(i, j) = P(j, i) * geom.measure[j] / geom.measure[i];
    return A;
}

/// point mass at node x0 as a density, followed by one smoothing step of
/// size 4 h^2 so logarithms are finite before any functional is evaluated
inline Trajectory kernel_trajectory(const FlowFamily& flow, std::size_t x0, double T, double dt) {
    const std::size_t n = flow.grid.size();
    if (x0 >= n) throw std::domain_error("kernel_trajectory: node out of range");
    const double t0 = kernel_time_floor(flow.grid);
    if (T <= t0)
        throw std::domain_error("kernel_trajectory: requested time below grid resolvability");
    WeightedGeometry geom0 = flow.geometry_at(0.0);
    Field u0(n, 0.0);
    u0[x0] = 1.0 / geom0.measure[x0];
    Field u = detail::backward_euler_step(flow, u0, 0.0, t0);
    for (double& v : u) v = std::max(v, 0.0);
    u = normalize_density(flow.geometry_at(t0), std::move(u));
    // bridge up to the uniform step grid with h^2-sized trapezoidal
    // substeps; they track the exact decay of every grid mode, so the
    // non-smooth startup content is gone before the dt-sized steps begin
    const double h2 = flow.grid.h * flow.grid.h;
    const double t_target = std::max(dt, 32.0 * h2);
    const double t_start = dt * std::ceil(t_target / dt - 1e-12);
    if (T < t_start)
        throw std::domain_error("kernel_trajectory: T too small for this step size");
    const std::size_t m = static_cast<std::size_t>(std::ceil((t_start - t0) / h2));
    const double sub = (t_start - t0) / static_cast<double>(m);
    double t = t0;
    for (std::size_t k = 0; k < m; ++k) {
        u = detail::crank_nicolson_step(flow, u, t, sub);
        t = t0 + (k + 1) * sub;
    }
    for (double& v : u) v = std::max(v, 0.0);
    u = normalize_density(flow.geometry_at(t_start), std::move(u));
    // align the step grid so T sits on it
    const std::size_t steps = static_cast<std::size_t>(std::ceil((T - t_start) / dt - 1e-12));
    const double T_end = t_start + steps * dt;
    Trajectory traj = solve_heat(flow, std::move(u), t_start, T_end, dt);
    return traj;
}

inline HeatState heat_kernel(const FlowFamily& flow, std::size_t x0, double t, double dt) {
    Trajectory traj = kernel_trajectory(flow, x0, t, dt);
    return traj.states[traj.index_near(t)];
}

}  // namespace wlab
