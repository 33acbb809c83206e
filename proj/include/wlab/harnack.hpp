#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wlab/entropy.hpp"
#include "wlab/flows.hpp"
#include "wlab/grid.hpp"
#include "wlab/heat.hpp"
#include "wlab/operators.hpp"

namespace wlab {

struct HarnackField {
    double t = 0.0;
    Field w;     // 2 L f - Gamma(f, f)
    Field w_N;   // t w + f - N at K = 0, Li-Xu variant otherwise
    Field nu;    // w_N * u
    double integral_nu = 0.0;  // int nu dmu, the W-entropy of the slice
};

inline HarnackField harnack_field(const WeightedGeometry& geom, const OperatorSet& ops,
                                  const HeatState& state, double N, double K) {
    if (!(state.t > 0.0)) throw std::domain_error("harnack_field: t must be positive");
    const double t = state.t;
    HarnackField out;
    out.t = t;
    Field f = f_field(state.u, t, N);
    Field lf = ops.apply(f);
    Field gff = ops.carre_du_champ(f, f);
    const std::size_t n = f.size();
    out.w.resize(n);
    out.w_N.resize(n);
    out.nu.resize(n);
    const double cK = 1.0 + 0.5 * K * t;
    for (std::size_t i = 0; i < n; ++i) {
        out.w[i] = 2.0 * lf[i] - gff[i];
        if (K == 0.0) {
            out.w_N[i] = t * out.w[i] + f[i] - N;
        } else {
            out.w_N[i] = t * lf[i] + t * (1.0 + K * t) * (lf[i] - gff[i]) + f[i] - N * cK * cK;
        }
        out.nu[i] = out.w_N[i] * state.u[i];
    }
    out.integral_nu = geom.integrate(out.nu);
    return out;
}

/// [d/dt, L] f at time t. For the divergence-form generator
/// L f = m^{-1} (c f')' with c = e^{-phi} a^{p-1} and node density
/// m = e^{-phi} a^p, differentiating the coefficients in t gives
///   [d/dt, L] f = m^{-1} (c_dot f')' - (m_dot/m) L f,
/// assembled with the same edge averaging as L itself, so the secant
/// (L_{t+eps} - L_{t-eps}) f / (2 eps) reproduces it to O(eps^2).
inline Field commutator(const FlowFamily& flow, const Field& f, double t) {
    WeightedGeometry geom = flow.geometry_at(t);
    OperatorSet ops(geom);
    if (f.size() != geom.size()) throw std::invalid_argument("commutator: field length mismatch");
    const std::size_t n = geom.size();
    Field a = geom.metric;
    Field adot = flow.metric_rate(t);
    Field phidot = flow.potential_rate(t);
    const double p = 0.5 * flow.model_dimension;
    Field cdot(n), mlog(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::exp(-geom.potential[i]) * std::pow(a[i], p - 1.0);
        cdot[i] = c * (-phidot[i] + (p - 1.0) * adot[i] / a[i]);
        mlog[i] = -phidot[i] + p * adot[i] / a[i];  // m_dot / m
    }
    Field lf = ops.apply(f);
    Field out(n, 0.0);
    const double h = geom.grid.h;
    const std::size_t ne = geom.grid.periodic() ? n : n - 1;
    for (std::size_t e = 0; e < ne; ++e) {
        const std::size_t i = e, j = (e + 1) % n;
        const double flux = 0.5 * (cdot[i] + cdot[j]) / h * (f[j] - f[i]);
        out[i] += flux;
        out[j] -= flux;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = out[i] / geom.measure[i] - mlog[i] * lf[i];
    return out;
}

/// linear propagation of a (possibly signed) field by the same
/// Crank-Nicolson partition used for densities
inline Field propagate_field(const FlowFamily& flow, Field v, double s, double t, double dt) {
    if (t < s) throw std::domain_error("propagate_field: need s <= t");
    const double span = t - s;
    if (span == 0.0) return v;
    const std::size_t steps = static_cast<std::size_t>(std::llround(span / dt));
    if (steps == 0 || std::abs(steps * dt - span) > 1e-9 * (1.0 + span))
        throw std::invalid_argument("propagate_field: (t - s) must be a multiple of dt");
    for (std::size_t k = 0; k < steps; ++k)
        v = detail::crank_nicolson_step(flow, v, s + k * dt, dt);
    return v;
}

struct EvolutionResidual {
    double t = 0.0;
    Field lhs;  // (d/dt - L) nu by trajectory differences
    Field rhs;  // closed-form right-hand side
    double l1_interior = 0.0;
};

/// Pointwise evolution identity for nu = [t(2Lf - |grad f|^2) + f - N] u
/// along d/dt u = L u (K = 0 form):
///   (d/dt - L) nu = -2t[(Hf - 1/2t)^2 + (1/2 d/dt g + Ric_{N,1})(grad f, grad f)] u
///                   - (2t/(N-1)) (Gamma(phi,f) + (N-1)/2t)^2 u
///                   + 2t([d/dt, L] f + d/dt g(grad f, grad f)) u,
/// where Hf is the covariant Hessian on the unit direction. At N = 1 the
/// middle line needs a constant potential and drops out.
inline EvolutionResidual evolution_residual(const Trajectory& traj, double N, std::size_t k) {
    if (k == 0 || k + 1 >= traj.size())
        throw std::invalid_argument("evolution_residual: need an interior trajectory index");
    const FlowFamily& flow = traj.flow;
    const double t = traj.states[k].t;
    const double dt = traj.dt;

    WeightedGeometry geom = flow.geometry_at(t);
    OperatorSet ops(geom);
    auto nu_at = [&](std::size_t idx) {
        WeightedGeometry g = flow.geometry_at(traj.states[idx].t);
        OperatorSet o(g);
        return harnack_field(g, o, traj.states[idx], N, 0.0).nu;
    };
    Field nu_m = nu_at(k - 1), nu_0 = nu_at(k), nu_p = nu_at(k + 1);
    Field lnu = ops.apply(nu_0);
    const std::size_t n = geom.size();

    EvolutionResidual res;
    res.t = t;
    res.lhs.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        res.lhs[i] = (nu_p[i] - nu_m[i]) / (2.0 * dt) - lnu[i];

    const Field& u = traj.states[k].u;
    Field f = f_field(u, t, N);
    Field hf = ops.hessian(f);
    Field gff = ops.carre_du_champ(f, f);
    Field ric = bakry_emery_ricci(ops, N, f);  // Ric_{N,1}(grad f, grad f)
    Field adot = flow.metric_rate(t);
    Field comm = flow.is_static ? Field(n, 0.0) : commutator(flow, f, t);

    const bool finite_weight_term = N > 1.0 && !std::isinf(N);
    Field gpf;
    if (finite_weight_term) gpf = ops.carre_du_champ(geom.potential, f);

    res.rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dtg_ff = adot[i] / geom.metric[i] * gff[i];  // d/dt g (grad f, grad f)
        const double sq = hf[i] - 1.0 / (2.0 * t);
        double rhs = -2.0 * t * (sq * sq + 0.5 * dtg_ff + ric[i]) * u[i];
        if (finite_weight_term) {
            const double q = gpf[i] + (N - 1.0) / (2.0 * t);
            rhs -= 2.0 * t / (N - 1.0) * q * q * u[i];
        }
        rhs += 2.0 * t * (comm[i] + dtg_ff) * u[i];
        res.rhs[i] = rhs;
    }

    InteriorWindow w = interior_window(geom, flow.collar);
    double l1 = 0.0;
    for (std::size_t i = w.first; i <= w.last; ++i)
        l1 += std::abs(res.lhs[i] - res.rhs[i]) * geom.measure[i];
    res.l1_interior = l1;
    return res;
}

/// Li-Yau residual N/(2t) - (|grad u|^2/u^2 - u_t/u), expected >= -tol on
/// static nonnegatively curved models
inline Field liyau_residual(const Trajectory& traj, double N, std::size_t k) {
    if (k == 0 || k + 1 >= traj.size())
        throw std::invalid_argument("liyau_residual: need an interior trajectory index");
    const double t = traj.states[k].t;
    WeightedGeometry geom = traj.flow.geometry_at(t);
    OperatorSet ops(geom);
    const Field& u = traj.states[k].u;
    Field guu = ops.carre_du_champ(u, u);
    const std::size_t n = u.size();
    Field out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ut = (traj.states[k + 1].u[i] - traj.states[k - 1].u[i]) / (2.0 * traj.dt);
        const double ui = std::max(u[i], kLogFloor);
        out[i] = 0.5 * N / t - (guu[i] / (ui * ui) - ut / ui);
    }
    return out;
}

/// t -> max_x [P_{T,t} nu(t)](x), which Harnack monotonicity makes
/// non-increasing; sampled at every interior trajectory index in
/// [t_lo, t_hi]
inline std::vector<std::pair<double, double>> propagated_monotonicity(
    const Trajectory& traj, double N, double K, double t_lo, double t_hi,
    std::size_t max_samples = 20) {
    const FlowFamily& flow = traj.flow;
    const double T = traj.states.back().t;
    std::vector<std::size_t> picks;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.states[k].t;
        if (t >= t_lo && t <= t_hi) picks.push_back(k);
    }
    if (picks.size() > max_samples) {
        std::vector<std::size_t> thin;
        for (std::size_t j = 0; j < max_samples; ++j)
            thin.push_back(picks[j * (picks.size() - 1) / (max_samples - 1)]);
        picks = thin;
    }
    std::vector<std::pair<double, double>> out;
    for (std::size_t k : picks) {
        const double t = traj.states[k].t;
        WeightedGeometry geom = flow.geometry_at(t);
        OperatorSet ops(geom);
        HarnackField hf = harnack_field(geom, ops, traj.states[k], N, K);
        Field prop = propagate_field(flow, hf.nu, t, T, traj.dt);
        double mx = prop[0];
        for (double v : prop) mx = std::max(mx, v);
        out.emplace_back(t, mx);
    }
    return out;
}

}  // namespace wlab
