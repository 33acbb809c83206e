#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "wlab/grid.hpp"
#include "wlab/operators.hpp"

namespace wlab {

/// declared (K, n, N) classification of a flow family
struct FlowClass {
    double K = 0.0;
    double n = 1.0;
    double N = 1.0;
};

/// Time-indexed family of weighted geometries on a fixed grid. Closed-form
/// data is sampled lazily: geometry_at(t) rebuilds the geometry from the
/// stored coefficient functions, so no interpolation error enters the
/// verification battery.
struct FlowFamily {
    std::string kind;
    Grid1D grid;
    double horizon = std::numeric_limits<double>::infinity();
    FlowClass declared;
    bool conjugate = false;
    bool is_static = true;
    double model_dimension = 1.0;
    std::size_t collar = 0;  // nodes excluded near singular chart ends

    std::function<Field(double)> metric_at;          // a(., t)
    std::function<Field(double)> potential_at;       // phi(., t)
    std::function<Field(double)> metric_rate_at;     // d/dt a
    std::function<Field(double)> potential_rate_at;  // d/dt phi

    void check_time(double t) const {
        if (t < -1e-12 || t > horizon * (1.0 + 1e-12) + 1e-12)
            throw std::domain_error("FlowFamily: time outside [0, horizon]");
    }

    WeightedGeometry geometry_at(double t) const {
        check_time(t);
        return WeightedGeometry::make(grid, metric_at(t), potential_at(t), model_dimension);
    }

    Field metric_rate(double t) const {
        check_time(t);
        return metric_rate_at(t);
    }

    /// full n-dimensional trace of d/dt g for reduced models: n a'/a
    Field trace_rate(double t) const {
        Field rate = metric_rate(t);
        Field a = metric_at(t);
        for (std::size_t i = 0; i < rate.size(); ++i)
            rate[i] = model_dimension * rate[i] / a[i];
        return rate;
    }

    Field potential_rate(double t) const {
        check_time(t);
        return potential_rate_at(t);
    }
};

namespace detail {

inline std::function<Field(double)> constant_field_fn(Field v) {
    return [v = std::move(v)](double) { return v; };
}

inline std::function<Field(double)> zero_field_fn(std::size_t n) {
    return constant_field_fn(Field(n, 0.0));
}

}  // namespace detail

inline FlowFamily make_flat_circle(double length, std::size_t nodes) {
    FlowFamily flow;
    flow.kind = "flat_circle";
    flow.grid = Grid1D::circle(length, nodes);
    flow.declared = {0.0, 1.0, 1.0};
    flow.conjugate = true;
    flow.metric_at = detail::constant_field_fn(Field(nodes, 1.0));
    flow.potential_at = detail::constant_field_fn(Field(nodes, 0.0));
    flow.metric_rate_at = detail::zero_field_fn(nodes);
    flow.potential_rate_at = detail::zero_field_fn(nodes);
    return flow;
}

/// flat segment [-length/2, length/2] with reflecting ends
inline FlowFamily make_flat_line(double length, std::size_t nodes) {
    FlowFamily flow;
    flow.kind = "flat_line";
    flow.grid = Grid1D::interval(-0.5 * length, 0.5 * length, nodes);
    flow.declared = {0.0, 1.0, 1.0};
    flow.conjugate = true;
    flow.metric_at = detail::constant_field_fn(Field(nodes, 1.0));
    flow.potential_at = detail::constant_field_fn(Field(nodes, 0.0));
    flow.metric_rate_at = detail::zero_field_fn(nodes);
    flow.potential_rate_at = detail::zero_field_fn(nodes);
    return flow;
}

/// Ornstein-Uhlenbeck line: phi(x) = x^2/2 on [-half_width, half_width]
inline FlowFamily make_ou_line(std::size_t nodes, double half_width = 8.0) {
    FlowFamily flow;
    flow.kind = "ou_line";
    flow.grid = Grid1D::interval(-half_width, half_width, nodes);
    flow.declared = {1.0, 1.0, kInfiniteDimension};
    flow.conjugate = true;
    Field phi(nodes);
    for (std::size_t i = 0; i < nodes; ++i) phi[i] = 0.5 * flow.grid.x[i] * flow.grid.x[i];
    flow.metric_at = detail::constant_field_fn(Field(nodes, 1.0));
    flow.potential_at = detail::constant_field_fn(std::move(phi));
    flow.metric_rate_at = detail::zero_field_fn(nodes);
    flow.potential_rate_at = detail::zero_field_fn(nodes);
    return flow;
}

/// Euclidean cone chart: phi(x) = -(N-1) log x on (0, radius], so the
/// measure weight is x^{N-1} dx; an RCD(0, N) model.
inline FlowFamily make_cone(double N, double radius, std::size_t nodes) {
    if (N <= 1.0) throw std::invalid_argument("make_cone: need N > 1");
    if (radius <= 0.0) throw std::invalid_argument("make_cone: need radius > 0");
    FlowFamily flow;
    flow.kind = "cone";
    const double x0 = radius / static_cast<double>(nodes);
    flow.grid = Grid1D::interval(x0, radius, nodes);
    flow.declared = {0.0, 1.0, N};
    flow.conjugate = true;
    flow.collar = 3;
    Field phi(nodes);
    for (std::size_t i = 0; i < nodes; ++i) phi[i] = -(N - 1.0) * std::log(flow.grid.x[i]);
    flow.metric_at = detail::constant_field_fn(Field(nodes, 1.0));
    flow.potential_at = detail::constant_field_fn(std::move(phi));
    flow.metric_rate_at = detail::zero_field_fn(nodes);
    flow.potential_rate_at = detail::zero_field_fn(nodes);
    return flow;
}

/// static sphere S^n reduced to (0, pi) with weight sin^{n-1}(theta);
/// an RCD(n-1, n) model
inline FlowFamily make_weighted_sphere(int n, std::size_t nodes) {
    if (n < 2) throw std::invalid_argument("make_weighted_sphere: need n >= 2");
    FlowFamily flow;
    flow.kind = "weighted_sphere";
    const double pi = 3.14159265358979323846;
    const double inset = pi / static_cast<double>(nodes + 1);
    flow.grid = Grid1D::interval(inset, pi - inset, nodes);
    flow.declared = {static_cast<double>(n - 1), 1.0, static_cast<double>(n)};
    flow.conjugate = true;
    flow.collar = 3;
    Field phi(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
        phi[i] = -(n - 1.0) * std::log(std::sin(flow.grid.x[i]));
    flow.metric_at = detail::constant_field_fn(Field(nodes, 1.0));
    flow.potential_at = detail::constant_field_fn(std::move(phi));
    flow.metric_rate_at = detail::zero_field_fn(nodes);
    flow.potential_rate_at = detail::zero_field_fn(nodes);
    return flow;
}

/// Round sphere under Ricci flow: a(t) = 1 - 2(n-1)t on the sphere chart,
/// with the conjugate potential phi_t = phi_0 + (n/2) log a(t) keeping the
/// weighted measure frozen. The (0, 1, n) defect vanishes identically.
inline FlowFamily make_shrinking_sphere(int n, double horizon_fraction, std::size_t nodes) {
    if (n < 2) throw std::invalid_argument("make_shrinking_sphere: need n >= 2");
    if (horizon_fraction <= 0.0 || horizon_fraction >= 1.0)
        throw std::invalid_argument(
            "make_shrinking_sphere: horizon_fraction must lie in (0,1); the metric "
            "collapses at t = 1/(2(n-1))");
    FlowFamily flow = make_weighted_sphere(n, nodes);
    flow.kind = "shrinking_sphere";
    flow.declared = {0.0, 1.0, static_cast<double>(n)};
    flow.is_static = false;
    flow.model_dimension = static_cast<double>(n);
    const double rate = -2.0 * (n - 1.0);
    flow.horizon = horizon_fraction / (2.0 * (n - 1.0));
    Field phi0 = flow.potential_at(0.0);
    const std::size_t m = nodes;
    const double nd = static_cast<double>(n);
    flow.metric_at = [m, rate](double t) { return Field(m, 1.0 + rate * t); };
    flow.metric_rate_at = [m, rate](double) { return Field(m, rate); };
    flow.potential_at = [phi0, rate, nd](double t) {
        Field phi = phi0;
        const double shift = 0.5 * nd * std::log(1.0 + rate * t);
        for (double& v : phi) v += shift;
        return phi;
    };
    flow.potential_rate_at = [m, rate, nd](double t) {
        return Field(m, 0.5 * nd * rate / (1.0 + rate * t));
    };
    return flow;
}

/// User-supplied coefficient tables. When rate callables are omitted they
/// are synthesized by central secants with step eps.
inline FlowFamily make_custom(Grid1D grid,
                              std::function<Field(double)> metric_fn,
                              std::function<Field(double)> potential_fn,
                              double horizon, FlowClass declared,
                              double model_dimension = 1.0,
                              std::function<Field(double)> metric_rate_fn = nullptr,
                              std::function<Field(double)> potential_rate_fn = nullptr,
                              double eps = 1e-5) {
    grid.validate();
    FlowFamily flow;
    flow.kind = "custom";
    flow.grid = std::move(grid);
    flow.horizon = horizon;
    flow.declared = declared;
    flow.is_static = false;
    flow.model_dimension = model_dimension;
    flow.metric_at = metric_fn;
    flow.potential_at = potential_fn;
    auto secant = [eps, horizon](const std::function<Field(double)>& fn) {
        return [fn, eps, horizon](double t) {
            double lo = t - eps, hi = t + eps;
            if (lo < 0.0) { lo = 0.0; hi = 2.0 * eps; }
            if (hi > horizon) { hi = horizon; lo = horizon - 2.0 * eps; }
            Field a = fn(lo), b = fn(hi);
            for (std::size_t i = 0; i < a.size(); ++i) a[i] = (b[i] - a[i]) / (hi - lo);
            return a;
        };
    };
    flow.metric_rate_at = metric_rate_fn ? metric_rate_fn : secant(metric_fn);
    flow.potential_rate_at = potential_rate_fn ? potential_rate_fn : secant(potential_fn);
    return flow;
}

/// max relative deviation of the declared rates from central secants,
/// sampled at a handful of interior times; custom families must stay
/// within 1e-6
inline double validate_rates(const FlowFamily& flow, double eps = 1e-5) {
    double worst = 0.0;
    const double T = std::isinf(flow.horizon) ? 1.0 : flow.horizon;
    for (int k = 1; k <= 4; ++k) {
        const double t = T * static_cast<double>(k) / 5.0;
        Field am = flow.metric_at(std::max(0.0, t - eps));
        Field ap = flow.metric_at(std::min(T, t + eps));
        Field ra = flow.metric_rate(t);
        Field pm = flow.potential_at(std::max(0.0, t - eps));
        Field pp = flow.potential_at(std::min(T, t + eps));
        Field rp = flow.potential_rate(t);
        const double span = std::min(T, t + eps) - std::max(0.0, t - eps);
        for (std::size_t i = 0; i < ra.size(); ++i) {
            const double sa = (ap[i] - am[i]) / span;
            const double sp = (pp[i] - pm[i]) / span;
            worst = std::max(worst, std::abs(sa - ra[i]) / (1.0 + std::abs(sa)));
            worst = std::max(worst, std::abs(sp - rp[i]) / (1.0 + std::abs(sp)));
        }
    }
    return worst;
}

/// Rebuilds the potential so the weighted measure is frozen in time:
/// d/dt phi = (1/2) Tr(d/dt g), integrated from the t = 0 potential by
/// composite Simpson quadrature.
inline FlowFamily enforce_conjugate(FlowFamily flow) {
    if (flow.is_static) {
        flow.conjugate = true;
        return flow;
    }
    FlowFamily base = flow;
    auto integrated_potential = [base](double t) {
        Field phi = base.potential_at(0.0);
        if (t <= 0.0) return phi;
        const int panels = 128;  // Simpson, even count; closed forms are smooth
        const double dt = t / (2.0 * panels);
        Field acc(phi.size(), 0.0);
        for (int k = 0; k <= 2 * panels; ++k) {
            const double w = (k == 0 || k == 2 * panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            Field tr = base.trace_rate(dt * k);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * tr[i];
        }
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += 0.5 * acc[i] * dt / 3.0;
        return phi;
    };
    flow.potential_at = integrated_potential;
    flow.potential_rate_at = [base](double t) {
        Field tr = base.trace_rate(t);
        for (double& v : tr) v *= 0.5;
        return tr;
    };
    flow.conjugate = true;
    return flow;
}

struct FlowDefect {
    double t = 0.0;
    Field defect;       // nodewise (1/2 d/dt g + Ric_{N,1} - K g) on the unit direction
    double min_defect = 0.0;
};

/// defect of the (K, n, N)-super Ricci flow inequality at time t, reported
/// over the interior window (collar excluded)
inline FlowDefect super_ricci_defect(const FlowFamily& flow, double N, double K, double t) {
    WeightedGeometry geom = flow.geometry_at(t);
    OperatorSet ops(geom);
    Field ric = bakry_emery_ricci_unit(ops, N);
    Field rate = flow.metric_rate(t);
    FlowDefect out;
    out.t = t;
    out.defect.resize(geom.size());
    for (std::size_t i = 0; i < geom.size(); ++i)
        out.defect[i] = 0.5 * rate[i] / geom.metric[i] + ric[i] - K;
    InteriorWindow w = interior_window(geom, flow.collar);
    out.min_defect = out.defect[w.first];
    for (std::size_t i = w.first; i <= w.last; ++i)
        out.min_defect = std::min(out.min_defect, out.defect[i]);
    return out;
}

/// Rescaled clock: tau(t) = -(1/2K) log(C - 2Kt) (tau = t/C at K = 0),
/// metric e^{-2K tau} a(tau), measure frozen at the tau-slice measure.
/// Turns a (K, n, N) flow into a (0, n, N) flow.
inline FlowFamily time_rescale(const FlowFamily& base, double K, double C) {
    if (C <= 0.0) throw std::domain_error("time_rescale: need C > 0");
    auto tau_of = [K, C](double t) {
        if (K == 0.0) return t / C;
        const double arg = C - 2.0 * K * t;
        if (arg <= 0.0) throw std::domain_error("time_rescale: 2Kt >= C");
        return -0.5 / K * std::log(arg);
    };
    FlowFamily flow = base;
    flow.kind = base.kind + "_rescaled";
    flow.is_static = false;
    flow.declared.K = 0.0;
    // horizon: largest t with tau(t) <= base horizon and 2Kt < C
    if (std::isinf(base.horizon)) {
        flow.horizon = (K > 0.0) ? C / (2.0 * K) * (1.0 - 1e-9)
                                 : std::numeric_limits<double>::infinity();
    } else {
        const double t_star = (K == 0.0) ? C * base.horizon
                                         : (C - std::exp(-2.0 * K * base.horizon)) / (2.0 * K);
        flow.horizon = t_star;
    }
    const double nd = base.model_dimension;
    flow.metric_at = [base, tau_of, K](double t) {
        const double tau = tau_of(t);
        Field a = base.metric_at(tau);
        const double s = std::exp(-2.0 * K * tau);
        for (double& v : a) v *= s;
        return a;
    };
    // d/dt [e^{-2K tau} a(tau)] = tau'(t) e^{-2K tau} (a'(tau) - 2K a(tau)),
    // and tau'(t) = e^{2K tau} when K != 0 (1/C when K = 0)
    flow.metric_rate_at = [base, tau_of, K, C](double t) {
        const double tau = tau_of(t);
        const double taup = (K == 0.0) ? 1.0 / C : std::exp(2.0 * K * tau);
        const double scale = taup * std::exp(-2.0 * K * tau);
        Field r = base.metric_rate_at(tau);
        Field a = base.metric_at(tau);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = scale * (r[i] - 2.0 * K * a[i]);
        return r;
    };
    // keep the measure at the tau-slice value: e^{-phi~} a~^{n/2} = e^{-phi} a^{n/2}
    flow.potential_at = [base, tau_of, K, nd](double t) {
        const double tau = tau_of(t);
        Field phi = base.potential_at(tau);
        const double shift = -nd * K * tau;
        for (double& v : phi) v += shift;
        return phi;
    };
    flow.potential_rate_at = [base, tau_of, K, C, nd](double t) {
        const double tau = tau_of(t);
        const double taup = (K == 0.0) ? 1.0 / C : std::exp(2.0 * K * tau);
        Field r = base.potential_rate_at(tau);
        for (double& v : r) v = taup * (v - nd * K);
        return r;
    };
    return flow;
}

}  // namespace wlab
