#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wlab/flows.hpp"
#include "wlab/grid.hpp"
#include "wlab/heat.hpp"
#include "wlab/operators.hpp"

namespace wlab {

inline constexpr double kPi = 3.14159265358979323846;

/// H = -int u log u dmu, with 0 log 0 = 0
inline double boltzmann_entropy(const WeightedGeometry& geom, const Field& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] <= 0.0) continue;
        s -= u[i] * std::log(u[i]) * geom.measure[i];
    }
    return s;
}

/// I = int Gamma(u, log u) dmu, evaluated as the edge bilinear form so it
/// coincides with -<log u, Lu>_mu to round-off
inline double fisher_information(const OperatorSet& ops, const Field& u) {
    Field logu(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) logu[i] = std::log(std::max(u[i], kLogFloor));
    return ops.dirichlet_form(u, logu);
}

/// the same quantity through the generator, for cross-validation
inline double fisher_information_via_generator(const OperatorSet& ops, const Field& u) {
    Field logu(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) logu[i] = std::log(std::max(u[i], kLogFloor));
    Field lu = ops.apply(u);
    return -ops.geometry().inner(logu, lu);
}

struct EntropyReport {
    double t = 0.0;
    double H = 0.0;
    double I = 0.0;
    double H_N = 0.0;
    double H_NK = 0.0;
    double W_N_direct = 0.0;
    double W_NK_direct = 0.0;
    double W_via_derivative = std::numeric_limits<double>::quiet_NaN();
    double entropy_power = 0.0;
    double U_N = 0.0;
    double a = 0.0;
    double Y_a = 0.0;
    double nash = 0.0;
    double clamped_mass = 0.0;  // mass sitting on log-clamped nodes
};

/// full scalar panel at one time slice
inline EntropyReport entropy_panel(const WeightedGeometry& geom, const OperatorSet& ops,
                                   const HeatState& state, double N, double K, double a) {
    const double t = state.t;
    if (!(t > 0.0)) throw std::domain_error("entropy_panel: t must be positive");
    EntropyReport r;
    r.t = t;
    r.a = a;
    r.H = boltzmann_entropy(geom, state.u);
    r.I = fisher_information(ops, state.u);
    const double log4pit = std::log(4.0 * kPi * t);
    r.H_N = r.H - 0.5 * N * (1.0 + log4pit);
    r.H_NK = r.H_N - 0.5 * N * K * t * (1.0 + K * t / 6.0);
    Field f = f_field(state.u, t, N);
    Field gff = ops.carre_du_champ(f, f);
    const double cK = 1.0 + 0.5 * K * t;
    double wk = 0.0, w0 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double base = t * gff[i] + f[i];
        wk += (base - N * cK * cK) * state.u[i] * geom.measure[i];
        w0 += (base - N) * state.u[i] * geom.measure[i];
        if (state.u[i] < kLogFloor) r.clamped_mass += state.u[i] * geom.measure[i];
    }
    r.W_NK_direct = wk;
    r.W_N_direct = w0;
    r.entropy_power = std::exp(2.0 * r.H / N);
    r.U_N = std::exp(r.H / N);  // exp(-Ent/N) with Ent = -H
    const double omega = 0.25 * r.I + a;
    if (omega <= 0.0)
        throw std::domain_error("entropy_panel: Y_a needs I/4 + a > 0; increase a");
    r.Y_a = r.H + 0.5 * N * std::log(omega) + (N * K - 4.0 * a) * t;
    r.nash = r.H - 0.5 * N * (log4pit + 1.0);
    return r;
}

/// W as the derivative definition d/dt [t H_{N,K}(u(t))], by central
/// differences on the trajectory grid; entries for interior indices only
inline std::vector<std::pair<double, double>> w_via_derivative(const Trajectory& traj,
                                                               double N, double K) {
    if (traj.size() < 3)
        throw std::invalid_argument("w_via_derivative: need at least 3 trajectory states");
    std::vector<double> tH(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const HeatState& st = traj.states[k];
        WeightedGeometry geom = traj.flow.geometry_at(st.t);
        const double H = boltzmann_entropy(geom, st.u);
        const double HNK = H - 0.5 * N * (1.0 + std::log(4.0 * kPi * st.t)) -
                           0.5 * N * K * st.t * (1.0 + K * st.t / 6.0);
        tH[k] = st.t * HNK;
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.size() - 2);
    for (std::size_t k = 1; k + 1 < traj.size(); ++k)
        out.emplace_back(traj.states[k].t, (tH[k + 1] - tH[k - 1]) / (2.0 * traj.dt));
    return out;
}

/// surface area of the unit sphere S^{n-1} in R^n
inline double unit_sphere_area(double n) {
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Scalar-curvature W-entropy of the shrinking round sphere at backward
/// time tau (so the running radius^2 is a = 2(n-1) tau). The minimizing
/// potential is the constant fixed by unit mass; the value is independent
/// of tau, which is the soliton signature.
inline double perelman_w_sphere(const FlowFamily& flow, double tau) {
    if (flow.kind != "shrinking_sphere")
        throw std::domain_error("perelman_w_sphere: flow must be a shrinking sphere family");
    const double n = flow.model_dimension;
    const double t_sing = 1.0 / (2.0 * (n - 1.0));
    const double t = t_sing - tau;
    if (t < 0.0 || t > flow.horizon)
        throw std::domain_error("perelman_w_sphere: tau outside the flow range");
    const double a = 2.0 * (n - 1.0) * tau;
    // chart quadrature of int sin^{n-1}(theta) dtheta; the reduced volume
    // of the radius-sqrt(a) sphere is area(S^{n-1}) * a^{n/2} * S
    double S = 0.0;
    for (double x : flow.grid.x) S += std::pow(std::sin(x), n - 1.0) * flow.grid.h;
    const double V = unit_sphere_area(n) * std::pow(a, 0.5 * n) * S;
    const double R = n * (n - 1.0) / a;
    const double f = std::log(V) - 0.5 * n * std::log(4.0 * kPi * tau);
    return tau * R + f - n;
}

}  // namespace wlab
