#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wlab/grid.hpp"
#include "wlab/tridiag.hpp"

namespace wlab {

constexpr double kInfiniteDimension = std::numeric_limits<double>::infinity();

/// Witten Laplacian in divergence form plus the square-field calculus.
///
/// L is assembled from edge conductances so that it is exactly
/// self-adjoint against the mu-weighted inner product, annihilates
/// constants, and satisfies integration by parts to round-off:
///     <Lf, g>_mu = -sum_edges C_e (f_j - f_i)(g_j - g_i).
/// Gamma is defined through L,
///     Gamma(f,g) = (1/2)[L(fg) - f Lg - g Lf],
/// which reduces to the nonnegative edge form below and obeys the
/// Leibniz rule exactly by construction.
class OperatorSet {
public:
    explicit OperatorSet(const WeightedGeometry& geom) : geom_(&geom) {
        const std::size_t n = geom.size();
        const double h = geom.grid.h;
        const double p = 0.5 * geom.model_dimension;
        // conductance density e^{-phi} a^{p-1}; the Dirichlet form is
        // int (f')^2 / a dmu = int (f')^2 e^{-phi} a^{p-1} dx
        Field c(n);
        for (std::size_t i = 0; i < n; ++i)
            c[i] = std::exp(-geom.potential[i]) * std::pow(geom.metric[i], p - 1.0);
        const std::size_t ne = geom.grid.periodic() ? n : n - 1;
        edge_.resize(ne);
        for (std::size_t e = 0; e < ne; ++e) {
            const std::size_t i = e, j = (e + 1) % n;
            edge_[e] = 0.5 * (c[i] + c[j]) / h;
        }
    }

    const WeightedGeometry& geometry() const { return *geom_; }
    std::size_t size() const { return geom_->size(); }
    bool periodic() const { return geom_->grid.periodic(); }
    const Field& edge_conductance() const { return edge_; }

    Field apply(const Field& f) const {
        check_len(f);
        const std::size_t n = size();
        Field out(n, 0.0);
        const std::size_t ne = edge_.size();
        for (std::size_t e = 0; e < ne; ++e) {
            const std::size_t i = e, j = (e + 1) % n;
            const double flux = edge_[e] * (f[j] - f[i]);
            out[i] += flux;
            out[j] -= flux;
        }
        for (std::size_t i = 0; i < n; ++i) out[i] /= geom_->measure[i];
        return out;
    }

    /// (I + s L) as a tridiagonal (cyclic on circles) matrix
    TridiagSystem shifted_identity(double s) const {
        const std::size_t n = size();
        TridiagSystem sys;
        sys.cyclic = periodic();
        sys.lower.assign(n, 0.0);
        sys.diag.assign(n, 1.0);
        sys.upper.assign(n, 0.0);
        const std::size_t ne = edge_.size();
        for (std::size_t e = 0; e < ne; ++e) {
            const std::size_t i = e, j = (e + 1) % n;
            const double wi = s * edge_[e] / geom_->measure[i];
            const double wj = s * edge_[e] / geom_->measure[j];
            sys.diag[i] -= wi;
            sys.diag[j] -= wj;
            if (j == i + 1) {
                sys.upper[i] += wi;
                sys.lower[j] += wj;
            } else {  // wrap edge (n-1, 0)
                sys.upper[i] += wi;
                sys.lower[j] += wj;
            }
        }
        return sys;
    }

    Field carre_du_champ(const Field& f, const Field& g) const {
        check_len(f);
        if (g.size() != f.size()) throw std::invalid_argument("carre_du_champ: field length mismatch");
        const std::size_t n = size();
        Field out(n, 0.0);
        const std::size_t ne = edge_.size();
        for (std::size_t e = 0; e < ne; ++e) {
            const std::size_t i = e, j = (e + 1) % n;
            const double v = 0.5 * edge_[e] * (f[j] - f[i]) * (g[j] - g[i]);
            out[i] += v;
            out[j] += v;
        }
        for (std::size_t i = 0; i < n; ++i) out[i] /= geom_->measure[i];
        return out;
    }

    Field gamma2(const Field& f) const {
        Field gff = carre_du_champ(f, f);
        Field lf = apply(f);
        Field lg = apply(gff);
        Field gflf = carre_du_champ(f, lf);
        const std::size_t n = size();
        Field out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * lg[i] - gflf[i];
        return out;
    }

    /// centered first difference in the chart coordinate (one-sided at
    /// interval endpoints); the raw d/dx derivative, not metric-normalized
    Field gradient(const Field& f) const {
        check_len(f);
        const std::size_t n = size();
        const double h = geom_->grid.h;
        Field out(n);
        if (periodic()) {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2.0 * h);
        } else {
            out[0] = (f[1] - f[0]) / h;
            out[n - 1] = (f[n - 1] - f[n - 2]) / h;
            for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        return out;
    }

    Field second_difference(const Field& f) const {
        check_len(f);
        const std::size_t n = size();
        const double h2 = geom_->grid.h * geom_->grid.h;
        Field out(n);
        if (periodic()) {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = (f[(i + 1) % n] - 2.0 * f[i] + f[(i + n - 1) % n]) / h2;
        } else {
            // one-sided second differences at the endpoints; unreliable there
            out[0] = (f[2] - 2.0 * f[1] + f[0]) / h2;
            out[n - 1] = (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / h2;
            for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
        }
        return out;
    }

    /// covariant Hessian evaluated on the unit chart direction:
    /// (f'' - Gamma^x_xx f') / a with Gamma^x_xx = a'/(2a)
    Field hessian(const Field& f) const {
        Field fp = gradient(f);
        Field fpp = second_difference(f);
        Field ap = gradient(geom_->metric);
        const std::size_t n = size();
        Field out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = geom_->metric[i];
            out[i] = (fpp[i] - 0.5 * ap[i] / a * fp[i]) / a;
        }
        return out;
    }

    double cheeger_energy(const Field& f) const {
        check_len(f);
        double s = 0.0;
        const std::size_t n = size();
        for (std::size_t e = 0; e < edge_.size(); ++e) {
            const std::size_t i = e, j = (e + 1) % n;
            const double d = f[j] - f[i];
            s += edge_[e] * d * d;
        }
        return s;
    }

    /// bilinear edge form  sum_e C_e (f_j - f_i)(g_j - g_i) = int Gamma(f,g) dmu,
    /// equal to -<f, Lg>_mu to round-off
    double dirichlet_form(const Field& f, const Field& g) const {
        check_len(f);
        if (g.size() != f.size()) throw std::invalid_argument("dirichlet_form: field length mismatch");
        double s = 0.0;
        const std::size_t n = size();
        for (std::size_t e = 0; e < edge_.size(); ++e) {
            const std::size_t i = e, j = (e + 1) % n;
            s += edge_[e] * (f[j] - f[i]) * (g[j] - g[i]);
        }
        return s;
    }

private:
    void check_len(const Field& f) const {
        if (f.size() != size()) throw std::invalid_argument("OperatorSet: field length mismatch");
    }

    const WeightedGeometry* geom_;
    Field edge_;  // conductance / h per edge
};

inline OperatorSet build_operators(const WeightedGeometry& geom) { return OperatorSet(geom); }

/// Hessian of the potential on the unit direction, the Ric_{inf,1} density
/// of the 1D chart (Ric_g = 0 in the chart).
inline Field ricci_infinity_unit(const OperatorSet& ops) {
    return ops.hessian(ops.geometry().potential);
}

/// Ric_{N,1}(L) evaluated on the unit chart direction:
///   Hess(phi)(e,e) - Gamma(phi,phi) / (N - 1),
/// with the last term dropped at N = infinity. N = 1 demands a constant
/// potential (the weight must be trivial).
inline Field bakry_emery_ricci_unit(const OperatorSet& ops, double N) {
    const WeightedGeometry& geom = ops.geometry();
    if (N < 1.0) throw std::domain_error("bakry_emery_ricci: N must be >= 1");
    Field out = ricci_infinity_unit(ops);
    if (N == 1.0) {
        double lo = geom.potential[0], hi = geom.potential[0];
        for (double v : geom.potential) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > 1e-12 * (1.0 + std::abs(hi)))
            throw std::invalid_argument("bakry_emery_ricci: N = 1 requires a constant potential");
        for (double& v : out) v = 0.0;
        return out;
    }
    if (std::isinf(N)) return out;
    Field gpp = ops.carre_du_champ(geom.potential, geom.potential);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= gpp[i] / (N - 1.0);
    return out;
}

/// Ric_{N,1}(L)(grad f, grad f) for a test field f.
inline Field bakry_emery_ricci(const OperatorSet& ops, double N, const Field& f) {
    Field unit = bakry_emery_ricci_unit(ops, N);
    Field gff = ops.carre_du_champ(f, f);
    // at finite N the cross term uses Gamma(phi,f)^2 rather than
    // Gamma(phi,phi) Gamma(f,f); in 1D the two coincide up to O(h^2) but we
    // keep the defining expression
    if (N > 1.0 && !std::isinf(N)) {
        const Field& phi = ops.geometry().potential;
        Field ric_inf = ricci_infinity_unit(ops);
        Field gpf = ops.carre_du_champ(phi, f);
        Field out(f.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            out[i] = ric_inf[i] * gff[i] - gpf[i] * gpf[i] / (N - 1.0);
        return out;
    }
    Field out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = unit[i] * gff[i];
    return out;
}

struct CurvaturePanel {
    Field ric_field;      // Ric_{N,1}(grad f, grad f) / Gamma(f,f) where Gamma(f,f) > 0
    Field hessian_field;  // covariant Hessian of f on the unit direction
    Field gamma2_field;
};

inline CurvaturePanel curvature_panel(const OperatorSet& ops, double N, const Field& f) {
    CurvaturePanel panel;
    panel.hessian_field = ops.hessian(f);
    panel.gamma2_field = ops.gamma2(f);
    Field ric = bakry_emery_ricci(ops, N, f);
    Field gff = ops.carre_du_champ(f, f);
    panel.ric_field.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        panel.ric_field[i] = gff[i] > 0.0 ? ric[i] / gff[i] : 0.0;
    return panel;
}

/// index window excluding unreliable nodes: interval endpoints plus, for
/// geometries with a singular chart end (vanishing weight), a small collar
struct InteriorWindow {
    std::size_t first = 0;
    std::size_t last = 0;  // inclusive

    bool contains(std::size_t i) const { return i >= first && i <= last; }
    std::size_t count() const { return last + 1 - first; }
};

inline InteriorWindow interior_window(const WeightedGeometry& geom, std::size_t collar = 0) {
    InteriorWindow w;
    if (geom.grid.periodic()) {
        w.first = 0;
        w.last = geom.size() - 1;
        return w;
    }
    w.first = 1 + collar;
    w.last = geom.size() - 2 - collar;
    if (w.first >= w.last) throw std::invalid_argument("interior_window: grid too small for collar");
    return w;
}

}  // namespace wlab
