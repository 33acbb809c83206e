#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlab {

using Field = std::vector<double>;

enum class Topology { circle, interval };
enum class BoundaryRule { periodic, reflecting };

/// Uniform 1D grid, either a circle (periodic) or a closed interval
/// (reflecting / zero-flux ends).
struct Grid1D {
    Topology topology = Topology::interval;
    std::vector<double> x;  // node positions, strictly increasing
    double h = 0.0;
    BoundaryRule boundary = BoundaryRule::reflecting;

    std::size_t size() const { return x.size(); }
    bool periodic() const { return boundary == BoundaryRule::periodic; }

    static Grid1D circle(double length, std::size_t n) {
        if (n < 3 || length <= 0.0)
            throw std::invalid_argument("Grid1D::circle: need n >= 3 and length > 0");
        Grid1D g;
        g.topology = Topology::circle;
        g.boundary = BoundaryRule::periodic;
        g.h = length / static_cast<double>(n);
        g.x.resize(n);
        for (std::size_t i = 0; i < n; ++i) g.x[i] = static_cast<double>(i) * g.h;
        return g;
    }

    static Grid1D interval(double a, double b, std::size_t n) {
        if (n < 3 || b <= a)
            throw std::invalid_argument("Grid1D::interval: need n >= 3 and b > a");
        Grid1D g;
        g.topology = Topology::interval;
        g.boundary = BoundaryRule::reflecting;
        g.h = (b - a) / static_cast<double>(n - 1);
        g.x.resize(n);
        for (std::size_t i = 0; i < n; ++i) g.x[i] = a + static_cast<double>(i) * g.h;
        return g;
    }

    void validate() const {
        if (x.size() < 3) throw std::invalid_argument("Grid1D: too few nodes");
        if (h <= 0.0) throw std::invalid_argument("Grid1D: h must be positive");
        for (std::size_t i = 1; i < x.size(); ++i)
            if (x[i] <= x[i - 1])
                throw std::invalid_argument("Grid1D: node positions must be strictly increasing");
        if (boundary == BoundaryRule::periodic && topology != Topology::circle)
            throw std::invalid_argument("Grid1D: periodic boundary requires circle topology");
    }
};

/// A discrete weighted geometry (X, d, g, phi, mu): metric coefficient
/// a_i > 0 so g = a dx^2, potential phi_i, and node measures mu_i.
///
/// model_dimension records the dimension of the model space this chart
/// reduces (1 for genuinely 1D spaces, n for sphere/cone reductions);
/// it enters only through the volume factor a^{n/2} in mu. For a == 1
/// everywhere the two conventions coincide.
struct WeightedGeometry {
    Grid1D grid;
    Field metric;     // a_i
    Field potential;  // phi_i
    Field measure;    // mu_i = e^{-phi_i} * a_i^{n_model/2} * h
    double model_dimension = 1.0;

    std::size_t size() const { return grid.size(); }

    static WeightedGeometry make(Grid1D grid, Field metric, Field potential,
                                 double model_dimension = 1.0) {
        grid.validate();
        const std::size_t n = grid.size();
        if (metric.size() != n || potential.size() != n)
            throw std::invalid_argument("WeightedGeometry: field length mismatch");
        WeightedGeometry geom;
        geom.grid = std::move(grid);
        geom.metric = std::move(metric);
        geom.potential = std::move(potential);
        geom.model_dimension = model_dimension;
        geom.measure.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(geom.metric[i] > 0.0))
                throw std::invalid_argument("WeightedGeometry: metric coefficient must be positive");
            geom.measure[i] = std::exp(-geom.potential[i]) *
                              std::pow(geom.metric[i], 0.5 * model_dimension) * geom.grid.h;
            if (!(geom.measure[i] > 0.0) || !std::isfinite(geom.measure[i]))
                throw std::invalid_argument("WeightedGeometry: measure weights must be positive and finite");
        }
        return geom;
    }

    double total_measure() const {
        return std::accumulate(measure.begin(), measure.end(), 0.0);
    }

    /// integral of a nodewise field against d(mu)
    double integrate(const Field& f) const {
        if (f.size() != measure.size())
            throw std::invalid_argument("integrate: field length mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * measure[i];
        return s;
    }

    /// mu-weighted inner product
    double inner(const Field& f, const Field& g) const {
        if (f.size() != g.size() || f.size() != measure.size())
            throw std::invalid_argument("inner: field length mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i] * measure[i];
        return s;
    }
};

}  // namespace wlab
