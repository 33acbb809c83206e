#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wlab {

/// Tridiagonal system with optional periodic corner entries, solved by the
/// Thomas algorithm (Sherman-Morrison for the cyclic case).
struct TridiagSystem {
    std::vector<double> lower;  // a_i, multiplies x_{i-1}; lower[0] is the (0, n-1) corner when cyclic
    std::vector<double> diag;
    std::vector<double> upper;  // c_i, multiplies x_{i+1}; upper[n-1] is the (n-1, 0) corner when cyclic
    bool cyclic = false;

    std::size_t size() const { return diag.size(); }
};

namespace detail {

inline std::vector<double> thomas_solve(const std::vector<double>& a,
                                        const std::vector<double>& b,
                                        const std::vector<double>& c,
                                        const std::vector<double>& d) {
    const std::size_t n = b.size();
    std::vector<double> cp(n), dp(n), x(n);
    double beta = b[0];
    if (beta == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
    cp[0] = c[0] / beta;
    dp[0] = d[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        beta = b[i] - a[i] * cp[i - 1];
        if (beta == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
        cp[i] = c[i] / beta;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / beta;
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

}  // namespace detail

inline std::vector<double> solve(const TridiagSystem& sys, const std::vector<double>& rhs) {
    const std::size_t n = sys.size();
    if (rhs.size() != n) throw std::invalid_argument("tridiagonal solve: rhs length mismatch");
    if (n < 3) throw std::invalid_argument("tridiagonal solve: system too small");
    if (!sys.cyclic) return detail::thomas_solve(sys.lower, sys.diag, sys.upper, rhs);

    // Sherman-Morrison: fold the two corner entries into a rank-one update.
    const double alpha = sys.lower[0];       // (0, n-1)
    const double beta = sys.upper[n - 1];    // (n-1, 0)
    const double gamma = -sys.diag[0];
    std::vector<double> b = sys.diag;
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    std::vector<double> a = sys.lower, c = sys.upper;
    a[0] = 0.0;
    c[n - 1] = 0.0;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = beta;
    std::vector<double> y = detail::thomas_solve(a, b, c, rhs);
    std::vector<double> z = detail::thomas_solve(a, b, c, u);
    const double vy = y[0] + (alpha / gamma) * y[n - 1];
    const double vz = 1.0 + z[0] + (alpha / gamma) * z[n - 1];
    if (vz == 0.0) throw std::runtime_error("cyclic tridiagonal solve: singular update");
    const double factor = vy / vz;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];
    return x;
}

/// Row-major dense matrix, just enough for propagator bookkeeping.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n_) : n(n_), data(n_ * n_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::vector<double> apply(const std::vector<double>& v) const {
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            const double* row = data.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j];
            out[i] = s;
        }
        return out;
    }

    DenseMatrix multiply(const DenseMatrix& other) const {
        DenseMatrix out(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * other(k, j);
            }
        return out;
    }
};

}  // namespace wlab
