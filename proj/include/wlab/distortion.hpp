#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wlab {

/// generalized sine: sin(sqrt(k) s)/sqrt(k) for k > 0, s for k = 0,
/// sinh(sqrt(-k) s)/sqrt(-k) for k < 0
inline double s_kappa(double kappa, double s) {
    if (kappa > 0.0) {
        const double r = std::sqrt(kappa);
        return std::sin(r * s) / r;
    }
    if (kappa < 0.0) {
        const double r = std::sqrt(-kappa);
        return std::sinh(r * s) / r;
    }
    return s;
}

/// generalized cosine, the derivative of s_kappa
inline double c_kappa(double kappa, double s) {
    if (kappa > 0.0) return std::cos(std::sqrt(kappa) * s);
    if (kappa < 0.0) return std::cosh(std::sqrt(-kappa) * s);
    return 1.0;
}

/// distortion coefficient sigma_kappa^{(t)}(theta):
///   +inf            if kappa theta^2 >= pi^2
///   t               if kappa theta^2 == 0
///   s_k(t theta)/s_k(theta) otherwise
inline double distortion_coefficient(double kappa, double theta, double t) {
    if (theta < 0.0) throw std::domain_error("distortion_coefficient: theta must be >= 0");
    if (t < 0.0 || t > 1.0) throw std::domain_error("distortion_coefficient: t must be in [0,1]");
    const double k_theta2 = kappa * theta * theta;
    const double pi = 3.14159265358979323846;
    if (k_theta2 >= pi * pi) return std::numeric_limits<double>::infinity();
    if (k_theta2 == 0.0) return t;
    return s_kappa(kappa, t * theta) / s_kappa(kappa, theta);
}

}  // namespace wlab
