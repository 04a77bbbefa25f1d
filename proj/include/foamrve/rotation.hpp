////////////////////////////////////////////////////////////////////////////////
// rotation.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Euler-Rodrigues rotation tensor R(theta) and the associated rotation
//  curvature (tangent) map Gamma(theta) with dR[d] = skew(Gamma d) R.
//  Both are expressed through even powers of ||theta|| so that a single
//  Taylor branch covers the small-angle limit; all functions are templated
//  on the scalar so they can be driven by autodiff types.
*/
////////////////////////////////////////////////////////////////////////////////
#ifndef FOAMRVE_ROTATION_HPP
#define FOAMRVE_ROTATION_HPP

#include <foamrve/core.hpp>
#include <cmath>

namespace Eigen { template <typename DerType> class AutoDiffScalar; }

namespace foamrve {

inline double scalar_value(double x) { return x; }
inline float scalar_value(float x) { return x; }
template <typename DerType>
double scalar_value(const Eigen::AutoDiffScalar<DerType> &x) { return x.value(); }

namespace detail {

// Series branch threshold in x = ||theta||^2. Chosen large enough that the
// closed forms below are free of cancellation (the derivative expressions
// divide an O(x) difference of O(1) terms by x), and small enough that the
// truncated series are exact to machine precision.
constexpr double kSeriesSwitch = 0.02;

// a = sin(t)/t, b = (1-cos(t))/t^2, c = (t-sin(t))/t^3 as functions of x = t^2.
template <typename S>
void rotation_coeffs(const S &x, S &a, S &b, S &c) {
    using std::sqrt; using std::sin; using std::cos;
    if (scalar_value(x) < kSeriesSwitch) {
        const S x2 = x * x;
        a = S(1) - x / 6 + x2 / 120 - x2 * x / 5040 + x2 * x2 / 362880;
        b = S(0.5) - x / 24 + x2 / 720 - x2 * x / 40320 + x2 * x2 / 3628800;
        c = S(1.0 / 6.0) - x / 120 + x2 / 5040 - x2 * x / 362880 + x2 * x2 / 39916800;
    } else {
        S t = sqrt(x);
        S s = sin(t), co = cos(t);
        a = s / t;
        b = (S(1) - co) / x;
        c = (t - s) / (x * t);
    }
}

// Derivatives of b and c with respect to x.
template <typename S>
void rotation_coeff_derivs(const S &x, S &db, S &dc) {
    if (scalar_value(x) < kSeriesSwitch) {
        const S x2 = x * x;
        db = S(-1.0 / 24.0) + x / 360 - x2 / 13440 + x2 * x / 907200;
        dc = S(-1.0 / 120.0) + x / 2520 - x2 / 120960 + x2 * x / 9979200;
    } else {
        S a, b, c;
        rotation_coeffs(x, a, b, c);
        db = (a / 2 - b) / x;
        dc = (b - 3 * c) / (2 * x);
    }
}

} // namespace detail

template <typename S>
Mat3T<S> rotation(const Vec3T<S> &theta) {
    S x = theta.squaredNorm();
    S a, b, c;
    detail::rotation_coeffs(x, a, b, c);
    Mat3T<S> W = skew(theta);
    return Mat3T<S>::Identity() + a * W + b * (W * W);
}

template <typename S>
Mat3T<S> rotation_gamma(const Vec3T<S> &theta) {
    S x = theta.squaredNorm();
    S a, b, c;
    detail::rotation_coeffs(x, a, b, c);
    Mat3T<S> W = skew(theta);
    return Mat3T<S>::Identity() + b * W + c * (W * W);
}

// Directional derivative dGamma(theta)[d].
template <typename S>
Mat3T<S> rotation_gamma_dir(const Vec3T<S> &theta, const Vec3T<S> &d) {
    S x = theta.squaredNorm();
    S a, b, c, db, dc;
    detail::rotation_coeffs(x, a, b, c);
    detail::rotation_coeff_derivs(x, db, dc);
    Mat3T<S> W = skew(theta);
    Mat3T<S> Wd = skew(d);
    S tdotd = 2 * theta.dot(d);
    return tdotd * (db * W + dc * (W * W)) + b * Wd + c * (Wd * W + W * Wd);
}

} // namespace foamrve

#endif
