////////////////////////////////////////////////////////////////////////////////
// core.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Shared dense linear-algebra aliases and small helpers. All quantities are
//  expressed in mm, N, MPa unless noted otherwise.
*/
////////////////////////////////////////////////////////////////////////////////
#ifndef FOAMRVE_CORE_HPP
#define FOAMRVE_CORE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace foamrve {

using Real = double;

template <typename S> using Vec2T = Eigen::Matrix<S, 2, 1>;
template <typename S> using Vec3T = Eigen::Matrix<S, 3, 1>;
template <typename S> using Mat2T = Eigen::Matrix<S, 2, 2>;
template <typename S> using Mat3T = Eigen::Matrix<S, 3, 3>;

using Vec2 = Vec2T<Real>;
using Vec3 = Vec3T<Real>;
using Mat2 = Mat2T<Real>;
using Mat3 = Mat3T<Real>;
using VecX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using MatX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// skew(v) * x == v.cross(x)
template <typename S>
Mat3T<S> skew(const Vec3T<S> &v) {
    Mat3T<S> W;
    W << S(0), -v(2), v(1),
         v(2), S(0), -v(0),
        -v(1), v(0), S(0);
    return W;
}

// Axial contraction: skew(s) : A == s.dot(axial_contraction(A))
template <typename S>
Vec3T<S> axial_contraction(const Mat3T<S> &A) {
    return Vec3T<S>(A(2, 1) - A(1, 2), A(0, 2) - A(2, 0), A(1, 0) - A(0, 1));
}

template <typename A, typename B>
typename A::Scalar ddot(const Eigen::MatrixBase<A> &x, const Eigen::MatrixBase<B> &y) {
    return x.cwiseProduct(y).sum();
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IOError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace foamrve

#endif
