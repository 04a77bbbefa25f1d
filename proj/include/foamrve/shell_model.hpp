////////////////////////////////////////////////////////////////////////////////
// shell_model.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Finite-rotation Reissner-Mindlin shell model: back-rotated strain measures,
//  stress resultants for an isotropic base material, and membrane plasticity
//  indicators evaluated by post-processing.
//
//  All strain and resultant evaluations are templated on the scalar type so
//  that element tangents can be obtained by automatic differentiation of the
//  same code path used for plain evaluation.
//
//  Conventions at a mid-surface point:
//    - frame columns (e1, e2, D) form a right-handed orthonormal triad of the
//      reference tangent plane and director;
//    - grad_x, grad_theta hold physical surface derivatives along e1, e2;
//    - back-rotated (convected) quantities carry a c suffix; they live in the
//      reference frame and annihilate D on the right.
*/
////////////////////////////////////////////////////////////////////////////////
#ifndef FOAMRVE_SHELL_MODEL_HPP
#define FOAMRVE_SHELL_MODEL_HPP

#include <foamrve/core.hpp>
#include <foamrve/rotation.hpp>

namespace foamrve {

struct BaseMaterial {
    Real E = 2700;      // [MPa]
    Real nu = 0.38;
    Real sigma_y = 62;  // [MPa]
};

void validate(const BaseMaterial &mat);

struct ShellSection {
    Real t = 0.01;            // [mm]
    Real kappa = 5.0 / 6.0;   // shear correction
    Real drill_scale = 1.0;   // multiplies the fictitious drilling stiffness t^3 E
};

void validate(const ShellSection &sec);

template <typename S>
struct ShellStrainsT {
    Mat3T<S> L;     // cross-section deformation gradient
    Mat3T<S> K;     // through-thickness gradient of L (spatial curvature map)
    Mat3T<S> Hc;    // back-rotated mid-surface displacement gradient
    Mat3T<S> Ht;    // membrane part of Hc
    Vec3T<S> Gc;    // transverse shear vector
    Mat3T<S> Kc;    // back-rotated curvature map
    Mat3T<S> R;     // rotation
    Mat3T<S> Gamma; // rotation curvature map
    Vec3T<S> d;     // current director
    Vec3T<S> theta; // rotation vector [rad]
    Vec3 D;         // reference director
};
using ShellStrains = ShellStrainsT<Real>;

template <typename S>
struct ShellResultantsT {
    Mat3T<S> Ntc; // back-rotated membrane stress resultant [N/mm]
    Vec3T<S> Vc;  // transverse shear resultant [N/mm]
    Mat3T<S> Mc;  // back-rotated bending moment resultant [N]
    Mat3T<S> N;   // spatial force resultant [N/mm]
    Mat3T<S> M;   // spatial moment resultant [N]
    Mat3T<S> P;   // membrane-average mesoscale stress N / t [MPa]
};
using ShellResultants = ShellResultantsT<Real>;

// Plane-stress stiffness application on an in-plane tensor:
// C^ps(A) = E/(1-nu^2) * ((1-nu) A + nu tr(A) Iplane).
template <typename S>
Mat3T<S> plane_stress_apply(Real E, Real nu, const Mat3T<S> &A, const Mat3 &Iplane) {
    const Real f = E / (1.0 - nu * nu);
    return f * ((1.0 - nu) * A + nu * A.trace() * Iplane.template cast<S>());
}

template <typename S>
ShellStrainsT<S> shell_strains(const Eigen::Matrix<S, 3, 2> &grad_x, const Vec3T<S> &theta,
                               const Eigen::Matrix<S, 3, 2> &grad_theta, const Mat3 &frame) {
    ShellStrainsT<S> st;
    st.D = frame.col(2);
    st.theta = theta;
    st.R = rotation(theta);
    st.Gamma = rotation_gamma(theta);

    const Vec3T<S> Dc = st.D.template cast<S>();
    const Mat3 Itil = Mat3::Identity() - st.D * st.D.transpose();
    // Reference surface gradient operator: maps (3x2) derivative stacks onto
    // rank-2 tensors x_{,alpha} (x) e_alpha.
    const Eigen::Matrix<Real, 2, 3> ET = frame.leftCols<2>().transpose();
    const Eigen::Matrix<S, 2, 3> ETc = ET.template cast<S>();

    st.d = st.R * Dc;
    const Mat3T<S> Fs = grad_x * ETc; // surface part of the deformation gradient
    st.L = Fs + st.d * Dc.transpose();
    st.Hc = st.R.transpose() * Fs - Itil.template cast<S>();
    st.Ht = Itil.template cast<S>() * st.Hc;
    st.Gc = st.Hc.transpose() * Dc;

    Eigen::Matrix<S, 3, 2> dcols, kcols;
    for (int a = 0; a < 2; ++a) {
        const Vec3T<S> g = grad_theta.col(a);
        dcols.col(a) = Vec3T<S>(st.Gamma * g).cross(st.d);
        kcols.col(a) = Vec3T<S>(st.Gamma.transpose() * g).cross(Dc);
    }
    st.K = dcols * ETc;
    st.Kc = kcols * ETc;
    return st;
}

template <typename S>
ShellResultantsT<S> shell_resultants(const ShellStrainsT<S> &st, const ShellSection &sec,
                                     const BaseMaterial &mat) {
    ShellResultantsT<S> r;
    const Mat3 Itil = Mat3::Identity() - st.D * st.D.transpose();
    const Mat3T<S> Ltc = Itil.template cast<S>() + st.Ht;

    const Mat3T<S> Em = 0.5 * (Ltc.transpose() * Ltc - Itil.template cast<S>());
    r.Ntc = Ltc * plane_stress_apply(sec.t * mat.E, mat.nu, Em, Itil);

    r.Vc = (sec.kappa * sec.t * mat.E / (2.0 * (1.0 + mat.nu))) * st.Gc;

    const Mat3T<S> Bm = 0.5 * (Ltc.transpose() * st.Kc + st.Kc.transpose() * Ltc);
    r.Mc = Ltc * plane_stress_apply(std::pow(sec.t, 3) / 12.0 * mat.E, mat.nu, Bm, Itil);

    const Vec3T<S> Dc = st.D.template cast<S>();
    r.N = st.R * (r.Ntc + Dc * r.Vc.transpose());
    r.M = st.R * r.Mc;
    r.P = r.N / sec.t;
    return r;
}

// Von Mises equivalent of the membrane stress Ntc / t (symmetrized).
Real membrane_von_mises(const Mat3 &Ntc, Real t);

struct MembraneCheck {
    bool yielded = false;
    Real sigma_eq = 0; // [MPa]
};

// Post-processed yield flag; exact equality with sigma_y does not yield.
MembraneCheck membrane_plastic_flag(const Mat3 &Ntc, Real t, Real sigma_y);

// Mean stress over von Mises equivalent of the plane-stress membrane tensor.
Real membrane_triaxiality(const Mat3 &Ntc, Real t);

} // namespace foamrve

#endif
