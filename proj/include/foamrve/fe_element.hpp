////////////////////////////////////////////////////////////////////////////////
// fe_element.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Triangular shell facet element: quadratic displacements on corner and
//  midside nodes, Crouzeix-Raviart rotations on edges, and a shared macro
//  deformation gradient column block. 36 dofs per element:
//
//    u[ 0..17]  w_a, a = 0..2 corners, 3..5 midsides (fluctuations)
//    u[18..26]  theta_e, e = 0..2 edges (edge e opposite corner e)
//    u[27..35]  Fhat, column major
//
//  The mid-surface placement is x = Fhat X_ref + w with X_ref the flat facet
//  interpolated from the element's unwrapped corner coordinates, so paired
//  torus nodes see positions differing by the macro-deformed period vector.
//
//  The residual is the variation of the internal virtual work
//      dW = int [ dHc : (Ntc + D (x) Vc) + dKc : Mc ] dA + drilling
//  taken in closed form; consistent tangents come from running the same code
//  with a 36-lane forward autodiff scalar.
*/
////////////////////////////////////////////////////////////////////////////////
#ifndef FOAMRVE_FE_ELEMENT_HPP
#define FOAMRVE_FE_ELEMENT_HPP

#include <foamrve/fe_mesh.hpp>
#include <foamrve/shell_model.hpp>

#include <unsupported/Eigen/AutoDiff>

#include <array>
#include <cmath>

namespace foamrve {

template <typename S> using EVec36T = Eigen::Matrix<S, 36, 1>;
using EVec36 = EVec36T<Real>;
using EMat36 = Eigen::Matrix<Real, 36, 36>;
using Dual36 = Eigen::AutoDiffScalar<EVec36>;

// Barycentric quadrature: three interior points, weight area/3 each.
inline constexpr Real kQuadLambda[3][3] = {
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
};

// In-plane geometry of the flat facet: corner coordinates in the element
// frame and barycentric gradients.
struct ElementShape {
    Mat3 frame;
    std::array<Vec2, 3> p;
    std::array<Vec2, 3> grad_lambda;
    Real area = 0;
};

inline ElementShape element_shape(const ShellElement &el) {
    ElementShape sh;
    sh.frame = el.frame;
    const Vec3 e1 = el.frame.col(0), e2 = el.frame.col(1);
    for (int i = 0; i < 3; ++i) {
        const Vec3 d = el.Xc[i] - el.Xc[0];
        sh.p[i] = Vec2(e1.dot(d), e2.dot(d));
    }
    sh.area = el.area;
    for (int i = 0; i < 3; ++i) {
        const Vec2 opp = sh.p[(i + 2) % 3] - sh.p[(i + 1) % 3];
        sh.grad_lambda[i] = Vec2(-opp[1], opp[0]) / (2.0 * sh.area);
    }
    return sh;
}

// Shape values and in-plane derivatives at one barycentric point.
struct ShapeEval {
    std::array<Real, 6> N;        // P2 displacement
    std::array<Vec2, 6> dN;
    std::array<Real, 3> phi;      // Crouzeix-Raviart rotations
    std::array<Vec2, 3> dphi;
};

inline ShapeEval shape_eval(const ElementShape &sh, const Real lam[3]) {
    ShapeEval se;
    for (int i = 0; i < 3; ++i) {
        se.N[i] = lam[i] * (2.0 * lam[i] - 1.0);
        se.dN[i] = (4.0 * lam[i] - 1.0) * sh.grad_lambda[i];
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        se.N[3 + i] = 4.0 * lam[j] * lam[k];
        se.dN[3 + i] = 4.0 * (lam[j] * sh.grad_lambda[k] + lam[k] * sh.grad_lambda[j]);
        se.phi[i] = 1.0 - 2.0 * lam[i];
        se.dphi[i] = -2.0 * sh.grad_lambda[i];
    }
    return se;
}

// Global dof homes of the element blocks (w by node id, theta by edge id).
struct ElementDofs {
    std::array<int, 6> wnode;
    std::array<int, 3> thedge;
};

inline ElementDofs element_dofs(const ShellElement &el) {
    ElementDofs d;
    for (int i = 0; i < 3; ++i) {
        d.wnode[i] = el.corner[i];
        d.wnode[3 + i] = el.midside[i];
        d.thedge[i] = el.edge[i];
    }
    return d;
}

// Drilling stiffness density; gamma_d is the in-plane spin mismatch between
// the rotation field and the membrane deformation.
inline Real drill_stiffness(const ShellSection &sec, Real E, Real area) {
    return sec.drill_scale * sec.t * sec.t * sec.t * E / area;
}

template <typename S>
EVec36T<S> element_residual(const ShellElement &el, const EVec36T<S> &u,
                            const ShellSection &sec, const BaseMaterial &mat) {
    const ElementShape sh = element_shape(el);
    const Vec3T<S> E1 = sh.frame.col(0).template cast<S>();
    const Vec3T<S> E2 = sh.frame.col(1).template cast<S>();
    const Vec3T<S> Dc = sh.frame.col(2).template cast<S>();
    const Eigen::Matrix<S, 2, 3> ETc = sh.frame.template leftCols<2>().transpose().template cast<S>();
    const Real kd = drill_stiffness(sec, mat.E, sh.area);
    const Real wq = sh.area / 3.0;

    const Eigen::Map<const Mat3T<S>> Fhat(u.data() + 27);
    EVec36T<S> f = EVec36T<S>::Zero();

    for (int q = 0; q < 3; ++q) {
        const ShapeEval se = shape_eval(sh, kQuadLambda[q]);

        Eigen::Matrix<S, 3, 2> gx, gt;
        Vec3T<S> theta = Vec3T<S>::Zero();
        for (int al = 0; al < 2; ++al) {
            Vec3T<S> c = Fhat * (al == 0 ? E1 : E2);
            for (int a = 0; a < 6; ++a) c += se.dN[a][al] * u.template segment<3>(3 * a);
            gx.col(al) = c;
            Vec3T<S> g = Vec3T<S>::Zero();
            for (int e = 0; e < 3; ++e) g += se.dphi[e][al] * u.template segment<3>(18 + 3 * e);
            gt.col(al) = g;
        }
        for (int e = 0; e < 3; ++e) theta += se.phi[e] * u.template segment<3>(18 + 3 * e);

        const ShellStrainsT<S> st = shell_strains<S>(gx, theta, gt, sh.frame);
        const ShellResultantsT<S> r = shell_resultants(st, sec, mat);

        const Mat3T<S> Fs = gx * ETc;
        const Mat3T<S> RtFs = st.R.transpose() * Fs;
        const S gamma_d = 0.5 * (E1.dot(RtFs * E2) - E2.dot(RtFs * E1));
        const Mat3T<S> Ndr =
            (0.5 * kd) * gamma_d *
            (Vec3T<S>(st.R * E1) * E2.transpose() - Vec3T<S>(st.R * E2) * E1.transpose());
        const Vec3T<S> qd = -0.5 * (Vec3T<S>(Fs * E2).cross(Vec3T<S>(st.R * E1)) -
                                    Vec3T<S>(Fs * E1).cross(Vec3T<S>(st.R * E2)));

        const Mat3T<S> Ntot = r.N + Ndr;

        for (int a = 0; a < 6; ++a)
            f.template segment<3>(3 * a) +=
                wq * (Ntot * Vec3T<S>(se.dN[a][0] * E1 + se.dN[a][1] * E2));

        Eigen::Map<Mat3T<S>> fF(f.data() + 27);
        fF += wq * Ntot;

        // Rotation rows: spin of the spatial resultant against the membrane,
        // the two curvature couplings, and the drilling restoring couple.
        Vec3T<S> common = -(st.Gamma.transpose() * axial_contraction(Mat3T<S>(r.N * Fs.transpose())));
        common += gamma_d * kd * (st.Gamma.transpose() * qd);
        std::array<Vec3T<S>, 2> Dxm;
        for (int al = 0; al < 2; ++al) {
            Dxm[al] = Dc.cross(Vec3T<S>(r.Mc * (al == 0 ? E1 : E2)));
            for (int i = 0; i < 3; ++i) {
                const Mat3T<S> dG = rotation_gamma_dir<S>(theta, Vec3::Unit(i).template cast<S>());
                common[i] += gt.col(al).dot(dG * Dxm[al]);
            }
        }
        for (int e = 0; e < 3; ++e)
            f.template segment<3>(18 + 3 * e) +=
                wq * Vec3T<S>(se.phi[e] * common + se.dphi[e][0] * (st.Gamma * Dxm[0]) +
                              se.dphi[e][1] * (st.Gamma * Dxm[1]));
    }
    return f;
}

// Residual and consistent tangent via forward autodiff over the residual.
void element_residual_tangent(const ShellElement &el, const EVec36 &u, const ShellSection &sec,
                              const BaseMaterial &mat, EVec36 &f, EMat36 &K);

// Back-rotated state and resultants at the quadrature points, for energy
// accumulation and wall-level indicators.
struct QuadPointData {
    Mat3 Ht;
    Vec3 Gc;
    Mat3 Kc;
    Mat3 Ntc;
    Vec3 Vc;
    Mat3 Mc;
    Real gamma_d = 0;
    Real k_d = 0;
    Real weight = 0; // quadrature area
};

std::array<QuadPointData, 3> element_qp_data(const ShellElement &el, const EVec36 &u,
                                             const ShellSection &sec, const BaseMaterial &mat);

} // namespace foamrve

#endif
