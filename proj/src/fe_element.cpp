////////////////////////////////////////////////////////////////////////////////
// fe_element.cpp
////////////////////////////////////////////////////////////////////////////////

#include <foamrve/fe_element.hpp>

namespace foamrve {

void element_residual_tangent(const ShellElement &el, const EVec36 &u, const ShellSection &sec,
                              const BaseMaterial &mat, EVec36 &f, EMat36 &K) {
    EVec36T<Dual36> ud;
    for (int i = 0; i < 36; ++i) ud[i] = Dual36(u[i], EVec36::Unit(i));
    const EVec36T<Dual36> fd = element_residual<Dual36>(el, ud, sec, mat);
    for (int i = 0; i < 36; ++i) {
        f[i] = fd[i].value();
        K.row(i) = fd[i].derivatives().transpose();
    }
}

std::array<QuadPointData, 3> element_qp_data(const ShellElement &el, const EVec36 &u,
                                             const ShellSection &sec, const BaseMaterial &mat) {
    const ElementShape sh = element_shape(el);
    const Vec3 E1 = sh.frame.col(0), E2 = sh.frame.col(1);
    const Eigen::Matrix<Real, 2, 3> ET = sh.frame.leftCols<2>().transpose();
    const Eigen::Map<const Mat3> Fhat(u.data() + 27);

    std::array<QuadPointData, 3> out;
    for (int q = 0; q < 3; ++q) {
        const ShapeEval se = shape_eval(sh, kQuadLambda[q]);
        Eigen::Matrix<Real, 3, 2> gx, gt;
        Vec3 theta = Vec3::Zero();
        for (int al = 0; al < 2; ++al) {
            Vec3 c = Fhat * (al == 0 ? E1 : E2);
            for (int a = 0; a < 6; ++a) c += se.dN[a][al] * u.segment<3>(3 * a);
            gx.col(al) = c;
            Vec3 g = Vec3::Zero();
            for (int e = 0; e < 3; ++e) g += se.dphi[e][al] * u.segment<3>(18 + 3 * e);
            gt.col(al) = g;
        }
        for (int e = 0; e < 3; ++e) theta += se.phi[e] * u.segment<3>(18 + 3 * e);

        const ShellStrains st = shell_strains<Real>(gx, theta, gt, sh.frame);
        const ShellResultants r = shell_resultants(st, sec, mat);
        const Mat3 Fs = gx * ET;
        const Mat3 RtFs = st.R.transpose() * Fs;

        QuadPointData &d = out[q];
        d.Ht = st.Ht;
        d.Gc = st.Gc;
        d.Kc = st.Kc;
        d.Ntc = r.Ntc;
        d.Vc = r.Vc;
        d.Mc = r.Mc;
        d.gamma_d = 0.5 * (E1.dot(RtFs * E2) - E2.dot(RtFs * E1));
        d.k_d = drill_stiffness(sec, mat.E, sh.area);
        d.weight = sh.area / 3.0;
    }
    return out;
}

} // namespace foamrve
