////////////////////////////////////////////////////////////////////////////////
// analytic.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Closed-form anisotropy models for low-density closed-cell foams: the
//  rectangular-parallelepiped and Kelvin cell models built from the three
//  elementary ratios (load-bearing area fraction, wall buckling strength,
//  wall inclination), the normalized buckling-coefficient fit, and the
//  Gibson-Ashby / Sullivan reference models.
*/
////////////////////////////////////////////////////////////////////////////////
#ifndef FOAMRVE_ANALYTIC_HPP
#define FOAMRVE_ANALYTIC_HPP

#include <foamrve/core.hpp>
#include <cmath>
#include <vector>

namespace foamrve {

// Normalized buckling coefficient K_c(R_w) = 1 - k + k * R_w^p.
struct BucklingFit {
    Real k = 0.6525;
    Real p = -1.3033;
    // Proportionality constant for absolute strengths; the classical
    // thin-plate factor is supplied by wall_buckling_strength, this carries
    // the reference clamped-plate coefficient at R_w = 1.
    Real k_ref = 10.35;

    Real Kc(Real Rw) const { return 1.0 - k + k * std::pow(Rw, p); }
    Real kc(Real Rw) const { return k_ref * Kc(Rw); }

    // Fit of the paper's rectangular-cell FE data.
    static BucklingFit rect_fit() { return BucklingFit{0.6525, -1.3033, 10.35}; }
    // Fit of the paper's Kelvin-cell FE data.
    static BucklingFit kelvin_fit() { return BucklingFit{0.6443, -1.9771, 10.35}; }
    // Classical clamped-plate coefficients: anchored at k_c = 10.35 (square),
    // 7.95 (R_w = 2) and 6.98 (long plate).
    static BucklingFit clamped_reference();
};

struct WallStrength {
    Real E_w = 0;       // wall membrane modulus [MPa]
    Real sigma_c = 0;   // wall buckling strength [MPa]
    Real sigma_yw = 0;  // wall compressive strength [MPa]
    Real k_c = 0;       // buckling coefficient
    Real K_w = 0;       // wall membrane stiffness [N/mm]
};

struct KelvinGeometry {
    Real theta_w = 0; // wall inclination [rad]
    Real theta_a = 0;
    Real theta_b = 0;
    Real L_w = 0; // equivalent rectangle length [mm]
    Real B_w = 0; // equivalent rectangle width  [mm]
    Real kappa_w = std::sqrt(3.0) / 2.0;
    Real R_w = 0;
};

struct AnisotropyBreakdown {
    Real R_f = 1;     // load-bearing area fraction ratio
    Real R_c = 1;     // wall buckling strength ratio
    Real R_theta = 1; // inclination ratio
    Real RE = 1;      // modulus ratio
    Real Rsigma = 1;  // strength ratio
};

struct ReferenceModelInputs {
    Real phi = 0.0; // Gibson-Ashby cell edge fraction
    Real Q = std::sqrt(2.0);
    Real Qt = 2.0 + std::sqrt(2.0) * std::sqrt(2.0); // 2 + sqrt(2)*Q
    Real C1 = std::sqrt(3.0) - M_PI / 2.0;
    Real C2 = (20.0 * std::sqrt(3.0) - 11.0 * M_PI) / (2.0 * std::sqrt(3.0) - M_PI);
    Real C3 = (60.0 - 11.0 * std::sqrt(3.0) * M_PI) / (24.0 * (std::sqrt(3.0) - M_PI / 2.0));
};

template <typename S>
S normalized_kc(const S &Rw, Real k, Real p) {
    using std::pow;
    return S(1) - S(k) + S(k) * pow(Rw, S(p));
}

// Rectangular-parallelepiped cell model (loading along e3 of a cell with
// transverse dimensions equal): R^E from the area fraction ratio alone,
// R^sigma picks up the wall buckling strength ratio.
inline AnisotropyBreakdown rect_anisotropy(Real R, const BucklingFit &fit = BucklingFit::rect_fit()) {
    AnisotropyBreakdown out;
    out.R_theta = 1.0;
    out.R_f = 2.0 * R / (1.0 + R);
    out.R_c = (fit.Kc(R) / fit.Kc(1.0 / R)) * R * R;
    out.RE = out.R_f;
    out.Rsigma = std::sqrt(out.R_c) * out.R_f;
    return out;
}

// Kelvin cell model: inclination, area fraction and buckling strength ratios.
inline AnisotropyBreakdown kelvin_anisotropy(Real R, const BucklingFit &fit = BucklingFit::kelvin_fit()) {
    AnisotropyBreakdown out;
    const Real R2 = R * R;
    out.R_theta = std::sqrt(2.0) * R / std::sqrt(1.0 + R2);
    out.R_f = out.R_theta;
    const Real rw3 = std::sqrt(1.0 + 2.0 * R2) / std::sqrt(3.0);
    const Real rw1 = (2.0 / std::sqrt(3.0)) * std::sqrt(1.0 + 2.0 * R2) / (1.0 + R2);
    out.R_c = (fit.Kc(rw3) / fit.Kc(rw1)) * (1.0 + R2) / 2.0;
    out.RE = out.R_theta * out.R_theta * out.R_theta * out.R_f;
    out.Rsigma = out.R_theta * std::sqrt(out.R_c) * out.R_f;
    return out;
}

// Equivalent-rectangle geometry of an inclined Kelvin hexagonal wall.
// L is the cell dimension along the loading axis, L_a and L_b the two
// transverse cell dimensions.
inline KelvinGeometry kelvin_wall_geometry(Real L, Real La, Real Lb) {
    KelvinGeometry g;
    g.theta_a = std::atan2(La, L);
    g.theta_b = std::atan2(Lb, L);
    const Real inv_tan2 = 1.0 / std::pow(std::tan(g.theta_a), 2) + 1.0 / std::pow(std::tan(g.theta_b), 2);
    g.theta_w = std::atan(1.0 / std::sqrt(inv_tan2));
    g.L_w = 0.5 * L / std::cos(g.theta_w);
    g.B_w = 0.5 * g.kappa_w * std::sqrt(La * La + Lb * Lb);
    g.R_w = g.L_w / g.B_w;
    return g;
}

// Classical plate buckling strength with the effective-width yield estimate.
inline WallStrength wall_buckling_strength(Real t, Real B_w, Real R_w, Real L_w,
                                           Real E, Real nu, Real sigma_y,
                                           const BucklingFit &fit) {
    WallStrength w;
    w.E_w = E;
    w.k_c = fit.kc(R_w);
    w.sigma_c = w.k_c * (M_PI * M_PI * E / (12.0 * (1.0 - nu * nu))) * (t / B_w) * (t / B_w);
    w.sigma_yw = std::sqrt(w.sigma_c * sigma_y);
    w.K_w = (L_w > 0) ? E * t * B_w / L_w : 0.0;
    return w;
}

// Least-squares fit of K_c(R_w) = 1 - k + k R_w^p to (R_w, K_c) samples.
BucklingFit fit_kc(const std::vector<std::pair<Real, Real>> &points);

// Gibson-Ashby anisotropy (Eq. D.1); phi is the cell edge fraction.
inline std::pair<Real, Real> gibson_ashby(Real R, Real phi) {
    const Real RE = phi * 2.0 * R * R / (1.0 + std::pow(R, -3.0)) +
                    (1.0 - phi) * 2.0 * R / (1.0 + 1.0 / R);
    const Real Rs = 2.0 * R / (1.0 + 1.0 / R);
    return {RE, Rs};
}

// Sullivan elongated-tetrakaidecahedron reference model (Eqs. D.2-D.5).
std::pair<Real, Real> sullivan(Real R, Real gamma,
                               const ReferenceModelInputs &in = ReferenceModelInputs{});

} // namespace foamrve

#endif
