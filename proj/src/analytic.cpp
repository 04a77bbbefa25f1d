#include <foamrve/analytic.hpp>

#include <algorithm>
#include <set>

namespace foamrve {

BucklingFit BucklingFit::clamped_reference() {
    // K_c(inf) = 6.98/10.35 fixes k; K_c(2) = 7.95/10.35 fixes p.
    BucklingFit f;
    f.k_ref = 10.35;
    f.k = 1.0 - 6.98 / 10.35;
    f.p = std::log((7.95 / 10.35 - (1.0 - f.k)) / f.k) / std::log(2.0);
    return f;
}

BucklingFit fit_kc(const std::vector<std::pair<Real, Real>> &points) {
    std::set<Real> distinct;
    for (const auto &pt : points) distinct.insert(pt.first);
    if (points.size() < 3 || distinct.size() < 3)
        throw ConfigError("fit_kc: need at least 3 points with distinct R_w");
    for (const auto &pt : points)
        if (pt.first <= 0)
            throw ConfigError("fit_kc: R_w must be positive");

    // Gauss-Newton with Levenberg damping on (k, p).
    Real k = 0.65, p = -1.5;
    Real lambda = 1e-3;
    auto sq_err = [&](Real kk, Real pp) {
        Real s = 0;
        for (const auto &pt : points) {
            Real r = 1.0 - kk + kk * std::pow(pt.first, pp) - pt.second;
            s += r * r;
        }
        return s;
    };
    Real err = sq_err(k, p);
    for (int it = 0; it < 200; ++it) {
        Eigen::Matrix2d JtJ = Eigen::Matrix2d::Zero();
        Eigen::Vector2d Jtr = Eigen::Vector2d::Zero();
        for (const auto &pt : points) {
            const Real Rp = std::pow(pt.first, p);
            const Real r = 1.0 - k + k * Rp - pt.second;
            Eigen::Vector2d J(Rp - 1.0, k * Rp * std::log(pt.first));
            JtJ += J * J.transpose();
            Jtr += J * r;
        }
        Eigen::Matrix2d A = JtJ + lambda * Eigen::Matrix2d(JtJ.diagonal().asDiagonal());
        if (std::abs(A.determinant()) < 1e-300)
            throw ConfigError("fit_kc: rank-deficient data");
        Eigen::Vector2d d = A.ldlt().solve(-Jtr);
        Real kn = k + d(0), pn = p + d(1);
        Real en = sq_err(kn, pn);
        if (en < err) {
            k = kn;
            p = pn;
            if (err - en < 1e-16 * (1.0 + err)) { err = en; break; }
            err = en;
            lambda = std::max(lambda * 0.3, 1e-12);
        } else {
            lambda *= 10.0;
            if (lambda > 1e12)
                throw ConfigError("fit_kc: failed to converge (rank-deficient data?)");
        }
    }
    BucklingFit out;
    out.k = k;
    out.p = p;
    return out;
}

std::pair<Real, Real> sullivan(Real R, Real gamma, const ReferenceModelInputs &in) {
    const Real Q = in.Q, Qt = in.Qt;
    const Real C1 = in.C1, C2 = in.C2, C3 = in.C3;
    const Real R1 = 16.0 + Qt * Qt * R * R;
    const Real R2 = 4.0 * Q + 2.0 * std::sqrt(16.0 + Qt * Qt * R * R);

    const Real A1 = C1 * (2.0 * Qt * Qt * R * R + 64.0 * std::pow(Q, 3) / std::sqrt(R1));
    const Real A2 = gamma * C2 * 8.0 * std::pow(Qt, 3) * (32.0 + 4.0 * Q * std::sqrt(R1)) * R / (R1 * R2);
    const Real A3 = 16.0 * C1 + gamma * C2 * 8.0 * std::pow(Qt, 5) * std::pow(R, 3) / (R1 * R2);
    const Real RE = (R * R / 4.0) * A1 * A2 / A3;

    const Real B1 = std::sqrt(C1) * Qt * R;
    const Real B2 = std::sqrt(gamma) * C3 * 16.0 * std::sqrt(2.0) * std::pow(Qt, 1.5) * std::sqrt(R) /
                    (std::sqrt(R1) * std::sqrt(R2));
    const Real B3 = 4.0 * std::sqrt(C1) + std::sqrt(gamma) * C3 * 4.0 * std::sqrt(2.0) *
                                              std::pow(Qt, 2.5) * std::pow(R, 1.5) /
                                              (std::sqrt(R1) * std::sqrt(R2));
    const Real Rs = R * B1 * B2 / B3;
    return {RE, Rs};
}

} // namespace foamrve
