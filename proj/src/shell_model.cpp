////////////////////////////////////////////////////////////////////////////////
// shell_model.cpp
////////////////////////////////////////////////////////////////////////////////

#include <foamrve/shell_model.hpp>

namespace foamrve {

void validate(const BaseMaterial &mat) {
    if (!(mat.E > 0)) throw ConfigError("base material: E must be positive");
    if (!(mat.nu >= 0 && mat.nu < 0.5))
        throw ConfigError("base material: nu must lie in [0, 0.5)");
    if (!(mat.sigma_y > 0)) throw ConfigError("base material: sigma_y must be positive");
}

void validate(const ShellSection &sec) {
    if (!(sec.t > 0)) throw ConfigError("shell section: thickness must be positive");
    if (!(sec.kappa > 0)) throw ConfigError("shell section: shear correction must be positive");
    if (!(sec.drill_scale >= 0)) throw ConfigError("shell section: drilling scale must be >= 0");
}

Real membrane_von_mises(const Mat3 &Ntc, Real t) {
    if (!(t > 0)) throw ConfigError("membrane stress: thickness must be positive");
    const Mat3 sig = 0.5 / t * (Ntc + Ntc.transpose());
    const Mat3 dev = sig - sig.trace() / 3.0 * Mat3::Identity();
    return std::sqrt(1.5 * ddot(dev, dev));
}

MembraneCheck membrane_plastic_flag(const Mat3 &Ntc, Real t, Real sigma_y) {
    MembraneCheck out;
    out.sigma_eq = membrane_von_mises(Ntc, t);
    out.yielded = out.sigma_eq > sigma_y;
    return out;
}

Real membrane_triaxiality(const Mat3 &Ntc, Real t) {
    const Real eq = membrane_von_mises(Ntc, t);
    if (!(eq > 0))
        throw ConfigError("membrane triaxiality is undefined at zero equivalent stress");
    const Real mean = Ntc.trace() / (3.0 * t);
    return mean / eq;
}

} // namespace foamrve
