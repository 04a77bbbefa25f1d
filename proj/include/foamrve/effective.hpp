////////////////////////////////////////////////////////////////////////////////
// effective.hpp
//
// Effective compressive properties from a macroscale run history: windowed
// least-squares moduli Ehat_ii = dPhat_ii/dFhat_ii and contractions
// nuhat_ij = -dFhat_jj/dFhat_ii over the initial elastic region, strength
// extraction at a yield criterion trigger (first wall, first inclined wall,
// or a population fraction, linearly interpolated on the crossing), and the
// anisotropy ratios R^E and R^sigma with transverse averaging.
////////////////////////////////////////////////////////////////////////////////

#pragma once

#include <foamrve/mesostructure.hpp>
#include <foamrve/quantify.hpp>

#include <array>
#include <string>
#include <vector>

namespace foamrve {

enum class YieldKind { first_wall_yield, first_inclined_wall_yield, population_fraction };

struct YieldCriterion {
    YieldKind kind = YieldKind::first_wall_yield;
    Real critical_fraction = 0.5;  // used by population_fraction; must lie in (0, 1]
};

// "Not reached" is an explicit state, never a sentinel stress value.
struct StrengthResult {
    bool reached = false;
    Real sigma = 0;   // |Phat_ii| at the trigger [MPa]
    Real strain = 0;  // applied strain at the trigger
    int wall = -1;    // triggering wall; -1 for population criteria
};

struct EffectiveProperties {
    int axis = -1;
    Real E = 0;                             // MPa
    std::array<int, 2> nu_axis{{-1, -1}};   // transverse axes, ascending
    std::array<Real, 2> nu{{0, 0}};
    StrengthResult strength;
    Real window_lo = 0, window_hi = 0;      // applied-strain fit window used
    int window_steps = 0;

    Real nu_toward(int axis) const;  // NaN when that transverse axis is absent
};

// R^E = E_33 / E_11*, R^sigma = sigma_33 / sigma_11*; starred quantities
// average the two transverse directions when both runs exist. Ratios are NaN
// where a needed strength was not reached. The analytic companions are left
// NaN for the caller to fill.
struct AnisotropyReport {
    Real RE = 0;
    Real Rsigma = 0;
    Real E33 = 0, E11_star = 0;
    Real sigma33 = 0, sigma11_star = 0;
    Real RE_analytic = 0, Rsigma_analytic = 0;
};

// 0.2 times the earliest wall-buckling strain; the final strain when the run
// never buckles (the whole path is the elastic region).
Real default_window_upper(const SolutionState &sol, const QuantifyResult &q);

// Least-squares slopes over the recorded steps with applied strain inside
// [window_lo, window_hi]. Throws ConfigError with fewer than two such steps.
EffectiveProperties extract_elastic(const SolutionState &sol, int axis, Real window_lo,
                                    Real window_hi);

// 1 for walls neither parallel nor perpendicular to the loading axis.
std::vector<int> inclined_wall_filter(const CellComplex &c, int axis);

StrengthResult extract_strength(const SolutionState &sol, const QuantifyResult &q,
                                const YieldCriterion &crit, int axis,
                                const std::vector<int> *wall_filter = nullptr);

// Relative residual of nu_ab/E_a against nu_ba/E_b.
Real reciprocity_residual(const EffectiveProperties &a, const EffectiveProperties &b);

// e2 may be null (single transverse run); e1 and e3 are required.
AnisotropyReport anisotropy(const EffectiveProperties *e1, const EffectiveProperties *e2,
                            const EffectiveProperties *e3);

// CSV: axis,E,nu_a_axis,nu_a,nu_b_axis,nu_b,sigma_y,sigma_strain,sigma_wall,
// window_lo,window_hi,window_steps (strength fields empty when not reached).
void write_properties_csv(const std::string &path,
                          const std::vector<EffectiveProperties> &props);

}  // namespace foamrve
