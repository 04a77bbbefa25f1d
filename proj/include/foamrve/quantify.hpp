////////////////////////////////////////////////////////////////////////////////
// quantify.hpp
//
// Per-wall deformation-mechanism quantification on a converged run history:
// membrane/bending energy partition I_w = (W_b - W_m)/(W_b + W_m), buckling
// events as strict local maxima of the partition rate above the positive-rate
// mean, membrane plasticity fractions J_w, and yield events at J_w > 0.01.
// Transverse-shear and drilling work are tracked separately and never enter
// I_w. All quantities derive from the per-step cumulative work integrals the
// solver records, so the perturbation-force work is excluded by construction.
////////////////////////////////////////////////////////////////////////////////

#pragma once

#include <foamrve/fe_solve.hpp>

#include <string>
#include <vector>

namespace foamrve {

// Per-step energy partition of one wall. I and Idot are NaN where undefined:
// I below the 1e-14 N*mm energy floor, Idot at the first step of a history
// and wherever the neighbouring I is itself undefined.
struct WallEnergyRecord {
    int wall = -1;
    std::vector<Real> Wm, Wb, Ws, Wd;  // cumulative work [N*mm]
    std::vector<Real> I;               // partition indicator in [-1, 1]
    std::vector<Real> Idot;            // backward difference per unit applied strain
    Real energy_share = 0;             // wall total / RVE total at the last step
};

struct BucklingEvents {
    Real threshold = 0;      // mean of the positive Idot values
    std::vector<int> B;      // 1 at event steps (strict local maxima above threshold)
    int first_step = -1;     // -1: never buckles
};

struct WallEventRecord {
    int wall = -1;
    Real threshold = 0;
    std::vector<int> B;
    int first_buckle_step = -1;
    std::vector<Real> Jw;     // yielded area fraction, in [0, 1]
    std::vector<int> Y;       // latched: 1 from the first J_w > 0.01 step on
    int first_yield_step = -1;
    bool exempt = false;      // energy share < 1e-6: excluded from buckling detection
};

struct QuantifyResult {
    std::vector<WallEnergyRecord> energy;  // one per wall
    std::vector<WallEventRecord> events;   // one per wall
    std::vector<Real> applied_strain;      // one per recorded step
    Real W_total = 0;                      // RVE internal work at the last step
};

// Empirical distribution of the defined I_w values at one recorded step.
struct IwCdf {
    int step = -1;
    Real applied_strain = 0;
    std::vector<Real> values;  // ascending; walls below the energy floor omitted
    int n_walls = 0;
};

struct PopulationStats {
    std::vector<Real> applied_strain;
    std::vector<Real> buckled_fraction;  // N_c / N_w per step
    std::vector<Real> yielded_fraction;  // N_y / N_w per step
    int n_walls = 0;
};

WallEnergyRecord energy_partition(const SolutionState &sol, int wall);

// Events need a left and a right neighbour, so histories shorter than three
// steps cannot produce any.
BucklingEvents detect_buckling(const WallEnergyRecord &rec);

std::vector<Real> plasticity_history(const SolutionState &sol, int wall);

// First index with J > threshold, -1 if never reached.
int detect_yield(const std::vector<Real> &Jw, Real threshold = 0.01);

QuantifyResult quantify_walls(const SolutionState &sol);

IwCdf iw_cdf(const QuantifyResult &q, Real applied_strain);

// Fraction of the defined values strictly below x.
Real fraction_below(const IwCdf &c, Real x);

PopulationStats population_stats(const QuantifyResult &q);

// CSV emitters (deterministic %.17g formatting; NaN fields left empty).
// Wall records: wall,step,stretch,W_m,W_b,I_w,Idot_w,B_w,J_w,Y_w.
// Events: wall,first_buckle_step,first_buckle_strain,first_yield_step,
// first_yield_strain.
void write_wall_records_csv(const std::string &path, const QuantifyResult &q,
                            const SolutionState &sol);
void write_wall_events_csv(const std::string &path, const QuantifyResult &q,
                           const SolutionState &sol);

}  // namespace foamrve
