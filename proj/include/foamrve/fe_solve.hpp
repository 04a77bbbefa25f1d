////////////////////////////////////////////////////////////////////////////////
// fe_solve.hpp
//
// Newton continuation of the RVE problem along a compression schedule. The
// unknown vector stacks displacement fluctuations, edge rotations and the free
// macroscale deformation-gradient entries; minimal-kinematic runs append
// Lagrange multipliers. The homogenized stress is evaluated twice per step,
// once from the macroscale residual block (volume form) and once from
// boundary reactions plus load moments (boundary form); their difference is
// the reported Hill-Mandel gap.
////////////////////////////////////////////////////////////////////////////////

#pragma once

#include <foamrve/fe_element.hpp>
#include <foamrve/homogenize.hpp>

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace foamrve {

struct SolverSettings {
    Real tol = 1e-9;          // residual block-norm target [N]
    int max_iter = 25;
    int polish_iter = 3;      // extra Newton steps after meeting tol
    int max_halvings = 8;     // stretch-step bisection depth before giving up
    Real perturbation_scale = 1e-6;  // wall-center load = scale * E * t^2; 0 disables
    Real kappa = 5.0 / 6.0;
    Real drill_scale = 1.0;
    // Equilibria with a negative tangent eigenvalue are rejected and re-solved
    // after a kick along the critical mode, so continuation follows stable
    // branches through bifurcations instead of tracking the unstable one.
    bool stability_check = true;
    int max_injections = 4;          // mode-kick retries per step
    Real injection_fraction = 0.5;   // first kick amplitude in wall thicknesses
    std::string log_path;         // per-iteration log; empty disables
    std::string checkpoint_path;  // per-step snapshots; empty disables
};

// Cumulative per-wall work split (membrane, bending, transverse shear,
// drilling) and the current yielded-area fraction.
struct WallStepData {
    Real Wm = 0, Wb = 0, Ws = 0, Wd = 0;
    Real Jw = 0;
};

struct StepRecord {
    int step = 0;
    Real stretch = 1;
    Real applied_strain = 0;  // 1 - stretch
    Mat3 F = Mat3::Identity();
    Mat3 P_area = Mat3::Zero();
    Mat3 P_boundary = Mat3::Zero();
    Real hm_gap_rel = 0;
    Real downscaling = 0;  // norm of the boundary-form deformation-gradient gap
    Real W_ext = 0, W_int = 0, W_pert = 0;  // cumulative
    int newton_iters = 0;
    bool converged = true;
    VecX u;   // full dof vector
    VecX mu;  // Lagrange multipliers (empty unless minimal kinematic)
    std::vector<WallStepData> walls;
};

struct SolutionState {
    std::vector<StepRecord> steps;
    bool completed = false;  // whole schedule reached
};

struct Assembled {
    Eigen::SparseMatrix<Real> K;  // (n_free + n_con) square, unsymmetric
    VecX rhs;
    VecX residual_full;  // internal - external + C^T mu over all dofs
    Real res_w = 0, res_th = 0, res_F = 0, res_con = 0;

    Real max_res() const {
        return std::max(std::max(res_w, res_th), std::max(res_F, res_con));
    }
};

// Residual and consistent tangent of the reduced system at the given state.
// f_ext is a full-sized dead-load vector (perturbation forces and prescribed
// macroscale traction targets).
Assembled assemble(const ShellMesh &mesh, const DofMap &dm, const VecX &u_full,
                   const VecX &mu, const VecX &f_ext, const BaseMaterial &mat,
                   const SolverSettings &st);

// Symmetry-breaking dead loads: one force per wall at the wall-center node
// along the reference wall normal, of magnitude scale * E * t^2. Conjugate to
// the fluctuation only, so the macroscale residual rows stay exact.
VecX perturbation_forces(const ShellMesh &mesh, const DofMap &dm, const BaseMaterial &mat,
                         Real scale);

struct MacroStressPair {
    Mat3 area = Mat3::Zero();
    Mat3 boundary = Mat3::Zero();
    Real gap_rel = 0;
};

MacroStressPair homogenized_stress(const ShellMesh &mesh, const DofMap &dm,
                                   const VecX &u_full, const VecX &mu, const VecX &f_ext,
                                   const BaseMaterial &mat, const SolverSettings &st);

// Boundary integral of the fluctuation first moment (the downscaling defect
// of the deformation gradient), divided by the box volume. Exactly zero for a
// fully periodic mesh, where paired contributions cancel by construction.
Mat3 downscaling_residual(const ShellMesh &mesh, const VecX &u_full);

SolutionState solve(const ShellMesh &mesh, const BoundaryCondition &bc,
                    const LoadProgram &program, const SolverSettings &st,
                    const BaseMaterial &mat, const SolutionState *resume = nullptr);

// Append-per-step checkpoint stream (format tag foamrve-ckpt/1, hexfloat
// payloads, exact round trip).
void save_checkpoint_step(const std::string &path, const StepRecord &rec, bool first);
SolutionState load_checkpoint(const std::string &path);

}  // namespace foamrve
