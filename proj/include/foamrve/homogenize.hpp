////////////////////////////////////////////////////////////////////////////////
// homogenize.hpp
//
// Mixed stress/strain macroscale control and boundary-condition families for
// the RVE problem. Every component of the macroscopic deformation gradient is
// either prescribed directly or left free with the conjugate first
// Piola-Kirchhoff component prescribed instead; the admissible fluctuation
// space is selected by one of three families (periodic pairing, fully
// prescribed boundary, minimal kinematic constraint).
////////////////////////////////////////////////////////////////////////////////

#pragma once

#include <foamrve/core.hpp>
#include <foamrve/fe_mesh.hpp>

#include <Eigen/SparseCore>

#include <array>
#include <vector>

namespace foamrve {

struct MacroState {
    Mat3 F_val = Mat3::Identity();  // prescribed entries read where F_mask is set
    Mat3 P_val = Mat3::Zero();      // prescribed entries read on the complement
    std::array<std::array<bool, 3>, 3> F_mask{};  // true -> F(i,j) prescribed
    int axis = -1;         // compression axis of the generating program
    int normal_axis = -1;  // out-of-plane axis held at identity (plate specimens)
    Real V = 0;            // reference box volume, filled in by the solver

    bool f_prescribed(int i, int j) const { return F_mask[std::size_t(i)][std::size_t(j)]; }
};

void validate(const MacroState &macro);

// Uniaxial compression along a coordinate axis: the axial stretch and the
// upper-triangle row of F are prescribed, the remaining five components are
// driven through zero conjugate stress. Plate specimens additionally hold the
// out-of-plane row and column at identity (pin_normal_axis), since a single
// flat wall has no second-order stiffness against those components.
MacroState make_uniaxial_compression(int axis, Real stretch, int pin_normal_axis = -1);

// Update the prescribed stretch along the program axis.
void set_stretch(MacroState &macro, Real stretch);

enum class BcKind { periodic, fully_prescribed, minimal_kinematic };

struct BoundaryCondition {
    BcKind kind = BcKind::periodic;
    bool pair_rotations = true;    // periodic: also identify rotations across faces
    bool clamp_rotations = false;  // fully_prescribed: also fix boundary rotations
};

struct LoadProgram {
    int axis = 2;                 // compression axis
    std::vector<Real> stretches;  // strictly decreasing, first may be 1
    int pin_normal_axis = -1;
};

void validate(const LoadProgram &program);

// Evenly spaced stretch schedule down to 1 - strain_max.
LoadProgram make_compression_program(int axis, Real strain_max, int n_steps,
                                     int pin_normal_axis = -1);

// Macro template plus program for a scheduled compression run.
std::pair<MacroState, LoadProgram> make_uniaxial_compression(int axis,
                                                             const std::vector<Real> &stretches,
                                                             int pin_normal_axis = -1);

// Degree-of-freedom map over one mesh: displacement fluctuations at
// 3*node + k, rotations at 3*n_nodes + 3*slot + k, and the nine macroscale
// deformation-gradient entries at the tail in column-major order. Rotation
// slots coincide with mesh edges unless periodic rotation pairing is turned
// off, in which case seam edges get one slot per unwrapped image. Fixed dofs
// are eliminated; the minimal kinematic family adds nine Lagrange rows.
struct DofMap {
    int n_nodes = 0;
    int n_edges = 0;
    int n_thslots = 0;       // == n_edges when rotations are paired
    int n_full = 0;          // 3*n_nodes + 3*n_thslots + 9
    int n_free = 0;
    std::vector<int> elem_th;      // rotation slot per element and local edge (3 each)
    std::vector<int> red;          // full -> reduced index, -1 when fixed
    std::vector<char> fixed;       // per full dof
    VecX fixed_value;              // full-sized, nonzero only on prescribed F entries
    std::vector<Eigen::Triplet<Real>> C;  // constraint rows (full-dof column indices)
    int n_con = 0;
    std::vector<Real> con_scale;  // per-row coefficient norm; 0 marks a vacuous row
                                  // (e.g. the out-of-plane column on a flat plate)
                                  // whose multiplier is pinned to zero
    int pin_node = -1;  // -1 for fully prescribed, where the boundary subsumes the pin

    // Periodic pairing bookkeeping (reporting only): dofs whose node/edge has
    // several unwrapped images, and the count removed by welding them.
    int n_boundary_w_dofs = 0;
    int n_paired_w_dofs = 0;
    int n_boundary_th_dofs = 0;
    int n_paired_th_dofs = 0;

    int wdof(int node, int k) const { return 3 * node + k; }
    int thdof(int slot, int k) const { return 3 * n_nodes + 3 * slot + k; }
    int fdof(int i, int j) const { return 3 * n_nodes + 3 * n_thslots + i + 3 * j; }
    int thslot(int element, int local_edge) const {
        return elem_th[std::size_t(3 * element + local_edge)];
    }
};

// Build the dof map for one boundary-condition family. The macro state fixes
// which tail entries are eliminated; call set_fixed_values after changing the
// prescribed stretch along a load path.
DofMap apply_bc(const ShellMesh &mesh, const BoundaryCondition &bc, const MacroState &macro);

void set_fixed_values(DofMap &dm, const MacroState &macro);

// Thickness-weighted boundary first-moment rows of the fluctuation (nine
// triplet rows over displacement dofs): line integrals over the free contour
// when one exists, otherwise area integrals over walls lying in the box
// faces. Empty on a fully periodic mesh, where paired contributions cancel.
std::vector<Eigen::Triplet<Real>> boundary_moment_rows(const ShellMesh &mesh);

} // namespace foamrve
