////////////////////////////////////////////////////////////////////////////////
// test_fe_solve.cpp
////////////////////////////////////////////////////////////////////////////////

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <foamrve/fe_solve.hpp>
#include <foamrve/mesostructure.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace foamrve;

namespace {

const char *kTwoCellFixture = R"({
  "format": "foamrve-cc/1",
  "units": "mm",
  "box": [2, 1, 1],
  "periodic": [false, false, false],
  "vertices": [
    [0,0,0],[1,0,0],[1,1,0],[0,1,0],[0,0,1],[1,0,1],[1,1,1],[0,1,1],
    [2,0,0],[2,1,0],[2,0,1],[2,1,1]
  ],
  "walls": [
    {"loop": [0,3,7,4], "t": 0.01, "cells": [0]},
    {"loop": [0,1,5,4], "t": 0.01, "cells": [0]},
    {"loop": [3,2,6,7], "t": 0.01, "cells": [0]},
    {"loop": [0,1,2,3], "t": 0.01, "cells": [0]},
    {"loop": [4,5,6,7], "t": 0.01, "cells": [0]},
    {"loop": [1,2,6,5], "t": 0.01, "cells": [0,1]},
    {"loop": [8,9,11,10], "t": 0.01, "cells": [1]},
    {"loop": [1,8,10,5], "t": 0.01, "cells": [1]},
    {"loop": [2,9,11,6], "t": 0.01, "cells": [1]},
    {"loop": [1,8,9,2], "t": 0.01, "cells": [1]},
    {"loop": [5,10,11,6], "t": 0.01, "cells": [1]}
  ],
  "cells": [[0,1,2,3,4,5],[5,6,7,8,9,10]]
})";

SolverSettings quiet_settings() {
    SolverSettings st;
    st.perturbation_scale = 0;
    return st;
}

bool bits_equal(const VecX &a, const VecX &b) {
    if (a.size() != b.size()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

bool bits_equal(const Mat3 &a, const Mat3 &b) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a(i, j) != b(i, j)) return false;
    return true;
}

// Largest prescribed-zero stress component relative to the axial one.
Real uniaxiality_error(const MacroState &macro, const Mat3 &P) {
    Real off = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!macro.f_prescribed(i, j)) off = std::max(off, std::abs(P(i, j)));
    return off / std::abs(P(macro.axis, macro.axis));
}

}  // namespace

TEST_CASE("unloaded reference state is exactly stress free") {
    const CellComplex c = build_rect_cell_rve(1.0, 1.0, 0.01);
    const ShellMesh mesh = mesh_complex(c, 0.5);
    const BaseMaterial mat;
    const auto [macro, program] = make_uniaxial_compression(2, std::vector<Real>{1.0});
    (void)macro;

    const SolutionState sol = solve(mesh, BoundaryCondition{BcKind::periodic, true, false},
                                    program, quiet_settings(), mat);
    CHECK(sol.completed);
    REQUIRE(sol.steps.size() == 1);
    const StepRecord &r = sol.steps.front();
    CHECK(r.stretch == 1.0);
    CHECK(r.applied_strain == 0.0);
    CHECK(r.converged);
    CHECK(bits_equal(r.F, Mat3(Mat3::Identity())));
    // Frame normalization leaves machine-epsilon membrane strain at rest, so
    // the reference stress is zero only to roundoff in E * t.
    CHECK(r.P_area.norm() <= 1e-12);
    CHECK(r.P_boundary.norm() <= 1e-12);
    CHECK(r.downscaling == 0.0);
    CHECK(r.W_ext == 0.0);
    CHECK(r.W_int == 0.0);
    CHECK(r.W_pert == 0.0);
    for (const WallStepData &w : r.walls) {
        CHECK(w.Wm == 0.0);
        CHECK(w.Wb == 0.0);
        CHECK(w.Jw == 0.0);
    }
}

TEST_CASE("rect RVE small-strain compression matches the load-bearing area") {
    const CellComplex c = build_rect_cell_rve(1.0, 1.0, 0.01);
    const ShellMesh mesh = mesh_complex(c, 0.25);
    const BaseMaterial mat;
    const auto [macro0, program] =
        make_uniaxial_compression(2, std::vector<Real>{1.0 - 5e-5, 1.0 - 1e-4});

    const SolutionState sol = solve(mesh, BoundaryCondition{BcKind::periodic, true, false},
                                    program, quiet_settings(), mat);
    CHECK(sol.completed);
    REQUIRE(sol.steps.size() == 3);
    const StepRecord &r = sol.steps.back();

    // Axial modulus against the wall cross-section estimate 2 t E / L.
    const Real eps = r.F(2, 2) - 1.0;
    CHECK(eps == doctest::Approx(-1e-4).epsilon(1e-12));
    const Real Ehat = r.P_area(2, 2) / eps;
    CHECK(Ehat == doctest::Approx(54.0).epsilon(0.10));
    CHECK(r.P_area(2, 2) < 0.0);

    // The five stress-driven components stay at zero.
    MacroState macro = macro0;
    for (std::size_t s = 1; s < sol.steps.size(); ++s)
        CHECK(uniaxiality_error(macro, sol.steps[s].P_area) <= 1e-8);

    // Dual stress forms agree; the periodic mesh has no downscaling surface.
    for (const StepRecord &rec : sol.steps) {
        if (rec.applied_strain > 0) CHECK(rec.hm_gap_rel <= 1e-8);
        CHECK(rec.downscaling == 0.0);
    }

    // Transverse symmetry of the cubic cell.
    CHECK(r.F(0, 0) == doctest::Approx(r.F(1, 1)).epsilon(1e-9));
    CHECK(r.F(0, 0) > 1.0);

    // Energy bookkeeping: external work through the macroscale pair equals
    // the internal partition; flat walls under membrane load do not bend.
    CHECK(std::abs(r.W_int - r.W_ext) <= 1e-6 * std::abs(r.W_int));
    Real Wm = 0, Wrest = 0;
    for (const WallStepData &w : r.walls) {
        Wm += w.Wm;
        Wrest += std::abs(w.Wb) + std::abs(w.Ws) + std::abs(w.Wd);
        CHECK(w.Jw == 0.0);
    }
    CHECK(Wm > 0.0);
    CHECK(Wrest <= 1e-10 * Wm);

    SUBCASE("bitwise deterministic rerun") {
        const SolutionState again = solve(mesh, BoundaryCondition{BcKind::periodic, true, false},
                                          program, quiet_settings(), mat);
        REQUIRE(again.steps.size() == sol.steps.size());
        for (std::size_t s = 0; s < sol.steps.size(); ++s) {
            CHECK(bits_equal(again.steps[s].u, sol.steps[s].u));
            CHECK(bits_equal(again.steps[s].P_area, sol.steps[s].P_area));
        }
    }
}

TEST_CASE("assembled tangent matches finite differences of the residual") {
    const CellComplex c = build_rect_cell_rve(1.0, 1.0, 0.01);
    const ShellMesh mesh = mesh_complex(c, 0.5);
    const BaseMaterial mat;
    const SolverSettings st = quiet_settings();
    const MacroState macro = make_uniaxial_compression(2, 0.999);
    DofMap dm = apply_bc(mesh, BoundaryCondition{BcKind::periodic, true, false}, macro);

    VecX u = VecX::Zero(dm.n_full);
    for (int k = 0; k < 3; ++k) u[dm.fdof(k, k)] = 1.0;
    for (int d = 0; d < dm.n_full; ++d) {
        if (dm.fixed[std::size_t(d)])
            u[d] = dm.fixed_value[d];
        else
            u[d] += 1e-3 * std::sin(3.7 * d + 0.4);
    }
    const VecX mu = VecX::Zero(dm.n_con);
    const VecX f_ext = VecX::Zero(dm.n_full);
    const Assembled A = assemble(mesh, dm, u, mu, f_ext, mat, st);

    // Central differences against a spread of free dofs (displacement,
    // rotation and macroscale entries).
    const Real delta = 1e-7;
    std::vector<int> probes;
    for (int d = 0; d < dm.n_full && int(probes.size()) < 3; d += 17)
        if (!dm.fixed[std::size_t(d)]) probes.push_back(d);
    for (int d = 3 * dm.n_nodes; d < dm.n_full && int(probes.size()) < 6; d += 13)
        if (!dm.fixed[std::size_t(d)]) probes.push_back(d);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!dm.fixed[std::size_t(dm.fdof(i, j))]) probes.push_back(dm.fdof(i, j));

    for (int d : probes) {
        VecX up = u, dn = u;
        up[d] += delta;
        dn[d] -= delta;
        const Assembled Ap = assemble(mesh, dm, up, mu, f_ext, mat, st);
        const Assembled An = assemble(mesh, dm, dn, mu, f_ext, mat, st);
        VecX fd = (Ap.residual_full - An.residual_full) / (2 * delta);
        VecX col = VecX::Zero(dm.n_free);
        for (Eigen::SparseMatrix<Real>::InnerIterator it(A.K, dm.red[std::size_t(d)]); it; ++it)
            if (it.row() < dm.n_free) col[it.row()] = it.value();
        Real worst = 0;
        for (int e = 0; e < dm.n_full; ++e)
            if (dm.red[std::size_t(e)] >= 0)
                worst = std::max(worst, std::abs(col[dm.red[std::size_t(e)]] - fd[e]));
        CHECK(worst <= 1e-5 * std::max(Real(1), col.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("boundary family ordering and multiplier bookkeeping") {
    const CellComplex c = parse_cell_complex(kTwoCellFixture, "fixture");
    const ShellMesh mesh = mesh_complex(c, 0.4);
    const BaseMaterial mat;
    const auto [macro, program] = make_uniaxial_compression(2, std::vector<Real>{1.0 - 1e-4});
    (void)macro;
    const SolverSettings st = quiet_settings();

    const SolutionState full =
        solve(mesh, BoundaryCondition{BcKind::fully_prescribed, true, false}, program, st, mat);
    const SolutionState mini =
        solve(mesh, BoundaryCondition{BcKind::minimal_kinematic, true, false}, program, st, mat);
    REQUIRE(full.completed);
    REQUIRE(mini.completed);
    const StepRecord &rf = full.steps.back();
    const StepRecord &rm = mini.steps.back();

    const Real Ef = rf.P_area(2, 2) / (rf.F(2, 2) - 1.0);
    const Real Em = rm.P_area(2, 2) / (rm.F(2, 2) - 1.0);
    CHECK(Em > 0.0);
    CHECK(Ef >= Em * (1.0 - 1e-9));

    // Multiplier tractions enter the boundary stress form.
    CHECK(rm.hm_gap_rel <= 1e-8);
    CHECK(rf.hm_gap_rel <= 1e-8);
    // Constraint rows hold the first boundary moment at zero; the fully
    // prescribed boundary annihilates it identically.
    CHECK(rm.downscaling <= 1e-9);
    CHECK(rf.downscaling == 0.0);

    SUBCASE("minimal kinematic degenerates to periodic on a torus") {
        const CellComplex cr = build_rect_cell_rve(1.0, 1.0, 0.01);
        const ShellMesh torus = mesh_complex(cr, 0.5);
        const SolutionState a =
            solve(torus, BoundaryCondition{BcKind::periodic, true, false}, program, st, mat);
        const SolutionState b =
            solve(torus, BoundaryCondition{BcKind::minimal_kinematic, true, false}, program, st,
                  mat);
        REQUIRE(a.steps.size() == b.steps.size());
        CHECK(bits_equal(a.steps.back().u, b.steps.back().u));
        CHECK(bits_equal(a.steps.back().P_area, b.steps.back().P_area));
    }
}

TEST_CASE("Kelvin RVE elastic run under periodic pairing") {
    const CellComplex c = build_kelvin_cell_rve(1.0, 1.0, 0.01);
    const ShellMesh mesh = mesh_complex(c, 0.2);
    const BaseMaterial mat;
    const auto [macro, program] = make_uniaxial_compression(2, std::vector<Real>{1.0 - 1e-4});

    const SolutionState sol = solve(mesh, BoundaryCondition{BcKind::periodic, true, false},
                                    program, quiet_settings(), mat);
    REQUIRE(sol.completed);
    const StepRecord &r = sol.steps.back();
    CHECK(r.P_area(2, 2) < 0.0);
    CHECK(uniaxiality_error(macro, r.P_area) <= 1e-8);
    CHECK(r.hm_gap_rel <= 1e-8);
    CHECK(r.downscaling == 0.0);
    // One trapezoid panel over a bending-rich path carries a cubic stepping
    // error, so the balance holds to 1e-4 rather than roundoff.
    CHECK(std::abs(r.W_int - r.W_ext) <= 1e-4 * std::abs(r.W_int));
}

TEST_CASE("plate buckles past the critical strain under the engineering clamp") {
    const CellComplex c = build_plate_specimen(PlateSpec{0.4, 0.4, 0.01, 0.0});
    const ShellMesh mesh = mesh_complex(c, 0.05);
    const BaseMaterial mat;
    const LoadProgram program = make_compression_program(0, 8e-3, 8, 2);
    SolverSettings st;  // perturbation on: seeds the buckle
    st.max_halvings = 10;

    const SolutionState sol =
        solve(mesh, BoundaryCondition{BcKind::fully_prescribed, true, true}, program, st, mat);
    REQUIRE(sol.completed);
    REQUIRE(sol.steps.size() >= 9);

    const MacroState macro = make_uniaxial_compression(0, 0.99, 2);
    Real strain_prev = -1.0;
    for (const StepRecord &rec : sol.steps) {
        CHECK(rec.applied_strain > strain_prev);
        strain_prev = rec.applied_strain;
        CHECK(rec.applied_strain == 1.0 - rec.stretch);
        if (rec.applied_strain > 0) {
            CHECK(rec.P_area(0, 0) < 0.0);
            CHECK(rec.hm_gap_rel <= 1e-8);
            CHECK(uniaxiality_error(macro, rec.P_area) <= 1e-7);
        }
    }

    // Out-of-plane deflection at the plate center grows by orders of
    // magnitude once the load passes the buckling point.
    const int center = node_nearest(mesh, Vec3(0.2, 0.2, 0.0));
    const auto w_center = [&](const StepRecord &rec) {
        return std::abs(rec.u[3 * center + 2]);
    };
    CHECK(w_center(sol.steps.back()) >= 10.0 * w_center(sol.steps[1]));
    CHECK(w_center(sol.steps.back()) > 1e-3);

    // The side contours carry in-plane fluctuation, so the downscaling
    // residual is honestly nonzero under this clamp.
    CHECK(sol.steps.back().downscaling > 0.0);

    // Work balance including the perturbation forces.
    const StepRecord &last = sol.steps.back();
    const Real wscale = std::max(std::abs(last.W_int), std::abs(last.W_ext));
    CHECK(std::abs(last.W_int - last.W_ext - last.W_pert) <= 0.05 * wscale);
}

TEST_CASE("plate without the out-of-plane pin has a singular macroscale row") {
    const CellComplex c = build_plate_specimen(PlateSpec{0.4, 0.4, 0.01, 0.0});
    const ShellMesh mesh = mesh_complex(c, 0.2);
    const BaseMaterial mat;
    const auto [macro, program] = make_uniaxial_compression(0, std::vector<Real>{0.999});
    (void)macro;
    SolverSettings st;  // perturbation on, so the singular tangent is reached
    CHECK_THROWS_AS(
        solve(mesh, BoundaryCondition{BcKind::minimal_kinematic, true, false}, program, st, mat),
        SolverError);
}

TEST_CASE("continuation returns a flagged partial history when it stalls") {
    const CellComplex c = build_rect_cell_rve(1.0, 1.0, 0.01);
    const ShellMesh mesh = mesh_complex(c, 0.5);
    const BaseMaterial mat;
    const auto [macro, program] = make_uniaxial_compression(2, std::vector<Real>{0.9});
    (void)macro;
    SolverSettings st = quiet_settings();
    st.max_iter = 1;
    st.max_halvings = 0;

    const SolutionState sol =
        solve(mesh, BoundaryCondition{BcKind::periodic, true, false}, program, st, mat);
    CHECK(!sol.completed);
    REQUIRE(sol.steps.size() == 1);
    CHECK(sol.steps.front().stretch == 1.0);
    CHECK(sol.steps.front().converged);
}

TEST_CASE("checkpoint stream roundtrips bitwise and resumes the run") {
    const CellComplex c = build_rect_cell_rve(1.0, 1.0, 0.01);
    const ShellMesh mesh = mesh_complex(c, 0.4);
    const BaseMaterial mat;
    const BoundaryCondition bc{BcKind::periodic, true, false};
    const std::vector<Real> schedule{1.0 - 5e-5, 1.0 - 1e-4};
    const auto ckpt =
        (std::filesystem::temp_directory_path() / "foamrve_test_ckpt.txt").string();
    const auto logf = (std::filesystem::temp_directory_path() / "foamrve_test_log.txt").string();

    SolverSettings st;  // perturbation on: exercises the perturbation work term
    st.checkpoint_path = ckpt;
    st.log_path = logf;
    const auto [macro, program] = make_uniaxial_compression(2, schedule);
    (void)macro;
    const SolutionState sol = solve(mesh, bc, program, st, mat);
    REQUIRE(sol.completed);
    REQUIRE(sol.steps.size() == 3);
    CHECK(std::filesystem::file_size(logf) > 0);

    const SolutionState loaded = load_checkpoint(ckpt);
    REQUIRE(loaded.steps.size() == sol.steps.size());
    for (std::size_t s = 0; s < sol.steps.size(); ++s) {
        const StepRecord &a = sol.steps[s];
        const StepRecord &b = loaded.steps[s];
        CHECK(a.step == b.step);
        CHECK(a.stretch == b.stretch);
        CHECK(bits_equal(a.F, b.F));
        CHECK(bits_equal(a.P_area, b.P_area));
        CHECK(bits_equal(a.P_boundary, b.P_boundary));
        CHECK(a.hm_gap_rel == b.hm_gap_rel);
        CHECK(a.W_ext == b.W_ext);
        CHECK(a.W_int == b.W_int);
        CHECK(a.W_pert == b.W_pert);
        CHECK(bits_equal(a.u, b.u));
        CHECK(bits_equal(a.mu, b.mu));
        REQUIRE(a.walls.size() == b.walls.size());
        for (std::size_t w = 0; w < a.walls.size(); ++w) {
            CHECK(a.walls[w].Wm == b.walls[w].Wm);
            CHECK(a.walls[w].Jw == b.walls[w].Jw);
        }
    }

    // Resuming from the first target reproduces the full run bitwise.
    SolverSettings st2;
    const auto [m1, p1] = make_uniaxial_compression(2, std::vector<Real>{schedule[0]});
    (void)m1;
    const SolutionState part = solve(mesh, bc, p1, st2, mat);
    REQUIRE(part.steps.size() == 2);
    const SolutionState resumed = solve(mesh, bc, program, st2, mat, &part);
    REQUIRE(resumed.steps.size() == 3);
    CHECK(bits_equal(resumed.steps.back().u, sol.steps.back().u));
    CHECK(bits_equal(resumed.steps.back().P_area, sol.steps.back().P_area));
    CHECK(resumed.steps.back().W_ext == sol.steps.back().W_ext);

    std::filesystem::remove(ckpt);
    std::filesystem::remove(logf);
}
