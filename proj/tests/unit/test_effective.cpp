////////////////////////////////////////////////////////////////////////////////
// test_effective.cpp
////////////////////////////////////////////////////////////////////////////////

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <foamrve/effective.hpp>
#include <foamrve/fe_solve.hpp>
#include <foamrve/mesostructure.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace foamrve;

namespace {

// Linear-elastic synthetic history along `axis`: P_ii = E * (F_ii - 1) + c,
// F_jj = 1 + nu_j * strain, with per-wall J_w histories attached.
SolutionState linear_history(int axis, const std::vector<Real> &strain, Real E, Real nu_a,
                             Real nu_b, Real offset = 0.0,
                             const std::vector<std::vector<Real>> &Jw = {}) {
    SolutionState s;
    s.completed = true;
    int tr[2], k = 0;
    for (int j = 0; j < 3; ++j)
        if (j != axis) tr[k++] = j;
    for (std::size_t n = 0; n < strain.size(); ++n) {
        StepRecord r;
        r.step = int(n);
        r.applied_strain = strain[n];
        r.stretch = 1.0 - strain[n];
        r.F = Mat3::Identity();
        r.F(axis, axis) = 1.0 - strain[n];
        r.F(tr[0], tr[0]) = 1.0 + nu_a * strain[n];
        r.F(tr[1], tr[1]) = 1.0 + nu_b * strain[n];
        r.P_area = Mat3::Zero();
        r.P_area(axis, axis) = E * (r.F(axis, axis) - 1.0) + offset;
        for (const std::vector<Real> &prof : Jw) {
            WallStepData w;
            w.Wm = 1.0;  // keep every wall above the energy floor
            w.Jw = prof[n];
            r.walls.push_back(w);
        }
        if (Jw.empty()) r.walls.push_back(WallStepData{});
        s.steps.push_back(r);
    }
    return s;
}

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

EffectiveProperties synth_props(int axis, Real E, Real nu_lo, Real nu_hi, bool reached,
                                Real sigma) {
    EffectiveProperties p;
    p.axis = axis;
    p.E = E;
    int k = 0;
    for (int j = 0; j < 3; ++j)
        if (j != axis) p.nu_axis[std::size_t(k++)] = j;
    p.nu = {nu_lo, nu_hi};
    p.strength.reached = reached;
    p.strength.sigma = sigma;
    return p;
}

}  // namespace

TEST_CASE("windowed least-squares slopes recover exact linear data") {
    const std::vector<Real> strain = {0.0, 1e-3, 2e-3, 3e-3};
    SolutionState sol = linear_history(2, strain, 37.5, 0.3, 0.4, 0.123);

    const EffectiveProperties p = extract_elastic(sol, 2, 0.0, 3e-3);
    CHECK(p.axis == 2);
    CHECK(p.window_steps == 4);
    CHECK(p.E == doctest::Approx(37.5).epsilon(1e-12));  // both deltas negative in compression
    CHECK(p.nu_axis[0] == 0);
    CHECK(p.nu_axis[1] == 1);
    CHECK(p.nu[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(p.nu[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(p.nu_toward(0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(p.nu_toward(1) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(!std::isfinite(p.nu_toward(2)));

    SUBCASE("points outside the window do not contaminate the fit") {
        StepRecord junk = sol.steps.back();
        junk.step = 4;
        junk.applied_strain = 5e-3;
        junk.F(2, 2) = 1.0 - 5e-3;
        junk.P_area(2, 2) = -7777.0;
        sol.steps.push_back(junk);
        const EffectiveProperties q = extract_elastic(sol, 2, 0.0, 3e-3);
        CHECK(q.window_steps == 4);
        CHECK(q.E == doctest::Approx(p.E).epsilon(1e-14));
        CHECK(q.nu[0] == doctest::Approx(p.nu[0]).epsilon(1e-14));
    }
    SUBCASE("two points suffice") {
        const EffectiveProperties q = extract_elastic(sol, 2, 0.0, 1.5e-3);
        CHECK(q.window_steps == 2);
        CHECK(q.E == doctest::Approx(37.5).epsilon(1e-12));
    }
    SUBCASE("window errors") {
        CHECK_THROWS_AS(extract_elastic(sol, 2, 0.0, -1e-3), ConfigError);       // empty
        CHECK_THROWS_AS(extract_elastic(sol, 2, 2.5e-3, 2.9e-3), ConfigError);   // no steps
        CHECK_THROWS_AS(extract_elastic(sol, 2, 1.5e-3, 2.5e-3), ConfigError);   // one step
        CHECK_THROWS_AS(extract_elastic(sol, 3, 0.0, 1e-3), ConfigError);        // bad axis
        CHECK_THROWS_AS(extract_elastic(SolutionState{}, 2, 0.0, 1e-3), ConfigError);
    }
}

TEST_CASE("default window follows the first buckling event") {
    QuantifyResult q;
    q.applied_strain = {0.0, 1e-3, 2e-3, 3e-3, 4e-3, 5e-3};
    SolutionState sol;
    for (Real e : q.applied_strain) {
        StepRecord r;
        r.applied_strain = e;
        sol.steps.push_back(r);
    }
    WallEventRecord a, b;
    a.first_buckle_step = 4;
    b.first_buckle_step = -1;
    q.events = {a, b};
    CHECK(default_window_upper(sol, q) == doctest::Approx(0.2 * 4e-3).epsilon(1e-14));

    q.events[1].first_buckle_step = 3;  // earlier event wins
    CHECK(default_window_upper(sol, q) == doctest::Approx(0.2 * 3e-3).epsilon(1e-14));

    q.events[0].first_buckle_step = -1;
    q.events[1].first_buckle_step = -1;  // elastic run: the whole path
    CHECK(default_window_upper(sol, q) == doctest::Approx(5e-3).epsilon(1e-14));
}

TEST_CASE("strength extraction interpolates the threshold crossing") {
    const std::vector<Real> strain = {0.0, 1e-3, 2e-3, 3e-3};
    // P_22 magnitudes are 0, 10, 20, 30 at the steps.
    const std::vector<std::vector<Real>> Jw = {
        {0.0, 0.004, 0.02, 0.02},  // wall 0 crosses between steps 1 and 2
        {0.0, 0.0, 0.0, 0.8},      // wall 1 crosses between steps 2 and 3
    };
    const SolutionState sol = linear_history(2, strain, 10.0 / 1e-3, 0.0, 0.0, 0.0, Jw);
    const QuantifyResult q = quantify_walls(sol);

    SUBCASE("first wall yield") {
        const StrengthResult r =
            extract_strength(sol, q, YieldCriterion{YieldKind::first_wall_yield, 0.5}, 2);
        REQUIRE(r.reached);
        CHECK(r.wall == 0);
        // alpha = (0.01 - 0.004) / (0.02 - 0.004) = 0.375
        CHECK(r.strain == doctest::Approx(1.375e-3).epsilon(1e-12));
        CHECK(r.sigma == doctest::Approx(13.75).epsilon(1e-12));
    }
    SUBCASE("inclined filter restricts the candidate walls") {
        const std::vector<int> filter = {0, 1};
        const StrengthResult r = extract_strength(
            sol, q, YieldCriterion{YieldKind::first_inclined_wall_yield, 0.5}, 2, &filter);
        REQUIRE(r.reached);
        CHECK(r.wall == 1);
        // alpha = 0.01 / 0.8 = 0.0125
        CHECK(r.strain == doctest::Approx(2.0125e-3).epsilon(1e-12));
        CHECK(r.sigma == doctest::Approx(20.125).epsilon(1e-12));

        CHECK_THROWS_AS(extract_strength(sol, q,
                                         YieldCriterion{YieldKind::first_inclined_wall_yield, 0.5},
                                         2),
                        ConfigError);
        const std::vector<int> bad = {1};
        CHECK_THROWS_AS(extract_strength(sol, q,
                                         YieldCriterion{YieldKind::first_inclined_wall_yield, 0.5},
                                         2, &bad),
                        ConfigError);
    }
    SUBCASE("population fraction, including an exact hit") {
        // Yielded fractions by step: 0, 0, 0.5, 1.
        const StrengthResult half =
            extract_strength(sol, q, YieldCriterion{YieldKind::population_fraction, 0.5}, 2);
        REQUIRE(half.reached);
        CHECK(half.wall == -1);
        CHECK(half.strain == doctest::Approx(2e-3).epsilon(1e-9));
        CHECK(half.sigma == doctest::Approx(20.0).epsilon(1e-9));

        const StrengthResult most =
            extract_strength(sol, q, YieldCriterion{YieldKind::population_fraction, 0.8}, 2);
        REQUIRE(most.reached);
        // alpha = (0.8 - 0.5) / (1 - 0.5) = 0.6
        CHECK(most.strain == doctest::Approx(2.6e-3).epsilon(1e-9));
        CHECK(most.sigma == doctest::Approx(26.0).epsilon(1e-9));

        CHECK_THROWS_AS(
            extract_strength(sol, q, YieldCriterion{YieldKind::population_fraction, 0.0}, 2),
            ConfigError);
        CHECK_THROWS_AS(
            extract_strength(sol, q, YieldCriterion{YieldKind::population_fraction, 1.2}, 2),
            ConfigError);
    }
    SUBCASE("trigger ordering and the not-reached state") {
        const StrengthResult first =
            extract_strength(sol, q, YieldCriterion{YieldKind::first_wall_yield, 0.5}, 2);
        const StrengthResult half =
            extract_strength(sol, q, YieldCriterion{YieldKind::population_fraction, 0.5}, 2);
        CHECK(first.strain <= half.strain);

        const std::vector<std::vector<Real>> quiet = {{0.0, 0.0, 0.0, 0.0}};
        const SolutionState cold = linear_history(2, strain, 1e4, 0.0, 0.0, 0.0, quiet);
        const QuantifyResult qc = quantify_walls(cold);
        const StrengthResult none =
            extract_strength(cold, qc, YieldCriterion{YieldKind::first_wall_yield, 0.5}, 2);
        CHECK(!none.reached);
        const StrengthResult nonep =
            extract_strength(cold, qc, YieldCriterion{YieldKind::population_fraction, 0.5}, 2);
        CHECK(!nonep.reached);
    }
}

TEST_CASE("inclined wall filter classifies the idealized complexes") {
    const CellComplex kelvin = build_kelvin_cell_rve(1.0, 1.0, 0.01);
    for (int axis = 0; axis < 3; ++axis) {
        const std::vector<int> f = inclined_wall_filter(kelvin, axis);
        REQUIRE(f.size() == kelvin.walls.size());
        int n_inclined = 0;
        for (std::size_t w = 0; w < f.size(); ++w) {
            const Real d = std::abs(wall_normal(kelvin, int(w))[axis]);
            if (f[w]) {
                ++n_inclined;
                CHECK(d > 1e-6);
                CHECK(d < 1.0 - 1e-6);
            }
        }
        CHECK(n_inclined == 8);  // the hexagons; squares are axis-aligned
    }
    const CellComplex rect = build_rect_cell_rve(1.5, 1.0, 0.01);
    for (int axis = 0; axis < 3; ++axis)
        for (int w : inclined_wall_filter(rect, axis)) CHECK(w == 0);
}

TEST_CASE("anisotropy ratios with transverse averaging") {
    const EffectiveProperties e1 = synth_props(0, 10.0, 0.3, 0.3, true, 5.0);
    const EffectiveProperties e2 = synth_props(1, 14.0, 0.3, 0.3, true, 7.0);
    const EffectiveProperties e3 = synth_props(2, 24.0, 0.3, 0.3, true, 18.0);

    const AnisotropyReport rep = anisotropy(&e1, &e2, &e3);
    CHECK(rep.E11_star == 12.0);
    CHECK(rep.RE == 2.0);
    CHECK(rep.sigma11_star == 6.0);
    CHECK(rep.Rsigma == 3.0);
    CHECK(!std::isfinite(rep.RE_analytic));  // left for the caller

    SUBCASE("identical transverse runs average to either one") {
        const EffectiveProperties e2same = synth_props(1, 10.0, 0.3, 0.3, true, 5.0);
        const AnisotropyReport r2 = anisotropy(&e1, &e2same, &e3);
        CHECK(r2.E11_star == e1.E);
        CHECK(r2.sigma11_star == e1.strength.sigma);
    }
    SUBCASE("missing e2 run falls back to e1 alone") {
        const AnisotropyReport r2 = anisotropy(&e1, nullptr, &e3);
        CHECK(r2.E11_star == 10.0);
        CHECK(r2.RE == 2.4);
        CHECK(r2.Rsigma == doctest::Approx(3.6).epsilon(1e-14));
    }
    SUBCASE("unreached strengths poison only the stress ratio") {
        EffectiveProperties e1n = e1;
        e1n.strength.reached = false;
        const AnisotropyReport r2 = anisotropy(&e1n, &e2, &e3);
        CHECK(r2.RE == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(r2.sigma11_star == 7.0);  // only the reached transverse run counts
        const AnisotropyReport r3 = anisotropy(&e1n, nullptr, &e3);
        CHECK(!std::isfinite(r3.sigma11_star));
        CHECK(!std::isfinite(r3.Rsigma));
        EffectiveProperties e3n = e3;
        e3n.strength.reached = false;
        const AnisotropyReport r4 = anisotropy(&e1, &e2, &e3n);
        CHECK(!std::isfinite(r4.Rsigma));
        CHECK(std::isfinite(r4.RE));
    }
    SUBCASE("axis bookkeeping is validated") {
        CHECK_THROWS_AS(anisotropy(nullptr, &e2, &e3), ConfigError);
        CHECK_THROWS_AS(anisotropy(&e1, &e2, nullptr), ConfigError);
        CHECK_THROWS_AS(anisotropy(&e3, &e2, &e1), ConfigError);
    }
}

TEST_CASE("reciprocity residual compares the two compliances") {
    EffectiveProperties a = synth_props(0, 10.0, 0.25, 0.3, false, 0.0);
    EffectiveProperties b = synth_props(2, 20.0, 0.6, 0.25, false, 0.0);
    // nu_02 / E_0 = 0.3 / 10 = 0.03; nu_20 / E_2 = 0.6 / 20 = 0.03.
    CHECK(reciprocity_residual(a, b) == doctest::Approx(0.0).epsilon(1e-14));

    b.nu[0] = 0.63;  // nu_20 / E_2 = 0.0315
    CHECK(reciprocity_residual(a, b) ==
          doctest::Approx(0.0015 / 0.03075).epsilon(1e-12));
}

TEST_CASE("rect RVE isotropy, reciprocity and window stability") {
    const CellComplex c = build_rect_cell_rve(1.0, 1.0, 0.01);
    const ShellMesh mesh = mesh_complex(c, 0.5);
    const BaseMaterial mat;
    SolverSettings st;
    st.perturbation_scale = 0;
    const BoundaryCondition bc{BcKind::periodic, true, false};

    const auto run = [&](int axis) {
        const auto [m, program] =
            make_uniaxial_compression(axis, std::vector<Real>{1 - 5e-5, 1 - 1e-4});
        (void)m;
        return solve(mesh, bc, program, st, mat);
    };
    const SolutionState s0 = run(0), s2 = run(2);
    const QuantifyResult q0 = quantify_walls(s0), q2 = quantify_walls(s2);

    // No buckling: the default window spans the whole (elastic) run.
    const Real w0 = default_window_upper(s0, q0);
    CHECK(w0 == doctest::Approx(1e-4).epsilon(1e-12));
    const EffectiveProperties p0 = extract_elastic(s0, 0, 0.0, w0);
    const EffectiveProperties p2 = extract_elastic(s2, 2, 0.0, default_window_upper(s2, q2));
    CHECK(p0.window_steps == 3);
    CHECK(p0.E > 0.0);

    // Cubic symmetry: moduli and contractions match across loading axes.
    CHECK(p0.E == doctest::Approx(p2.E).epsilon(1e-6));
    CHECK(p0.nu[0] == doctest::Approx(p0.nu[1]).epsilon(1e-6));
    CHECK(p2.nu[0] == doctest::Approx(p2.nu[1]).epsilon(1e-6));
    CHECK(p0.nu[0] == doctest::Approx(p2.nu[0]).epsilon(1e-6));
    CHECK(reciprocity_residual(p0, p2) < 1e-6);

    // Halving the fit window leaves the modulus unchanged well inside 1%.
    const EffectiveProperties ph = extract_elastic(s0, 0, 0.0, 0.5 * w0);
    CHECK(ph.window_steps == 2);
    CHECK(std::abs(ph.E - p0.E) < 0.01 * std::abs(p0.E));

    CHECK(!p0.strength.reached);
    CHECK(!extract_strength(s0, q0, YieldCriterion{YieldKind::first_wall_yield, 0.5}, 0).reached);

    SUBCASE("properties CSV round trip") {
        EffectiveProperties pr = p0;
        pr.strength.reached = true;
        pr.strength.sigma = 1.25;
        pr.strength.strain = 3e-3;
        pr.strength.wall = 2;
        const auto path =
            (std::filesystem::temp_directory_path() / "foamrve_props.csv").string();
        write_properties_csv(path, {p0, pr});
        const std::string body = slurp(path);
        write_properties_csv(path, {p0, pr});
        CHECK(slurp(path) == body);

        std::istringstream is(body);
        std::string line;
        std::getline(is, line);
        CHECK(line ==
              "axis,E,nu_a_axis,nu_a,nu_b_axis,nu_b,sigma_y,sigma_strain,sigma_wall,"
              "window_lo,window_hi,window_steps");
        std::getline(is, line);
        CHECK(line.find(",,,") != std::string::npos);  // strength absent
        std::getline(is, line);
        CHECK(line.find("1.25,0.003") != std::string::npos);
        CHECK(line.find(",,,") == std::string::npos);
        std::filesystem::remove(path);
    }
}
