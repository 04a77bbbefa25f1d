////////////////////////////////////////////////////////////////////////////////
// test_quantify.cpp
////////////////////////////////////////////////////////////////////////////////

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <foamrve/fe_solve.hpp>
#include <foamrve/mesostructure.hpp>
#include <foamrve/quantify.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace foamrve;

namespace {

const Real kNaN = std::numeric_limits<Real>::quiet_NaN();

// Single-wall history whose indicator follows the given profile at unit total
// energy; NaN entries leave the wall below the energy floor at that step.
SolutionState history_from_profile(const std::vector<Real> &strain, const std::vector<Real> &I,
                                   Real scale = 1.0) {
    SolutionState s;
    s.completed = true;
    for (std::size_t n = 0; n < strain.size(); ++n) {
        StepRecord r;
        r.step = int(n);
        r.applied_strain = strain[n];
        r.stretch = 1.0 - strain[n];
        WallStepData w;
        if (std::isfinite(I[n])) {
            w.Wb = 0.5 * scale * (1.0 + I[n]);
            w.Wm = 0.5 * scale * (1.0 - I[n]);
        }
        r.walls.push_back(w);
        s.steps.push_back(r);
    }
    return s;
}

std::vector<Real> ramp(std::size_t n, Real de) {
    std::vector<Real> e(n);
    for (std::size_t s = 0; s < n; ++s) e[s] = Real(s) * de;
    return e;
}

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("partition indicator limits and the energy floor") {
    SolutionState s;
    s.completed = true;
    const std::vector<Real> Wm = {0.0, 1.0, 0.0, 1e-5, 2e-15, -1e-18};
    const std::vector<Real> Wb = {0.0, 0.0, 1.0, 1.0, 2e-15, 1e-13};
    for (std::size_t n = 0; n < Wm.size(); ++n) {
        StepRecord r;
        r.step = int(n);
        r.applied_strain = Real(n) * 1e-3;
        r.stretch = 1.0 - r.applied_strain;
        WallStepData w;
        w.Wm = Wm[n];
        w.Wb = Wb[n];
        r.walls.push_back(w);
        s.steps.push_back(r);
    }
    const WallEnergyRecord rec = energy_partition(s, 0);

    CHECK(!std::isfinite(rec.I[0]));  // unloaded reference: no energy yet
    CHECK(rec.I[1] == -1.0);          // pure membrane
    CHECK(rec.I[2] == 1.0);           // pure bending
    CHECK(rec.I[3] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rec.I[3] < 1.0);
    CHECK(!std::isfinite(rec.I[4]));  // 4e-15 N*mm: below the floor
    CHECK(rec.I[5] == 1.0);           // roundoff-negative W_m clamps, not overshoots
    for (Real v : rec.I)
        if (std::isfinite(v)) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    CHECK(!std::isfinite(rec.Idot[0]));
    CHECK(!std::isfinite(rec.Idot[1]));  // left neighbour undefined
    CHECK(rec.Idot[2] == doctest::Approx((1.0 - -1.0) / 1e-3));
    CHECK(rec.energy_share == 1.0);

    CHECK_THROWS_AS(energy_partition(s, 1), ConfigError);
    CHECK_THROWS_AS(energy_partition(SolutionState{}, 0), ConfigError);
}

TEST_CASE("buckling detector flags the sharp rise once") {
    // I: flat at -1, a small wiggle, then the jump. Rates per unit strain
    // (de = 0.01): [-, 0, 0.5, 0, 69.5, 5], positive mean = 25.
    const std::vector<Real> I = {kNaN, -1.0, -0.995, -0.995, -0.30, -0.25};
    const SolutionState s = history_from_profile(ramp(I.size(), 0.01), I);
    const WallEnergyRecord rec = energy_partition(s, 0);
    const BucklingEvents ev = detect_buckling(rec);

    CHECK(ev.threshold == doctest::Approx(25.0).epsilon(1e-12));
    REQUIRE(ev.B.size() == I.size());
    CHECK(ev.first_step == 4);
    for (std::size_t n = 0; n < ev.B.size(); ++n) CHECK(ev.B[n] == (n == 4 ? 1 : 0));

    SUBCASE("constant indicator produces no events") {
        const std::vector<Real> flat = {kNaN, -1.0, -1.0, -1.0, -1.0};
        const BucklingEvents none =
            detect_buckling(energy_partition(history_from_profile(ramp(5, 0.01), flat), 0));
        CHECK(none.first_step == -1);
        CHECK(none.threshold == 0.0);
        for (int b : none.B) CHECK(b == 0);
    }
    SUBCASE("histories shorter than three steps cannot carry events") {
        const std::vector<Real> two = {kNaN, -0.5};
        const BucklingEvents none =
            detect_buckling(energy_partition(history_from_profile(ramp(2, 0.01), two), 0));
        CHECK(none.first_step == -1);
    }
}

TEST_CASE("detector output is invariant under time rescaling") {
    const std::vector<Real> I = {kNaN, -1.0, -0.995, -0.995, -0.30, -0.25, -0.22};
    const std::vector<Real> e = ramp(I.size(), 0.01);
    std::vector<Real> e_scaled(e);
    for (Real &v : e_scaled) v *= 3.7;

    const BucklingEvents a = detect_buckling(energy_partition(history_from_profile(e, I), 0));
    const BucklingEvents b =
        detect_buckling(energy_partition(history_from_profile(e_scaled, I), 0));

    REQUIRE(a.B.size() == b.B.size());
    for (std::size_t n = 0; n < a.B.size(); ++n) CHECK(a.B[n] == b.B[n]);
    CHECK(a.first_step == b.first_step);
    CHECK(b.threshold == doctest::Approx(a.threshold / 3.7).epsilon(1e-12));
}

TEST_CASE("yield detection latches at the 0.01 threshold") {
    const std::vector<Real> J = {0.0, 0.0, 0.005, 0.02, 0.4, 1.0};
    CHECK(detect_yield(J) == 3);
    CHECK(detect_yield(std::vector<Real>{0.0, 0.0, 0.0}) == -1);
    CHECK(detect_yield(std::vector<Real>{0.0, 0.01, 0.01}) == -1);  // strict >
    for (Real v : J) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // Latched flags through quantify_walls on a two-wall synthetic history.
    SolutionState s;
    s.completed = true;
    for (std::size_t n = 0; n < J.size(); ++n) {
        StepRecord r;
        r.step = int(n);
        r.applied_strain = Real(n) * 0.01;
        r.stretch = 1.0 - r.applied_strain;
        WallStepData loud;
        loud.Wm = 1.0;
        loud.Jw = J[n];
        WallStepData quiet;
        quiet.Wm = 0.5;
        r.walls = {loud, quiet};
        s.steps.push_back(r);
    }
    const QuantifyResult q = quantify_walls(s);
    REQUIRE(q.events.size() == 2);
    CHECK(q.events[0].first_yield_step == 3);
    const std::vector<int> want = {0, 0, 0, 1, 1, 1};
    for (std::size_t n = 0; n < want.size(); ++n) CHECK(q.events[0].Y[n] == want[n]);
    CHECK(q.events[1].first_yield_step == -1);
    for (int y : q.events[1].Y) CHECK(y == 0);
}

TEST_CASE("sub-share walls are exempt from buckling but not yield detection") {
    const std::vector<Real> e = ramp(6, 0.01);
    const std::vector<Real> jump = {kNaN, -1.0, -1.0, -1.0, -0.3, -0.25};
    const std::vector<Real> noise = {kNaN, -1.0, 0.8, -0.9, 0.7, -0.8};

    SolutionState s;
    s.completed = true;
    for (std::size_t n = 0; n < e.size(); ++n) {
        StepRecord r;
        r.step = int(n);
        r.applied_strain = e[n];
        r.stretch = 1.0 - e[n];
        WallStepData big;
        if (std::isfinite(jump[n])) {
            big.Wb = 0.5 * (1.0 + jump[n]);
            big.Wm = 0.5 * (1.0 - jump[n]);
        }
        WallStepData tiny;  // share ~1e-9, wildly oscillating indicator
        if (std::isfinite(noise[n])) {
            tiny.Wb = 0.5e-9 * (1.0 + noise[n]);
            tiny.Wm = 0.5e-9 * (1.0 - noise[n]);
        }
        tiny.Jw = n >= 4 ? 0.05 : 0.0;  // genuinely yields despite the tiny share
        r.walls = {big, tiny};
        s.steps.push_back(r);
    }
    const QuantifyResult q = quantify_walls(s);
    REQUIRE(q.events.size() == 2);

    CHECK(!q.events[0].exempt);
    CHECK(q.events[0].first_buckle_step == 4);
    CHECK(q.events[1].exempt);
    CHECK(q.events[1].first_buckle_step == -1);
    for (int b : q.events[1].B) CHECK(b == 0);
    CHECK(q.events[1].first_yield_step == 4);

    const PopulationStats p = population_stats(q);
    CHECK(p.n_walls == 2);
    CHECK(p.buckled_fraction[3] == 0.0);
    CHECK(p.buckled_fraction[4] == 0.5);
    CHECK(p.buckled_fraction[5] == 0.5);
    CHECK(p.yielded_fraction[3] == 0.0);
    CHECK(p.yielded_fraction[4] == 0.5);
    for (std::size_t n = 1; n < p.buckled_fraction.size(); ++n) {
        CHECK(p.buckled_fraction[n] >= p.buckled_fraction[n - 1]);
        CHECK(p.yielded_fraction[n] >= p.yielded_fraction[n - 1]);
    }
}

TEST_CASE("empirical CDF of the indicator at a requested strain") {
    SolutionState s;
    s.completed = true;
    const std::vector<Real> e = {0.0, 0.01, 0.02};
    const std::vector<std::vector<Real>> I_at_last = {
        {kNaN, -0.9, -0.95}, {kNaN, -0.9, -0.90}, {kNaN, -0.9, -0.50},
        {kNaN, -0.9, 0.20},  {kNaN, kNaN, kNaN},  // below the floor throughout
    };
    for (std::size_t n = 0; n < e.size(); ++n) {
        StepRecord r;
        r.step = int(n);
        r.applied_strain = e[n];
        r.stretch = 1.0 - e[n];
        for (const std::vector<Real> &prof : I_at_last) {
            WallStepData w;
            if (std::isfinite(prof[n])) {
                w.Wb = 0.5 * (1.0 + prof[n]);
                w.Wm = 0.5 * (1.0 - prof[n]);
            }
            r.walls.push_back(w);
        }
        s.steps.push_back(r);
    }
    const QuantifyResult q = quantify_walls(s);

    const IwCdf c = iw_cdf(q, 0.019);  // nearest recorded step is 0.02
    CHECK(c.step == 2);
    CHECK(c.applied_strain == 0.02);
    CHECK(c.n_walls == 5);
    REQUIRE(c.values.size() == 4);  // the floor wall is omitted
    CHECK(c.values[0] == doctest::Approx(-0.95).epsilon(1e-14));
    CHECK(c.values[3] == doctest::Approx(0.20).epsilon(1e-14));
    CHECK(std::is_sorted(c.values.begin(), c.values.end()));

    CHECK(fraction_below(c, -0.8) == 0.5);
    CHECK(fraction_below(c, -0.95 - 1e-12) == 0.0);  // strictly below
    CHECK(fraction_below(c, 2.0) == 1.0);
    CHECK(fraction_below(c, -2.0) == 0.0);

    SUBCASE("identical walls give a step-function CDF") {
        const IwCdf mid = iw_cdf(q, 0.0101);
        CHECK(mid.step == 1);
        REQUIRE(mid.values.size() == 4);
        for (Real v : mid.values) CHECK(v == doctest::Approx(-0.9).epsilon(1e-14));
        CHECK(fraction_below(mid, -0.9 - 1e-12) == 0.0);
        CHECK(fraction_below(mid, -0.9 + 1e-12) == 1.0);
    }
}

TEST_CASE("rect RVE run stays pure membrane with no events") {
    const CellComplex c = build_rect_cell_rve(1.0, 1.0, 0.01);
    const ShellMesh mesh = mesh_complex(c, 0.25);
    const BaseMaterial mat;
    const auto [macro, program] = make_uniaxial_compression(2, std::vector<Real>{1 - 5e-5, 1 - 1e-4});
    (void)macro;
    SolverSettings st;
    st.perturbation_scale = 0;

    const SolutionState sol =
        solve(mesh, BoundaryCondition{BcKind::periodic, true, false}, program, st, mat);
    REQUIRE(sol.completed);
    const QuantifyResult q = quantify_walls(sol);
    REQUIRE(q.energy.size() == sol.steps.front().walls.size());

    // The wall-wise records reproduce the run totals exactly.
    Real sum = 0, share = 0;
    for (const WallEnergyRecord &er : q.energy) {
        sum += er.Wm.back() + er.Wb.back() + er.Ws.back() + er.Wd.back();
        share += er.energy_share;
    }
    CHECK(std::abs(sum - sol.steps.back().W_int) <= 1e-8 * std::abs(sol.steps.back().W_int));
    CHECK(std::abs(sum - q.W_total) <= 1e-15 * std::abs(q.W_total));
    CHECK(share == doctest::Approx(1.0).epsilon(1e-12));

    // In-plane stretched walls: pure membrane within 1e-6.
    for (const WallEnergyRecord &er : q.energy) {
        REQUIRE(std::isfinite(er.I.back()));
        CHECK(er.I.back() == doctest::Approx(-1.0).epsilon(1e-6));
        CHECK(er.Wm.back() >= 0.0);
        CHECK(er.Wb.back() >= -1e-18);
    }
    for (const WallEventRecord &ev : q.events) {
        CHECK(ev.first_buckle_step == -1);
        CHECK(ev.first_yield_step == -1);
        for (Real j : ev.Jw) CHECK(j == 0.0);
    }

    SUBCASE("CSV emission is deterministic and shaped to contract") {
        const auto dir = std::filesystem::temp_directory_path();
        const std::string recs = (dir / "foamrve_q_recs.csv").string();
        const std::string evts = (dir / "foamrve_q_evts.csv").string();
        write_wall_records_csv(recs, q, sol);
        write_wall_events_csv(evts, q, sol);
        const std::string r1 = slurp(recs), e1 = slurp(evts);
        write_wall_records_csv(recs, q, sol);
        write_wall_events_csv(evts, q, sol);
        CHECK(slurp(recs) == r1);
        CHECK(slurp(evts) == e1);

        std::istringstream rs(r1);
        std::string line;
        std::getline(rs, line);
        CHECK(line == "wall,step,stretch,W_m,W_b,I_w,Idot_w,B_w,J_w,Y_w");
        std::size_t rows = 0;
        std::string first_row;
        while (std::getline(rs, line))
            if (!line.empty()) {
                if (!rows) first_row = line;
                ++rows;
            }
        CHECK(rows == q.energy.size() * sol.steps.size());
        // Step 0 has no energy: the I_w and rate fields are empty.
        CHECK(first_row.substr(0, 4) == "0,0,");
        CHECK(first_row.find(",,,0,") != std::string::npos);

        std::istringstream es(e1);
        std::getline(es, line);
        CHECK(line ==
              "wall,first_buckle_step,first_buckle_strain,first_yield_step,first_yield_strain");
        rows = 0;
        while (std::getline(es, line))
            if (!line.empty()) {
                ++rows;
                CHECK(line.find(",,,") != std::string::npos);  // no events recorded
            }
        CHECK(rows == q.events.size());
        std::filesystem::remove(recs);
        std::filesystem::remove(evts);
    }
}

TEST_CASE("plate buckling event tracks the macroscale stiffness drop") {
    const CellComplex c = build_plate_specimen(PlateSpec{0.4, 0.4, 0.01, 0.0});
    const ShellMesh mesh = mesh_complex(c, 0.05);
    const BaseMaterial mat;
    const LoadProgram program = make_compression_program(0, 12e-3, 12, 2);
    SolverSettings st;
    st.max_halvings = 10;

    const SolutionState sol =
        solve(mesh, BoundaryCondition{BcKind::fully_prescribed, true, true}, program, st, mat);
    REQUIRE(sol.completed);
    const QuantifyResult q = quantify_walls(sol);
    REQUIRE(q.energy.size() == 1);
    const WallEnergyRecord &er = q.energy.front();
    const WallEventRecord &ev = q.events.front();

    // Nearly pure membrane before the critical strain, mixed after.
    REQUIRE(sol.steps.size() >= 13);
    CHECK(er.I[4] < -0.999);
    CHECK(er.I.back() > -0.7);
    for (Real v : er.I)
        if (std::isfinite(v)) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }

    // The axial secant stiffness falls off at the branch switch.
    int drop = -1;
    Real k_prev = 0;
    for (std::size_t s = 1; s < sol.steps.size(); ++s) {
        const Real de = sol.steps[s].applied_strain - sol.steps[s - 1].applied_strain;
        const Real k = (sol.steps[s].P_area(0, 0) - sol.steps[s - 1].P_area(0, 0)) / de;
        if (s > 1 && std::abs(k) < 0.8 * std::abs(k_prev) && drop < 0) drop = int(s);
        k_prev = k;
    }
    REQUIRE(drop > 0);

    // Exactly one detected event, within one step of the stiffness drop: the
    // rate peak lands on the first full post-buckling interval because the
    // bending energy of a solo plate keeps accelerating through the snap.
    int n_events = 0;
    for (int b : ev.B) n_events += b;
    CHECK(n_events == 1);
    CHECK(ev.first_buckle_step >= drop);
    CHECK(ev.first_buckle_step <= drop + 1);
    CHECK(ev.threshold > 0.0);

    // Elastic throughout: the membrane stress stays below yield.
    CHECK(ev.first_yield_step == -1);
    for (Real j : ev.Jw) CHECK(j == 0.0);
}
