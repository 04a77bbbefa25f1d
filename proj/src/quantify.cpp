////////////////////////////////////////////////////////////////////////////////
// quantify.cpp
////////////////////////////////////////////////////////////////////////////////

#include <foamrve/quantify.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

namespace foamrve {

namespace {

constexpr Real kEnergyFloor = 1e-14;  // N*mm below which I_w is undefined
constexpr Real kShareFloor = 1e-6;    // buckling-detection exemption
const Real kNaN = std::numeric_limits<Real>::quiet_NaN();

Real wall_total(const WallStepData &w) { return w.Wm + w.Wb + w.Ws + w.Wd; }

void check_wall(const SolutionState &sol, int wall) {
    if (sol.steps.empty()) throw ConfigError("quantify: empty run history");
    if (wall < 0 || std::size_t(wall) >= sol.steps.front().walls.size())
        throw ConfigError("quantify: wall index out of range");
}

std::FILE *open_csv(const std::string &path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::FILE *fp = std::fopen(path.c_str(), "w");
    if (!fp) throw ConfigError("cannot write CSV file: " + path);
    return fp;
}

void put_real(std::FILE *fp, Real v) {
    if (std::isfinite(v)) std::fprintf(fp, "%.17g", v);
}

}  // namespace

WallEnergyRecord energy_partition(const SolutionState &sol, int wall) {
    check_wall(sol, wall);
    const std::size_t n = sol.steps.size();
    WallEnergyRecord rec;
    rec.wall = wall;
    rec.Wm.resize(n);
    rec.Wb.resize(n);
    rec.Ws.resize(n);
    rec.Wd.resize(n);
    rec.I.assign(n, kNaN);
    rec.Idot.assign(n, kNaN);
    for (std::size_t s = 0; s < n; ++s) {
        const WallStepData &w = sol.steps[s].walls[std::size_t(wall)];
        rec.Wm[s] = w.Wm;
        rec.Wb[s] = w.Wb;
        rec.Ws[s] = w.Ws;
        rec.Wd[s] = w.Wd;
        if (w.Wm + w.Wb >= kEnergyFloor)
            rec.I[s] = std::clamp((w.Wb - w.Wm) / (w.Wb + w.Wm), Real(-1), Real(1));
        if (s > 0 && std::isfinite(rec.I[s]) && std::isfinite(rec.I[s - 1])) {
            const Real de = sol.steps[s].applied_strain - sol.steps[s - 1].applied_strain;
            if (de > 0) rec.Idot[s] = (rec.I[s] - rec.I[s - 1]) / de;
        }
    }
    Real total = 0;
    for (const WallStepData &w : sol.steps.back().walls) total += wall_total(w);
    rec.energy_share = total > 0 ? wall_total(sol.steps.back().walls[std::size_t(wall)]) / total
                                 : 0.0;
    return rec;
}

BucklingEvents detect_buckling(const WallEnergyRecord &rec) {
    BucklingEvents ev;
    const std::size_t n = rec.Idot.size();
    ev.B.assign(n, 0);
    Real sum = 0;
    int count = 0;
    for (Real v : rec.Idot)
        if (std::isfinite(v) && v > 0) {
            sum += v;
            ++count;
        }
    if (!count) return ev;
    ev.threshold = sum / count;
    for (std::size_t s = 1; s + 1 < n; ++s) {
        const Real l = rec.Idot[s - 1], m = rec.Idot[s], r = rec.Idot[s + 1];
        if (!std::isfinite(l) || !std::isfinite(m) || !std::isfinite(r)) continue;
        if (m > l && m > r && m > ev.threshold) {
            ev.B[s] = 1;
            if (ev.first_step < 0) ev.first_step = int(s);
        }
    }
    return ev;
}

std::vector<Real> plasticity_history(const SolutionState &sol, int wall) {
    check_wall(sol, wall);
    std::vector<Real> J(sol.steps.size());
    for (std::size_t s = 0; s < J.size(); ++s)
        J[s] = sol.steps[s].walls[std::size_t(wall)].Jw;
    return J;
}

int detect_yield(const std::vector<Real> &Jw, Real threshold) {
    for (std::size_t s = 0; s < Jw.size(); ++s)
        if (Jw[s] > threshold) return int(s);
    return -1;
}

QuantifyResult quantify_walls(const SolutionState &sol) {
    if (sol.steps.empty()) throw ConfigError("quantify: empty run history");
    const int n_walls = int(sol.steps.front().walls.size());
    QuantifyResult q;
    q.applied_strain.reserve(sol.steps.size());
    for (const StepRecord &r : sol.steps) q.applied_strain.push_back(r.applied_strain);
    q.W_total = 0;
    for (const WallStepData &w : sol.steps.back().walls) q.W_total += wall_total(w);
    for (int w = 0; w < n_walls; ++w) {
        WallEnergyRecord er = energy_partition(sol, w);
        WallEventRecord ev;
        ev.wall = w;
        ev.exempt = er.energy_share < kShareFloor;
        if (ev.exempt) {
            ev.B.assign(sol.steps.size(), 0);
        } else {
            const BucklingEvents b = detect_buckling(er);
            ev.threshold = b.threshold;
            ev.B = b.B;
            ev.first_buckle_step = b.first_step;
        }
        ev.Jw = plasticity_history(sol, w);
        ev.first_yield_step = detect_yield(ev.Jw);
        ev.Y.assign(sol.steps.size(), 0);
        if (ev.first_yield_step >= 0)
            for (std::size_t s = std::size_t(ev.first_yield_step); s < ev.Y.size(); ++s)
                ev.Y[s] = 1;
        q.energy.push_back(std::move(er));
        q.events.push_back(std::move(ev));
    }
    return q;
}

IwCdf iw_cdf(const QuantifyResult &q, Real applied_strain) {
    IwCdf c;
    if (q.applied_strain.empty()) return c;
    c.step = 0;
    for (std::size_t s = 1; s < q.applied_strain.size(); ++s)
        if (std::abs(q.applied_strain[s] - applied_strain) <
            std::abs(q.applied_strain[std::size_t(c.step)] - applied_strain))
            c.step = int(s);
    c.applied_strain = q.applied_strain[std::size_t(c.step)];
    c.n_walls = int(q.energy.size());
    for (const WallEnergyRecord &er : q.energy) {
        const Real v = er.I[std::size_t(c.step)];
        if (std::isfinite(v)) c.values.push_back(v);
    }
    std::sort(c.values.begin(), c.values.end());
    return c;
}

Real fraction_below(const IwCdf &c, Real x) {
    if (c.values.empty()) return 0.0;
    const auto it = std::lower_bound(c.values.begin(), c.values.end(), x);
    return Real(it - c.values.begin()) / Real(c.values.size());
}

PopulationStats population_stats(const QuantifyResult &q) {
    PopulationStats p;
    p.applied_strain = q.applied_strain;
    p.n_walls = int(q.events.size());
    const std::size_t n = q.applied_strain.size();
    p.buckled_fraction.assign(n, 0.0);
    p.yielded_fraction.assign(n, 0.0);
    if (!p.n_walls) return p;
    for (std::size_t s = 0; s < n; ++s) {
        int nc = 0, ny = 0;
        for (const WallEventRecord &ev : q.events) {
            if (ev.first_buckle_step >= 0 && std::size_t(ev.first_buckle_step) <= s) ++nc;
            if (ev.first_yield_step >= 0 && std::size_t(ev.first_yield_step) <= s) ++ny;
        }
        p.buckled_fraction[s] = Real(nc) / p.n_walls;
        p.yielded_fraction[s] = Real(ny) / p.n_walls;
    }
    return p;
}

void write_wall_records_csv(const std::string &path, const QuantifyResult &q,
                            const SolutionState &sol) {
    std::FILE *fp = open_csv(path);
    std::fprintf(fp, "wall,step,stretch,W_m,W_b,I_w,Idot_w,B_w,J_w,Y_w\n");
    for (std::size_t w = 0; w < q.energy.size(); ++w) {
        const WallEnergyRecord &er = q.energy[w];
        const WallEventRecord &ev = q.events[w];
        for (std::size_t s = 0; s < sol.steps.size(); ++s) {
            std::fprintf(fp, "%d,%d,", er.wall, sol.steps[s].step);
            put_real(fp, sol.steps[s].stretch);
            std::fputc(',', fp);
            put_real(fp, er.Wm[s]);
            std::fputc(',', fp);
            put_real(fp, er.Wb[s]);
            std::fputc(',', fp);
            put_real(fp, er.I[s]);
            std::fputc(',', fp);
            put_real(fp, er.Idot[s]);
            std::fprintf(fp, ",%d,", ev.B[s]);
            put_real(fp, ev.Jw[s]);
            std::fprintf(fp, ",%d\n", ev.Y[s]);
        }
    }
    std::fclose(fp);
}

void write_wall_events_csv(const std::string &path, const QuantifyResult &q,
                           const SolutionState &sol) {
    std::FILE *fp = open_csv(path);
    std::fprintf(fp, "wall,first_buckle_step,first_buckle_strain,first_yield_step,"
                     "first_yield_strain\n");
    for (const WallEventRecord &ev : q.events) {
        std::fprintf(fp, "%d,", ev.wall);
        if (ev.first_buckle_step >= 0) {
            std::fprintf(fp, "%d,", sol.steps[std::size_t(ev.first_buckle_step)].step);
            put_real(fp, sol.steps[std::size_t(ev.first_buckle_step)].applied_strain);
        } else {
            std::fputc(',', fp);
        }
        std::fputc(',', fp);
        if (ev.first_yield_step >= 0) {
            std::fprintf(fp, "%d,", sol.steps[std::size_t(ev.first_yield_step)].step);
            put_real(fp, sol.steps[std::size_t(ev.first_yield_step)].applied_strain);
        } else {
            std::fputc(',', fp);
        }
        std::fputc('\n', fp);
    }
    std::fclose(fp);
}

}  // namespace foamrve
