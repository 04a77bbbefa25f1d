////////////////////////////////////////////////////////////////////////////////
// effective.cpp
////////////////////////////////////////////////////////////////////////////////

#include <foamrve/effective.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

namespace foamrve {

namespace {

const Real kNaN = std::numeric_limits<Real>::quiet_NaN();

void check_axis(int axis) {
    if (axis < 0 || axis > 2) throw ConfigError("effective: loading axis must be 0, 1 or 2");
}

Real lerp(Real a, Real b, Real alpha) { return a + alpha * (b - a); }

// Interpolated crossing of a stepwise history through a threshold: the first
// index s with h[s] > thr, blended back toward s-1 on the h crossing.
struct Crossing {
    bool found = false;
    int step = -1;
    Real alpha = 0;  // 0 at step-1, 1 at step
};

Crossing first_crossing(const std::vector<Real> &h, Real thr) {
    Crossing c;
    for (std::size_t s = 0; s < h.size(); ++s)
        if (h[s] > thr) {
            c.found = true;
            c.step = int(s);
            c.alpha = 1.0;
            if (s > 0 && h[s] > h[s - 1]) c.alpha = (thr - h[s - 1]) / (h[s] - h[s - 1]);
            return c;
        }
    return c;
}

StrengthResult at_crossing(const SolutionState &sol, int axis, const Crossing &c, int wall) {
    StrengthResult r;
    r.reached = true;
    r.wall = wall;
    const std::size_t s = std::size_t(c.step);
    const Real p1 = std::abs(sol.steps[s].P_area(axis, axis));
    const Real e1 = sol.steps[s].applied_strain;
    if (s == 0) {
        r.sigma = p1;
        r.strain = e1;
        return r;
    }
    const Real p0 = std::abs(sol.steps[s - 1].P_area(axis, axis));
    const Real e0 = sol.steps[s - 1].applied_strain;
    r.sigma = lerp(p0, p1, c.alpha);
    r.strain = lerp(e0, e1, c.alpha);
    return r;
}

std::FILE *open_csv(const std::string &path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::FILE *fp = std::fopen(path.c_str(), "w");
    if (!fp) throw ConfigError("cannot write CSV file: " + path);
    return fp;
}

}  // namespace

Real EffectiveProperties::nu_toward(int which) const {
    for (int k = 0; k < 2; ++k)
        if (nu_axis[std::size_t(k)] == which) return nu[std::size_t(k)];
    return kNaN;
}

Real default_window_upper(const SolutionState &sol, const QuantifyResult &q) {
    if (sol.steps.empty()) throw ConfigError("effective: empty run history");
    Real first_buckle = kNaN;
    for (const WallEventRecord &ev : q.events)
        if (ev.first_buckle_step >= 0) {
            const Real e = q.applied_strain[std::size_t(ev.first_buckle_step)];
            if (!std::isfinite(first_buckle) || e < first_buckle) first_buckle = e;
        }
    return std::isfinite(first_buckle) ? 0.2 * first_buckle : sol.steps.back().applied_strain;
}

EffectiveProperties extract_elastic(const SolutionState &sol, int axis, Real window_lo,
                                    Real window_hi) {
    check_axis(axis);
    if (sol.steps.empty()) throw ConfigError("effective: empty run history");
    if (!(window_hi > window_lo))
        throw ConfigError("effective: elastic fit window is empty");
    if (window_hi < sol.steps.front().applied_strain)
        throw ConfigError("effective: elastic fit window precedes the first converged step");

    EffectiveProperties p;
    p.axis = axis;
    p.window_lo = window_lo;
    p.window_hi = window_hi;
    int k = 0;
    for (int j = 0; j < 3; ++j)
        if (j != axis) p.nu_axis[std::size_t(k++)] = j;

    const Real hi = window_hi * (1 + 1e-10) + 1e-300;
    std::vector<const StepRecord *> pts;
    for (const StepRecord &r : sol.steps)
        if (r.applied_strain >= window_lo - 1e-16 && r.applied_strain <= hi) pts.push_back(&r);
    p.window_steps = int(pts.size());
    if (pts.size() < 2)
        throw ConfigError("effective: elastic fit window contains fewer than two steps");

    // Ordinary least squares with intercept; x = Fhat_ii - 1.
    const auto slope = [&](auto yf) {
        Real xm = 0, ym = 0;
        for (const StepRecord *r : pts) {
            xm += r->F(axis, axis) - 1.0;
            ym += yf(*r);
        }
        xm /= Real(pts.size());
        ym /= Real(pts.size());
        Real sxy = 0, sxx = 0;
        for (const StepRecord *r : pts) {
            const Real dx = r->F(axis, axis) - 1.0 - xm;
            sxy += dx * (yf(*r) - ym);
            sxx += dx * dx;
        }
        if (sxx == 0) throw ConfigError("effective: no strain variation inside the fit window");
        return sxy / sxx;
    };
    p.E = slope([&](const StepRecord &r) { return r.P_area(axis, axis); });
    for (int m = 0; m < 2; ++m) {
        const int j = p.nu_axis[std::size_t(m)];
        p.nu[std::size_t(m)] = slope([&](const StepRecord &r) { return 1.0 - r.F(j, j); });
    }
    return p;
}

std::vector<int> inclined_wall_filter(const CellComplex &c, int axis) {
    check_axis(axis);
    std::vector<int> f(c.walls.size(), 0);
    for (std::size_t w = 0; w < c.walls.size(); ++w) {
        const Real d = std::abs(wall_normal(c, int(w))[axis]);
        f[w] = d > 1e-6 && d < 1.0 - 1e-6 ? 1 : 0;
    }
    return f;
}

StrengthResult extract_strength(const SolutionState &sol, const QuantifyResult &q,
                                const YieldCriterion &crit, int axis,
                                const std::vector<int> *wall_filter) {
    check_axis(axis);
    if (sol.steps.empty()) throw ConfigError("effective: empty run history");

    if (crit.kind == YieldKind::population_fraction) {
        if (!(crit.critical_fraction > 0) || !(crit.critical_fraction <= 1))
            throw ConfigError("effective: critical yield fraction must lie in (0, 1]");
        const PopulationStats ps = population_stats(q);
        // "Reaching" the fraction includes hitting it exactly.
        const Crossing c =
            first_crossing(ps.yielded_fraction,
                           crit.critical_fraction - 1e-12 * crit.critical_fraction);
        if (!c.found) return StrengthResult{};
        return at_crossing(sol, axis, c, -1);
    }

    if (crit.kind == YieldKind::first_inclined_wall_yield && !wall_filter)
        throw ConfigError("effective: inclined-wall criterion needs a wall filter");
    StrengthResult best;
    for (std::size_t w = 0; w < q.events.size(); ++w) {
        if (crit.kind == YieldKind::first_inclined_wall_yield) {
            if (wall_filter->size() != q.events.size())
                throw ConfigError("effective: wall filter does not match the wall count");
            if (!(*wall_filter)[w]) continue;
        }
        if (q.events[w].first_yield_step < 0) continue;
        const Crossing c = first_crossing(q.events[w].Jw, 0.01);
        const StrengthResult r = at_crossing(sol, axis, c, int(w));
        if (!best.reached || r.strain < best.strain) best = r;
    }
    return best;
}

Real reciprocity_residual(const EffectiveProperties &a, const EffectiveProperties &b) {
    const Real ra = a.nu_toward(b.axis) / a.E;
    const Real rb = b.nu_toward(a.axis) / b.E;
    const Real scale = 0.5 * (std::abs(ra) + std::abs(rb));
    if (!(scale > 0)) return kNaN;
    return std::abs(ra - rb) / scale;
}

AnisotropyReport anisotropy(const EffectiveProperties *e1, const EffectiveProperties *e2,
                            const EffectiveProperties *e3) {
    if (!e1 || !e3) throw ConfigError("effective: anisotropy needs the e1 and e3 runs");
    if (e1->axis != 0 || (e2 && e2->axis != 1) || e3->axis != 2)
        throw ConfigError("effective: anisotropy expects runs along axes 0, 1 and 2");

    AnisotropyReport rep;
    rep.RE_analytic = rep.Rsigma_analytic = kNaN;
    rep.E33 = e3->E;
    rep.E11_star = e2 ? 0.5 * (e1->E + e2->E) : e1->E;
    rep.RE = rep.E33 / rep.E11_star;

    rep.sigma33 = e3->strength.reached ? e3->strength.sigma : kNaN;
    Real sum = 0;
    int n = 0;
    for (const EffectiveProperties *t : {e1, e2})
        if (t && t->strength.reached) {
            sum += t->strength.sigma;
            ++n;
        }
    rep.sigma11_star = n ? sum / n : kNaN;
    rep.Rsigma = rep.sigma33 / rep.sigma11_star;
    return rep;
}

void write_properties_csv(const std::string &path,
                          const std::vector<EffectiveProperties> &props) {
    std::FILE *fp = open_csv(path);
    std::fprintf(fp, "axis,E,nu_a_axis,nu_a,nu_b_axis,nu_b,sigma_y,sigma_strain,sigma_wall,"
                     "window_lo,window_hi,window_steps\n");
    for (const EffectiveProperties &p : props) {
        std::fprintf(fp, "%d,%.17g,%d,%.17g,%d,%.17g,", p.axis, p.E, p.nu_axis[0], p.nu[0],
                     p.nu_axis[1], p.nu[1]);
        if (p.strength.reached)
            std::fprintf(fp, "%.17g,%.17g,%d,", p.strength.sigma, p.strength.strain,
                         p.strength.wall);
        else
            std::fprintf(fp, ",,,");
        std::fprintf(fp, "%.17g,%.17g,%d\n", p.window_lo, p.window_hi, p.window_steps);
    }
    std::fclose(fp);
}

}  // namespace foamrve
