////////////////////////////////////////////////////////////////////////////////
// config.cpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  foamrve-config/1 parsing, validation, presets, canonical serialization
//  and the FNV-1a config hash.
*/
////////////////////////////////////////////////////////////////////////////////
#include <foamrve/config.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#ifndef FOAMRVE_DATA_DIR
#define FOAMRVE_DATA_DIR "data"
#endif

namespace foamrve {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &origin, const std::string &what) {
    throw ConfigError(origin + ": " + what);
}

const char *dist_name(DistKind k) {
    switch (k) {
        case DistKind::Constant: return "constant";
        case DistKind::Lognormal: return "lognormal";
        case DistKind::Gamma: return "gamma";
        case DistKind::Normal: return "normal";
    }
    return "constant";
}

DistKind dist_kind(const std::string &s, const std::string &origin) {
    if (s == "constant") return DistKind::Constant;
    if (s == "lognormal") return DistKind::Lognormal;
    if (s == "gamma") return DistKind::Gamma;
    if (s == "normal") return DistKind::Normal;
    fail(origin, "unknown distribution kind \"" + s + "\"");
}

const char *bc_name(BcKind k) {
    switch (k) {
        case BcKind::periodic: return "periodic";
        case BcKind::fully_prescribed: return "fully_prescribed";
        case BcKind::minimal_kinematic: return "minimal_kinematic";
    }
    return "periodic";
}

BcKind bc_kind(const std::string &s, const std::string &origin) {
    if (s == "periodic") return BcKind::periodic;
    if (s == "fully_prescribed") return BcKind::fully_prescribed;
    if (s == "minimal_kinematic") return BcKind::minimal_kinematic;
    fail(origin, "unknown bc kind \"" + s + "\"");
}

const char *yield_name(YieldKind k) {
    switch (k) {
        case YieldKind::first_wall_yield: return "first_wall_yield";
        case YieldKind::first_inclined_wall_yield: return "first_inclined_wall_yield";
        case YieldKind::population_fraction: return "population_fraction";
    }
    return "first_wall_yield";
}

YieldKind yield_kind(const std::string &s, const std::string &origin) {
    if (s == "first_wall_yield") return YieldKind::first_wall_yield;
    if (s == "first_inclined_wall_yield") return YieldKind::first_inclined_wall_yield;
    if (s == "population_fraction") return YieldKind::population_fraction;
    fail(origin, "unknown yield criterion \"" + s + "\"");
}

// Strict block reader: every key must be consumed, typos become errors.
class Block {
  public:
    Block(const json &j, std::string where, const std::string &origin)
        : j_(j), where_(std::move(where)), origin_(origin) {
        if (!j_.is_object()) fail(origin_, where_ + ": expected an object");
    }
    ~Block() = default;

    bool has(const char *key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    template <typename T>
    T get(const char *key, T fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception &) {
            fail(origin_, where_ + "." + key + ": wrong type");
        }
    }
    const json &child(const char *key) {
        seen_.insert(key);
        return j_.at(key);
    }
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                fail(origin_, where_ + ": unknown field \"" + it.key() + "\"");
    }

  private:
    const json &j_;
    std::string where_;
    const std::string &origin_;
    std::set<std::string> seen_;
};

DistributionSpec parse_dist(const json &j, const std::string &where, const std::string &origin) {
    Block b(j, where, origin);
    DistributionSpec d;
    d.kind = dist_kind(b.get<std::string>("kind", "constant"), origin);
    d.mean = b.get<Real>("mean", 0.0);
    d.sd = b.get<Real>("sd", 0.0);
    b.finish();
    return d;
}

json dump_dist(const DistributionSpec &d) {
    return {{"kind", dist_name(d.kind)}, {"mean", d.mean}, {"sd", d.sd}};
}

std::string data_file(const char *name) {
    return std::string(FOAMRVE_DATA_DIR) + "/" + name;
}

Real parse_suffix(const std::string &name, std::size_t pos, const std::string &what) {
    try {
        std::size_t used = 0;
        const Real v = std::stod(name.substr(pos), &used);
        if (pos + used != name.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception &) {
        fail("preset \"" + name + "\"", "cannot parse " + what);
    }
}

} // namespace

RunConfig parse_config(const std::string &json_text, const std::string &origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception &e) {
        fail(origin, std::string("malformed JSON: ") + e.what());
    }
    Block top(j, "document", origin);
    const std::string fmt = top.get<std::string>("format", "");
    if (fmt != "foamrve-config/1")
        fail(origin, "field \"format\": expected \"foamrve-config/1\", got \"" + fmt + "\"");
    RunConfig cfg;
    if (!top.has("units")) fail(origin, "missing mandatory \"units\" field");
    cfg.units = top.get<std::string>("units", "");
    cfg.seed = top.get<std::uint64_t>("seed", 0);

    if (top.has("geometry")) {
        Block g(top.child("geometry"), "geometry", origin);
        cfg.geometry.kind = g.get<std::string>("kind", "rect");
        cfg.geometry.R = g.get<Real>("R", 1.0);
        cfg.geometry.V = g.get<Real>("V", 1.0);
        cfg.geometry.t = g.get<Real>("t", 0.01);
        cfg.geometry.path = g.get<std::string>("path", "");
        cfg.geometry.transform = g.get<bool>("transform", false);
        if (g.has("plate")) {
            Block p(g.child("plate"), "geometry.plate", origin);
            cfg.geometry.plate.L_w = p.get<Real>("L", 0.4);
            cfg.geometry.plate.B_w = p.get<Real>("B", 0.4);
            cfg.geometry.plate.t = p.get<Real>("t", 0.01);
            cfg.geometry.plate.h0 = p.get<Real>("h0", 0.0);
            p.finish();
        }
        if (g.has("thickness"))
            cfg.geometry.thickness = parse_dist(g.child("thickness"), "geometry.thickness", origin);
        if (g.has("diameter"))
            cfg.geometry.diameter = parse_dist(g.child("diameter"), "geometry.diameter", origin);
        g.finish();
    }
    if (top.has("material")) {
        Block m(top.child("material"), "material", origin);
        cfg.material.E = m.get<Real>("E", 2700.0);
        cfg.material.nu = m.get<Real>("nu", 0.38);
        cfg.material.sigma_y = m.get<Real>("sigma_y", 62.0);
        m.finish();
    }
    if (top.has("solver")) {
        Block s(top.child("solver"), "solver", origin);
        SolverSettings &st = cfg.solver;
        st.tol = s.get<Real>("tol", st.tol);
        st.max_iter = s.get<int>("max_iter", st.max_iter);
        st.polish_iter = s.get<int>("polish_iter", st.polish_iter);
        st.max_halvings = s.get<int>("max_halvings", st.max_halvings);
        st.perturbation_scale = s.get<Real>("perturbation_scale", st.perturbation_scale);
        st.kappa = s.get<Real>("kappa", st.kappa);
        st.drill_scale = s.get<Real>("drill_scale", st.drill_scale);
        st.stability_check = s.get<bool>("stability_check", st.stability_check);
        st.max_injections = s.get<int>("max_injections", st.max_injections);
        st.injection_fraction = s.get<Real>("injection_fraction", st.injection_fraction);
        cfg.mesh_h = s.get<Real>("mesh_h", 0.0);
        s.finish();
    }
    if (top.has("load")) {
        Block l(top.child("load"), "load", origin);
        cfg.load.directions = l.get<std::vector<int>>("directions", {2});
        cfg.load.strain_max = l.get<Real>("strain_max", 0.03);
        cfg.load.steps = l.get<int>("steps", 30);
        cfg.load.stretches = l.get<std::vector<Real>>("stretches", {});
        cfg.load.pin_normal_axis = l.get<int>("pin_normal_axis", -1);
        l.finish();
    }
    if (top.has("bc")) {
        Block b(top.child("bc"), "bc", origin);
        cfg.bc.kind = bc_kind(b.get<std::string>("kind", "periodic"), origin);
        cfg.bc.pair_rotations = b.get<bool>("pair_rotations", true);
        cfg.bc.clamp_rotations = b.get<bool>("clamp_rotations", false);
        b.finish();
    }
    if (top.has("yield")) {
        Block y(top.child("yield"), "yield", origin);
        cfg.yield.kind = yield_kind(y.get<std::string>("criterion", "first_wall_yield"), origin);
        cfg.yield.critical_fraction = y.get<Real>("critical_fraction", 0.5);
        y.finish();
    }
    if (top.has("outputs")) {
        Block o(top.child("outputs"), "outputs", origin);
        cfg.outputs.dir = o.get<std::string>("dir", "out");
        cfg.outputs.plots = o.get<bool>("plots", false);
        cfg.outputs.checkpoints = o.get<bool>("checkpoints", true);
        cfg.outputs.solver_log = o.get<bool>("solver_log", true);
        o.finish();
    }
    if (top.has("sweep")) {
        Block s(top.child("sweep"), "sweep", origin);
        cfg.sweep.axis = s.get<std::string>("axis", "");
        cfg.sweep.values = s.get<std::vector<Real>>("values", {});
        s.finish();
    }
    top.finish();

    try {
        validate(cfg);
    } catch (const ConfigError &e) {
        fail(origin, e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string serialize_config(const RunConfig &cfg) {
    json j;
    j["format"] = "foamrve-config/1";
    j["units"] = cfg.units;
    j["seed"] = cfg.seed;
    j["geometry"] = {{"kind", cfg.geometry.kind},
                     {"R", cfg.geometry.R},
                     {"V", cfg.geometry.V},
                     {"t", cfg.geometry.t},
                     {"path", cfg.geometry.path},
                     {"transform", cfg.geometry.transform},
                     {"thickness", dump_dist(cfg.geometry.thickness)},
                     {"diameter", dump_dist(cfg.geometry.diameter)}};
    if (cfg.geometry.kind == "plate")
        j["geometry"]["plate"] = {{"L", cfg.geometry.plate.L_w},
                                  {"B", cfg.geometry.plate.B_w},
                                  {"t", cfg.geometry.plate.t},
                                  {"h0", cfg.geometry.plate.h0}};
    j["material"] = {{"E", cfg.material.E}, {"nu", cfg.material.nu},
                     {"sigma_y", cfg.material.sigma_y}};
    j["solver"] = {{"tol", cfg.solver.tol},
                   {"max_iter", cfg.solver.max_iter},
                   {"polish_iter", cfg.solver.polish_iter},
                   {"max_halvings", cfg.solver.max_halvings},
                   {"perturbation_scale", cfg.solver.perturbation_scale},
                   {"kappa", cfg.solver.kappa},
                   {"drill_scale", cfg.solver.drill_scale},
                   {"stability_check", cfg.solver.stability_check},
                   {"max_injections", cfg.solver.max_injections},
                   {"injection_fraction", cfg.solver.injection_fraction},
                   {"mesh_h", cfg.mesh_h}};
    j["load"] = {{"directions", cfg.load.directions},
                 {"strain_max", cfg.load.strain_max},
                 {"steps", cfg.load.steps},
                 {"stretches", cfg.load.stretches},
                 {"pin_normal_axis", cfg.load.pin_normal_axis}};
    j["bc"] = {{"kind", bc_name(cfg.bc.kind)},
               {"pair_rotations", cfg.bc.pair_rotations},
               {"clamp_rotations", cfg.bc.clamp_rotations}};
    j["yield"] = {{"criterion", yield_name(cfg.yield.kind)},
                  {"critical_fraction", cfg.yield.critical_fraction}};
    j["outputs"] = {{"dir", cfg.outputs.dir},
                    {"plots", cfg.outputs.plots},
                    {"checkpoints", cfg.outputs.checkpoints},
                    {"solver_log", cfg.outputs.solver_log}};
    if (!cfg.sweep.axis.empty() || !cfg.sweep.values.empty())
        j["sweep"] = {{"axis", cfg.sweep.axis}, {"values", cfg.sweep.values}};
    return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig &cfg) {
    const std::string s = serialize_config(cfg);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void validate(const RunConfig &cfg) {
    if (cfg.units != "mm-N-MPa")
        throw ConfigError("units: expected \"mm-N-MPa\", got \"" + cfg.units + "\"");
    const GeometryConfig &g = cfg.geometry;
    static const std::set<std::string> kinds{"rect", "kelvin", "plate", "tessellation"};
    if (!kinds.count(g.kind)) throw ConfigError("geometry.kind: unknown kind \"" + g.kind + "\"");
    if (!(g.R > 0)) throw ConfigError("geometry.R must be positive");
    if (!(g.V > 0)) throw ConfigError("geometry.V must be positive");
    if (!(g.t > 0)) throw ConfigError("geometry.t must be positive");
    if (g.kind == "plate") {
        if (!(g.plate.L_w > 0 && g.plate.B_w > 0 && g.plate.t > 0))
            throw ConfigError("geometry.plate dimensions must be positive");
        if (g.plate.h0 < 0) throw ConfigError("geometry.plate.h0 must be non-negative");
    }
    if (g.kind == "tessellation") {
        if (g.path.empty()) throw ConfigError("geometry.path required for tessellation import");
        std::ifstream probe(g.path);
        if (!probe) throw ConfigError("geometry.path: file \"" + g.path + "\" does not exist");
    }
    for (const DistributionSpec *d : {&g.thickness, &g.diameter}) {
        if (d->mean < 0) throw ConfigError("distribution mean must be non-negative");
        if (d->sd < 0) throw ConfigError("distribution sd must be non-negative");
        if (d->kind != DistKind::Constant && d->mean > 0 && !(d->sd > 0))
            throw ConfigError("non-constant distribution needs sd > 0");
    }
    validate(cfg.material);
    if (!(cfg.solver.tol > 0)) throw ConfigError("solver.tol must be positive");
    if (cfg.solver.max_iter < 1) throw ConfigError("solver.max_iter must be at least 1");
    if (cfg.solver.perturbation_scale < 0)
        throw ConfigError("solver.perturbation_scale must be non-negative");
    if (cfg.mesh_h < 0) throw ConfigError("solver.mesh_h must be non-negative");
    if (cfg.load.directions.empty()) throw ConfigError("load.directions must not be empty");
    std::set<int> seen;
    for (int d : cfg.load.directions) {
        if (d < 0 || d > 2) throw ConfigError("load.directions entries must lie in {0,1,2}");
        if (!seen.insert(d).second) throw ConfigError("load.directions repeats an axis");
    }
    if (cfg.load.stretches.empty()) {
        if (!(cfg.load.strain_max > 0 && cfg.load.strain_max < 1))
            throw ConfigError("load.strain_max must lie in (0,1)");
        if (cfg.load.steps < 1) throw ConfigError("load.steps must be at least 1");
    } else {
        Real prev = 1.0 + 1e-12;
        for (Real s : cfg.load.stretches) {
            if (!(s > 0 && s < prev))
                throw ConfigError("load.stretches must be strictly decreasing and below 1");
            prev = s;
        }
    }
    if (cfg.load.pin_normal_axis < -1 || cfg.load.pin_normal_axis > 2)
        throw ConfigError("load.pin_normal_axis must be -1 or an axis in {0,1,2}");
    if (!(cfg.yield.critical_fraction > 0 && cfg.yield.critical_fraction <= 1))
        throw ConfigError("yield.critical_fraction must lie in (0,1]");
    if (cfg.outputs.dir.empty()) throw ConfigError("outputs.dir must not be empty");
    if (!cfg.sweep.axis.empty() && cfg.sweep.axis != "rve_size" && cfg.sweep.axis != "seed" &&
        cfg.sweep.axis != "R")
        throw ConfigError("sweep.axis must be rve_size, seed, or R");
}

RunConfig preset_config(const std::string &name) {
    RunConfig cfg;
    cfg.outputs.dir = name;
    auto starts = [&](const char *p) { return name.rfind(p, 0) == 0; };

    if (starts("rect-R") || starts("kelvin-R")) {
        const bool rect = starts("rect-R");
        cfg.geometry.kind = rect ? "rect" : "kelvin";
        cfg.geometry.R = parse_suffix(name, rect ? 6 : 8, "the R value");
        cfg.geometry.V = 1.0;
        cfg.geometry.t = 0.01;
        cfg.mesh_h = rect ? 0.06 : 0.10;
        cfg.bc.kind = BcKind::periodic;
        cfg.load.directions = {0, 2};
        cfg.load.strain_max = 0.03;
        cfg.load.steps = 40;
        cfg.yield.kind = rect ? YieldKind::first_wall_yield : YieldKind::first_inclined_wall_yield;
        validate(cfg);
        return cfg;
    }
    if (starts("plate-Rw")) {
        const std::size_t hp = name.rfind("-h0");
        if (hp == std::string::npos || hp < 8)
            throw ConfigError("preset \"" + name + "\": expected plate-Rw<r>-h0<x>");
        const Real Rw = parse_suffix(name.substr(0, hp), 8, "the R_w value");
        if (!(Rw > 0)) throw ConfigError("preset \"" + name + "\": R_w must be positive");
        const Real rel_h0 = parse_suffix(name, hp + 3, "the h0 value");
        cfg.geometry.kind = "plate";
        cfg.geometry.plate.B_w = 0.4;
        cfg.geometry.plate.L_w = 0.4 * Rw;
        cfg.geometry.plate.t = 0.01;
        cfg.geometry.plate.h0 =
            rel_h0 * std::sqrt(cfg.geometry.plate.L_w * cfg.geometry.plate.B_w);
        cfg.mesh_h = 0.05;
        cfg.bc.kind = BcKind::fully_prescribed;
        cfg.bc.clamp_rotations = true;
        cfg.load.directions = {0};
        cfg.load.pin_normal_axis = 2;
        // Graded schedule: coarse to 0.5%, fine through the buckling window,
        // then coarse again into the post-buckling range.
        std::vector<Real> sch;
        for (int i = 1; i <= 10; ++i) sch.push_back(1.0 - 5e-4 * i);
        for (int i = 1; i <= 20; ++i) sch.push_back(1.0 - 5e-3 - 2e-4 * i);
        for (int i = 1; i <= 26; ++i) sch.push_back(1.0 - 9e-3 - 5e-4 * i);
        cfg.load.stretches = std::move(sch);
        cfg.yield.kind = YieldKind::first_wall_yield;
        validate(cfg);
        return cfg;
    }
    if (starts("h100-") || starts("h200-")) {
        const bool h100 = starts("h100-");
        const std::string variant = name.substr(5);
        if (variant != "stst" && variant != "stct" && variant != "ctct")
            throw ConfigError("preset \"" + name + "\": variant must be stst, stct, or ctct");
        cfg.geometry.kind = "tessellation";
        cfg.geometry.path =
            data_file(variant == "ctct" ? "h100_regular.json" : "h100_stochastic.json");
        cfg.geometry.transform = true;
        cfg.geometry.R = h100 ? 1.2 : 1.4;
        cfg.geometry.t = h100 ? 0.0115 : 0.0200;
        if (variant == "stst") {
            cfg.geometry.thickness = {DistKind::Gamma, h100 ? 0.0115 : 0.0200,
                                      h100 ? 0.0059 : 0.0067};
        } else {
            cfg.geometry.thickness = {DistKind::Constant, h100 ? 0.0115 : 0.0200, 0.0};
        }
        cfg.geometry.diameter = {DistKind::Lognormal, h100 ? 0.35 : 0.34, h100 ? 0.10 : 0.09};
        cfg.seed = 1;
        cfg.mesh_h = 0.10;
        cfg.bc.kind = BcKind::fully_prescribed;
        cfg.load.directions = {2};
        cfg.load.strain_max = 0.02;
        cfg.load.steps = 25;
        cfg.yield.kind = YieldKind::population_fraction;
        cfg.yield.critical_fraction = 0.5;
        validate(cfg);
        return cfg;
    }
    throw ConfigError("unknown preset \"" + name + "\"");
}

std::vector<std::string> preset_examples() {
    return {"rect-R1.0",  "rect-R1.5",  "kelvin-R1.0", "kelvin-R1.5", "kelvin-R2.0",
            "plate-Rw1-h00", "plate-Rw1-h00.05", "plate-Rw2-h00", "h100-stst",
            "h100-stct",  "h100-ctct",  "h200-stst",   "h200-stct",   "h200-ctct"};
}

CellComplex build_geometry(const GeometryConfig &g, std::uint64_t seed,
                           std::uint64_t *resampled) {
    CellComplex c;
    if (g.kind == "rect") {
        c = build_rect_cell_rve(g.R, g.V, g.t);
    } else if (g.kind == "kelvin") {
        c = build_kelvin_cell_rve(g.R, g.V, g.t);
    } else if (g.kind == "plate") {
        c = build_plate_specimen(g.plate);
    } else if (g.kind == "tessellation") {
        c = import_tessellation(g.path);
        if (g.transform) c = apply_anisotropy_transform(c, g.R);
    } else {
        throw ConfigError("geometry.kind: unknown kind \"" + g.kind + "\"");
    }
    if (g.thickness.mean > 0) c = assign_thickness(c, g.thickness, seed, resampled);
    validate(c);
    return c;
}

Real auto_mesh_h(const CellComplex &c) {
    std::vector<Real> areas;
    areas.reserve(c.walls.size());
    for (std::size_t w = 0; w < c.walls.size(); ++w)
        areas.push_back(wall_area(c, int(w)));
    if (areas.empty()) throw ConfigError("cannot derive a mesh size from an empty complex");
    std::nth_element(areas.begin(), areas.begin() + areas.size() / 2, areas.end());
    return 0.25 * std::sqrt(areas[areas.size() / 2]);
}

std::vector<Real> load_schedule(const LoadConfig &load) {
    if (!load.stretches.empty()) return load.stretches;
    return make_compression_program(0, load.strain_max, load.steps).stretches;
}

} // namespace foamrve
