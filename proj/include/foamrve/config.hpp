////////////////////////////////////////////////////////////////////////////////
// config.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Run configuration: the schema-versioned JSON config (foamrve-config/1),
//  named presets, validation, canonical serialization and the config hash
//  used by run manifests. All physical fields are mm/N/MPa; a config must
//  declare that convention in its mandatory `units` field.
*/
////////////////////////////////////////////////////////////////////////////////
#ifndef FOAMRVE_CONFIG_HPP
#define FOAMRVE_CONFIG_HPP

#include <foamrve/core.hpp>
#include <foamrve/effective.hpp>
#include <foamrve/fe_solve.hpp>
#include <foamrve/homogenize.hpp>
#include <foamrve/mesostructure.hpp>
#include <foamrve/shell_model.hpp>
#include <foamrve/stochastics.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace foamrve {

struct GeometryConfig {
    std::string kind = "rect";   // rect | kelvin | plate | tessellation
    Real R = 1.0;                // cell shape anisotropy (also import transform)
    Real V = 1.0;                // cell volume [mm^3] (rect/kelvin)
    Real t = 0.01;               // wall thickness [mm]
    PlateSpec plate;             // kind == plate
    std::string path;            // kind == tessellation: foamrve-cc/1 file
    bool transform = false;      // apply the R-transform after import
    DistributionSpec thickness;  // applied per wall when mean > 0
    DistributionSpec diameter;   // target d_v law, recorded for reports
};

struct LoadConfig {
    std::vector<int> directions{2};  // compression axes, each in {0,1,2}
    Real strain_max = 0.03;
    int steps = 30;
    std::vector<Real> stretches;     // explicit schedule wins over strain_max/steps
    int pin_normal_axis = -1;        // plate specimens: pin the out-of-plane row
};

struct OutputConfig {
    std::string dir = "out";
    bool plots = false;
    bool checkpoints = true;
    bool solver_log = true;
};

struct SweepConfig {
    std::string axis;          // rve_size | seed | R
    std::vector<Real> values;  // empty -> no-op sweep
};

struct RunConfig {
    std::string units = "mm-N-MPa";  // the only accepted value
    std::uint64_t seed = 0;
    GeometryConfig geometry;
    BaseMaterial material;
    SolverSettings solver;
    Real mesh_h = 0;  // element target size [mm]; 0 derives one from wall areas
    LoadConfig load;
    BoundaryCondition bc;
    YieldCriterion yield;
    OutputConfig outputs;
    SweepConfig sweep;
};

// Parse and validate a config document; origin labels error messages.
RunConfig parse_config(const std::string &json_text, const std::string &origin);
RunConfig load_config(const std::string &path);

// Canonical (key-sorted, locale-free) dump; equal configs serialize equally.
std::string serialize_config(const RunConfig &cfg);

// FNV-1a over the canonical serialization, 16 hex digits.
std::string config_hash(const RunConfig &cfg);

void validate(const RunConfig &cfg);

// Named presets: rect-R<x>, kelvin-R<x>, plate-Rw{1,2}-h0<x> (x = h0/sqrt(A_w)),
// h100-{stst,stct,ctct}, h200-{stst,stct,ctct}. Unknown names throw ConfigError.
RunConfig preset_config(const std::string &name);
std::vector<std::string> preset_examples();

// Build the configured cell complex (validated) including thickness draws.
CellComplex build_geometry(const GeometryConfig &g, std::uint64_t seed,
                           std::uint64_t *resampled = nullptr);

// Fallback element size: a quarter of the median wall span.
Real auto_mesh_h(const CellComplex &c);

// Stretch schedule for one direction.
std::vector<Real> load_schedule(const LoadConfig &load);

} // namespace foamrve

#endif
