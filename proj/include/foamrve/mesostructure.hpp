////////////////////////////////////////////////////////////////////////////////
// mesostructure.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Foam mesostructure cell complexes: idealized rectangular and Kelvin cell
//  RVEs, single-wall plate specimens, tessellation import/export, anisotropy
//  transforms, stochastic thickness assignment and geometry metrics.
//
//  A complex stores each geometrically distinct wall exactly once. Periodic
//  complexes reference walls from cells through (wall, lattice shift,
//  orientation) faces, so a wall wrapped around the box boundary can bound
//  the same cell on two sides. Face lists are what make watertightness and
//  cell volumes well defined; the plain wall->cells adjacency is kept in
//  sync for the exchange format.
*/
////////////////////////////////////////////////////////////////////////////////
#ifndef FOAMRVE_MESOSTRUCTURE_HPP
#define FOAMRVE_MESOSTRUCTURE_HPP

#include <foamrve/core.hpp>
#include <foamrve/stochastics.hpp>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace foamrve {

struct Wall {
    std::vector<int> loop; // vertex ids, consistent winding
    Real t = 0;            // thickness [mm]
    std::vector<int> cells; // adjacent cell ids (duplicated for self-wrap)
    Real bubble_h0 = 0;    // out-of-plane bubble amplitude (plate walls) [mm]
};

// One incidence of a wall on a cell boundary. The wall polygon is translated
// by shift (in box units) and its stored winding normal times orient points
// outward of the cell.
struct CellFace {
    int wall = -1;
    Eigen::Vector3i shift = Eigen::Vector3i::Zero();
    int orient = 1;
};

struct CellComplex {
    std::vector<Vec3> vertices;            // [mm]
    std::vector<Wall> walls;
    std::vector<std::vector<CellFace>> cells;
    Vec3 box = Vec3::Zero();               // (L1, L2, L3) [mm]
    std::array<bool, 3> periodic{false, false, false};
};

struct CellMetrics {
    struct PerCell {
        Vec3 L_v = Vec3::Zero(); // axis-aligned bounding dimensions [mm]
        Real V_v = 0;            // cell volume [mm^3]
        Real d_v = 0;            // equivalent diameter [mm]
        Real R_v31 = 0, R_v32 = 0, R_v = 0;
    };
    std::vector<PerCell> cell;
    Real R = 1;            // mean cell shape anisotropy
    Real rel_density = 0;  // rho/rho_r
    std::size_t N_v = 0;   // cell count
};

struct PlateSpec {
    Real L_w = 0.4, B_w = 0.4, t = 0.01; // [mm]
    Real h0 = 0;                         // curvature amplitude [mm]
    Real R_w() const { return L_w / B_w; }
    // Bubble offset at centered in-plane coordinates (l, b).
    Real h(Real l, Real b) const {
        const Real xi = 2.0 * l / L_w, et = 2.0 * b / B_w;
        return h0 * (1.0 - xi * xi) * (1.0 - et * et);
    }
};

// Idealized periodic RVEs. Box dimensions follow the anisotropy scaling
// L1 = L2 = V^(1/3) R^(-1/3), L3 = V^(1/3) R^(2/3); volume and thickness are
// preserved under R.
CellComplex build_rect_cell_rve(Real R, Real V, Real t);
CellComplex build_kelvin_cell_rve(Real R, Real V, Real t);

// Single wall spanning [0,L]x[0,B] at z = 0, box (L, B, t), no cells. The
// mid-surface is lifted by the bubble offset at mesh time when h0 > 0.
CellComplex build_plate_specimen(const PlateSpec &spec);

// Exchange format "foamrve-cc/1" (JSON).
CellComplex import_tessellation(const std::string &path);
CellComplex parse_cell_complex(const std::string &json_text, const std::string &origin);
std::string serialize_cell_complex(const CellComplex &c);
void write_cell_complex(const CellComplex &c, const std::string &path);

// Volume-preserving uniform transform diag(R^(-1/3), R^(-1/3), R^(2/3)).
CellComplex apply_anisotropy_transform(const CellComplex &c, Real R);

// Independent per-wall draws, deterministic in (seed, wall index).
CellComplex assign_thickness(const CellComplex &c, const DistributionSpec &spec,
                             std::uint64_t seed, std::uint64_t *resampled = nullptr);

CellMetrics compute_metrics(const CellComplex &c);

// Checks all structural invariants; throws MeshError naming the offending
// wall or cell. Complexes without cells (plate specimens) skip the cell
// closure and volume checks.
void validate(const CellComplex &c);

// Geometry helpers (walls are planar polygons).
Real wall_area(const CellComplex &c, int wall);
Vec3 wall_centroid(const CellComplex &c, int wall);
Vec3 wall_normal(const CellComplex &c, int wall); // unit, stored winding
// Orthonormal in-plane frame (e1, e2) with e1 x e2 = wall normal.
std::pair<Vec3, Vec3> wall_frame(const CellComplex &c, int wall);
Real cell_volume(const CellComplex &c, int cell);

} // namespace foamrve

#endif
