////////////////////////////////////////////////////////////////////////////////
// fe_mesh.hpp
//
// Triangulation of cell-wall mid-surfaces. Walls are meshed once in their own
// (unwrapped) coordinates; nodes are welded across walls and across periodic
// images through canonical (box-modulo) position keys, so the result is a
// conforming mesh of the torus for periodic complexes. Displacements live on
// corner + edge-midside nodes (quadratic), rotations on element edges
// (nonconforming, one vector per edge).
////////////////////////////////////////////////////////////////////////////////

#pragma once

#include <foamrve/core.hpp>
#include <foamrve/mesostructure.hpp>

#include <array>
#include <vector>

namespace foamrve {

struct MeshEdge {
    int a = -1;        // corner node ids, a < b
    int b = -1;
    int midside = -1;  // midside node id of this edge
    int nelem = 0;     // number of adjacent elements (1 = free boundary)
};

struct ShellElement {
    int wall = -1;
    // corner[i] opposite edge[i]; edge[i] joins corner[(i+1)%3], corner[(i+2)%3]
    std::array<int, 3> corner{{-1, -1, -1}};
    std::array<int, 3> midside{{-1, -1, -1}};
    std::array<int, 3> edge{{-1, -1, -1}};
    std::array<Vec3, 3> Xc{};           // unwrapped reference corner positions
    Mat3 frame = Mat3::Identity();      // columns: in-plane e1, e2, director D
    Real area = 0;
    Real t = 0;                         // wall thickness
};

struct ShellMesh {
    std::vector<Vec3> nodes;            // canonical positions, corners and midsides
    std::vector<MeshEdge> edges;        // one rotation vector DOF per edge
    std::vector<ShellElement> elements;
    std::vector<int> wall_center;       // per wall: corner node nearest the wall centroid
    std::vector<Real> wall_area;        // per wall: summed facet area
    std::vector<Vec3> wall_normal_ref;  // per wall: reference unit normal
    std::vector<int> free_edges;        // edge ids with exactly one adjacent element
    Vec3 box = Vec3::Zero();
    std::array<bool, 3> periodic{{false, false, false}};
    Real h_min = 0, h_mean = 0, h_max = 0;  // element edge length statistics

    std::size_t n_wdofs() const { return 3 * nodes.size(); }
    std::size_t n_thdofs() const { return 3 * edges.size(); }
};

// Conforming triangulation of all wall mid-surfaces at target element size h.
ShellMesh mesh_complex(const CellComplex &c, Real h_target);

// Node ids whose canonical position lies on any box face (within tol).
std::vector<int> nodes_on_box_faces(const ShellMesh &mesh, Real tol = 1e-7);

// Node ids (corners and midsides) lying on the free boundary contour.
std::vector<int> boundary_contour_nodes(const ShellMesh &mesh);

// Node nearest the given point (canonical positions, ties to the lower id).
int node_nearest(const ShellMesh &mesh, const Vec3 &p);

} // namespace foamrve
