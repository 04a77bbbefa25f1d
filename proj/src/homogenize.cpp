////////////////////////////////////////////////////////////////////////////////
// homogenize.cpp
////////////////////////////////////////////////////////////////////////////////

#include <foamrve/homogenize.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace foamrve {

namespace {

using ImageKey = std::array<long, 3>;

ImageKey image_key(const ShellMesh &mesh, const Vec3 &shift) {
    ImageKey k{};
    for (int ax = 0; ax < 3; ++ax)
        k[std::size_t(ax)] = mesh.box[ax] > 0 ? std::lround(shift[ax] / mesh.box[ax]) : 0;
    return k;
}

// Unwrapped midpoint of local edge le (joining corners (le+1)%3, (le+2)%3).
Vec3 edge_midpoint(const ShellElement &el, int le) {
    return 0.5 * (el.Xc[std::size_t((le + 1) % 3)] + el.Xc[std::size_t((le + 2) % 3)]);
}

// Translation pin for families that do not fix boundary displacements: the
// node nearest the box centroid, skipping wall-center nodes so the pin never
// collides with a perturbation load application point.
int pick_pin_node(const ShellMesh &mesh) {
    std::vector<char> is_center(mesh.nodes.size(), 0);
    for (int c : mesh.wall_center)
        if (c >= 0) is_center[std::size_t(c)] = 1;
    const Vec3 target = 0.5 * mesh.box;
    int best = -1;
    Real best_d = 0;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        if (is_center[i]) continue;
        const Real d = (mesh.nodes[i] - target).squaredNorm();
        if (best < 0 || d < best_d) {
            best = int(i);
            best_d = d;
        }
    }
    if (best < 0) throw MeshError("translation pin: no candidate node");
    return best;
}

bool fully_periodic(const ShellMesh &mesh) {
    return mesh.free_edges.empty() && mesh.periodic[0] && mesh.periodic[1] && mesh.periodic[2];
}

// Rotation slot table: slots coincide with edge ids unless periodic rotation
// pairing is off, in which case every unwrapped image of a seam edge gets its
// own slot (appended after the plain edge slots, first-encounter order).
void build_theta_slots(const ShellMesh &mesh, const BoundaryCondition &bc, DofMap &dm) {
    dm.elem_th.assign(3 * mesh.elements.size(), -1);
    if (bc.kind != BcKind::periodic || bc.pair_rotations) {
        for (std::size_t e = 0; e < mesh.elements.size(); ++e)
            for (int le = 0; le < 3; ++le)
                dm.elem_th[3 * e + std::size_t(le)] = mesh.elements[e].edge[le];
        dm.n_thslots = dm.n_edges;
        return;
    }
    std::vector<std::map<ImageKey, int>> seen(mesh.edges.size());
    int next = dm.n_edges;
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const ShellElement &el = mesh.elements[e];
        for (int le = 0; le < 3; ++le) {
            const int edge = el.edge[le];
            const Vec3 xm = edge_midpoint(el, le);
            const ImageKey key =
                image_key(mesh, xm - mesh.nodes[std::size_t(mesh.edges[std::size_t(edge)].midside)]);
            auto &images = seen[std::size_t(edge)];
            auto it = images.find(key);
            if (it == images.end())
                it = images.emplace(key, images.empty() ? edge : next++).first;
            dm.elem_th[3 * e + std::size_t(le)] = it->second;
        }
    }
    dm.n_thslots = next;
}

void count_pairings(const ShellMesh &mesh, DofMap &dm) {
    std::vector<std::set<ImageKey>> node_images(mesh.nodes.size());
    std::vector<std::set<ImageKey>> edge_images(mesh.edges.size());
    for (const ShellElement &el : mesh.elements) {
        for (int i = 0; i < 3; ++i) {
            const Vec3 xm = edge_midpoint(el, i);
            node_images[std::size_t(el.corner[i])].insert(
                image_key(mesh, el.Xc[std::size_t(i)] - mesh.nodes[std::size_t(el.corner[i])]));
            node_images[std::size_t(el.midside[i])].insert(
                image_key(mesh, xm - mesh.nodes[std::size_t(el.midside[i])]));
            edge_images[std::size_t(el.edge[i])].insert(image_key(
                mesh, xm - mesh.nodes[std::size_t(mesh.edges[std::size_t(el.edge[i])].midside)]));
        }
    }
    // Face-pair arithmetic: one pairing per (entity, axis) whose unwrapped
    // images take two key values along that axis, joining two copies across
    // the corresponding face pair. An entity may pair along several axes
    // (corner-cell walls straddle box edges in the Kelvin RVE).
    auto tally = [](const std::set<ImageKey> &images, int &boundary, int &paired) {
        for (int a = 0; a < 3; ++a) {
            std::set<long> vals;
            for (const ImageKey &k : images) vals.insert(k[std::size_t(a)]);
            if (vals.size() >= 2) {
                paired += 3;
                boundary += 3 * int(vals.size());
            }
        }
    };
    for (const auto &im : node_images) tally(im, dm.n_boundary_w_dofs, dm.n_paired_w_dofs);
    for (const auto &im : edge_images) tally(im, dm.n_boundary_th_dofs, dm.n_paired_th_dofs);
}

}  // namespace

std::vector<Eigen::Triplet<Real>> boundary_moment_rows(const ShellMesh &mesh) {
    std::vector<Eigen::Triplet<Real>> rows;
    auto wdof = [](int node, int k) { return 3 * node + k; };

    if (!mesh.free_edges.empty()) {
        // Line integrals over the free contour, exact for quadratic
        // displacements on straight edges (Simpson weights 1:4:1). The
        // in-plane normal points away from the owning element.
        std::vector<std::pair<int, int>> owner(mesh.edges.size(), {-1, -1});
        for (std::size_t e = 0; e < mesh.elements.size(); ++e)
            for (int le = 0; le < 3; ++le)
                owner[std::size_t(mesh.elements[e].edge[le])] = {int(e), le};
        for (int ei : mesh.free_edges) {
            const MeshEdge &edge = mesh.edges[std::size_t(ei)];
            const auto [eid, le] = owner[std::size_t(ei)];
            const ShellElement &el = mesh.elements[std::size_t(eid)];
            const Vec3 a = mesh.nodes[std::size_t(edge.a)];
            const Vec3 b = mesh.nodes[std::size_t(edge.b)];
            const Real len = (b - a).norm();
            Vec3 n = ((b - a) / len).cross(Vec3(el.frame.col(2)));
            if (n.dot(0.5 * (a + b) - mesh.nodes[std::size_t(el.corner[le])]) < 0) n = -n;
            for (int j = 0; j < 3; ++j) {
                if (n[j] == 0) continue;
                const Real c = el.t * n[j] * len / 6.0;
                for (int i = 0; i < 3; ++i) {
                    rows.emplace_back(i + 3 * j, wdof(edge.a, i), c);
                    rows.emplace_back(i + 3 * j, wdof(edge.midside, i), 4.0 * c);
                    rows.emplace_back(i + 3 * j, wdof(edge.b, i), c);
                }
            }
        }
        return rows;
    }

    if (fully_periodic(mesh)) return rows;

    // Area integrals over walls lying in the box faces of a closed complex.
    // Quadratic vertex functions integrate to zero on straight triangles, so
    // only midside nodes carry coefficients (A/3 each); the normal is the
    // outward box-face normal.
    const Real tol = 1e-7 * mesh.box.maxCoeff();
    for (const ShellElement &el : mesh.elements) {
        int axis = -1;
        Real sign = 0;
        for (int ax = 0; ax < 3 && axis < 0; ++ax) {
            bool lo = true, hi = true;
            for (int i = 0; i < 3; ++i) {
                lo = lo && std::abs(el.Xc[std::size_t(i)][ax]) <= tol;
                hi = hi && std::abs(el.Xc[std::size_t(i)][ax] - mesh.box[ax]) <= tol;
            }
            if (lo || hi) {
                axis = ax;
                sign = lo ? -1.0 : 1.0;
            }
        }
        if (axis < 0) continue;
        const Real c = sign * el.t * el.area / 3.0;
        for (int i = 0; i < 3; ++i)
            for (int m = 0; m < 3; ++m)
                rows.emplace_back(i + 3 * axis, wdof(el.midside[std::size_t(m)], i), c);
    }
    return rows;
}

void validate(const MacroState &macro) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (macro.f_prescribed(i, j) && !std::isfinite(macro.F_val(i, j)))
                throw ConfigError("macro state: prescribed F entry is not finite");
            if (!macro.f_prescribed(i, j) && !std::isfinite(macro.P_val(i, j)))
                throw ConfigError("macro state: prescribed P entry is not finite");
        }
    for (int i = 0; i < 3; ++i)
        if (macro.f_prescribed(i, i) && macro.F_val(i, i) <= 0)
            throw ConfigError("macro state: prescribed stretch must be positive");
}

MacroState make_uniaxial_compression(int axis, Real stretch, int pin_normal_axis) {
    if (axis < 0 || axis > 2) throw ConfigError("compression axis must be 0, 1 or 2");
    if (!(stretch > 0)) throw ConfigError("uniaxial stretch must be positive");
    if (pin_normal_axis > 2) throw ConfigError("pin_normal_axis must be -1, 0, 1 or 2");
    if (pin_normal_axis == axis)
        throw ConfigError("pin_normal_axis cannot equal the compression axis");

    MacroState m;
    m.axis = axis;
    m.normal_axis = pin_normal_axis;
    // Base pattern for axis 0: F(0,0) carries the stretch, F(0,1), F(0,2) and
    // F(1,2) are held at zero; the five remaining components answer to zero
    // prescribed stress. Other axes follow by cyclic index permutation.
    const int pattern[4][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 2}};
    for (const auto &ij : pattern)
        m.F_mask[std::size_t((ij[0] + axis) % 3)][std::size_t((ij[1] + axis) % 3)] = true;
    m.F_val = Mat3::Identity();
    m.F_val(axis, axis) = stretch;
    // A flat wall has no stiffness against the out-of-plane row or column of
    // the macroscale gradient (a tilt plus a co-rotated director costs only
    // fourth-order energy), so plate specimens hold both at identity.
    if (pin_normal_axis >= 0)
        for (int k = 0; k < 3; ++k) {
            m.F_mask[std::size_t(pin_normal_axis)][std::size_t(k)] = true;
            m.F_mask[std::size_t(k)][std::size_t(pin_normal_axis)] = true;
        }
    validate(m);
    return m;
}

void set_stretch(MacroState &macro, Real stretch) {
    if (!(stretch > 0)) throw ConfigError("uniaxial stretch must be positive");
    if (macro.axis < 0) throw ConfigError("macro state has no compression axis");
    macro.F_val(macro.axis, macro.axis) = stretch;
}

void validate(const LoadProgram &program) {
    if (program.axis < 0 || program.axis > 2)
        throw ConfigError("load program: axis must be 0, 1 or 2");
    if (program.stretches.empty()) throw ConfigError("load program: empty stretch schedule");
    if (!(program.stretches.front() > 0 && program.stretches.front() <= 1))
        throw ConfigError("load program: stretches must lie in (0, 1]");
    for (std::size_t k = 1; k < program.stretches.size(); ++k)
        if (!(program.stretches[k] > 0 && program.stretches[k] < program.stretches[k - 1]))
            throw ConfigError("load program: stretches must decrease strictly");
}

LoadProgram make_compression_program(int axis, Real strain_max, int n_steps,
                                     int pin_normal_axis) {
    if (!(strain_max > 0 && strain_max < 1))
        throw ConfigError("compression program: strain_max must lie in (0, 1)");
    if (n_steps < 1) throw ConfigError("compression program: need at least one step");
    LoadProgram p;
    p.axis = axis;
    p.pin_normal_axis = pin_normal_axis;
    p.stretches.reserve(std::size_t(n_steps));
    for (int k = 1; k <= n_steps; ++k)
        p.stretches.push_back(1.0 - strain_max * Real(k) / Real(n_steps));
    validate(p);
    return p;
}

std::pair<MacroState, LoadProgram> make_uniaxial_compression(int axis,
                                                             const std::vector<Real> &stretches,
                                                             int pin_normal_axis) {
    LoadProgram p;
    p.axis = axis;
    p.stretches = stretches;
    p.pin_normal_axis = pin_normal_axis;
    validate(p);
    return {make_uniaxial_compression(axis, stretches.front(), pin_normal_axis), p};
}

DofMap apply_bc(const ShellMesh &mesh, const BoundaryCondition &bc, const MacroState &macro) {
    validate(macro);
    DofMap dm;
    dm.n_nodes = int(mesh.nodes.size());
    dm.n_edges = int(mesh.edges.size());
    build_theta_slots(mesh, bc, dm);
    dm.n_full = 3 * dm.n_nodes + 3 * dm.n_thslots + 9;
    dm.fixed.assign(std::size_t(dm.n_full), 0);
    dm.fixed_value = VecX::Zero(dm.n_full);

    const Real tol = 1e-7 * mesh.box.maxCoeff();
    auto fix_w = [&dm](int node, int k) { dm.fixed[std::size_t(dm.wdof(node, k))] = 1; };
    auto fix_theta = [&dm](int slot) {
        for (int k = 0; k < 3; ++k) dm.fixed[std::size_t(dm.thdof(slot, k))] = 1;
    };

    switch (bc.kind) {
        case BcKind::periodic: {
            if (!fully_periodic(mesh))
                throw ConfigError("periodic boundary conditions require a periodic mesh");
            dm.pin_node = pick_pin_node(mesh);
            for (int k = 0; k < 3; ++k) fix_w(dm.pin_node, k);
            break;
        }
        case BcKind::fully_prescribed: {
            if (!mesh.free_edges.empty()) {
                // Plate specimen: full fixity at the loaded ends, out-of-plane
                // deflection and (optionally) rotations fixed along the sides.
                if (macro.axis < 0)
                    throw ConfigError("plate clamp needs a compression axis");
                if (macro.normal_axis < 0)
                    throw ConfigError(
                        "plate specimens need the out-of-plane axis pinned (pin_normal_axis)");
                for (int n : boundary_contour_nodes(mesh)) {
                    const Vec3 &p = mesh.nodes[std::size_t(n)];
                    const bool loaded = std::abs(p[macro.axis]) <= tol ||
                                        std::abs(p[macro.axis] - mesh.box[macro.axis]) <= tol;
                    if (loaded)
                        for (int k = 0; k < 3; ++k) fix_w(n, k);
                    else
                        fix_w(n, macro.normal_axis);
                }
                if (bc.clamp_rotations)
                    for (int ei : mesh.free_edges) fix_theta(ei);
            } else {
                const std::vector<int> bnodes = nodes_on_box_faces(mesh, tol);
                if (bnodes.empty())
                    throw MeshError("fully prescribed boundary: no nodes on the box faces");
                for (int n : bnodes)
                    for (int k = 0; k < 3; ++k) fix_w(n, k);
                if (bc.clamp_rotations) {
                    std::set<int> bset(bnodes.begin(), bnodes.end());
                    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
                        const MeshEdge &edge = mesh.edges[e];
                        if (bset.count(edge.a) && bset.count(edge.b) && bset.count(edge.midside))
                            fix_theta(int(e));
                    }
                }
            }
            break;
        }
        case BcKind::minimal_kinematic: {
            dm.pin_node = pick_pin_node(mesh);
            for (int k = 0; k < 3; ++k) fix_w(dm.pin_node, k);
            dm.C = boundary_moment_rows(mesh);
            if (!dm.C.empty()) {
                dm.n_con = 9;
                dm.con_scale.assign(9, 0.0);
                for (const auto &t : dm.C)
                    dm.con_scale[std::size_t(t.row())] += t.value() * t.value();
                for (Real &s : dm.con_scale) s = std::sqrt(s);
            } else if (!fully_periodic(mesh)) {
                throw ConfigError("minimal kinematic: constraint surface is empty");
            }
            // On a fully periodic mesh the constraint surface is empty: paired
            // boundary contributions cancel identically and the family reduces
            // to the periodic one.
            break;
        }
    }

    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            if (macro.f_prescribed(i, j)) dm.fixed[std::size_t(dm.fdof(i, j))] = 1;

    dm.n_free = 0;
    dm.red.assign(std::size_t(dm.n_full), -1);
    for (int d = 0; d < dm.n_full; ++d)
        if (!dm.fixed[std::size_t(d)]) dm.red[std::size_t(d)] = dm.n_free++;

    set_fixed_values(dm, macro);
    count_pairings(mesh, dm);
    return dm;
}

void set_fixed_values(DofMap &dm, const MacroState &macro) {
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            if (macro.f_prescribed(i, j))
                dm.fixed_value[dm.fdof(i, j)] = macro.F_val(i, j);
}

}  // namespace foamrve
