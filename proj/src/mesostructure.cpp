////////////////////////////////////////////////////////////////////////////////
// mesostructure.cpp
////////////////////////////////////////////////////////////////////////////////

#include <foamrve/mesostructure.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace foamrve {

namespace {

using nlohmann::json;

std::string wall_tag(int w) { return "wall " + std::to_string(w); }
std::string cell_tag(int c) { return "cell " + std::to_string(c); }

std::vector<Vec3> wall_points(const CellComplex &c, int w) {
    std::vector<Vec3> pts;
    pts.reserve(c.walls[w].loop.size());
    for (int v : c.walls[w].loop) pts.push_back(c.vertices[v]);
    return pts;
}

// Half the closed boundary integral of x cross dx: exact polygon vector area.
Vec3 vector_area(const std::vector<Vec3> &pts) {
    Vec3 s = Vec3::Zero();
    for (std::size_t i = 0; i < pts.size(); ++i)
        s += pts[i].cross(pts[(i + 1) % pts.size()]);
    return 0.5 * s;
}

Vec3 polygon_centroid(const std::vector<Vec3> &pts) {
    // Area-weighted fan about the vertex mean; exact for planar polygons.
    Vec3 m = Vec3::Zero();
    for (const Vec3 &p : pts) m += p;
    m /= Real(pts.size());
    const Vec3 n = vector_area(pts).normalized();
    Vec3 num = Vec3::Zero();
    Real den = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec3 &a = pts[i], &b = pts[(i + 1) % pts.size()];
        const Real w = 0.5 * n.dot((a - m).cross(b - m));
        num += w * (m + a + b) / 3.0;
        den += w;
    }
    return den != 0 ? Vec3(num / den) : m;
}

Vec3 face_shift_mm(const CellComplex &c, const CellFace &f) {
    return f.shift.cast<Real>().cwiseProduct(c.box);
}

// Signed volume contribution of one face incidence: fan triangulation from
// the face centroid, tetrahedra against the origin.
Real face_volume_contribution(const CellComplex &c, const CellFace &f) {
    std::vector<Vec3> pts = wall_points(c, f.wall);
    const Vec3 s = face_shift_mm(c, f);
    for (Vec3 &p : pts) p += s;
    const Vec3 m = polygon_centroid(pts);
    Real vol = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec3 &a = pts[i], &b = pts[(i + 1) % pts.size()];
        vol += m.dot(a.cross(b)) / 6.0;
    }
    return Real(f.orient) * vol;
}

// Registers vertices exactly once per distinct coordinate triple.
class VertexPool {
public:
    explicit VertexPool(CellComplex &c) : c_(c) {}
    int add(const Vec3 &p) {
        const std::array<long long, 3> key = {llround_q(p.x()), llround_q(p.y()), llround_q(p.z())};
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        const int id = int(c_.vertices.size());
        c_.vertices.push_back(p);
        index_.emplace(key, id);
        return id;
    }

private:
    static long long llround_q(Real x) { return std::llround(x * 1e12); }
    CellComplex &c_;
    std::map<std::array<long long, 3>, int> index_;
};

void add_face(CellComplex &c, int cell, int wall, const Eigen::Vector3i &shift) {
    // Orientation is resolved against the cell center in a second pass once
    // all faces of the cell exist.
    CellFace f;
    f.wall = wall;
    f.shift = shift;
    c.cells[cell].push_back(f);
}

void orient_faces_outward(CellComplex &c) {
    for (std::size_t i = 0; i < c.cells.size(); ++i) {
        Vec3 center = Vec3::Zero();
        Real area = 0;
        for (const CellFace &f : c.cells[i]) {
            std::vector<Vec3> pts = wall_points(c, f.wall);
            const Vec3 s = face_shift_mm(c, f);
            for (Vec3 &p : pts) p += s;
            const Real a = vector_area(pts).norm();
            center += a * polygon_centroid(pts);
            area += a;
        }
        if (area > 0) center /= area;
        for (CellFace &f : c.cells[i]) {
            const Vec3 q = wall_centroid(c, f.wall) + face_shift_mm(c, f);
            f.orient = wall_normal(c, f.wall).dot(q - center) >= 0 ? 1 : -1;
        }
    }
}

void sync_wall_cell_lists(CellComplex &c) {
    for (Wall &w : c.walls) w.cells.clear();
    for (std::size_t i = 0; i < c.cells.size(); ++i)
        for (const CellFace &f : c.cells[i]) c.walls[f.wall].cells.push_back(int(i));
    for (Wall &w : c.walls) std::sort(w.cells.begin(), w.cells.end());
}

void check_idealized_args(Real R, Real V, Real t) {
    if (!(R >= 1.0)) throw ConfigError("idealized RVE: anisotropy R must be >= 1, got " + std::to_string(R));
    if (!(V > 0)) throw ConfigError("idealized RVE: box volume must be positive");
    if (!(t > 0)) throw ConfigError("idealized RVE: wall thickness must be positive");
}

void check_thin_shell(Real t, const Vec3 &L) {
    if (t >= 0.1 * L.minCoeff())
        throw ConfigError("wall thickness " + std::to_string(t) +
                          " mm violates the thin-shell assumption (>= 0.1 of the smallest box dimension " +
                          std::to_string(L.minCoeff()) + " mm)");
}

} // namespace

Real wall_area(const CellComplex &c, int wall) { return vector_area(wall_points(c, wall)).norm(); }

Vec3 wall_centroid(const CellComplex &c, int wall) { return polygon_centroid(wall_points(c, wall)); }

Vec3 wall_normal(const CellComplex &c, int wall) {
    const Vec3 a = vector_area(wall_points(c, wall));
    const Real n = a.norm();
    if (!(n > 0)) throw MeshError(wall_tag(wall) + ": degenerate (zero-area) polygon");
    return a / n;
}

std::pair<Vec3, Vec3> wall_frame(const CellComplex &c, int wall) {
    const Vec3 n = wall_normal(c, wall);
    const std::vector<Vec3> pts = wall_points(c, wall);
    Vec3 e1 = Vec3::Zero();
    for (std::size_t i = 1; i < pts.size() && e1.norm() < 1e-12; ++i) e1 = pts[i] - pts[0];
    e1 = (e1 - e1.dot(n) * n).normalized();
    return {e1, n.cross(e1)};
}

Real cell_volume(const CellComplex &c, int cell) {
    Real v = 0;
    for (const CellFace &f : c.cells[cell]) v += face_volume_contribution(c, f);
    return v;
}

CellComplex build_rect_cell_rve(Real R, Real V, Real t) {
    check_idealized_args(R, V, t);
    const Real a = std::cbrt(V), s = std::cbrt(R);
    const Vec3 L(a / s, a / s, a * s * s);
    check_thin_shell(t, L);

    CellComplex c;
    c.box = L;
    c.periodic = {true, true, true};
    VertexPool pool(c);
    auto corner = [&](int i, int j, int k) {
        return pool.add(Vec3(i * L.x(), j * L.y(), k * L.z()));
    };
    // The three walls on the lower box faces; the opposite faces are their
    // periodic translates and enter through shifted cell faces.
    c.walls.resize(3);
    c.walls[0].loop = {corner(0, 0, 0), corner(0, 1, 0), corner(0, 1, 1), corner(0, 0, 1)}; // +x normal
    c.walls[1].loop = {corner(0, 0, 0), corner(0, 0, 1), corner(1, 0, 1), corner(1, 0, 0)}; // +y normal
    c.walls[2].loop = {corner(0, 0, 0), corner(1, 0, 0), corner(1, 1, 0), corner(0, 1, 0)}; // +z normal
    for (Wall &w : c.walls) w.t = t;

    c.cells.resize(1);
    for (int i = 0; i < 3; ++i) {
        add_face(c, 0, i, Eigen::Vector3i::Zero());
        add_face(c, 0, i, Eigen::Vector3i::Unit(i));
    }
    orient_faces_outward(c);
    sync_wall_cell_lists(c);
    validate(c);
    return c;
}

CellComplex build_kelvin_cell_rve(Real R, Real V, Real t) {
    check_idealized_args(R, V, t);
    const Real a = std::cbrt(V), s = std::cbrt(R);
    check_thin_shell(t, Vec3(a / s, a / s, a * s * s));

    // Build the isotropic complex on the cube [0,a]^3, then stretch. Two
    // truncated octahedra per box: the corner cell (wrapped around the box
    // corners) and the center cell at (a/2, a/2, a/2).
    CellComplex c;
    c.box = Vec3(a, a, a);
    c.periodic = {true, true, true};
    VertexPool pool(c);
    c.cells.resize(2);
    const int kCorner = 0, kCenter = 1;

    // Eight hexagons of the corner cell, each translated to its intact
    // wrapped position inside the box. Every one of them also bounds the
    // center cell directly.
    const Real q = a / 4;
    for (int s1 : {1, -1})
        for (int s2 : {1, -1})
            for (int s3 : {1, -1}) {
                const Vec3 sg{Real(s1), Real(s2), Real(s3)};
                const Eigen::Vector3i wrap(s1 < 0 ? 1 : 0, s2 < 0 ? 1 : 0, s3 < 0 ? 1 : 0);
                const Vec3 off = wrap.cast<Real>() * a;
                std::array<Vec3, 6> hex = {Vec3(2 * q, q, 0), Vec3(q, 2 * q, 0),
                                           Vec3(0, 2 * q, q), Vec3(0, q, 2 * q),
                                           Vec3(q, 0, 2 * q), Vec3(2 * q, 0, q)};
                Wall w;
                w.t = t;
                for (const Vec3 &p : hex) w.loop.push_back(pool.add(off + sg.cwiseProduct(p)));
                const int id = int(c.walls.size());
                c.walls.push_back(std::move(w));
                add_face(c, kCorner, id, -wrap);
                add_face(c, kCenter, id, Eigen::Vector3i::Zero());
            }

    // Three squares of the center cell sitting on the lower box faces, and
    // three squares of the corner cell straddling the box axes. Both kinds
    // bound their cell on two opposite sides through a lattice shift.
    for (int ax = 0; ax < 3; ++ax) {
        const int u = (ax + 1) % 3, v = (ax + 2) % 3;
        Wall face_sq; // center-cell square on the box face x_ax = 0
        face_sq.t = t;
        Wall axis_sq; // corner-cell square around the box axis at x_ax = a/2
        axis_sq.t = t;
        constexpr int du[4] = {1, 0, -1, 0}, dv[4] = {0, 1, 0, -1};
        for (int k = 0; k < 4; ++k) {
            Vec3 pf = Vec3::Zero(), pa = Vec3::Zero();
            pf[ax] = 0;
            pf[u] = a / 2 + q * du[k];
            pf[v] = a / 2 + q * dv[k];
            pa[ax] = a / 2;
            pa[u] = q * du[k];
            pa[v] = q * dv[k];
            face_sq.loop.push_back(pool.add(pf));
            axis_sq.loop.push_back(pool.add(pa));
        }
        const int fid = int(c.walls.size());
        c.walls.push_back(std::move(face_sq));
        add_face(c, kCenter, fid, Eigen::Vector3i::Zero());
        add_face(c, kCenter, fid, Eigen::Vector3i::Unit(ax));
        const int aid = int(c.walls.size());
        c.walls.push_back(std::move(axis_sq));
        add_face(c, kCorner, aid, Eigen::Vector3i::Zero());
        add_face(c, kCorner, aid, -Eigen::Vector3i::Unit(ax));
    }

    orient_faces_outward(c);
    sync_wall_cell_lists(c);
    if (R != 1.0) c = apply_anisotropy_transform(c, R);
    validate(c);
    return c;
}

CellComplex build_plate_specimen(const PlateSpec &spec) {
    if (!(spec.L_w > 0 && spec.B_w > 0 && spec.t > 0))
        throw ConfigError("plate specimen: L_w, B_w and t must be positive");
    if (spec.h0 < 0) throw ConfigError("plate specimen: curvature amplitude h0 must be >= 0");
    if (spec.h0 > 0.5 * std::min(spec.L_w, spec.B_w))
        throw ConfigError("plate specimen: h0 = " + std::to_string(spec.h0) +
                          " mm exceeds half the smallest in-plane dimension (degenerate geometry)");
    CellComplex c;
    c.box = Vec3(spec.L_w, spec.B_w, spec.t);
    c.periodic = {false, false, false};
    VertexPool pool(c);
    Wall w;
    w.t = spec.t;
    w.bubble_h0 = spec.h0;
    w.loop = {pool.add(Vec3(0, 0, 0)), pool.add(Vec3(spec.L_w, 0, 0)),
              pool.add(Vec3(spec.L_w, spec.B_w, 0)), pool.add(Vec3(0, spec.B_w, 0))};
    c.walls.push_back(std::move(w));
    validate(c);
    return c;
}

CellComplex apply_anisotropy_transform(const CellComplex &c, Real R) {
    if (!(R > 0)) throw ConfigError("anisotropy transform: R must be positive");
    const Real s = std::cbrt(R);
    const Vec3 d(1.0 / s, 1.0 / s, s * s);
    CellComplex out = c;
    for (Vec3 &v : out.vertices) v = v.cwiseProduct(d);
    out.box = out.box.cwiseProduct(d);
    return out;
}

CellComplex assign_thickness(const CellComplex &c, const DistributionSpec &spec,
                             std::uint64_t seed, std::uint64_t *resampled) {
    if (spec.kind != DistKind::Constant && spec.kind != DistKind::Gamma)
        throw ConfigError("thickness assignment supports constant or gamma distributions");
    CellComplex out = c;
    std::uint64_t rejected = 0;
    for (std::size_t w = 0; w < out.walls.size(); ++w)
        out.walls[w].t = sample_one(spec, seed, w, &rejected);
    if (resampled) *resampled = rejected;
    return out;
}

CellMetrics compute_metrics(const CellComplex &c) {
    CellMetrics m;
    m.N_v = c.cells.size();
    Real wall_volume = 0;
    for (std::size_t w = 0; w < c.walls.size(); ++w) {
        const Real A = wall_area(c, int(w));
        if (!(A > 0)) throw MeshError(wall_tag(int(w)) + ": degenerate (zero-area) wall");
        wall_volume += c.walls[w].t * A;
    }
    const Real box_volume = c.box.prod();
    if (!(box_volume > 0)) throw MeshError("box volume must be positive");
    m.rel_density = wall_volume / box_volume;
    if (!(m.rel_density > 0 && m.rel_density < 1))
        throw MeshError("relative density " + std::to_string(m.rel_density) + " outside (0,1)");

    Real R_sum = 0;
    for (std::size_t i = 0; i < c.cells.size(); ++i) {
        CellMetrics::PerCell pc;
        Vec3 lo = Vec3::Constant(std::numeric_limits<Real>::infinity()), hi = -lo;
        for (const CellFace &f : c.cells[i]) {
            const Vec3 s = face_shift_mm(c, f);
            for (int v : c.walls[f.wall].loop) {
                lo = lo.cwiseMin(c.vertices[v] + s);
                hi = hi.cwiseMax(c.vertices[v] + s);
            }
        }
        pc.L_v = hi - lo;
        pc.V_v = cell_volume(c, int(i));
        pc.d_v = std::cbrt(6.0 * pc.V_v / EIGEN_PI);
        pc.R_v31 = pc.L_v.z() / pc.L_v.x();
        pc.R_v32 = pc.L_v.z() / pc.L_v.y();
        pc.R_v = std::sqrt(pc.R_v31 * pc.R_v32);
        R_sum += pc.R_v;
        m.cell.push_back(pc);
    }
    m.R = c.cells.empty() ? 1.0 : R_sum / Real(c.cells.size());
    return m;
}

void validate(const CellComplex &c) {
    if (!(c.box.array() > 0).all()) throw MeshError("box dimensions must be positive");
    for (std::size_t i = 0; i < c.vertices.size(); ++i)
        if (!c.vertices[i].allFinite())
            throw MeshError("vertex " + std::to_string(i) + ": non-finite coordinates");

    for (std::size_t w = 0; w < c.walls.size(); ++w) {
        const Wall &wall = c.walls[w];
        if (wall.loop.size() < 3) throw MeshError(wall_tag(int(w)) + ": loop has fewer than 3 vertices");
        std::vector<int> sorted = wall.loop;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw MeshError(wall_tag(int(w)) + ": loop repeats a vertex");
        for (int v : wall.loop)
            if (v < 0 || v >= int(c.vertices.size()))
                throw MeshError(wall_tag(int(w)) + ": vertex id " + std::to_string(v) + " out of range");
        if (!(wall.t > 0)) throw MeshError(wall_tag(int(w)) + ": thickness must be positive");
        if (!(wall_area(c, int(w)) > 0)) throw MeshError(wall_tag(int(w)) + ": degenerate (zero-area) wall");
    }

    if (c.cells.empty()) return; // plate specimens carry no volumetric cells

    std::vector<std::vector<int>> incid(c.walls.size());
    for (std::size_t i = 0; i < c.cells.size(); ++i) {
        if (c.cells[i].empty()) throw MeshError(cell_tag(int(i)) + ": has no walls");
        for (const CellFace &f : c.cells[i]) {
            if (f.wall < 0 || f.wall >= int(c.walls.size()))
                throw MeshError(cell_tag(int(i)) + ": wall id " + std::to_string(f.wall) + " out of range");
            if (f.orient != 1 && f.orient != -1)
                throw MeshError(cell_tag(int(i)) + ": face orientation must be +1 or -1");
            incid[f.wall].push_back(int(i));
        }
    }
    for (std::size_t w = 0; w < c.walls.size(); ++w) {
        if (incid[w].size() < 1 || incid[w].size() > 2)
            throw MeshError(wall_tag(int(w)) + ": adjacent to " + std::to_string(incid[w].size()) +
                            " cell sides, expected 1 (boundary) or 2 (interior)");
        std::vector<int> expect = c.walls[w].cells;
        std::sort(incid[w].begin(), incid[w].end());
        std::sort(expect.begin(), expect.end());
        if (expect != incid[w])
            throw MeshError(wall_tag(int(w)) + ": stored cell adjacency disagrees with the cell face lists");
    }

    Real volume_sum = 0;
    for (std::size_t i = 0; i < c.cells.size(); ++i) {
        Vec3 closure = Vec3::Zero();
        Real area_sum = 0;
        for (const CellFace &f : c.cells[i]) {
            const Vec3 va = vector_area(wall_points(c, f.wall));
            closure += Real(f.orient) * va;
            area_sum += va.norm();
        }
        if (closure.norm() > 1e-9 * area_sum)
            throw MeshError(cell_tag(int(i)) + ": wall set is not watertight (vector-area closure " +
                            std::to_string(closure.norm() / area_sum) + " relative)");
        const Real v = cell_volume(c, int(i));
        if (!(v > 0)) throw MeshError(cell_tag(int(i)) + ": non-positive volume");
        volume_sum += v;
    }
    const Real box_volume = c.box.prod();
    if (std::abs(volume_sum - box_volume) > 1e-9 * box_volume)
        throw MeshError("cell volumes sum to " + std::to_string(volume_sum) +
                        " mm^3, expected the box volume " + std::to_string(box_volume) + " mm^3");
}

namespace {

[[noreturn]] void io_fail(const std::string &origin, const std::string &what) {
    throw IOError(origin + ": " + what);
}

const json &require_field(const json &j, const char *key, const std::string &origin,
                          const std::string &where) {
    auto it = j.find(key);
    if (it == j.end()) io_fail(origin, where + ": missing required field \"" + key + "\"");
    return *it;
}

} // namespace

CellComplex parse_cell_complex(const std::string &json_text, const std::string &origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        // Translate the byte offset into a line number for the diagnostic.
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < json_text.size(); ++i)
            if (json_text[i] == '\n') ++line;
        io_fail(origin, "JSON parse error at line " + std::to_string(line) + ": " + e.what());
    }

    const std::string fmt = require_field(j, "format", origin, "document").get<std::string>();
    if (fmt != "foamrve-cc/1")
        io_fail(origin, "field \"format\": expected \"foamrve-cc/1\", got \"" + fmt + "\"");
    if (j.contains("units") && j["units"].get<std::string>() != "mm")
        io_fail(origin, "field \"units\": this tool works in mm");

    CellComplex c;
    try {
        const json &box = require_field(j, "box", origin, "document");
        if (!box.is_array() || box.size() != 3) io_fail(origin, "field \"box\": expected [L1,L2,L3]");
        for (int i = 0; i < 3; ++i) c.box[i] = box[i].get<Real>();

        if (j.contains("periodic")) {
            const json &per = j["periodic"];
            if (!per.is_array() || per.size() != 3)
                io_fail(origin, "field \"periodic\": expected [bool,bool,bool]");
            for (int i = 0; i < 3; ++i) c.periodic[i] = per[i].get<bool>();
        }

        for (const json &v : require_field(j, "vertices", origin, "document")) {
            if (!v.is_array() || v.size() != 3)
                io_fail(origin, "field \"vertices\": each entry must be [x,y,z]");
            c.vertices.emplace_back(v[0].get<Real>(), v[1].get<Real>(), v[2].get<Real>());
        }

        std::size_t wi = 0;
        for (const json &w : require_field(j, "walls", origin, "document")) {
            const std::string where = "walls[" + std::to_string(wi) + "]";
            Wall wall;
            for (const json &v : require_field(w, "loop", origin, where)) {
                const int id = v.get<int>();
                if (id < 0 || id >= int(c.vertices.size()))
                    io_fail(origin, where + ".loop: vertex id " + std::to_string(id) + " out of range (" +
                                        std::to_string(c.vertices.size()) + " vertices)");
                wall.loop.push_back(id);
            }
            wall.t = require_field(w, "t", origin, where).get<Real>();
            if (w.contains("cells"))
                for (const json &cc : w["cells"]) wall.cells.push_back(cc.get<int>());
            if (w.contains("bubble_h0")) wall.bubble_h0 = w["bubble_h0"].get<Real>();
            c.walls.push_back(std::move(wall));
            ++wi;
        }

        if (j.contains("faces")) {
            // Extended form carrying lattice shifts for periodic complexes.
            std::size_t ci = 0;
            for (const json &cell : j["faces"]) {
                std::vector<CellFace> faces;
                for (const json &fj : cell) {
                    CellFace f;
                    f.wall = require_field(fj, "wall", origin, "faces[" + std::to_string(ci) + "]").get<int>();
                    if (fj.contains("shift"))
                        for (int k = 0; k < 3; ++k) f.shift[k] = fj["shift"][k].get<int>();
                    if (fj.contains("orient")) f.orient = fj["orient"].get<int>();
                    faces.push_back(f);
                }
                c.cells.push_back(std::move(faces));
                ++ci;
            }
        } else if (j.contains("cells")) {
            std::size_t ci = 0;
            for (const json &cell : j["cells"]) {
                std::vector<CellFace> faces;
                for (const json &wid : cell) {
                    CellFace f;
                    f.wall = wid.get<int>();
                    if (f.wall < 0 || f.wall >= int(c.walls.size()))
                        io_fail(origin, "cells[" + std::to_string(ci) + "]: wall id " +
                                            std::to_string(f.wall) + " out of range");
                    faces.push_back(f);
                }
                c.cells.push_back(std::move(faces));
                ++ci;
            }
            orient_faces_outward(c);
        }
    } catch (const json::exception &e) {
        io_fail(origin, std::string("malformed field: ") + e.what());
    }

    if (!c.cells.empty()) sync_wall_cell_lists(c);
    validate(c);
    return c;
}

CellComplex import_tessellation(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cell_complex(buf.str(), path);
}

std::string serialize_cell_complex(const CellComplex &c) {
    json j;
    j["format"] = "foamrve-cc/1";
    j["units"] = "mm";
    j["box"] = {c.box.x(), c.box.y(), c.box.z()};
    j["periodic"] = {c.periodic[0], c.periodic[1], c.periodic[2]};
    json verts = json::array();
    for (const Vec3 &v : c.vertices) verts.push_back({v.x(), v.y(), v.z()});
    j["vertices"] = std::move(verts);
    json walls = json::array();
    for (const Wall &w : c.walls) {
        json wj;
        wj["loop"] = w.loop;
        wj["t"] = w.t;
        wj["cells"] = w.cells;
        if (w.bubble_h0 != 0) wj["bubble_h0"] = w.bubble_h0;
        walls.push_back(std::move(wj));
    }
    j["walls"] = std::move(walls);
    json cells = json::array(), faces = json::array();
    bool any_shift = false;
    for (const std::vector<CellFace> &cell : c.cells) {
        json ids = json::array(), fs = json::array();
        for (const CellFace &f : cell) {
            ids.push_back(f.wall);
            fs.push_back({{"wall", f.wall},
                          {"shift", {f.shift[0], f.shift[1], f.shift[2]}},
                          {"orient", f.orient}});
            any_shift = any_shift || f.shift != Eigen::Vector3i::Zero() || f.orient != 1;
        }
        cells.push_back(std::move(ids));
        faces.push_back(std::move(fs));
    }
    j["cells"] = std::move(cells);
    if (any_shift) j["faces"] = std::move(faces);
    return j.dump(2) + "\n";
}

void write_cell_complex(const CellComplex &c, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError(path + ": cannot open file for writing");
    out << serialize_cell_complex(c);
    if (!out) throw IOError(path + ": write failed");
}

} // namespace foamrve
