////////////////////////////////////////////////////////////////////////////////
// fe_mesh.cpp
////////////////////////////////////////////////////////////////////////////////

#include <foamrve/fe_mesh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <tuple>

namespace foamrve {

namespace {

// Quantized canonical (box-modulo) coordinates. Two points that describe the
// same material point of the torus map to the same key.
struct Key3 {
    std::int64_t k[3];
    bool operator<(const Key3 &o) const {
        if (k[0] != o.k[0]) return k[0] < o.k[0];
        if (k[1] != o.k[1]) return k[1] < o.k[1];
        return k[2] < o.k[2];
    }
    bool operator==(const Key3 &o) const {
        return k[0] == o.k[0] && k[1] == o.k[1] && k[2] == o.k[2];
    }
};

struct EdgeKey {
    int a, b;   // sorted corner node ids
    Key3 mid;   // canonical midpoint key: separates distinct torus edges that
                // happen to share both endpoint nodes
    bool operator<(const EdgeKey &o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return mid < o.mid;
    }
};

class MeshBuilder {
  public:
    MeshBuilder(const CellComplex &c, Real h) : c_(c), h_(h) {
        quantum_ = 1e-7 * c.box.maxCoeff();
        mesh_.box = c.box;
        mesh_.periodic = c.periodic;
        mesh_.wall_center.assign(c.walls.size(), -1);
        mesh_.wall_area.assign(c.walls.size(), 0.0);
        mesh_.wall_normal_ref.resize(c.walls.size());
        center_d2_.assign(c.walls.size(), std::numeric_limits<Real>::max());
    }

    ShellMesh build() {
        Real total_area = 0;
        for (std::size_t w = 0; w < c_.walls.size(); ++w) total_area += wall_area(c_, static_cast<int>(w));
        if (total_area / (0.4 * h_ * h_) > 3e6)
            throw ConfigError("mesh_complex: h_target " + std::to_string(h_) +
                              " would exceed the element budget");

        const bool plate_like = c_.cells.empty() && c_.walls.size() == 1 && c_.walls[0].loop.size() == 4;
        for (std::size_t w = 0; w < c_.walls.size(); ++w) {
            mesh_.wall_normal_ref[w] = wall_normal(c_, static_cast<int>(w));
            if (plate_like)
                mesh_structured(static_cast<int>(w));
            else {
                if (c_.walls[w].bubble_h0 != 0)
                    throw ConfigError("mesh_complex: bubble imperfection requires a single "
                                      "rectangular specimen wall");
                mesh_fan(static_cast<int>(w));
            }
        }
        finalize();
        return std::move(mesh_);
    }

  private:
    struct Canon {
        Key3 key;
        Vec3 pos;
    };

    Canon canonicalize(const Vec3 &p) const {
        Canon out;
        for (int i = 0; i < 3; ++i) {
            Real r = p[i];
            if (mesh_.periodic[i]) r = p[i] - mesh_.box[i] * std::floor(p[i] / mesh_.box[i]);
            std::int64_t k = std::llround(r / quantum_);
            if (mesh_.periodic[i]) {
                const std::int64_t span = std::llround(mesh_.box[i] / quantum_);
                if (k >= span) {
                    k -= span;
                    r -= mesh_.box[i];
                }
            }
            out.key.k[i] = k;
            out.pos[i] = r;
        }
        return out;
    }

    int corner_node(const Vec3 &unwrapped, int wall) {
        const Canon cn = canonicalize(unwrapped);
        auto [it, inserted] = node_ids_.try_emplace(cn.key, static_cast<int>(mesh_.nodes.size()));
        if (inserted) mesh_.nodes.push_back(cn.pos);
        const Real d2 = (unwrapped - centroid_).squaredNorm();
        if (d2 < center_d2_[wall]) {
            center_d2_[wall] = d2;
            mesh_.wall_center[wall] = it->second;
        }
        return it->second;
    }

    void add_triangle(int wall, const Vec3 &p0, const Vec3 &p1, const Vec3 &p2) {
        ShellElement el;
        el.wall = wall;
        el.Xc = {p0, p1, p2};
        el.t = c_.walls[wall].t;
        const Vec3 d1 = p1 - p0, d2 = p2 - p0;
        const Vec3 cr = d1.cross(d2);
        el.area = 0.5 * cr.norm();
        if (!(el.area > 1e-10 * d1.norm() * d2.norm()))
            throw MeshError("mesh_complex: degenerate facet on wall " + std::to_string(wall));
        el.frame.col(2) = cr.normalized();
        el.frame.col(0) = d1.normalized();
        el.frame.col(1) = el.frame.col(2).cross(el.frame.col(0));
        for (int i = 0; i < 3; ++i) el.corner[i] = corner_node(el.Xc[i], wall);

        for (int i = 0; i < 3; ++i) {
            const Vec3 &q1 = el.Xc[(i + 1) % 3];
            const Vec3 &q2 = el.Xc[(i + 2) % 3];
            const Vec3 mid = snap_ ? snap_(0.5 * (q1 + q2)) : Vec3(0.5 * (q1 + q2));
            const Canon cm = canonicalize(mid);
            const int na = el.corner[(i + 1) % 3], nb = el.corner[(i + 2) % 3];
            EdgeKey key{std::min(na, nb), std::max(na, nb), cm.key};
            auto [it, inserted] = edge_ids_.try_emplace(key, static_cast<int>(mesh_.edges.size()));
            if (inserted) {
                auto [nit, fresh] = node_ids_.try_emplace(cm.key, static_cast<int>(mesh_.nodes.size()));
                if (!fresh)
                    throw MeshError("mesh_complex: nonconforming subdivision near wall " +
                                    std::to_string(wall));
                mesh_.nodes.push_back(cm.pos);
                mesh_.edges.push_back(MeshEdge{key.a, key.b, nit->second, 0});
            }
            const int eid = it->second;
            el.edge[i] = eid;
            el.midside[i] = mesh_.edges[eid].midside;
            ++mesh_.edges[eid].nelem;
        }
        mesh_.wall_area[wall] += el.area;
        mesh_.elements.push_back(el);
    }

    // Subdivision count of a wall polygon edge, shared across all walls (and
    // periodic images) that carry a congruent copy of it. Keyed by endpoints
    // plus midpoint, since full-span edges wrap both endpoints onto one node.
    int boundary_count(const Vec3 &a, const Vec3 &b) {
        Key3 ka = canonicalize(a).key, kb = canonicalize(b).key;
        if (kb < ka) std::swap(ka, kb);
        const Key3 km = canonicalize(0.5 * (a + b)).key;
        auto [it, inserted] = edge_counts_.try_emplace(std::make_tuple(ka, kb, km), 0);
        if (inserted) it->second = std::max<int>(1, std::lround((b - a).norm() / h_));
        return it->second;
    }

    // Fan mesh of a convex polygon: graded rows between the centroid and the
    // boundary, bridged by greedy parameter matching.
    void mesh_fan(int w) {
        const Wall &wall = c_.walls[w];
        centroid_ = wall_centroid(c_, w);
        snap_ = nullptr;
        const int nv = static_cast<int>(wall.loop.size());
        std::vector<Vec3> V(nv);
        for (int i = 0; i < nv; ++i) V[i] = c_.vertices[wall.loop[i]];

        Real spoke_max = 0;
        for (int i = 0; i < nv; ++i) spoke_max = std::max(spoke_max, (V[i] - centroid_).norm());
        const int M = std::max<int>(1, std::lround(spoke_max / h_));

        for (int i = 0; i < nv; ++i) {
            const Vec3 &A = V[i];
            const Vec3 &B = V[(i + 1) % nv];
            const int n = boundary_count(A, B);
            std::vector<Vec3> prev{centroid_};
            for (int j = 1; j <= M; ++j) {
                const Real s = Real(j) / M;
                const int k = std::max<int>(1, std::lround(Real(n) * j / M));
                const Vec3 L = centroid_ + s * (A - centroid_);
                const Vec3 R = centroid_ + s * (B - centroid_);
                std::vector<Vec3> row(k + 1);
                for (int q = 0; q <= k; ++q) row[q] = L + (Real(q) / k) * (R - L);
                bridge_rows(w, prev, row);
                prev = std::move(row);
            }
        }
    }

    void bridge_rows(int w, const std::vector<Vec3> &P, const std::vector<Vec3> &Q) {
        const int p = static_cast<int>(P.size()) - 1;
        const int q = static_cast<int>(Q.size()) - 1;
        int a = 0, b = 0;
        while (a < p || b < q) {
            const bool advance_b =
                b < q && (a == p || std::int64_t(b + 1) * p <= std::int64_t(a + 1) * q);
            if (advance_b) {
                add_triangle(w, P[a], Q[b], Q[b + 1]);
                ++b;
            } else {
                add_triangle(w, P[a], Q[b], P[a + 1]);
                ++a;
            }
        }
    }

    // Structured grid for a standalone rectangular specimen, with nodes lifted
    // onto the bubble surface when an imperfection amplitude is present.
    void mesh_structured(int w) {
        const Wall &wall = c_.walls[w];
        centroid_ = wall_centroid(c_, w);
        const Vec3 v0 = c_.vertices[wall.loop[0]];
        const Vec3 U = c_.vertices[wall.loop[1]] - v0;
        const Vec3 W = c_.vertices[wall.loop[3]] - v0;
        const Real Lu = U.norm(), Lv = W.norm();
        const Vec3 eu = U / Lu, ev = W / Lv, nrm = wall_normal(c_, w);
        const Real h0 = wall.bubble_h0;
        if (h0 != 0 && std::abs(eu.dot(ev)) > 1e-9)
            throw ConfigError("mesh_complex: bubble imperfection requires a rectangular wall");

        const Vec3 center = centroid_;
        auto lift = [=](Real l, Real b) {
            const Real xi = 2 * l / Lu, eta = 2 * b / Lv;
            return h0 * (1 - xi * xi) * (1 - eta * eta);
        };
        auto surface = [=](const Vec3 &p) {
            const Real l = (p - center).dot(eu), b = (p - center).dot(ev);
            return Vec3(center + l * eu + b * ev + lift(l, b) * nrm);
        };
        snap_ = (h0 != 0) ? std::function<Vec3(const Vec3 &)>(surface) : nullptr;
        if (h0 != 0) centroid_ = surface(centroid_);

        const int n1 = std::max<int>(1, std::lround(Lu / h_));
        const int n2 = std::max<int>(1, std::lround(Lv / h_));
        auto point = [&](int i, int j) {
            Vec3 p = v0 + (Real(i) / n1) * U + (Real(j) / n2) * W;
            if (h0 != 0) p = surface(p);
            return p;
        };
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i) {
                const Vec3 p00 = point(i, j), p10 = point(i + 1, j);
                const Vec3 p11 = point(i + 1, j + 1), p01 = point(i, j + 1);
                if ((i + j) % 2 == 0) {
                    add_triangle(w, p00, p10, p11);
                    add_triangle(w, p00, p11, p01);
                } else {
                    add_triangle(w, p00, p10, p01);
                    add_triangle(w, p10, p11, p01);
                }
            }
        snap_ = nullptr;
    }

    void finalize() {
        Real lo = std::numeric_limits<Real>::max(), hi = 0, sum = 0;
        std::size_t nsides = 0;
        for (const ShellElement &el : mesh_.elements)
            for (int i = 0; i < 3; ++i) {
                const Real len = (el.Xc[(i + 1) % 3] - el.Xc[(i + 2) % 3]).norm();
                lo = std::min(lo, len);
                hi = std::max(hi, len);
                sum += len;
                ++nsides;
            }
        mesh_.h_min = lo;
        mesh_.h_max = hi;
        mesh_.h_mean = sum / Real(nsides);

        for (std::size_t e = 0; e < mesh_.edges.size(); ++e)
            if (mesh_.edges[e].nelem == 1) mesh_.free_edges.push_back(static_cast<int>(e));

        const bool torus = mesh_.periodic[0] && mesh_.periodic[1] && mesh_.periodic[2];
        if (torus && !c_.cells.empty() && !mesh_.free_edges.empty())
            throw MeshError("mesh_complex: periodic complex has " +
                            std::to_string(mesh_.free_edges.size()) +
                            " free mesh edges; the wrap map is not total");
    }

    const CellComplex &c_;
    Real h_;
    Real quantum_;
    ShellMesh mesh_;
    Vec3 centroid_ = Vec3::Zero();
    std::function<Vec3(const Vec3 &)> snap_;
    std::map<Key3, int> node_ids_;
    std::map<EdgeKey, int> edge_ids_;
    std::map<std::tuple<Key3, Key3, Key3>, int> edge_counts_;
    std::vector<Real> center_d2_;
};

} // namespace

ShellMesh mesh_complex(const CellComplex &c, Real h_target) {
    if (!(h_target > 0)) throw ConfigError("mesh_complex: h_target must be positive");
    validate(c);
    return MeshBuilder(c, h_target).build();
}

std::vector<int> nodes_on_box_faces(const ShellMesh &mesh, Real tol) {
    std::vector<int> out;
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
        const Vec3 &p = mesh.nodes[n];
        for (int i = 0; i < 3; ++i)
            if (std::abs(p[i]) <= tol || std::abs(p[i] - mesh.box[i]) <= tol) {
                out.push_back(static_cast<int>(n));
                break;
            }
    }
    return out;
}

std::vector<int> boundary_contour_nodes(const ShellMesh &mesh) {
    std::vector<int> out;
    for (int e : mesh.free_edges) {
        out.push_back(mesh.edges[e].a);
        out.push_back(mesh.edges[e].b);
        out.push_back(mesh.edges[e].midside);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int node_nearest(const ShellMesh &mesh, const Vec3 &p) {
    int best = -1;
    Real best_d2 = std::numeric_limits<Real>::max();
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
        const Real d2 = (mesh.nodes[n] - p).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<int>(n);
        }
    }
    return best;
}

} // namespace foamrve
