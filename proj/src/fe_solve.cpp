////////////////////////////////////////////////////////////////////////////////
// fe_solve.cpp
////////////////////////////////////////////////////////////////////////////////

#include <foamrve/fe_solve.hpp>

#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace foamrve {

namespace {

ShellSection section_of(const ShellElement &el, const SolverSettings &st) {
    ShellSection s;
    s.t = el.t;
    s.kappa = st.kappa;
    s.drill_scale = st.drill_scale;
    return s;
}

EVec36 gather_element(const DofMap &dm, const VecX &u, const ShellElement &el, int eid) {
    EVec36 ue;
    const ElementDofs ed = element_dofs(el);
    for (int a = 0; a < 6; ++a)
        ue.segment<3>(3 * a) = u.segment<3>(dm.wdof(ed.wnode[std::size_t(a)], 0));
    for (int e = 0; e < 3; ++e)
        ue.segment<3>(18 + 3 * e) = u.segment<3>(dm.thdof(dm.thslot(eid, e), 0));
    ue.tail<9>() = u.segment<9>(dm.fdof(0, 0));
    return ue;
}

void element_global_dofs(const DofMap &dm, const ShellElement &el, int eid,
                         std::array<int, 36> &g) {
    const ElementDofs ed = element_dofs(el);
    for (int a = 0; a < 6; ++a)
        for (int k = 0; k < 3; ++k)
            g[std::size_t(3 * a + k)] = dm.wdof(ed.wnode[std::size_t(a)], k);
    for (int e = 0; e < 3; ++e)
        for (int k = 0; k < 3; ++k)
            g[std::size_t(18 + 3 * e + k)] = dm.thdof(dm.thslot(eid, e), k);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) g[std::size_t(27 + i + 3 * j)] = dm.fdof(i, j);
}

// Reference position conjugate to local displacement dof a: the flat-facet
// interpolation point (corners, then chord midpoints).
Vec3 facet_position(const ShellElement &el, int a) {
    if (a < 3) return el.Xc[std::size_t(a)];
    const int i = a - 3;
    return 0.5 * (el.Xc[std::size_t((i + 1) % 3)] + el.Xc[std::size_t((i + 2) % 3)]);
}

Real von_mises(const Mat3 &sig) {
    Mat3 s = 0.5 * (sig + sig.transpose());
    s -= (s.trace() / 3.0) * Mat3::Identity();
    return std::sqrt(1.5 * ddot(s, s));
}

}  // namespace

Assembled assemble(const ShellMesh &mesh, const DofMap &dm, const VecX &u_full, const VecX &mu,
                   const VecX &f_ext, const BaseMaterial &mat, const SolverSettings &st) {
    Assembled out;
    const int n = dm.n_free + dm.n_con;
    out.residual_full = VecX::Zero(dm.n_full);
    std::vector<Eigen::Triplet<Real>> trip;
    trip.reserve(1296 * mesh.elements.size() + 2 * dm.C.size() + std::size_t(dm.n_con));

    EVec36 f;
    EMat36 K;
    std::array<int, 36> g{};
    std::array<int, 36> r{};
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const ShellElement &el = mesh.elements[e];
        const EVec36 ue = gather_element(dm, u_full, el, int(e));
        element_residual_tangent(el, ue, section_of(el, st), mat, f, K);
        if (!f.allFinite() || !K.allFinite())
            throw SolverError("non-finite contribution from element " + std::to_string(e) +
                              " (wall " + std::to_string(el.wall) + ")");
        element_global_dofs(dm, el, int(e), g);
        for (int l = 0; l < 36; ++l) {
            out.residual_full[g[std::size_t(l)]] += f[l];
            r[std::size_t(l)] = dm.red[std::size_t(g[std::size_t(l)])];
        }
        for (int l = 0; l < 36; ++l) {
            if (r[std::size_t(l)] < 0) continue;
            for (int m = 0; m < 36; ++m)
                if (r[std::size_t(m)] >= 0)
                    trip.emplace_back(r[std::size_t(l)], r[std::size_t(m)], K(l, m));
        }
    }

    out.residual_full -= f_ext;
    for (const auto &t : dm.C) out.residual_full[t.col()] += t.value() * mu[t.row()];

    VecX cu = VecX::Zero(dm.n_con);
    for (const auto &t : dm.C) {
        cu[t.row()] += t.value() * u_full[t.col()];
        const int rc = dm.red[std::size_t(t.col())];
        if (rc >= 0) {
            trip.emplace_back(dm.n_free + t.row(), rc, t.value());
            trip.emplace_back(rc, dm.n_free + t.row(), t.value());
        }
    }
    // Vacuous constraint rows (no coefficients) pin their multiplier instead.
    for (int c = 0; c < dm.n_con; ++c)
        if (dm.con_scale[std::size_t(c)] == 0) trip.emplace_back(dm.n_free + c, dm.n_free + c, 1.0);

    out.rhs = VecX::Zero(n);
    for (int d = 0; d < dm.n_full; ++d)
        if (dm.red[std::size_t(d)] >= 0) out.rhs[dm.red[std::size_t(d)]] = -out.residual_full[d];
    if (dm.n_con) out.rhs.tail(dm.n_con) = -cu;

    const int w_end = 3 * dm.n_nodes;
    const int th_end = w_end + 3 * dm.n_thslots;
    Real sw = 0, sth = 0, sF = 0;
    for (int d = 0; d < dm.n_full; ++d) {
        if (dm.red[std::size_t(d)] < 0) continue;
        const Real v = out.residual_full[d] * out.residual_full[d];
        if (d < w_end)
            sw += v;
        else if (d < th_end)
            sth += v;
        else
            sF += v;
    }
    out.res_w = std::sqrt(sw);
    out.res_th = std::sqrt(sth);
    out.res_F = std::sqrt(sF);
    out.res_con = dm.n_con ? cu.norm() : 0.0;

    out.K.resize(n, n);
    out.K.setFromTriplets(trip.begin(), trip.end());
    return out;
}

VecX perturbation_forces(const ShellMesh &mesh, const DofMap &dm, const BaseMaterial &mat,
                         Real scale) {
    VecX f = VecX::Zero(dm.n_full);
    if (scale == 0) return f;
    std::vector<Real> tw(mesh.wall_center.size(), 0.0);
    for (const ShellElement &el : mesh.elements)
        if (tw[std::size_t(el.wall)] == 0) tw[std::size_t(el.wall)] = el.t;
    for (std::size_t w = 0; w < mesh.wall_center.size(); ++w) {
        const Real mag = scale * mat.E * tw[w] * tw[w];
        f.segment<3>(dm.wdof(mesh.wall_center[w], 0)) += mag * mesh.wall_normal_ref[w];
    }
    return f;
}

MacroStressPair homogenized_stress(const ShellMesh &mesh, const DofMap &dm, const VecX &u_full,
                                   const VecX &mu, const VecX &f_ext, const BaseMaterial &mat,
                                   const SolverSettings &st) {
    const Real V = mesh.box.prod();
    Mat3 PA = Mat3::Zero();
    Mat3 J = Mat3::Zero();  // flat-facet frame-jump correction (seams, chords)
    VecX fint = VecX::Zero(3 * dm.n_nodes);
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const ShellElement &el = mesh.elements[e];
        const EVec36 ue = gather_element(dm, u_full, el, int(e));
        const EVec36 f = element_residual<Real>(el, ue, section_of(el, st), mat);
        PA += Eigen::Map<const Mat3>(f.data() + 27);
        const ElementDofs ed = element_dofs(el);
        for (int a = 0; a < 6; ++a) {
            const Vec3 fa = f.segment<3>(3 * a);
            const int node = ed.wnode[std::size_t(a)];
            fint.segment<3>(3 * node) += fa;
            J += fa * (facet_position(el, a) - mesh.nodes[std::size_t(node)]).transpose();
        }
    }

    // Boundary form: reactions at fixed dofs, applied loads and multiplier
    // tractions everywhere, plus the frame-jump correction.
    VecX cmu = VecX::Zero(dm.n_full);
    for (const auto &t : dm.C) cmu[t.col()] += t.value() * mu[t.row()];
    Mat3 Tfix = Mat3::Zero(), Text = Mat3::Zero();
    for (int node = 0; node < dm.n_nodes; ++node) {
        const Vec3 &X = mesh.nodes[std::size_t(node)];
        for (int i = 0; i < 3; ++i) {
            const int d = dm.wdof(node, i);
            const Real ext = f_ext[d] - cmu[d];
            for (int j = 0; j < 3; ++j) Text(i, j) += ext * X[j];
            if (dm.fixed[std::size_t(d)]) {
                const Real reac = fint[d] - ext;
                for (int j = 0; j < 3; ++j) Tfix(i, j) += reac * X[j];
            }
        }
    }

    MacroStressPair out;
    out.area = PA / V;
    out.boundary = (Tfix + Text + J) / V;
    const Real scale = out.area.norm();
    const Real gap = (out.area - out.boundary).norm();
    out.gap_rel = scale > 0 ? gap / scale : gap;
    return out;
}

Mat3 downscaling_residual(const ShellMesh &mesh, const VecX &u_full) {
    Mat3 g = Mat3::Zero();
    for (const auto &t : boundary_moment_rows(mesh))
        g(t.row() % 3, t.row() / 3) += t.value() * u_full[t.col()];
    return g / mesh.box.prod();
}

SolutionState solve(const ShellMesh &mesh, const BoundaryCondition &bc,
                    const LoadProgram &program, const SolverSettings &st,
                    const BaseMaterial &mat, const SolutionState *resume) {
    validate(program);
    validate(mat);
    if (mesh.elements.empty()) throw ConfigError("solve: empty mesh");

    MacroState macro =
        make_uniaxial_compression(program.axis, program.stretches.front(), program.pin_normal_axis);
    macro.V = mesh.box.prod();
    DofMap dm = apply_bc(mesh, bc, macro);
    const VecX pert = perturbation_forces(mesh, dm, mat, st.perturbation_scale);
    VecX f_ext = pert;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            if (!macro.f_prescribed(i, j)) f_ext[dm.fdof(i, j)] += macro.V * macro.P_val(i, j);

    std::ofstream log;
    if (!st.log_path.empty()) {
        const std::filesystem::path lp(st.log_path);
        if (lp.has_parent_path()) std::filesystem::create_directories(lp.parent_path());
        log.open(st.log_path);
        if (!log) throw IOError("cannot open solver log " + st.log_path);
    }
    char line[192];
    auto logln = [&log, &line]() {
        if (log.is_open()) log << line << '\n';
    };

    SolutionState sol;
    VecX u = VecX::Zero(dm.n_full);
    VecX mu = VecX::Zero(dm.n_con);
    for (int k = 0; k < 3; ++k) u[dm.fdof(k, k)] = 1.0;

    // Rolling state for incremental (trapezoidal) energy accumulation.
    std::vector<std::array<QuadPointData, 3>> qp_prev;
    std::vector<WallStepData> walls_cum(mesh.wall_center.size());
    Real Wext = 0, Wint = 0, Wpert = 0;
    Mat3 F_prev = Mat3::Identity(), P_prev = Mat3::Zero();
    VecX u_prev;
    Real cur = 1.0;
    int step_idx = 0;

    auto compute_qp = [&](const VecX &uu) {
        std::vector<std::array<QuadPointData, 3>> q(mesh.elements.size());
        for (std::size_t e = 0; e < mesh.elements.size(); ++e)
            q[e] = element_qp_data(mesh.elements[e],
                                   gather_element(dm, uu, mesh.elements[e], int(e)),
                                   section_of(mesh.elements[e], st), mat);
        return q;
    };

    // The factorization and assembled system survive past convergence so the
    // stability check can reuse them for inverse iteration.
    Eigen::SparseLU<Eigen::SparseMatrix<Real>> lu;
    bool have_lu = false;
    Assembled Acur;

    auto newton = [&](Real stretch) -> std::pair<bool, int> {
        set_stretch(macro, stretch);
        set_fixed_values(dm, macro);
        for (int d = 0; d < dm.n_full; ++d)
            if (dm.fixed[std::size_t(d)]) u[d] = dm.fixed_value[d];
        have_lu = false;
        bool met = false;
        Real best = 0;
        VecX u_best, mu_best;
        int extra = 0;
        int iters = 0;
        for (int it = 1; it <= st.max_iter; ++it) {
            iters = it;
            Acur = assemble(mesh, dm, u, mu, f_ext, mat, st);
            const Assembled &A = Acur;
            const Real r = A.max_res();
            std::snprintf(line, sizeof line,
                          "step %4d stretch %.9f iter %2d res_w %9.3e res_th %9.3e res_F %9.3e "
                          "res_con %9.3e",
                          step_idx, stretch, it, A.res_w, A.res_th, A.res_F, A.res_con);
            logln();
            if (r < st.tol) {
                if (!met || r < best) {
                    met = true;
                    best = r;
                    u_best = u;
                    mu_best = mu;
                }
                // Polish with the last factorization: cheap extra digits.
                if (extra >= st.polish_iter || !have_lu) break;
                ++extra;
                const VecX dx = lu.solve(A.rhs);
                if (!dx.allFinite()) break;
                for (int d = 0; d < dm.n_full; ++d)
                    if (dm.red[std::size_t(d)] >= 0) u[d] += dx[dm.red[std::size_t(d)]];
                if (dm.n_con) mu += dx.tail(dm.n_con);
                continue;
            }
            if (met) break;  // left the converged basin while polishing
            lu.compute(A.K);
            have_lu = true;
            if (lu.info() != Eigen::Success) {
                std::snprintf(line, sizeof line, "step %4d stretch %.9f: singular tangent",
                              step_idx, stretch);
                logln();
                return {false, iters};
            }
            const VecX dx = lu.solve(A.rhs);
            if (!dx.allFinite()) return {false, iters};
            for (int d = 0; d < dm.n_full; ++d)
                if (dm.red[std::size_t(d)] >= 0) u[d] += dx[dm.red[std::size_t(d)]];
            if (dm.n_con) mu += dx.tail(dm.n_con);
        }
        if (!met) return {false, iters};
        u = u_best;
        mu = mu_best;
        return {true, iters};
    };

    Real t_ref = 0;
    for (const ShellElement &el : mesh.elements) t_ref = t_ref == 0 ? el.t : std::min(t_ref, el.t);

    // Inverse iteration on the converged tangent. Returns the critical mode
    // when the smallest eigenvalue is negative, i.e. the equilibrium sits on
    // an unstable branch. Only meaningful without multiplier rows (the saddle
    // blocks of a constrained tangent are indefinite by construction).
    auto unstable_mode = [&]() -> std::optional<VecX> {
        if (!have_lu) {
            lu.compute(Acur.K);
            if (lu.info() != Eigen::Success) return std::nullopt;
            have_lu = true;
        }
        const int n = int(Acur.K.rows());
        VecX x(n);
        for (int i = 0; i < n; ++i) x[i] = std::sin(0.7 * i + 0.3);
        x.normalize();
        for (int it = 0; it < 20; ++it) {
            const VecX y = lu.solve(x);
            if (!y.allFinite()) return std::nullopt;
            const Real ny = y.norm();
            if (ny == 0) return std::nullopt;
            x = y / ny;
        }
        const Real lam = x.dot(Acur.K * x);
        const Real scale = VecX(Acur.K.diagonal()).cwiseAbs().maxCoeff();
        if (lam < -1e-10 * scale) return x;
        return std::nullopt;
    };

    // Kick the state along a tangent mode, scaled so the deflection part moves
    // by a fraction of the thinnest wall, signed to co-operate with the
    // perturbation loads when they are on.
    auto inject_mode = [&](const VecX &mode, Real frac) {
        Real wmax = 0, sp = 0;
        for (int d = 0; d < 3 * int(mesh.nodes.size()); ++d) {
            const int r = dm.red[std::size_t(d)];
            if (r < 0) continue;
            wmax = std::max(wmax, std::abs(mode[r]));
            sp += pert[d] * mode[r];
        }
        if (wmax == 0) wmax = mode.cwiseAbs().maxCoeff();
        const Real amp = (sp < 0 ? -1.0 : 1.0) * frac * t_ref / wmax;
        for (int d = 0; d < dm.n_full; ++d)
            if (dm.red[std::size_t(d)] >= 0) u[d] += amp * mode[dm.red[std::size_t(d)]];
    };

    auto solve_at = [&](Real stretch) -> std::pair<bool, int> {
        auto [ok, iters] = newton(stretch);
        if (!ok || !st.stability_check || dm.n_con > 0) return {ok, iters};
        for (int inj = 0; inj < st.max_injections; ++inj) {
            const std::optional<VecX> mode = unstable_mode();
            if (!mode) break;
            std::snprintf(line, sizeof line,
                          "step %4d stretch %.9f: unstable equilibrium, mode kick %d", step_idx,
                          stretch, inj + 1);
            logln();
            const VecX u_keep = u, mu_keep = mu;
            inject_mode(*mode, st.injection_fraction * std::pow(2.0, inj));
            const auto [ok2, it2] = newton(stretch);
            if (!ok2) {
                u = u_keep;
                mu = mu_keep;
                std::snprintf(line, sizeof line,
                              "step %4d stretch %.9f: mode kick diverged, keeping prior state",
                              step_idx, stretch);
                logln();
                iters += it2;
                break;
            }
            iters += it2;
        }
        return {true, iters};
    };

    auto record_state = [&](Real stretch, int iters) {
        auto qp_cur = compute_qp(u);
        if (qp_prev.empty()) qp_prev = qp_cur;  // baseline: zero increments
        for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
            WallStepData &acc = walls_cum[std::size_t(mesh.elements[e].wall)];
            for (int q = 0; q < 3; ++q) {
                const QuadPointData &a = qp_prev[e][std::size_t(q)];
                const QuadPointData &b = qp_cur[e][std::size_t(q)];
                const Real wq = b.weight;
                acc.Wm += 0.5 * wq * ddot(a.Ntc + b.Ntc, b.Ht - a.Ht);
                acc.Ws += 0.5 * wq * (a.Vc + b.Vc).dot(b.Gc - a.Gc);
                acc.Wb += 0.5 * wq * ddot(a.Mc + b.Mc, b.Kc - a.Kc);
                acc.Wd +=
                    0.5 * wq * (a.k_d * a.gamma_d + b.k_d * b.gamma_d) * (b.gamma_d - a.gamma_d);
            }
        }
        std::vector<Real> flagged(walls_cum.size(), 0.0);
        for (std::size_t e = 0; e < mesh.elements.size(); ++e)
            for (int q = 0; q < 3; ++q) {
                const QuadPointData &b = qp_cur[e][std::size_t(q)];
                if (von_mises(Mat3(b.Ntc / mesh.elements[e].t)) >= mat.sigma_y)
                    flagged[std::size_t(mesh.elements[e].wall)] += b.weight;
            }
        for (std::size_t w = 0; w < walls_cum.size(); ++w)
            walls_cum[w].Jw = mesh.wall_area[w] > 0 ? flagged[w] / mesh.wall_area[w] : 0.0;

        StepRecord rec;
        rec.step = step_idx;
        rec.stretch = stretch;
        rec.applied_strain = 1.0 - stretch;
        rec.F = Eigen::Map<const Mat3>(u.data() + dm.fdof(0, 0));
        const MacroStressPair P = homogenized_stress(mesh, dm, u, mu, f_ext, mat, st);
        rec.P_area = P.area;
        rec.P_boundary = P.boundary;
        rec.hm_gap_rel = P.gap_rel;
        rec.downscaling = downscaling_residual(mesh, u).norm();
        if (u_prev.size()) {
            Wext += 0.5 * macro.V * ddot(P_prev + rec.P_area, rec.F - F_prev);
            Wpert += pert.dot(u - u_prev);
        }
        Wint = 0;
        for (const WallStepData &w : walls_cum) Wint += w.Wm + w.Wb + w.Ws + w.Wd;
        rec.W_ext = Wext;
        rec.W_int = Wint;
        rec.W_pert = Wpert;
        rec.newton_iters = iters;
        rec.converged = true;
        rec.u = u;
        rec.mu = mu;
        rec.walls = walls_cum;
        if (!st.checkpoint_path.empty())
            save_checkpoint_step(st.checkpoint_path, rec, sol.steps.empty());
        sol.steps.push_back(std::move(rec));
        qp_prev = std::move(qp_cur);
        u_prev = u;
        F_prev = sol.steps.back().F;
        P_prev = sol.steps.back().P_area;
        ++step_idx;
    };

    if (resume && !resume->steps.empty()) {
        sol.steps = resume->steps;
        const StepRecord &last = sol.steps.back();
        if (last.u.size() != dm.n_full || last.walls.size() != walls_cum.size())
            throw ConfigError("resume state does not match this mesh and boundary condition");
        u = last.u;
        mu = last.mu.size() == dm.n_con ? last.mu : VecX::Zero(dm.n_con);
        cur = last.stretch;
        step_idx = last.step + 1;
        walls_cum = last.walls;
        Wext = last.W_ext;
        Wint = last.W_int;
        Wpert = last.W_pert;
        F_prev = last.F;
        P_prev = last.P_area;
        u_prev = u;
        set_stretch(macro, cur);
        set_fixed_values(dm, macro);
        qp_prev = compute_qp(u);
    } else {
        // Reference state: equilibrium at stretch 1 (nontrivial only when the
        // perturbation loads are on). Energies are measured from here.
        const auto [ok, iters] = solve_at(1.0);
        if (!ok) throw SolverError("no convergence at the unloaded reference state");
        record_state(1.0, iters);
    }

    for (Real target : program.stretches) {
        if (target >= cur) continue;
        int halvings = 0;
        Real next = target;
        while (cur > target) {
            const VecX u_save = u;
            const VecX mu_save = mu;
            const auto [ok, iters] = solve_at(next);
            if (ok) {
                cur = next;
                record_state(cur, iters);
                next = target;
            } else {
                u = u_save;
                mu = mu_save;
                if (++halvings > st.max_halvings) {
                    std::snprintf(line, sizeof line,
                                  "step %4d stretch %.9f: no convergence after %d bisections, "
                                  "stopping with partial history",
                                  step_idx, next, halvings - 1);
                    logln();
                    sol.completed = false;
                    return sol;
                }
                next = 0.5 * (cur + next);
            }
        }
    }
    sol.completed = true;
    return sol;
}

namespace {

void fput_mat(std::FILE *fp, const char *tag, const Mat3 &M) {
    std::fprintf(fp, "%s", tag);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) std::fprintf(fp, " %la", M(i, j));
    std::fprintf(fp, "\n");
}

void fput_vec(std::FILE *fp, const char *tag, const VecX &v) {
    std::fprintf(fp, "%s %ld", tag, long(v.size()));
    for (long i = 0; i < v.size(); ++i) std::fprintf(fp, " %la", v[i]);
    std::fprintf(fp, "\n");
}

struct CkptReader {
    std::FILE *fp = nullptr;
    std::string path;

    [[noreturn]] void fail(const std::string &what) {
        std::fclose(fp);
        throw IOError("checkpoint " + path + ": " + what);
    }
    bool tag(const char *want, bool eof_ok = false) {
        char buf[32];
        if (std::fscanf(fp, "%31s", buf) != 1) {
            if (eof_ok) return false;
            fail(std::string("missing tag ") + want);
        }
        if (std::string(buf) != want) fail(std::string("expected tag ") + want);
        return true;
    }
    Real real() {
        Real v = 0;
        if (std::fscanf(fp, "%la", &v) != 1) fail("bad real");
        return v;
    }
    long integer() {
        long v = 0;
        if (std::fscanf(fp, "%ld", &v) != 1) fail("bad integer");
        return v;
    }
    Mat3 mat(const char *want) {
        tag(want);
        Mat3 M;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) M(i, j) = real();
        return M;
    }
    VecX vec(const char *want) {
        tag(want);
        const long n = integer();
        if (n < 0) fail("negative vector length");
        VecX v(n);
        for (long i = 0; i < n; ++i) v[i] = real();
        return v;
    }
};

}  // namespace

void save_checkpoint_step(const std::string &path, const StepRecord &rec, bool first) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::FILE *fp = std::fopen(path.c_str(), first ? "w" : "a");
    if (!fp) throw IOError("cannot open checkpoint file " + path);
    if (first) std::fprintf(fp, "foamrve-ckpt/1\n");
    std::fprintf(fp, "step %d %la %la %d %d %d\n", rec.step, rec.stretch, rec.applied_strain,
                 rec.newton_iters, rec.converged ? 1 : 0, int(rec.walls.size()));
    fput_mat(fp, "F", rec.F);
    fput_mat(fp, "Pa", rec.P_area);
    fput_mat(fp, "Pb", rec.P_boundary);
    std::fprintf(fp, "scal %la %la %la %la %la\n", rec.hm_gap_rel, rec.downscaling, rec.W_ext,
                 rec.W_int, rec.W_pert);
    std::fprintf(fp, "walls");
    for (const WallStepData &w : rec.walls)
        std::fprintf(fp, " %la %la %la %la %la", w.Wm, w.Wb, w.Ws, w.Wd, w.Jw);
    std::fprintf(fp, "\n");
    fput_vec(fp, "u", rec.u);
    fput_vec(fp, "mu", rec.mu);
    std::fclose(fp);
}

SolutionState load_checkpoint(const std::string &path) {
    CkptReader in;
    in.fp = std::fopen(path.c_str(), "r");
    in.path = path;
    if (!in.fp) throw IOError("cannot open checkpoint file " + path);
    {
        char buf[32];
        if (std::fscanf(in.fp, "%31s", buf) != 1 || std::string(buf) != "foamrve-ckpt/1")
            in.fail("not a foamrve-ckpt/1 stream");
    }
    SolutionState sol;
    while (in.tag("step", /*eof_ok=*/true)) {
        StepRecord rec;
        rec.step = int(in.integer());
        rec.stretch = in.real();
        rec.applied_strain = in.real();
        rec.newton_iters = int(in.integer());
        rec.converged = in.integer() != 0;
        const long nwalls = in.integer();
        rec.F = in.mat("F");
        rec.P_area = in.mat("Pa");
        rec.P_boundary = in.mat("Pb");
        in.tag("scal");
        rec.hm_gap_rel = in.real();
        rec.downscaling = in.real();
        rec.W_ext = in.real();
        rec.W_int = in.real();
        rec.W_pert = in.real();
        in.tag("walls");
        rec.walls.resize(std::size_t(nwalls));
        for (WallStepData &w : rec.walls) {
            w.Wm = in.real();
            w.Wb = in.real();
            w.Ws = in.real();
            w.Wd = in.real();
            w.Jw = in.real();
        }
        rec.u = in.vec("u");
        rec.mu = in.vec("mu");
        sol.steps.push_back(std::move(rec));
    }
    std::fclose(in.fp);
    return sol;
}

}  // namespace foamrve
