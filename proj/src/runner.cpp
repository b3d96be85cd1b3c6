#include "hglw/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hglw/pgm.hpp"
#include "hglw/snapshot.hpp"
#include "hglw/surface.hpp"

namespace hglw {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header, bool append) {
        const bool exists = fs::exists(path);
        os_.open(path, append ? std::ios::app : std::ios::out);
        if (!os_) throw ConfigError("cannot open " + path);
        if (!append || !exists) os_ << header << "\r\n";
    }
    void row(const std::vector<double>& vals) {
        for (size_t i = 0; i < vals.size(); ++i) os_ << (i ? "," : "") << fmt(vals[i]);
        os_ << "\r\n";
    }

private:
    std::ofstream os_;
};

// reference radius/curve evaluators, one per reference.kind
struct Reference {
    std::string kind = "none";
    RadialSolution radial;
    std::vector<FrontCurve> front_snaps;
    FrontCurve front;
    double front_dt = 0;
    std::vector<GraphState> graph_snaps;
    GraphState graph;
    double graph_dt = 0;
    ExactEval exact;

    // advance the marching references up to time t (deterministic fixed dt,
    // one shortened final step to land on t)
    void advance_to(double t) {
        if (kind == "front") {
            while (front.status == SurfaceStatus::Ok && front.t < t - 1e-12) {
                const double step = std::min(front_dt, t - front.t);
                front = front_track_step(front, step);
            }
        } else if (kind == "graph") {
            while (graph.status == SurfaceStatus::Ok && graph.t < t - 1e-12) {
                const double step = std::min(graph_dt, t - graph.t);
                graph = graph_pde_step(graph, step);
            }
        }
    }
};

Reference make_reference(const Scenario& s, double eps) {
    (void)eps;
    Reference ref;
    ref.kind = s.reference;
    if (ref.kind == "none") return ref;
    if (ref.kind == "radial") {
        const double r0 = s.initial.radius;
        ref.radial =
            radial_solve(r0, s.dim, 1e-4, s.solver.t_end + 1.0, s.initial.speed);
        return ref;
    }
    if (ref.kind == "front") {
        if (s.initial.kind == "circle")
            ref.front = make_circle_front(s.initial.radius, 256, s.initial.speed,
                                          s.initial.center);
        else if (s.initial.kind == "ellipse")
            ref.front = make_ellipse_front(s.initial.semi_axis_a, s.initial.semi_axis_b, 256);
        else
            throw ConfigError("reference.kind=front supports circle/ellipse scenarios");
        ref.front_dt = 5e-4;
        return ref;
    }
    if (ref.kind == "graph") {
        if (s.initial.kind != "planar_wave")
            throw ConfigError("reference.kind=graph supports the planar_wave scenario");
        GraphState g;
        const int m = s.cells[1];
        g.y0 = s.origin[1];
        g.dy = s.extent / m;
        g.h.resize(m);
        g.hdot.resize(m);
        const double ky = 2 * M_PI / s.initial.wavelength;
        for (int j = 0; j < m; ++j) {
            const double y = g.y0 + (j + 0.5) * g.dy;
            g.h[j] = s.initial.offset + s.initial.amplitude * std::sin(ky * y);
            g.hdot[j] = -s.initial.amplitude * ky * std::cos(ky * y);
        }
        ref.graph = g;
        ref.graph_dt = 0.25 * g.dy;
        return ref;
    }
    if (ref.kind == "exact") {
        ref.exact = exact_field_evaluator(s, eps);
        if (!ref.exact)
            throw ConfigError("reference.kind=exact: scenario has no closed-form field");
        return ref;
    }
    throw ConfigError("unknown reference kind " + ref.kind);
}

struct InterfaceComparison {
    double ref_value = std::nan("");
    double hausdorff = std::nan("");
    double mean_dev = std::nan("");
    double rms_dev = std::nan("");
    double mean_radius = std::nan("");
};

InterfaceComparison compare_interface(const Scenario& s, Reference& ref,
                                      const InterfaceSet& iface, double t) {
    InterfaceComparison c;
    if (iface.points.empty()) return c;
    const std::array<double, 2> ctr = s.initial.center;
    double mr = 0;
    for (const auto& p : iface.points) mr += std::hypot(p[0] - ctr[0], p[1] - ctr[1]);
    c.mean_radius = mr / static_cast<double>(iface.points.size());

    if (ref.kind == "radial") {
        const double rr = ref.radial.radius_at(t);
        c.ref_value = rr;
        double dmax = 0, dsum = 0, dsq = 0;
        for (const auto& p : iface.points) {
            const double d = std::hypot(p[0] - ctr[0], p[1] - ctr[1]) - rr;
            dmax = std::max(dmax, std::abs(d));
            dsum += d;
            dsq += d * d;
        }
        const auto np = static_cast<double>(iface.points.size());
        c.mean_dev = dsum / np;
        c.rms_dev = std::sqrt(dsq / np);
        // symmetric part: coverage of the reference circle by extracted points
        double cover = 0;
        const int K = 256;
        for (int q = 0; q < K; ++q) {
            const double th = 2 * M_PI * q / K;
            const double rx = ctr[0] + rr * std::cos(th), ry = ctr[1] + rr * std::sin(th);
            double best = 1e300;
            for (const auto& p : iface.points)
                best = std::min(best, std::hypot(p[0] - rx, p[1] - ry));
            cover = std::max(cover, best);
        }
        c.hausdorff = std::max(dmax, cover);
        return c;
    }
    if (ref.kind == "front") {
        ref.advance_to(t);
        if (ref.front.status == SurfaceStatus::Singular) return c;
        double dmax = 0;
        for (const auto& p : iface.points) {
            double best = 1e300;
            for (const auto& q : ref.front.vertices)
                best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
            dmax = std::max(dmax, best);
        }
        double cover = 0;
        for (const auto& q : ref.front.vertices) {
            double best = 1e300;
            for (const auto& p : iface.points)
                best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
            cover = std::max(cover, best);
        }
        c.hausdorff = std::max(dmax, cover);
        c.ref_value = front_mean_radius(ref.front, ctr);
        c.mean_dev = c.mean_radius - c.ref_value;
        return c;
    }
    if (ref.kind == "graph") {
        ref.advance_to(t);
        if (ref.graph.status == SurfaceStatus::Singular) return c;
        double dmax = 0, dsum = 0, dsq = 0;
        int cnt = 0;
        for (const auto& p : iface.points) {
            // vertical deviation from the reference graph, periodic y sampling
            const double y = p[1];
            const double fy = (y - ref.graph.y0) / ref.graph.dy - 0.5;
            const auto m = static_cast<std::int64_t>(ref.graph.h.size());
            std::int64_t j0 = static_cast<std::int64_t>(std::floor(fy));
            const double fr = fy - static_cast<double>(j0);
            j0 = ((j0 % m) + m) % m;
            const std::int64_t j1 = (j0 + 1) % m;
            const double href = (1 - fr) * ref.graph.h[j0] + fr * ref.graph.h[j1];
            const double d = p[0] - href;
            dmax = std::max(dmax, std::abs(d));
            dsum += d;
            dsq += d * d;
            ++cnt;
        }
        if (cnt) {
            c.hausdorff = dmax;
            c.mean_dev = dsum / cnt;
            c.rms_dev = std::sqrt(dsq / cnt);
        }
        return c;
    }
    return c;
}

} // namespace

// ---------------------------------------------------------------------------

namespace {

struct RunArtifacts {
    RunResult result;
    std::unique_ptr<CsvWriter> scalars, interface_csv, reference_csv;
    std::deque<FieldState> diag_window;       // for the divergence residual
    std::optional<FieldState> prev_iface_state;
    std::unique_ptr<StationarityAccumulator> stationarity;
    Reference reference;
    ExactEval exact;
};

void write_manifest(const Scenario& s, double eps, const RunResult& r, double wall_seconds) {
    json j;
    j["name"] = s.name;
    j["epsilon"] = eps;
    j["status"] = to_string(r.status);
    j["steps"] = r.steps;
    j["dt"] = r.dt;
    j["config_hash"] = config_hash(resolved_config_text(s));
    j["format_version"] = kSnapshotVersion;
    j["wall_seconds"] = wall_seconds;
    std::ofstream os(fs::path(r.out_dir) / "manifest.json");
    os << j.dump(2) << "\n";
}

RunResult run_scenario_impl(const Scenario& scen_in, double eps, const std::string& out_dir,
                            const Checkpoint* resume_from) {
    Scenario s = scen_in;
    s.epsilon = eps;
    validate_scenario(s, eps);
    const auto wall0 = std::chrono::steady_clock::now();

    fs::create_directories(out_dir);
    fs::create_directories(fs::path(out_dir) / "snapshots");
    if (s.outputs.checkpoint_every > 0)
        fs::create_directories(fs::path(out_dir) / "checkpoints");
    {
        std::ofstream os(fs::path(out_dir) / "resolved.cfg");
        os << resolved_config_text(s);
    }

    RunArtifacts A;
    A.result.out_dir = out_dir;
    A.result.epsilon = eps;
    const bool resuming = resume_from != nullptr;
    A.scalars = std::make_unique<CsvWriter>(
        (fs::path(out_dir) / "diagnostics.csv").string(),
        "t,total_energy,total_lagrangian,total_w,equipartition_ratio,identity_e_T00_max,"
        "identity_trace_max,div_residual_max,div_residual_l2",
        resuming);
    if (s.outputs.interface_every > 0) {
        A.interface_csv = std::make_unique<CsvWriter>(
            (fs::path(out_dir) / "interface.csv").string(), "t,x0,x1,x2,v0,v1,v2,winding",
            resuming);
        if (s.reference != "none" && s.reference != "exact")
            A.reference_csv = std::make_unique<CsvWriter>(
                (fs::path(out_dir) / "reference.csv").string(),
                "t,ref_value,hausdorff,mean_dev,rms_dev,mean_radius", resuming);
    }
    A.reference = make_reference(s, eps);
    if (s.reference == "exact") A.exact = A.reference.exact;

    const Grid grid = s.make_grid();
    const double dt = stable_dt(grid, s.solver.cfl_fraction);
    A.result.dt = dt;

    if (s.diagnostics.stationarity) {
        auto family = default_test_family(grid, 0.0, s.solver.t_end,
                                          s.diagnostics.stationarity_per_axis);
        A.stationarity =
            std::make_unique<StationarityAccumulator>(std::move(family), s.solver.exec);
    }

    long diag_count = 0;
    const int diag_every = std::max(1, s.outputs.diagnostics_every);
    const double diag_dt = diag_every * dt;

    auto diag_observer = [&](const FieldState& snap) {
        // only process cadence-aligned snapshots (the solver also emits the
        // final off-cadence snapshot; diagnostics skip it unless aligned)
        const double phase = snap.time / diag_dt;
        if (std::abs(phase - std::lround(phase)) > 1e-6 && snap.time > 0) return;

        const FieldDerivs der = field_derivatives(snap, s.solver.exec);
        const DensityFields den = densities(snap, der, s.solver.exec);
        const double E = density_total(den, den.e);
        const double L = density_total(den, den.l);
        const double W = density_total(den, den.w);
        double ratio = std::nan("");
        try {
            ratio = equipartition_ratio(den, s.diagnostics.equipartition_theta);
        } catch (const EmptyTubeError&) {
        }
        const SymTensorField T = stress_energy(snap, der, den, s.solver.exec);
        const IdentityCheck idc = identity_check(den, T);

        double div_max = std::nan(""), div_l2 = std::nan("");
        if (s.diagnostics.divergence) {
            A.diag_window.push_back(snap);
            if (A.diag_window.size() > 3) A.diag_window.pop_front();
            if (A.diag_window.size() == 3) {
                const double d1 = A.diag_window[1].time - A.diag_window[0].time;
                const double d2 = A.diag_window[2].time - A.diag_window[1].time;
                if (std::abs(d2 - d1) < 1e-9 * d1) {
                    const DivergenceResidual dr = divergence_residual(
                        A.diag_window[0], A.diag_window[1], A.diag_window[2], s.solver.exec);
                    div_max = dr.max_norm;
                    div_l2 = dr.l2_norm;
                    A.result.divergence_max = std::max(A.result.divergence_max, dr.max_norm);
                }
            }
        }
        if (A.stationarity) A.stationarity->add(snap, T);

        A.scalars->row({snap.time, E, L, W, ratio, idc.max_e_vs_T00, idc.max_trace, div_max,
                        div_l2});

        if (diag_count == 0 && !resuming) {
            A.result.energy_first = E;
            A.result.lagrangian_first = L;
            A.result.total_w_first = W;
            if (!std::isnan(ratio)) A.result.equipartition_first = ratio;
        }
        A.result.energy_last = E;
        if (!std::isnan(ratio)) A.result.equipartition_last = ratio;
        if (diag_count == 0 && !resuming) {
            A.result.energy_drift = 0;
        } else if (A.result.energy_first != 0) {
            A.result.energy_drift =
                std::max(A.result.energy_drift,
                         std::abs(E - A.result.energy_first) / std::abs(A.result.energy_first));
        }
        A.result.identity_e_T00_max = std::max(A.result.identity_e_T00_max, idc.max_e_vs_T00);
        A.result.identity_trace_max = std::max(A.result.identity_trace_max, idc.max_trace);

        if (A.exact) {
            // L_inf field error against the closed form
            double x[3];
            double ue[2], ute[2];
            double linf = 0;
            const auto nc = snap.grid.cell_count();
            for (std::int64_t i = 0; i < nc; ++i) {
                snap.grid.cell_center(i, x);
                A.exact(snap.time, std::span<const double>(x, static_cast<size_t>(snap.grid.dim)),
                        ue, ute);
                for (int comp = 0; comp < snap.k; ++comp)
                    linf = std::max(linf, std::abs(snap.u[comp][i] - ue[comp]));
            }
            A.result.field_linf_max = std::max(A.result.field_linf_max, linf);
        }
        ++diag_count;
    };

    auto iface_observer = [&](const FieldState& snap) {
        if (s.outputs.interface_every <= 0) return;
        const double iface_dt = s.outputs.interface_every * dt;
        const double phase = snap.time / iface_dt;
        if (std::abs(phase - std::lround(phase)) > 1e-6 && snap.time > 0) return;

        // velocities come from matching against the previous interface
        // snapshot; the very first row carries zeros
        const InterfaceSet set =
            A.prev_iface_state ? interface_extract_with_velocity(snap, *A.prev_iface_state)
                               : interface_extract(snap);

        for (size_t p = 0; p < set.points.size(); ++p) {
            std::vector<double> row{snap.time,
                                    set.points[p][0],
                                    set.points[p][1],
                                    set.points[p][2],
                                    set.velocities.empty() ? 0.0 : set.velocities[p][0],
                                    set.velocities.empty() ? 0.0 : set.velocities[p][1],
                                    set.velocities.empty() ? 0.0 : set.velocities[p][2],
                                    set.windings.empty() ? 0.0
                                                         : static_cast<double>(set.windings[p])};
            A.interface_csv->row(row);
        }
        if (s.dim == 2 && (s.reference == "radial" || s.reference == "front" ||
                           s.reference == "graph")) {
            const InterfaceComparison cmp = compare_interface(s, A.reference, set, snap.time);
            if (A.reference_csv)
                A.reference_csv->row({snap.time, cmp.ref_value, cmp.hausdorff, cmp.mean_dev,
                                      cmp.rms_dev, cmp.mean_radius});
            if (!std::isnan(cmp.hausdorff))
                A.result.hausdorff_max = std::max(A.result.hausdorff_max, cmp.hausdorff);
            if (!std::isnan(cmp.mean_dev))
                A.result.interface_series.push_back(
                    {snap.time, cmp.mean_radius, cmp.mean_dev,
                     std::isnan(cmp.rms_dev) ? 0.0 : cmp.rms_dev});
        }
        A.prev_iface_state = snap;
    };

    auto snapshot_observer = [&](const FieldState& snap) {
        if (s.outputs.snapshot_every <= 0) return;
        const double snap_dt = s.outputs.snapshot_every * dt;
        const double phase = snap.time / snap_dt;
        if (std::abs(phase - std::lround(phase)) > 1e-6 && snap.time > 0) return;
        const long step = std::lround(snap.time / dt);
        char name[64];
        std::snprintf(name, sizeof name, "step_%08ld.hglw", step);
        write_snapshot((fs::path(out_dir) / "snapshots" / name).string(), snap);
    };

    std::vector<SnapshotObserver> observers{diag_observer, iface_observer, snapshot_observer};

    CheckpointHook hook;
    if (s.outputs.checkpoint_every > 0) {
        hook.every = s.outputs.checkpoint_every;
        hook.fn = [&](const Checkpoint& c) {
            char name[64];
            std::snprintf(name, sizeof name, "step_%08lld.hglc",
                          static_cast<long long>(c.step));
            write_checkpoint((fs::path(out_dir) / "checkpoints" / name).string(), c);
        };
    }

    SolverConfig cfg = s.solver;
    cfg.snapshot_every = std::max(1, std::min({diag_every,
                                               s.outputs.interface_every > 0
                                                   ? s.outputs.interface_every
                                                   : diag_every,
                                               s.outputs.snapshot_every > 0
                                                   ? s.outputs.snapshot_every
                                                   : diag_every}));

    Trajectory traj;
    if (resuming) {
        traj = resume(*resume_from, cfg, observers, hook);
    } else {
        const FieldState s0 = build_initial_state(s, eps);
        traj = run(s0, cfg, observers, hook);
    }
    A.result.status = traj.status;
    A.result.steps = traj.step_count;

    // final snapshot + heatmaps + projection report
    const FieldState& last = traj.states.back();
    write_snapshot((fs::path(out_dir) / "final.hglw").string(), last);
    if (s.dim == 2)
        for (const auto& f : s.outputs.heatmap_fields)
            emit_heatmap((fs::path(out_dir) / "final.hglw").string(), f,
                         (fs::path(out_dir) / ("final_" + f + ".pgm")).string());

    if (s.diagnostics.projection) {
        const InterfaceSet set = interface_extract(last);
        if (!set.points.empty()) {
            // deterministic anchor: interface point nearest the domain center
            double ctr[3];
            for (int a = 0; a < s.dim; ++a) ctr[a] = s.origin[a] + 0.5 * s.extent;
            size_t best = 0;
            double bd = 1e300;
            for (size_t p = 0; p < set.points.size(); ++p) {
                double d = 0;
                for (int a = 0; a < s.dim; ++a)
                    d += (set.points[p][a] - ctr[a]) * (set.points[p][a] - ctr[a]);
                if (d < bd) {
                    bd = d;
                    best = p;
                }
            }
            const FieldDerivs der = field_derivatives(last, s.solver.exec);
            const DensityFields den = densities(last, der, s.solver.exec);
            const SymTensorField T = stress_energy(last, der, den, s.solver.exec);
            const double rho = s.diagnostics.projection_tube_cells * grid.spacing;
            try {
                const ProjectionReport rep = projection_report(
                    T, den, rho,
                    std::span<const double>(set.points[best].data(),
                                            static_cast<size_t>(s.dim)));
                A.result.projection = rep;
                json j;
                j["t"] = last.time;
                j["point"] = std::vector<double>(set.points[best].begin(),
                                                 set.points[best].begin() + s.dim);
                j["tube_radius"] = rho;
                j["lambda0"] = rep.lambda0;
                j["eigenvalues"] =
                    std::vector<double>(rep.eigenvalues.begin(),
                                        rep.eigenvalues.begin() + rep.eigen_count);
                j["zero_count"] = rep.zero_count;
                j["trace"] = rep.trace;
                j["spacelike_ok"] = rep.spacelike_ok;
                j["real_spectrum"] = rep.real_spectrum;
                j["tube_mass"] = rep.tube_mass;
                std::vector<std::vector<double>> tt;
                for (int a = 0; a < grid.dim + 1; ++a) {
                    std::vector<double> rowv;
                    for (int b = 0; b < grid.dim + 1; ++b) rowv.push_back(rep.T_tilde(a, b));
                    tt.push_back(rowv);
                }
                j["T_tilde"] = tt;
                std::ofstream os(fs::path(out_dir) / "projection.json");
                os << j.dump(2) << "\n";
            } catch (const EmptyTubeError&) {
            }
        }
    }

    if (A.stationarity) {
        const auto res = A.stationarity->finalize();
        json j = json::array();
        for (size_t i = 0; i < res.size(); ++i) {
            j.push_back({{"index", i}, {"residual", res[i]}});
            A.result.stationarity_max = std::max(A.result.stationarity_max, std::abs(res[i]));
        }
        std::ofstream os(fs::path(out_dir) / "stationarity.json");
        os << j.dump(2) << "\n";
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    write_manifest(s, eps, A.result, wall);
    return A.result;
}

} // namespace

RunResult run_scenario(const Scenario& s, double epsilon_override) {
    const double eps = epsilon_override > 0 ? epsilon_override : s.epsilon;
    return run_scenario_impl(s, eps, s.outputs.dir, nullptr);
}

RunResult resume_scenario(const Scenario& s, const std::string& checkpoint_path) {
    const Checkpoint c = read_checkpoint(checkpoint_path);
    if (!c.grid.same_layout(s.make_grid()))
        throw ConfigError("resume: checkpoint grid does not match the config");
    return run_scenario_impl(s, c.epsilon, s.outputs.dir, &c);
}

// ---------------------------------------------------------------------------

namespace {

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    // least squares slope of log(y) against log(x), skipping non-positive values
    std::vector<double> lx, ly;
    for (size_t i = 0; i < xs.size(); ++i)
        if (xs[i] > 0 && ys[i] > 0) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    const auto n = static_cast<double>(lx.size());
    if (n < 2) return 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    return denom != 0 ? (n * sxy - sx * sy) / denom : 0;
}

bool monotone_decreasing(const std::vector<double>& v) {
    for (size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

} // namespace

ConvergenceReport convergence_study(const Scenario& s) {
    if (s.epsilon_list.size() < 3)
        throw ConfigError("convergence mode needs model.epsilon_list with >= 3 entries");
    ConvergenceReport rep;
    // one fixed grid for every member (sized by the finest epsilon) so the
    // discretization error is common across the sequence
    for (double eps : s.epsilon_list) validate_scenario(s, eps);

    for (double eps : s.epsilon_list) {
        char sub[48];
        std::snprintf(sub, sizeof sub, "eps_%g", eps);
        ConvergenceRow row;
        row.epsilon = eps;
        try {
            const RunResult r =
                run_scenario_impl(s, eps, (fs::path(s.outputs.dir) / sub).string(), nullptr);
            row.status = r.status;
            row.hausdorff_max = r.hausdorff_max;
            row.field_linf_max = r.field_linf_max;
            row.equipartition = r.equipartition_last.value_or(std::nan(""));
            row.stationarity_max = r.stationarity_max;
            row.energy_drift = r.energy_drift;
            if (r.projection) {
                row.projection_trace = r.projection->trace;
                row.projection_lambda0 = r.projection->lambda0;
            }
        } catch (const std::exception&) {
            row.status = RunStatus::Diverged;
        }
        rep.rows.push_back(row);
    }

    std::vector<double> es, hd, st, eq;
    for (const auto& r : rep.rows) {
        es.push_back(r.epsilon);
        hd.push_back(r.hausdorff_max);
        st.push_back(r.stationarity_max);
        eq.push_back(r.equipartition);
    }
    rep.order_hausdorff = loglog_slope(es, hd);
    rep.order_stationarity = loglog_slope(es, st);
    // epsilon_list is ordered coarse -> fine: metrics should fall along it
    rep.hausdorff_monotone = monotone_decreasing(hd);
    rep.stationarity_monotone = monotone_decreasing(st);
    rep.equipartition_monotone = monotone_decreasing(eq);

    fs::create_directories(s.outputs.dir);
    CsvWriter csv((fs::path(s.outputs.dir) / "convergence.csv").string(),
                  "epsilon,status,hausdorff_max,field_linf_max,equipartition,stationarity_max,"
                  "projection_trace,projection_lambda0,energy_drift",
                  false);
    for (const auto& r : rep.rows)
        csv.row({r.epsilon, static_cast<double>(static_cast<int>(r.status)), r.hausdorff_max,
                 r.field_linf_max, r.equipartition, r.stationarity_max, r.projection_trace,
                 r.projection_lambda0, r.energy_drift});
    std::ofstream os(fs::path(s.outputs.dir) / "report.txt");
    os << "convergence study: " << s.name << "\n";
    os << "members: " << rep.rows.size() << "\n";
    os << "hausdorff order (slope in eps): " << rep.order_hausdorff
       << ", monotone: " << (rep.hausdorff_monotone ? "yes" : "no") << "\n";
    os << "stationarity order: " << rep.order_stationarity
       << ", monotone: " << (rep.stationarity_monotone ? "yes" : "no") << "\n";
    os << "equipartition monotone: " << (rep.equipartition_monotone ? "yes" : "no") << "\n";
    return rep;
}

RipplesReport ripples_study(const Scenario& s) {
    if (s.initial.ripple_wavelengths.empty())
        throw ConfigError("ripples study needs initial.ripple_wavelengths");
    RipplesReport rep;
    for (double lam : s.initial.ripple_wavelengths) {
        Scenario member = ripples_scenario(s, s.initial.ripple_ratio * lam, lam, s.initial.radius);
        char sub[48];
        std::snprintf(sub, sizeof sub, "lambda_%g", lam);
        member.outputs.dir = (fs::path(s.outputs.dir) / sub).string();
        if (member.outputs.interface_every <= 0)
            member.outputs.interface_every = std::max(1, member.outputs.diagnostics_every);
        RipplesRow row;
        row.lambda_r = lam;
        row.amplitude = s.initial.ripple_ratio * lam;
        try {
            const RunResult r = run_scenario(member);
            row.status = r.status;
            for (const auto& e : r.interface_series) {
                row.max_abs_mean_deviation =
                    std::max(row.max_abs_mean_deviation, std::abs(e[2]));
                row.final_mean_deviation = e[2];
                row.final_rms_deviation = e[3];
            }
        } catch (const std::exception&) {
            row.status = RunStatus::Diverged;
        }
        rep.rows.push_back(row);
    }
    fs::create_directories(s.outputs.dir);
    CsvWriter csv((fs::path(s.outputs.dir) / "ripples.csv").string(),
                  "lambda_r,amplitude,max_abs_mean_deviation,final_mean_deviation,"
                  "final_rms_deviation,status",
                  false);
    for (const auto& r : rep.rows)
        csv.row({r.lambda_r, r.amplitude, r.max_abs_mean_deviation, r.final_mean_deviation,
                 r.final_rms_deviation, static_cast<double>(static_cast<int>(r.status))});
    return rep;
}

void emit_heatmap(const std::string& snapshot_path, const std::string& field,
                  const std::string& out_path) {
    const FieldState s = read_snapshot(snapshot_path);
    if (s.grid.dim != 2) throw UsageError("heatmap: snapshot must be 2-dimensional");
    const auto nc = static_cast<size_t>(s.grid.cell_count());
    std::vector<double> vals(nc);
    if (field == "u0") {
        vals = s.u[0];
    } else if (field == "u1") {
        if (s.k < 2) throw UsageError("heatmap: snapshot has no second component");
        vals = s.u[1];
    } else if (field == "abs_u") {
        for (size_t i = 0; i < nc; ++i) {
            double q = s.u[0][i] * s.u[0][i];
            if (s.k == 2) q += s.u[1][i] * s.u[1][i];
            vals[i] = std::sqrt(q);
        }
    } else if (field == "e" || field == "l" || field == "w") {
        const DensityFields d = densities(s);
        vals = field == "e" ? d.e : field == "l" ? d.l : d.w;
    } else {
        throw UsageError("heatmap: field must be e|l|w|u0|u1|abs_u");
    }
    double lo = vals[0], hi = vals[0];
    for (double v : vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    write_pgm16(out_path, s.grid.cells[0], s.grid.cells[1], vals, lo, hi);
    json j;
    j["field"] = field;
    j["min"] = lo;
    j["max"] = hi;
    j["time"] = s.time;
    j["rows"] = s.grid.cells[0];
    j["cols"] = s.grid.cells[1];
    j["snapshot"] = snapshot_path;
    std::ofstream os(out_path + ".json");
    os << j.dump(2) << "\n";
}

} // namespace hglw
