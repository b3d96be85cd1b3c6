#include "hglw/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace hglw {

RadialDeriv radial_rhs(const RadialState& s, int n) {
    if (!(s.r > 0)) throw DomainError("radial_rhs: r must be > 0");
    if (!(std::abs(s.rdot) < 1)) throw DomainError("radial_rhs: |rdot| must be < 1");
    if (n < 2 || n > 3) throw UsageError("radial_rhs: n must be 2 or 3");
    return {s.rdot, -(1.0 - s.rdot * s.rdot) * (n - 1) / s.r};
}

double RadialSolution::radius_at(double t) const {
    if (samples.empty()) throw UsageError("radius_at: empty solution");
    if (t <= samples.front().t) return samples.front().r;
    const double tl = samples.back().t;
    if (t >= tl) return samples.back().r;
    const auto i = static_cast<size_t>((t - samples.front().t) / dt);
    const size_t j = std::min(i, samples.size() - 2);
    const double s = (t - samples[j].t) / dt;
    return (1 - s) * samples[j].r + s * samples[j + 1].r;
}

RadialSolution radial_solve(double r0, int n, double dt, double t_end, double rdot0) {
    if (!(r0 > 0)) throw UsageError("radial_solve: r0 must be > 0");
    if (!(std::abs(rdot0) < 1)) throw DomainError("radial_solve: |rdot0| must be < 1");
    RadialSolution sol;
    sol.dt = dt;
    double t = 0, r = r0, rd = rdot0;
    sol.samples.push_back({t, r, rd});
    const double nm1 = n - 1;
    auto acc = [&](double rr, double rrd) { return -(1.0 - rrd * rrd) * nm1 / rr; };
    while (t < t_end - 1e-12) {
        if (r < 10 * dt || 1.0 - rd * rd < 1e-6) {
            sol.status = SurfaceStatus::Singular;
            sol.t_star = rd < 0 ? t + r / std::max(1e-12, -rd) : t;
            return sol;
        }
        const double k1r = rd, k1v = acc(r, rd);
        const double k2r = rd + 0.5 * dt * k1v, k2v = acc(r + 0.5 * dt * k1r, rd + 0.5 * dt * k1v);
        const double k3r = rd + 0.5 * dt * k2v, k3v = acc(r + 0.5 * dt * k2r, rd + 0.5 * dt * k2v);
        const double k4r = rd + dt * k3v, k4v = acc(r + dt * k3r, rd + dt * k3v);
        r += dt / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
        rd += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        t += dt;
        if (!(r > 0)) {
            sol.status = SurfaceStatus::Singular;
            sol.t_star = t;
            return sol;
        }
        sol.samples.push_back({t, r, rd});
    }
    return sol;
}

// ---------------------------------------------------------------------------
// graph PDE

namespace {

// h_tt from the expanded minimal-graph equation at every grid point
void graph_accel(const GraphState& s, const std::vector<double>& h,
                 const std::vector<double>& v, std::vector<double>& out, bool& timelike) {
    const int n = static_cast<int>(h.size());
    const double idy = 1.0 / (2.0 * s.dy), idy2 = 1.0 / (s.dy * s.dy);
    out.resize(n);
    timelike = true;
    for (int j = 0; j < n; ++j) {
        const int jm = (j == 0) ? n - 1 : j - 1;
        const int jp = (j == n - 1) ? 0 : j + 1;
        const double hy = (h[jp] - h[jm]) * idy;
        const double hyy = (h[jp] + h[jm] - 2.0 * h[j]) * idy2;
        const double hty = (v[jp] - v[jm]) * idy;
        const double ht = v[j];
        if (1.0 - ht * ht + hy * hy <= 0) timelike = false;
        out[j] = (2.0 * ht * hy * hty + (1.0 - ht * ht) * hyy) / (1.0 + hy * hy);
    }
}

} // namespace

GraphState graph_pde_step(const GraphState& s, double dt) {
    GraphState out = s;
    if (s.status == SurfaceStatus::Singular) return out;
    const int n = static_cast<int>(s.h.size());
    std::vector<double> a0, a1;
    bool ok = true;
    graph_accel(s, s.h, s.hdot, a0, ok);
    if (!ok) {
        out.status = SurfaceStatus::Singular;
        return out;
    }
    // velocity Verlet with a velocity predictor for the v-dependent force
    std::vector<double> hn(n), vp(n), vn(n);
    for (int j = 0; j < n; ++j) {
        hn[j] = s.h[j] + dt * s.hdot[j] + 0.5 * dt * dt * a0[j];
        vp[j] = s.hdot[j] + dt * a0[j];
    }
    graph_accel(s, hn, vp, a1, ok);
    for (int j = 0; j < n; ++j) vn[j] = s.hdot[j] + 0.5 * dt * (a0[j] + a1[j]);
    out.h = std::move(hn);
    out.hdot = std::move(vn);
    out.t = s.t + dt;
    // re-check the time-like invariant on the new state
    for (int j = 0; j < n; ++j) {
        const int jm = (j == 0) ? n - 1 : j - 1;
        const int jp = (j == n - 1) ? 0 : j + 1;
        const double hy = (out.h[jp] - out.h[jm]) / (2.0 * s.dy);
        if (1.0 - out.hdot[j] * out.hdot[j] + hy * hy <= 0) {
            out.status = SurfaceStatus::Singular;
            break;
        }
    }
    if (!ok) out.status = SurfaceStatus::Singular;
    return out;
}

double graph_minkowski_area(const GraphState& s) {
    const int n = static_cast<int>(s.h.size());
    double area = 0;
    for (int j = 0; j < n; ++j) {
        const int jm = (j == 0) ? n - 1 : j - 1;
        const int jp = (j == n - 1) ? 0 : j + 1;
        const double hy = (s.h[jp] - s.h[jm]) / (2.0 * s.dy);
        const double q = 1.0 - s.hdot[j] * s.hdot[j] + hy * hy;
        area += std::sqrt(std::max(0.0, q)) * s.dy;
    }
    return area;
}

// ---------------------------------------------------------------------------
// front tracking

FrontCurve make_circle_front(double r0, int m, double v0, std::array<double, 2> center) {
    FrontCurve c;
    c.vertices.resize(m);
    c.normal_speed.assign(m, v0);
    for (int i = 0; i < m; ++i) {
        const double th = 2.0 * M_PI * i / m;
        c.vertices[i] = {center[0] + r0 * std::cos(th), center[1] + r0 * std::sin(th)};
    }
    return c;
}

FrontCurve make_ellipse_front(double a, double b, int m) {
    FrontCurve c;
    c.vertices.resize(m);
    c.normal_speed.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        const double th = 2.0 * M_PI * i / m;
        c.vertices[i] = {a * std::cos(th), b * std::sin(th)};
    }
    return c;
}

namespace {

struct Geometry {
    std::vector<double> kappa;
    std::vector<std::array<double, 2>> normal; // outward unit normal (CCW curve)
};

Geometry curve_geometry(const std::vector<std::array<double, 2>>& v) {
    const int m = static_cast<int>(v.size());
    Geometry g;
    g.kappa.resize(m);
    g.normal.resize(m);
    for (int i = 0; i < m; ++i) {
        const auto& pm = v[(i + m - 1) % m];
        const auto& pc = v[i];
        const auto& pp = v[(i + 1) % m];
        const double ax = pc[0] - pm[0], ay = pc[1] - pm[1];
        const double bx = pp[0] - pc[0], by = pp[1] - pc[1];
        const double cx = pp[0] - pm[0], cy = pp[1] - pm[1];
        const double la = std::hypot(ax, ay), lb = std::hypot(bx, by), lc = std::hypot(cx, cy);
        const double cross = ax * by - ay * bx;
        // circumscribed-circle curvature; CCW convex (left turn) => kappa < 0
        g.kappa[i] = (la * lb * lc > 0) ? -2.0 * cross / (la * lb * lc) : 0.0;
        // outward normal of a CCW curve: rotate the centered tangent right
        const double tc = std::hypot(cx, cy);
        g.normal[i] = {cy / tc, -cx / tc};
    }
    return g;
}

// resample the closed polyline to m uniformly spaced vertices by arclength,
// carrying the scalar field V along by linear interpolation
void redistribute(std::vector<std::array<double, 2>>& v, std::vector<double>& V) {
    const int m = static_cast<int>(v.size());
    std::vector<double> cum(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % m];
        cum[i + 1] = cum[i] + std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    const double total = cum[m];
    std::vector<std::array<double, 2>> nv(m);
    std::vector<double> nV(m);
    int seg = 0;
    for (int i = 0; i < m; ++i) {
        const double target = total * i / m;
        while (seg < m - 1 && cum[seg + 1] < target) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double s = len > 0 ? (target - cum[seg]) / len : 0.0;
        const auto& a = v[seg];
        const auto& b = v[(seg + 1) % m];
        nv[i] = {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
        nV[i] = V[seg] + s * (V[(seg + 1) % m] - V[seg]);
    }
    v = std::move(nv);
    V = std::move(nV);
}

bool segments_intersect(const std::array<double, 2>& p1, const std::array<double, 2>& p2,
                        const std::array<double, 2>& q1, const std::array<double, 2>& q2) {
    auto orient = [](const std::array<double, 2>& a, const std::array<double, 2>& b,
                     const std::array<double, 2>& c) {
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    };
    const double o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const double o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

} // namespace

bool front_is_simple(const FrontCurve& c) {
    const int m = static_cast<int>(c.vertices.size());
    for (int i = 0; i < m; ++i) {
        const auto& p1 = c.vertices[i];
        const auto& p2 = c.vertices[(i + 1) % m];
        for (int j = i + 2; j < m; ++j) {
            if (i == 0 && j == m - 1) continue; // shared endpoint with the wrap edge
            if (segments_intersect(p1, p2, c.vertices[j], c.vertices[(j + 1) % m])) return false;
        }
    }
    return true;
}

double front_enclosed_area(const FrontCurve& c) {
    const int m = static_cast<int>(c.vertices.size());
    double a = 0;
    for (int i = 0; i < m; ++i) {
        const auto& p = c.vertices[i];
        const auto& q = c.vertices[(i + 1) % m];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

double front_mean_radius(const FrontCurve& c, std::array<double, 2> center) {
    double s = 0;
    for (const auto& p : c.vertices) s += std::hypot(p[0] - center[0], p[1] - center[1]);
    return s / static_cast<double>(c.vertices.size());
}

FrontCurve front_track_step(const FrontCurve& c, double dt) {
    FrontCurve out = c;
    if (c.status == SurfaceStatus::Singular) return out;
    const int m = static_cast<int>(c.vertices.size());

    // explicit midpoint (RK2) on (X, V)
    const Geometry g0 = curve_geometry(c.vertices);
    std::vector<std::array<double, 2>> xh(m);
    std::vector<double> vh(m);
    for (int i = 0; i < m; ++i) {
        xh[i] = {c.vertices[i][0] + 0.5 * dt * c.normal_speed[i] * g0.normal[i][0],
                 c.vertices[i][1] + 0.5 * dt * c.normal_speed[i] * g0.normal[i][1]};
        vh[i] = c.normal_speed[i] +
                0.5 * dt * (1.0 - c.normal_speed[i] * c.normal_speed[i]) * g0.kappa[i];
    }
    const Geometry gh = curve_geometry(xh);
    for (int i = 0; i < m; ++i) {
        out.vertices[i] = {c.vertices[i][0] + dt * vh[i] * gh.normal[i][0],
                           c.vertices[i][1] + dt * vh[i] * gh.normal[i][1]};
        out.normal_speed[i] = c.normal_speed[i] + dt * (1.0 - vh[i] * vh[i]) * gh.kappa[i];
    }
    out.t = c.t + dt;

    redistribute(out.vertices, out.normal_speed);

    double vmax = 0;
    for (double v : out.normal_speed) vmax = std::max(vmax, std::abs(v));
    double spacing = 0;
    for (int i = 0; i < m; ++i) {
        const auto& a = out.vertices[i];
        const auto& b = out.vertices[(i + 1) % m];
        spacing += std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    spacing /= m;
    const double amin = 100.0 * spacing * spacing; // area < (10 h)^2 threshold
    if (vmax >= 1.0 - 1e-6 || std::abs(front_enclosed_area(out)) < amin || !front_is_simple(out)) {
        out.status = SurfaceStatus::Singular;
        out.t_star = out.t;
    }
    return out;
}

void export_front_csv(const std::string& path, const std::vector<FrontCurve>& snaps) {
    std::ofstream os(path);
    os << "t,vertex,x,y,normal_speed\r\n";
    char buf[160];
    for (const auto& c : snaps)
        for (size_t i = 0; i < c.vertices.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g\r\n", c.t, i,
                          c.vertices[i][0], c.vertices[i][1], c.normal_speed[i]);
            os << buf;
        }
}

void export_graph_csv(const std::string& path, const std::vector<GraphState>& snaps) {
    std::ofstream os(path);
    os << "t,y,h,hdot\r\n";
    char buf[160];
    for (const auto& s : snaps)
        for (size_t j = 0; j < s.h.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\r\n", s.t,
                          s.y0 + (static_cast<double>(j) + 0.5) * s.dy, s.h[j], s.hdot[j]);
            os << buf;
        }
}

} // namespace hglw
