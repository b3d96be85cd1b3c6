#include "hglw/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace hglw {

using kernels::Exec;

FieldDerivs field_derivatives(const FieldState& s, Exec exec) {
    FieldDerivs d;
    const auto nc = static_cast<size_t>(s.grid.cell_count());
    for (int c = 0; c < s.k; ++c)
        for (int a = 0; a < s.grid.dim; ++a) {
            d.grad[c][a].resize(nc);
            kernels::gradient4(s.grid, s.u[c], a, d.grad[c][a], exec);
        }
    return d;
}

DensityFields densities(const FieldState& s, Exec exec) {
    return densities(s, field_derivatives(s, exec), exec);
}

DensityFields densities(const FieldState& s, const FieldDerivs& d, Exec exec) {
    DensityFields out;
    out.grid = s.grid;
    const auto nc = static_cast<size_t>(s.grid.cell_count());
    out.e.resize(nc);
    out.l.resize(nc);
    out.w.resize(nc);
    const double ck = c_k(s.k, s.epsilon);
    const double ieps2 = 1.0 / (s.epsilon * s.epsilon);
    const int k = s.k, dim = s.grid.dim;

    auto body = [&](std::int64_t i) {
        double kin = 0, gr = 0, usq = 0;
        for (int c = 0; c < k; ++c) {
            const double utc = s.ut[c][i];
            kin += utc * utc;
            for (int a = 0; a < dim; ++a) {
                const double gca = d.grad[c][a][i];
                gr += gca * gca;
            }
            usq += s.u[c][i] * s.u[c][i];
        }
        const double wv = quartic_w(usq) * ieps2;
        out.e[i] = ck * (0.5 * (kin + gr) + wv);
        out.l[i] = ck * (0.5 * (gr - kin) + wv);
        out.w[i] = ck * wv;
    };
    const auto n = static_cast<std::int64_t>(nc);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) body(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) body(i);
    }
    return out;
}

double density_total(const DensityFields& d, const std::vector<double>& which) {
    double hn = 1;
    for (int a = 0; a < d.grid.dim; ++a) hn *= d.grid.spacing;
    return kernels::pairwise_sum(which) * hn;
}

double total_energy(const FieldState& s, Exec exec) {
    const DensityFields d = densities(s, exec);
    return density_total(d, d.e);
}

SymTensor SymTensorField::tensor_at(std::int64_t cell) const {
    SymTensor t(tensor_dim - 1);
    for (int a = 0; a < tensor_dim; ++a)
        for (int b = a; b < tensor_dim; ++b) t.set(a, b, at(cell, a, b));
    return t;
}

SymTensorField stress_energy(const FieldState& s, Exec exec) {
    const FieldDerivs d = field_derivatives(s, exec);
    return stress_energy(s, d, densities(s, d, exec), exec);
}

SymTensorField stress_energy(const FieldState& s, const FieldDerivs& d,
                             const DensityFields& den, Exec exec) {
    SymTensorField T;
    T.grid = s.grid;
    T.tensor_dim = s.grid.dim + 1;
    const auto nc = static_cast<size_t>(s.grid.cell_count());
    const int np = SymTensor::packed_size(T.tensor_dim);
    for (int p = 0; p < np; ++p) T.comp[p].resize(nc);
    const double ck = c_k(s.k, s.epsilon);
    const int k = s.k, dim = s.grid.dim;

    auto body = [&](std::int64_t i) {
        // G_ab = sum_c d_a u_c d_b u_c with d_0 = u_t
        double D[4];
        double G[4][4] = {};
        for (int c = 0; c < k; ++c) {
            D[0] = s.ut[c][i];
            for (int a = 0; a < dim; ++a) D[1 + a] = d.grad[c][a][i];
            for (int a = 0; a <= dim; ++a)
                for (int b = a; b <= dim; ++b) G[a][b] += D[a] * D[b];
        }
        const double l = den.l[i];
        for (int a = 0; a <= dim; ++a)
            for (int b = a; b <= dim; ++b) {
                const double sgn = metric_sign(a) * metric_sign(b);
                double v = -ck * sgn * G[a][b];
                if (a == b) v += l * metric_sign(a);
                T.comp[T.pack(a, b)][i] = v;
            }
    };
    const auto n = static_cast<std::int64_t>(nc);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) body(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) body(i);
    }
    return T;
}

IdentityCheck identity_check(const DensityFields& d, const SymTensorField& T) {
    IdentityCheck out;
    const auto nc = static_cast<std::int64_t>(d.e.size());
    const int dim = T.tensor_dim - 1;
    for (std::int64_t i = 0; i < nc; ++i) {
        out.max_e_vs_T00 = std::max(out.max_e_vs_T00, std::abs(d.e[i] + T.at(i, 0, 0)));
        double tr = -T.at(i, 0, 0);
        for (int a = 1; a <= dim; ++a) tr += T.at(i, a, a);
        out.max_trace = std::max(out.max_trace,
                                 std::abs(tr - (2.0 * d.w[i] + (dim - 1) * d.l[i])));
    }
    return out;
}

DivergenceResidual divergence_residual(const FieldState& s0, const FieldState& s1,
                                       const FieldState& s2, Exec exec) {
    const double dt1 = s1.time - s0.time, dt2 = s2.time - s1.time;
    if (!(dt1 > 0) || std::abs(dt2 - dt1) > 1e-9 * dt1)
        throw UsageError("divergence_residual: snapshots not equally spaced");
    if (!s0.grid.same_layout(s1.grid) || !s1.grid.same_layout(s2.grid))
        throw UsageError("divergence_residual: grid mismatch");

    const SymTensorField T0 = stress_energy(s0, exec);
    const SymTensorField T1 = stress_energy(s1, exec);
    const SymTensorField T2 = stress_energy(s2, exec);

    DivergenceResidual r;
    r.grid = s1.grid;
    r.tensor_dim = s1.grid.dim + 1;
    const auto nc = static_cast<size_t>(s1.grid.cell_count());
    const int dim = s1.grid.dim;
    for (int a = 0; a <= dim; ++a) r.comp[a].assign(nc, 0.0);

    // time part: (T2^{a0} - T0^{a0}) / (2 dt)
    const double i2dt = 1.0 / (2.0 * dt1);
    for (int a = 0; a <= dim; ++a) {
        const auto& p0 = T0.comp[T0.pack(a, 0)];
        const auto& p2 = T2.comp[T2.pack(a, 0)];
        auto& ra = r.comp[a];
        for (size_t i = 0; i < nc; ++i) ra[i] = (p2[i] - p0[i]) * i2dt;
    }
    // spatial part: d_i T1^{ai}, 2nd-order central
    std::vector<double> tmp(nc);
    for (int a = 0; a <= dim; ++a)
        for (int i = 0; i < dim; ++i) {
            kernels::gradient2(s1.grid, T1.comp[T1.pack(a, 1 + i)], i, tmp, exec);
            auto& ra = r.comp[a];
            for (size_t c = 0; c < nc; ++c) ra[c] += tmp[c];
        }

    double hn = 1;
    for (int a = 0; a < dim; ++a) hn *= s1.grid.spacing;
    std::vector<double> sq(nc, 0.0);
    for (int a = 0; a <= dim; ++a) {
        r.max_norm = std::max(r.max_norm, kernels::max_abs(r.comp[a], exec));
        for (size_t c = 0; c < nc; ++c) sq[c] += r.comp[a][c] * r.comp[a][c];
    }
    r.l2_norm = std::sqrt(kernels::pairwise_sum(sq) * hn);
    return r;
}

// ---------------------------------------------------------------------------
// stationarity

namespace {

inline double bump1(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}

inline double bump1_deriv(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    const double m = 1.0 - s2;
    return bump1(s) * (-2.0 * s / (m * m));
}

} // namespace

double BumpField::phi(double t, std::span<const double> x) const {
    double v = bump1((t - center_t) / radius_t);
    for (size_t a = 0; a < x.size(); ++a) v *= bump1((x[a] - center_x[a]) / radius_x);
    return v;
}

double BumpField::dphi(int beta, double t, std::span<const double> x) const {
    double v = 1.0;
    if (beta == 0) {
        v = bump1_deriv((t - center_t) / radius_t) / radius_t;
        for (size_t a = 0; a < x.size(); ++a) v *= bump1((x[a] - center_x[a]) / radius_x);
        return v;
    }
    v = bump1((t - center_t) / radius_t);
    for (size_t a = 0; a < x.size(); ++a) {
        const double s = (x[a] - center_x[a]) / radius_x;
        v *= (static_cast<int>(a) == beta - 1) ? bump1_deriv(s) / radius_x : bump1(s);
    }
    return v;
}

std::vector<BumpField> default_test_family(const Grid& g, double t0, double t1, int per_axis) {
    std::vector<BumpField> fam;
    const double rt = 0.4 * (t1 - t0);
    // lattice over the middle 60% of the domain
    std::array<std::vector<double>, 3> coords;
    double rx = 0.2 * g.extent(0);
    for (int a = 0; a < g.dim; ++a) {
        rx = std::min(rx, 0.2 * g.extent(a));
        for (int i = 0; i < per_axis; ++i) {
            const double f = per_axis == 1 ? 0.5 : 0.2 + 0.6 * i / (per_axis - 1.0);
            coords[a].push_back(g.origin[a] + f * g.extent(a));
        }
    }
    std::array<int, 3> idx{};
    while (true) {
        BumpField b;
        b.center_t = 0.5 * (t0 + t1);
        b.radius_t = rt;
        b.radius_x = rx;
        for (int a = 0; a < g.dim; ++a) b.center_x[a] = coords[a][idx[a]];
        for (int dir = 0; dir <= g.dim; ++dir) {
            b.direction = dir;
            fam.push_back(b);
        }
        int a = 0;
        for (; a < g.dim; ++a) {
            if (++idx[a] < per_axis) break;
            idx[a] = 0;
        }
        if (a == g.dim) break;
    }
    return fam;
}

namespace {

void check_bump_support(const Grid& g, const BumpField& X) {
    for (int a = 0; a < g.dim; ++a) {
        const double lo = X.center_x[a] - X.radius_x, hi = X.center_x[a] + X.radius_x;
        if (lo < g.origin[a] || hi > g.origin[a] + g.extent(a))
            throw UsageError("stationarity: test-field support touches the boundary");
    }
}

// sum over cells of (eta T)^{d b} d_b phi h^n at one snapshot
double stationarity_slice(const FieldState& s, const SymTensorField& T, const BumpField& X) {
    const Grid& g = s.grid;
    const int dim = g.dim;
    const double sd = metric_sign(X.direction);
    const auto nc = g.cell_count();
    std::vector<double> contrib;
    contrib.reserve(1024);
    double x[3];
    for (std::int64_t i = 0; i < nc; ++i) {
        g.cell_center(i, x);
        std::span<const double> xs(x, static_cast<size_t>(dim));
        // skip cells outside the bump support quickly
        bool outside = std::abs(s.time - X.center_t) >= X.radius_t;
        for (int a = 0; a < dim && !outside; ++a)
            outside = std::abs(x[a] - X.center_x[a]) >= X.radius_x;
        if (outside) continue;
        double v = 0;
        for (int b = 0; b <= dim; ++b)
            v += T.at(i, X.direction, b) * X.dphi(b, s.time, xs);
        contrib.push_back(sd * v);
    }
    double hn = 1;
    for (int a = 0; a < dim; ++a) hn *= g.spacing;
    return kernels::pairwise_sum(contrib) * hn;
}

} // namespace

double stationarity_residual(std::span<const FieldState> window, const BumpField& X, Exec exec) {
    if (window.size() < 2) throw UsageError("stationarity_residual: need >= 2 snapshots");
    check_bump_support(window[0].grid, X);
    const double dt = window[1].time - window[0].time;
    for (size_t m = 1; m < window.size(); ++m)
        if (std::abs(window[m].time - window[m - 1].time - dt) > 1e-9 * dt)
            throw UsageError("stationarity_residual: snapshots not equally spaced");
    double acc = 0;
    for (size_t m = 0; m < window.size(); ++m) {
        const SymTensorField T = stress_energy(window[m], exec);
        const double wgt = (m == 0 || m + 1 == window.size()) ? 0.5 : 1.0;
        acc += wgt * stationarity_slice(window[m], T, X);
    }
    return acc * dt;
}

StationarityAccumulator::StationarityAccumulator(std::vector<BumpField> family, Exec exec)
    : family_(std::move(family)), exec_(exec) {
    sums_.assign(family_.size(), 0.0);
    first_.assign(family_.size(), 0.0);
    last_.assign(family_.size(), 0.0);
}

void StationarityAccumulator::add(const FieldState& s, const SymTensorField& T) {
    if (count_ == 1) dt_ = s.time - last_t_;
    for (size_t i = 0; i < family_.size(); ++i) {
        const double v = stationarity_slice(s, T, family_[i]);
        sums_[i] += v;
        if (count_ == 0) first_[i] = v;
        last_[i] = v;
    }
    last_t_ = s.time;
    ++count_;
}

std::vector<double> StationarityAccumulator::finalize() const {
    std::vector<double> out(family_.size(), 0.0);
    if (count_ < 2) return out;
    for (size_t i = 0; i < family_.size(); ++i)
        out[i] = (sums_[i] - 0.5 * first_[i] - 0.5 * last_[i]) * dt_;
    return out;
}

// ---------------------------------------------------------------------------

double equipartition_ratio(const DensityFields& d, double theta) {
    if (!(theta > 0)) throw UsageError("equipartition_ratio: theta must be > 0");
    double lmax = 0;
    for (double v : d.l) lmax = std::max(lmax, v);
    const double thr = theta * lmax;
    std::vector<double> lw, ww;
    for (size_t i = 0; i < d.l.size(); ++i)
        if (d.l[i] > thr) {
            lw.push_back(d.l[i]);
            ww.push_back(d.w[i]);
        }
    const double ls = kernels::pairwise_sum(lw);
    if (lw.empty() || !(ls > 0)) throw EmptyTubeError("equipartition_ratio: empty tube");
    return kernels::pairwise_sum(ww) / ls;
}

// ---------------------------------------------------------------------------
// interface extraction

namespace {

void extract_level_set(const FieldState& s, InterfaceSet& out) {
    const Grid& g = s.grid;
    const auto& u = s.u[0];
    const bool periodic = g.boundary == Boundary::Periodic;

    auto add_crossings_axis = [&](int axis) {
        const int nax = g.cells[axis];
        std::int64_t stride = 1;
        for (int a = g.dim - 1; a > axis; --a) stride *= g.cells[a];
        std::int64_t inner = 1, outer = 1;
        for (int a = axis + 1; a < g.dim; ++a) inner *= g.cells[a];
        for (int a = 0; a < axis; ++a) outer *= g.cells[a];
        for (std::int64_t line = 0; line < outer * inner; ++line) {
            const std::int64_t o = line / inner, r = line % inner;
            const double* base = u.data() + o * (stride * nax) + r;
            const int last = periodic ? nax : nax - 1;
            for (int i = 0; i < last; ++i) {
                const double a0 = base[static_cast<std::int64_t>(i) * stride];
                const double a1 = base[static_cast<std::int64_t>((i + 1) % nax) * stride];
                if (!(a0 * a1 < 0) && a0 != 0) continue;
                const double frac = (a0 == a1) ? 0.5 : a0 / (a0 - a1);
                // reconstruct the multi-index of the line to place the point
                std::array<double, 3> p{};
                std::int64_t flat = o * (stride * nax) + r + static_cast<std::int64_t>(i) * stride;
                int idx[3];
                g.unpack(flat, idx);
                for (int a = 0; a < g.dim; ++a) p[a] = g.center(a, idx[a]);
                p[axis] += frac * g.spacing;
                out.points.push_back(p);
            }
        }
    };
    for (int a = 0; a < g.dim; ++a) add_crossings_axis(a);
}

double wrap_angle(double a) {
    while (a > M_PI) a -= 2 * M_PI;
    while (a <= -M_PI) a += 2 * M_PI;
    return a;
}

void extract_vortices(const FieldState& s, InterfaceSet& out) {
    const Grid& g = s.grid;
    if (g.dim != 2)
        throw UsageError("interface_extract: vortex extraction implemented for n = 2");
    const int n0 = g.cells[0], n1 = g.cells[1];
    const bool periodic = g.boundary == Boundary::Periodic;
    const int i_last = periodic ? n0 : n0 - 1;
    const int j_last = periodic ? n1 : n1 - 1;
    const auto& u1 = s.u[0];
    const auto& u2 = s.u[1];
    auto th = [&](int i, int j) {
        const std::int64_t id = g.index(i % n0, j % n1);
        return std::atan2(u2[id], u1[id]);
    };
    for (int i = 0; i < i_last; ++i)
        for (int j = 0; j < j_last; ++j) {
            const double t00 = th(i, j), t10 = th(i + 1, j), t11 = th(i + 1, j + 1),
                         t01 = th(i, j + 1);
            const double tot = wrap_angle(t10 - t00) + wrap_angle(t11 - t10) +
                               wrap_angle(t01 - t11) + wrap_angle(t00 - t01);
            const int w = static_cast<int>(std::lround(tot / (2 * M_PI)));
            if (w == 0) continue;
            // bilinear Newton refinement of the joint zero inside the plaquette
            const std::int64_t c00 = g.index(i, j), c10 = g.index((i + 1) % n0, j),
                               c11 = g.index((i + 1) % n0, (j + 1) % n1),
                               c01 = g.index(i, (j + 1) % n1);
            double a = 0.5, b = 0.5;
            for (int it = 0; it < 8; ++it) {
                auto bil = [&](const std::vector<double>& f) {
                    return (1 - a) * (1 - b) * f[c00] + a * (1 - b) * f[c10] + a * b * f[c11] +
                           (1 - a) * b * f[c01];
                };
                auto bil_da = [&](const std::vector<double>& f) {
                    return -(1 - b) * f[c00] + (1 - b) * f[c10] + b * f[c11] - b * f[c01];
                };
                auto bil_db = [&](const std::vector<double>& f) {
                    return -(1 - a) * f[c00] - a * f[c10] + a * f[c11] + (1 - a) * f[c01];
                };
                const double f1 = bil(u1), f2 = bil(u2);
                const double j11 = bil_da(u1), j12 = bil_db(u1);
                const double j21 = bil_da(u2), j22 = bil_db(u2);
                const double det = j11 * j22 - j12 * j21;
                if (std::abs(det) < 1e-300) break;
                a -= (f1 * j22 - f2 * j12) / det;
                b -= (f2 * j11 - f1 * j21) / det;
                a = std::clamp(a, 0.0, 1.0);
                b = std::clamp(b, 0.0, 1.0);
            }
            out.points.push_back({g.center(0, i) + a * g.spacing,
                                  g.center(1, j) + b * g.spacing, 0.0});
            out.windings.push_back(w);
            if (std::abs(w) >= 2) out.has_higher_degree = true;
        }
}

} // namespace

InterfaceSet interface_extract(const FieldState& s) {
    InterfaceSet out;
    out.dim = s.grid.dim;
    if (s.k == 1) {
        out.kind = InterfaceSet::Kind::LevelSet;
        extract_level_set(s, out);
    } else {
        out.kind = InterfaceSet::Kind::Vortex;
        extract_vortices(s, out);
    }
    return out;
}

namespace {

// multilinear interpolation of a cell-centered field at physical point x
double interp_field(const Grid& g, const std::vector<double>& u, const double* x) {
    int base[3];
    double fr[3];
    for (int a = 0; a < g.dim; ++a) {
        const double s = (x[a] - g.origin[a]) / g.spacing - 0.5;
        double fl = std::floor(s);
        base[a] = static_cast<int>(fl);
        fr[a] = s - fl;
    }
    double acc = 0;
    const int corners = 1 << g.dim;
    for (int cmask = 0; cmask < corners; ++cmask) {
        double wgt = 1;
        std::int64_t id;
        int idx[3];
        for (int a = 0; a < g.dim; ++a) {
            const int off = (cmask >> a) & 1;
            wgt *= off ? fr[a] : 1.0 - fr[a];
            idx[a] = g.wrap(a, base[a] + off);
        }
        id = g.index(idx[0], g.dim > 1 ? idx[1] : 0, g.dim > 2 ? idx[2] : 0);
        acc += wgt * u[id];
    }
    return acc;
}

} // namespace

InterfaceSet interface_extract_with_velocity(const FieldState& a, const FieldState& b) {
    // points are extracted on `a`; `b` may be earlier or later (velocity
    // signs come out right either way through the signed dt)
    InterfaceSet set = interface_extract(a);
    const double dt = b.time - a.time;
    if (dt == 0) throw UsageError("interface velocity: snapshots at identical times");
    set.velocities.assign(set.points.size(), {0, 0, 0});

    if (set.kind == InterfaceSet::Kind::LevelSet) {
        const Grid& g = a.grid;
        const double h = g.spacing;
        const double smax = std::abs(dt) + 2 * h;
        for (size_t p = 0; p < set.points.size(); ++p) {
            double x[3] = {set.points[p][0], set.points[p][1], set.points[p][2]};
            // normal from interpolated central differences of u at the point
            double nvec[3] = {};
            double nn = 0;
            for (int ax = 0; ax < g.dim; ++ax) {
                double xp[3] = {x[0], x[1], x[2]}, xm[3] = {x[0], x[1], x[2]};
                xp[ax] += h;
                xm[ax] -= h;
                nvec[ax] = (interp_field(g, a.u[0], xp) - interp_field(g, a.u[0], xm)) / (2 * h);
                nn += nvec[ax] * nvec[ax];
            }
            if (!(nn > 0)) continue;
            nn = std::sqrt(nn);
            for (int ax = 0; ax < g.dim; ++ax) nvec[ax] /= nn;
            // bracket the zero of u_b along x + s n
            auto ub = [&](double sv) {
                double y[3];
                for (int ax = 0; ax < g.dim; ++ax) y[ax] = x[ax] + sv * nvec[ax];
                return interp_field(g, b.u[0], y);
            };
            const int probes = 16;
            double s0 = 0, s1 = 0;
            bool found = false;
            double prev_s = -smax, prev_v = ub(-smax);
            for (int q = 1; q <= probes; ++q) {
                const double sv = -smax + 2.0 * smax * q / probes;
                const double v = ub(sv);
                if (prev_v == 0 || prev_v * v < 0) {
                    s0 = prev_s;
                    s1 = sv;
                    found = true;
                    // prefer the bracket closest to zero displacement
                    if (sv >= 0) break;
                }
                prev_s = sv;
                prev_v = v;
            }
            if (!found) continue;
            double v0 = ub(s0);
            for (int it = 0; it < 50; ++it) {
                const double sm = 0.5 * (s0 + s1);
                const double vm = ub(sm);
                if (v0 * vm <= 0) {
                    s1 = sm;
                } else {
                    s0 = sm;
                    v0 = vm;
                }
            }
            const double sstar = 0.5 * (s0 + s1);
            for (int ax = 0; ax < g.dim; ++ax) set.velocities[p][ax] = sstar / dt * nvec[ax];
        }
        return set;
    }

    // vortices: nearest-match tracking with sub-luminal displacement guard
    const InterfaceSet setb = interface_extract(b);
    const double dmax = 1.5 * std::abs(dt);
    for (size_t p = 0; p < set.points.size(); ++p) {
        double best = dmax;
        int match = -1;
        for (size_t q = 0; q < setb.points.size(); ++q) {
            if (!setb.windings.empty() && !set.windings.empty() &&
                setb.windings[q] != set.windings[p])
                continue;
            const double dx = setb.points[q][0] - set.points[p][0];
            const double dy = setb.points[q][1] - set.points[p][1];
            const double dist = std::hypot(dx, dy);
            if (dist < best) {
                best = dist;
                match = static_cast<int>(q);
            }
        }
        if (match >= 0)
            for (int ax = 0; ax < 2; ++ax)
                set.velocities[p][ax] = (setb.points[match][ax] - set.points[p][ax]) / dt;
    }
    return set;
}

// ---------------------------------------------------------------------------
// projection report

namespace {

// splitmix64: deterministic direction sampling independent of platform RNGs
struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    double normal() {
        const double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * M_PI * u2);
    }
};

} // namespace

ProjectionReport projection_report(const SymTensorField& T, const DensityFields& d,
                                   double tube_radius, std::span<const double> point) {
    const Grid& g = d.grid;
    if (tube_radius < 3 * g.spacing)
        throw UsageError("projection_report: tube radius must be >= 3h");
    if (static_cast<int>(point.size()) != g.dim)
        throw UsageError("projection_report: point dimension mismatch");

    const int td = T.tensor_dim;
    const int np = SymTensor::packed_size(td);
    const auto nc = g.cell_count();
    std::vector<double> lmass;
    std::array<std::vector<double>, 10> tmass;
    double x[3];
    for (std::int64_t i = 0; i < nc; ++i) {
        g.cell_center(i, x);
        double r2 = 0;
        for (int a = 0; a < g.dim; ++a) r2 += (x[a] - point[a]) * (x[a] - point[a]);
        if (r2 >= tube_radius * tube_radius) continue;
        lmass.push_back(d.l[i]);
        for (int p = 0; p < np; ++p) tmass[p].push_back(T.comp[p][i]);
    }
    double hn = 1;
    for (int a = 0; a < g.dim; ++a) hn *= g.spacing;
    const double lsum = kernels::pairwise_sum(lmass);
    const double ltot = kernels::pairwise_sum(d.l);
    if (lmass.empty() || !(lsum > 0) || lsum < 1e-6 * std::max(0.0, ltot))
        throw EmptyTubeError("projection_report: insufficient concentration in tube");

    ProjectionReport rep{SymTensor(td - 1), {}, 0, 0, 0, 0, false, true, lsum * hn};
    for (int a = 0; a < td; ++a)
        for (int b = a; b < td; ++b)
            rep.T_tilde.set(a, b, kernels::pairwise_sum(tmass[rep.T_tilde.pack(a, b)]) / lsum);

    const EtaSpectrum spec = eig_eta_selfadjoint(rep.T_tilde);
    rep.eigen_count = spec.count;
    rep.real_spectrum = spec.real_spectrum;
    for (int i = 0; i < spec.count; ++i) rep.eigenvalues[i] = spec.values[i];
    rep.lambda0 = spec.values[0];
    for (int i = 0; i < spec.count; ++i)
        if (std::abs(spec.values[i]) <= 0.05) ++rep.zero_count;
    rep.trace = rep.T_tilde.trace_eta();

    // (A3) check on Id - eta T_tilde: images of sampled directions must be
    // space-like (near-zero images are tangent directions and are skipped)
    double P[4][4];
    for (int a = 0; a < td; ++a)
        for (int b = 0; b < td; ++b)
            P[a][b] = (a == b ? 1.0 : 0.0) - metric_sign(a) * rep.T_tilde(a, b);
    double pnorm = 0;
    for (int a = 0; a < td; ++a)
        for (int b = 0; b < td; ++b) pnorm = std::max(pnorm, std::abs(P[a][b]));

    std::vector<std::array<double, 4>> dirs;
    SplitMix rng{0x51a7e5ull};
    for (int s = 0; s < 100; ++s) {
        std::array<double, 4> v{};
        double nn = 0;
        for (int a = 0; a < td; ++a) {
            v[a] = rng.normal();
            nn += v[a] * v[a];
        }
        nn = std::sqrt(nn);
        for (int a = 0; a < td; ++a) v[a] /= nn;
        dirs.push_back(v);
    }
    if (rep.real_spectrum)
        for (int i = 0; i < spec.count; ++i)
            dirs.push_back(eta_eigenvector(rep.T_tilde, spec.values[i]));

    bool ok = true;
    for (const auto& v : dirs) {
        double y[4] = {};
        double ynorm2 = 0;
        for (int a = 0; a < td; ++a) {
            for (int b = 0; b < td; ++b) y[a] += P[a][b] * v[b];
            ynorm2 += y[a] * y[a];
        }
        if (ynorm2 <= 1e-12 * pnorm * pnorm) continue; // annihilated: tangent direction
        double q = -y[0] * y[0];
        for (int a = 1; a < td; ++a) q += y[a] * y[a];
        if (!(q > -1e-9 * ynorm2)) {
            ok = false;
            break;
        }
    }
    rep.spacelike_ok = ok && rep.real_spectrum;
    return rep;
}

std::vector<double> density_ratio_probe(std::span<const FieldState> window, double pt,
                                        std::span<const double> px,
                                        std::span<const double> radii, int k) {
    if (window.empty()) throw UsageError("density_ratio_probe: empty window");
    const Grid& g = window[0].grid;
    const double dts = window.size() > 1 ? window[1].time - window[0].time : 1.0;
    double hn = 1;
    for (int a = 0; a < g.dim; ++a) hn *= g.spacing;
    const int codim_pow = g.dim + 1 - k;

    std::vector<DensityFields> dens;
    dens.reserve(window.size());
    for (const auto& s : window) dens.push_back(densities(s));

    std::vector<double> out;
    for (double rho : radii) {
        std::vector<double> contrib;
        for (size_t m = 0; m < window.size(); ++m) {
            const double dt2 = (window[m].time - pt) * (window[m].time - pt);
            if (dt2 >= rho * rho) continue;
            double x[3];
            const auto nc = g.cell_count();
            for (std::int64_t i = 0; i < nc; ++i) {
                g.cell_center(i, x);
                double r2 = dt2;
                for (int a = 0; a < g.dim; ++a) r2 += (x[a] - px[a]) * (x[a] - px[a]);
                if (r2 < rho * rho) contrib.push_back(dens[m].l[i]);
            }
        }
        out.push_back(kernels::pairwise_sum(contrib) * hn * dts / std::pow(rho, codim_pow));
    }
    return out;
}

} // namespace hglw
