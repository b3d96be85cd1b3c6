#include "hglw/kernels.hpp"

#include <atomic>
#include <cmath>

namespace hglw::kernels {

namespace {

std::atomic<Exec> g_exec{Exec::Parallel};

template <class F>
void for_outer(int n0, Exec exec, F&& body) {
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n0; ++i) body(i);
    } else {
        for (int i = 0; i < n0; ++i) body(i);
    }
}

} // namespace

Exec default_exec() { return g_exec.load(); }
void set_default_exec(Exec e) { g_exec.store(e); }

// ---------------------------------------------------------------------------
// laplacian

namespace {

void lap_1d(const Grid& g, const double* u, double* out, Exec exec) {
    const int n = g.cells[0];
    const double ih2 = 1.0 / (g.spacing * g.spacing);
    const int im0 = g.wrap(0, -1), ip0 = g.wrap(0, n);
    for_outer(n, exec, [&](int i) {
        const int im = (i == 0) ? im0 : i - 1;
        const int ip = (i == n - 1) ? ip0 : i + 1;
        out[i] = (u[im] + u[ip] - 2.0 * u[i]) * ih2;
    });
}

void lap_2d(const Grid& g, const double* u, double* out, Exec exec) {
    const int n0 = g.cells[0], n1 = g.cells[1];
    const double ih2 = 1.0 / (g.spacing * g.spacing);
    for_outer(n0, exec, [&](int i) {
        const double* rm = u + static_cast<std::int64_t>(g.wrap(0, i - 1)) * n1;
        const double* rp = u + static_cast<std::int64_t>(g.wrap(0, i + 1)) * n1;
        const double* rc = u + static_cast<std::int64_t>(i) * n1;
        double* ro = out + static_cast<std::int64_t>(i) * n1;
        const int jm0 = g.wrap(1, -1), jp0 = g.wrap(1, n1);
        for (int j = 0; j < n1; ++j) {
            const int jm = (j == 0) ? jm0 : j - 1;
            const int jp = (j == n1 - 1) ? jp0 : j + 1;
            ro[j] = (rm[j] + rp[j] + rc[jm] + rc[jp] - 4.0 * rc[j]) * ih2;
        }
    });
}

void lap_3d(const Grid& g, const double* u, double* out, Exec exec) {
    const int n0 = g.cells[0], n1 = g.cells[1], n2 = g.cells[2];
    const double ih2 = 1.0 / (g.spacing * g.spacing);
    const std::int64_t s0 = static_cast<std::int64_t>(n1) * n2;
    for_outer(n0, exec, [&](int i) {
        const double* pm = u + g.wrap(0, i - 1) * s0;
        const double* pp = u + g.wrap(0, i + 1) * s0;
        const double* pc = u + i * s0;
        double* po = out + i * s0;
        for (int j = 0; j < n1; ++j) {
            const double* qm = pc + static_cast<std::int64_t>(g.wrap(1, j - 1)) * n2;
            const double* qp = pc + static_cast<std::int64_t>(g.wrap(1, j + 1)) * n2;
            const double* qc = pc + static_cast<std::int64_t>(j) * n2;
            const double* am = pm + static_cast<std::int64_t>(j) * n2;
            const double* ap = pp + static_cast<std::int64_t>(j) * n2;
            double* qo = po + static_cast<std::int64_t>(j) * n2;
            const int km0 = g.wrap(2, -1), kp0 = g.wrap(2, n2);
            for (int k = 0; k < n2; ++k) {
                const int km = (k == 0) ? km0 : k - 1;
                const int kp = (k == n2 - 1) ? kp0 : k + 1;
                qo[k] = (am[k] + ap[k] + qm[k] + qp[k] + qc[km] + qc[kp] - 6.0 * qc[k]) * ih2;
            }
        }
    });
}

} // namespace

void laplacian(const Grid& g, std::span<const double> u, std::span<double> out, Exec exec) {
    if (static_cast<std::int64_t>(u.size()) != g.cell_count() || u.size() != out.size())
        throw UsageError("laplacian: array size mismatch");
    switch (g.dim) {
        case 1: lap_1d(g, u.data(), out.data(), exec); break;
        case 2: lap_2d(g, u.data(), out.data(), exec); break;
        default: lap_3d(g, u.data(), out.data(), exec); break;
    }
}

// ---------------------------------------------------------------------------
// gradient4: 4th-order central difference along one axis

void gradient4(const Grid& g, std::span<const double> u, int axis, std::span<double> out,
               Exec exec) {
    if (axis < 0 || axis >= g.dim) throw UsageError("gradient4: bad axis");
    if (static_cast<std::int64_t>(u.size()) != g.cell_count() || u.size() != out.size())
        throw UsageError("gradient4: array size mismatch");
    const double h = g.spacing;
    const double c4 = 1.0 / (12.0 * h), c2 = 1.0 / (2.0 * h);
    const int n0 = g.dim >= 1 ? g.cells[0] : 1;
    const int nax = g.cells[axis];
    const bool periodic = g.boundary == Boundary::Periodic;

    // stride of one step along `axis`
    std::int64_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= g.cells[a];
    std::int64_t inner = 1; // product of extents after axis
    for (int a = axis + 1; a < g.dim; ++a) inner *= g.cells[a];
    std::int64_t outer = 1; // product of extents before axis
    for (int a = 0; a < axis; ++a) outer *= g.cells[a];
    (void)n0;

    const double* up = u.data();
    double* op = out.data();
    // iterate lines along the axis; parallelize over the flattened line id
    const std::int64_t nlines = outer * inner;
    auto line_body = [&](std::int64_t line) {
        const std::int64_t o = line / inner, r = line % inner;
        const double* base = up + o * (stride * nax) + r;
        double* ob = op + o * (stride * nax) + r;
        auto at = [&](int i) -> double { return base[static_cast<std::int64_t>(g.wrap(axis, i)) * stride]; };
        for (int i = 0; i < nax; ++i) {
            const bool edge = (i < 2 || i >= nax - 2);
            double d;
            if (!edge || periodic) {
                d = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) * c4;
            } else {
                d = (at(i + 1) - at(i - 1)) * c2; // mirrored 2nd order at the wall
            }
            ob[static_cast<std::int64_t>(i) * stride] = d;
        }
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t line = 0; line < nlines; ++line) line_body(line);
    } else {
        for (std::int64_t line = 0; line < nlines; ++line) line_body(line);
    }
}

void gradient2(const Grid& g, std::span<const double> u, int axis, std::span<double> out,
               Exec exec) {
    if (axis < 0 || axis >= g.dim) throw UsageError("gradient2: bad axis");
    if (static_cast<std::int64_t>(u.size()) != g.cell_count() || u.size() != out.size())
        throw UsageError("gradient2: array size mismatch");
    const double c2 = 1.0 / (2.0 * g.spacing);
    const int nax = g.cells[axis];
    std::int64_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= g.cells[a];
    std::int64_t inner = 1, outer = 1;
    for (int a = axis + 1; a < g.dim; ++a) inner *= g.cells[a];
    for (int a = 0; a < axis; ++a) outer *= g.cells[a];
    const double* up = u.data();
    double* op = out.data();
    const std::int64_t nlines = outer * inner;
    auto line_body = [&](std::int64_t line) {
        const std::int64_t o = line / inner, r = line % inner;
        const double* base = up + o * (stride * nax) + r;
        double* ob = op + o * (stride * nax) + r;
        auto at = [&](int i) -> double {
            return base[static_cast<std::int64_t>(g.wrap(axis, i)) * stride];
        };
        for (int i = 0; i < nax; ++i)
            ob[static_cast<std::int64_t>(i) * stride] = (at(i + 1) - at(i - 1)) * c2;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t line = 0; line < nlines; ++line) line_body(line);
    } else {
        for (std::int64_t line = 0; line < nlines; ++line) line_body(line);
    }
}

// ---------------------------------------------------------------------------
// fused leapfrog step (with optional Rayleigh damping for relaxation runs)

namespace {

struct StepCtx {
    double dt2;     // dt^2
    double ieps2;   // 1/eps^2
    double fprev;   // 1 - mu dt/2
    double idenom;  // 1 / (1 + mu dt/2)
};

// scalar update given laplacian value and field values at the cell
inline double step_cell_k1(const StepCtx& c, double lap, double uc, double up) {
    const double nl = (1.0 - uc * uc) * uc * c.ieps2;
    return (2.0 * uc - c.fprev * up + c.dt2 * (lap + nl)) * c.idenom;
}

} // namespace

void leapfrog_step(const Grid& g, int k, double epsilon, double dt,
                   const std::array<std::vector<double>, 2>& prev,
                   const std::array<std::vector<double>, 2>& curr,
                   std::array<std::vector<double>, 2>& next, double mu, Exec exec) {
    const std::int64_t nc = g.cell_count();
    for (int c = 0; c < k; ++c) {
        if (static_cast<std::int64_t>(prev[c].size()) != nc ||
            static_cast<std::int64_t>(curr[c].size()) != nc)
            throw UsageError("leapfrog_step: array size mismatch");
        next[c].resize(static_cast<size_t>(nc));
    }
    StepCtx ctx;
    ctx.dt2 = dt * dt;
    ctx.ieps2 = 1.0 / (epsilon * epsilon);
    ctx.fprev = 1.0 - 0.5 * mu * dt;
    ctx.idenom = 1.0 / (1.0 + 0.5 * mu * dt);

    const double ih2 = 1.0 / (g.spacing * g.spacing);

    if (g.dim == 1) {
        const int n = g.cells[0];
        const int im0 = g.wrap(0, -1), ip0 = g.wrap(0, n);
        if (k == 1) {
            const double *uc = curr[0].data(), *up = prev[0].data();
            double* un = next[0].data();
            for_outer(n, exec, [&](int i) {
                const int im = (i == 0) ? im0 : i - 1;
                const int ip = (i == n - 1) ? ip0 : i + 1;
                const double lap = (uc[im] + uc[ip] - 2.0 * uc[i]) * ih2;
                un[i] = step_cell_k1(ctx, lap, uc[i], up[i]);
            });
        } else {
            const double *a = curr[0].data(), *b = curr[1].data();
            const double *pa = prev[0].data(), *pb = prev[1].data();
            double *na = next[0].data(), *nb = next[1].data();
            for_outer(n, exec, [&](int i) {
                const int im = (i == 0) ? im0 : i - 1;
                const int ip = (i == n - 1) ? ip0 : i + 1;
                const double lapa = (a[im] + a[ip] - 2.0 * a[i]) * ih2;
                const double lapb = (b[im] + b[ip] - 2.0 * b[i]) * ih2;
                const double m = (1.0 - a[i] * a[i] - b[i] * b[i]) * ctx.ieps2;
                na[i] = (2.0 * a[i] - ctx.fprev * pa[i] + ctx.dt2 * (lapa + m * a[i])) * ctx.idenom;
                nb[i] = (2.0 * b[i] - ctx.fprev * pb[i] + ctx.dt2 * (lapb + m * b[i])) * ctx.idenom;
            });
        }
        return;
    }

    if (g.dim == 2) {
        const int n0 = g.cells[0], n1 = g.cells[1];
        auto row = [&](const double* base, int i) {
            return base + static_cast<std::int64_t>(i) * n1;
        };
        const int jm0 = g.wrap(1, -1), jp0 = g.wrap(1, n1);
        if (k == 1) {
            const double *uc = curr[0].data(), *up = prev[0].data();
            double* un = next[0].data();
            for_outer(n0, exec, [&](int i) {
                const double* rm = row(uc, g.wrap(0, i - 1));
                const double* rp = row(uc, g.wrap(0, i + 1));
                const double* rc = row(uc, i);
                const double* rq = row(up, i);
                double* ro = next[0].data() + static_cast<std::int64_t>(i) * n1;
                (void)un;
                for (int j = 0; j < n1; ++j) {
                    const int jm = (j == 0) ? jm0 : j - 1;
                    const int jp = (j == n1 - 1) ? jp0 : j + 1;
                    const double lap = (rm[j] + rp[j] + rc[jm] + rc[jp] - 4.0 * rc[j]) * ih2;
                    ro[j] = step_cell_k1(ctx, lap, rc[j], rq[j]);
                }
            });
        } else {
            for_outer(n0, exec, [&](int i) {
                const double* am = row(curr[0].data(), g.wrap(0, i - 1));
                const double* ap = row(curr[0].data(), g.wrap(0, i + 1));
                const double* ac = row(curr[0].data(), i);
                const double* aq = row(prev[0].data(), i);
                double* ao = next[0].data() + static_cast<std::int64_t>(i) * n1;
                const double* bm = row(curr[1].data(), g.wrap(0, i - 1));
                const double* bp = row(curr[1].data(), g.wrap(0, i + 1));
                const double* bc = row(curr[1].data(), i);
                const double* bq = row(prev[1].data(), i);
                double* bo = next[1].data() + static_cast<std::int64_t>(i) * n1;
                for (int j = 0; j < n1; ++j) {
                    const int jm = (j == 0) ? jm0 : j - 1;
                    const int jp = (j == n1 - 1) ? jp0 : j + 1;
                    const double lapa = (am[j] + ap[j] + ac[jm] + ac[jp] - 4.0 * ac[j]) * ih2;
                    const double lapb = (bm[j] + bp[j] + bc[jm] + bc[jp] - 4.0 * bc[j]) * ih2;
                    const double m = (1.0 - ac[j] * ac[j] - bc[j] * bc[j]) * ctx.ieps2;
                    ao[j] = (2.0 * ac[j] - ctx.fprev * aq[j] + ctx.dt2 * (lapa + m * ac[j])) * ctx.idenom;
                    bo[j] = (2.0 * bc[j] - ctx.fprev * bq[j] + ctx.dt2 * (lapb + m * bc[j])) * ctx.idenom;
                }
            });
        }
        return;
    }

    // dim == 3 (scalar and complex share the generic path)
    const int n0 = g.cells[0], n1 = g.cells[1], n2 = g.cells[2];
    const std::int64_t s0 = static_cast<std::int64_t>(n1) * n2;
    for_outer(n0, exec, [&](int i) {
        const int km0 = g.wrap(2, -1), kp0 = g.wrap(2, n2);
        for (int j = 0; j < n1; ++j) {
            const std::int64_t base = i * s0 + static_cast<std::int64_t>(j) * n2;
            const std::int64_t bim = g.wrap(0, i - 1) * s0 + static_cast<std::int64_t>(j) * n2;
            const std::int64_t bip = g.wrap(0, i + 1) * s0 + static_cast<std::int64_t>(j) * n2;
            const std::int64_t bjm = i * s0 + static_cast<std::int64_t>(g.wrap(1, j - 1)) * n2;
            const std::int64_t bjp = i * s0 + static_cast<std::int64_t>(g.wrap(1, j + 1)) * n2;
            for (int kk = 0; kk < n2; ++kk) {
                const int km = (kk == 0) ? km0 : kk - 1;
                const int kp = (kk == n2 - 1) ? kp0 : kk + 1;
                double usq = 0;
                for (int c = 0; c < k; ++c) {
                    const double v = curr[c][base + kk];
                    usq += v * v;
                }
                const double m = (1.0 - usq) * ctx.ieps2;
                for (int c = 0; c < k; ++c) {
                    const double* uc = curr[c].data();
                    const double lap = (uc[bim + kk] + uc[bip + kk] + uc[bjm + kk] + uc[bjp + kk] +
                                        uc[base + km] + uc[base + kp] - 6.0 * uc[base + kk]) * ih2;
                    next[c][base + kk] = (2.0 * uc[base + kk] - ctx.fprev * prev[c][base + kk] +
                                          ctx.dt2 * (lap + m * uc[base + kk])) * ctx.idenom;
                }
            }
        }
    });
}

void wave_rhs(const Grid& g, int k, double epsilon,
              const std::array<std::vector<double>, 2>& u,
              std::array<std::vector<double>, 2>& out, Exec exec) {
    const std::int64_t nc = g.cell_count();
    const double ieps2 = 1.0 / (epsilon * epsilon);
    for (int c = 0; c < k; ++c) {
        out[c].resize(static_cast<size_t>(nc));
        laplacian(g, u[c], out[c], exec);
    }
    auto body = [&](std::int64_t id) {
        double usq = 0;
        for (int c = 0; c < k; ++c) usq += u[c][id] * u[c][id];
        const double m = (1.0 - usq) * ieps2;
        for (int c = 0; c < k; ++c) out[c][id] += m * u[c][id];
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t id = 0; id < nc; ++id) body(id);
    } else {
        for (std::int64_t id = 0; id < nc; ++id) body(id);
    }
}

// ---------------------------------------------------------------------------
// reductions

namespace {

double pairwise_sum_rec(const double* v, std::int64_t n) {
    if (n <= 64) {
        double s = 0;
        for (std::int64_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::int64_t half = n / 2;
    return pairwise_sum_rec(v, half) + pairwise_sum_rec(v + half, n - half);
}

} // namespace

double pairwise_sum(std::span<const double> v) {
    return pairwise_sum_rec(v.data(), static_cast<std::int64_t>(v.size()));
}

std::int64_t nonfinite_count(std::span<const double> v, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(v.size());
    std::int64_t cnt = 0;
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : cnt)
        for (std::int64_t i = 0; i < n; ++i)
            if (!std::isfinite(v[i])) ++cnt;
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            if (!std::isfinite(v[i])) ++cnt;
    }
    return cnt;
}

double max_abs(std::span<const double> v, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(v.size());
    double m = 0;
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(max : m)
        for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
    } else {
        for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
    }
    return m;
}

} // namespace hglw::kernels
