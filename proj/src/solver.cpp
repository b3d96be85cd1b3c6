#include "hglw/solver.hpp"

#include <cmath>

namespace hglw {

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::Diverged: return "diverged";
        default: return "max_steps";
    }
}

double stable_dt(const Grid& g, double cfl_fraction) {
    if (!(cfl_fraction > 0 && cfl_fraction <= 1))
        throw UsageError("stable_dt: cfl_fraction must be in (0,1]");
    return cfl_fraction * g.spacing / std::sqrt(static_cast<double>(g.dim));
}

std::array<std::vector<double>, 2> bootstrap_second_level(const FieldState& s0, double dt) {
    std::array<std::vector<double>, 2> acc;
    kernels::wave_rhs(s0.grid, s0.k, s0.epsilon, s0.u, acc);
    std::array<std::vector<double>, 2> u1;
    const auto nc = static_cast<size_t>(s0.grid.cell_count());
    for (int c = 0; c < s0.k; ++c) {
        u1[c].resize(nc);
        const double* u = s0.u[c].data();
        const double* ut = s0.ut[c].data();
        const double* a = acc[c].data();
        double* o = u1[c].data();
        for (size_t i = 0; i < nc; ++i) o[i] = u[i] + dt * ut[i] + 0.5 * dt * dt * a[i];
    }
    return u1;
}

namespace {

bool blew_up(int k, const std::array<std::vector<double>, 2>& u, kernels::Exec exec) {
    for (int c = 0; c < k; ++c) {
        if (kernels::nonfinite_count(u[c], exec) > 0) return true;
        if (kernels::max_abs(u[c], exec) > 10.0) return true;
    }
    return false;
}

FieldState make_snapshot(const Grid& grid, int k, double epsilon, double t,
                         const std::array<std::vector<double>, 2>& curr,
                         const std::array<std::vector<double>, 2>& prev,
                         const std::array<std::vector<double>, 2>& next, double dt) {
    FieldState s;
    s.grid = grid;
    s.k = k;
    s.epsilon = epsilon;
    s.time = t;
    const double i2dt = 1.0 / (2.0 * dt);
    for (int c = 0; c < k; ++c) {
        s.u[c] = curr[c];
        s.ut[c].resize(curr[c].size());
        for (size_t i = 0; i < curr[c].size(); ++i)
            s.ut[c][i] = (next[c][i] - prev[c][i]) * i2dt;
    }
    return s;
}

// Shared integration loop starting at step `m0` with levels (prev, curr).
// Time of `curr` is t0 + m0 dt.  Emits snapshots at m == 0, cadence
// multiples, divergence, and the final step.
Trajectory run_loop(const Grid& grid, int k, double epsilon, double t0,
                    std::array<std::vector<double>, 2> prev,
                    std::array<std::vector<double>, 2> curr, long m0, double dt, long nsteps,
                    RunStatus init_status, const SolverConfig& cfg,
                    const std::vector<SnapshotObserver>& observers, const CheckpointHook& hook) {
    Trajectory traj;
    traj.status = init_status;
    std::array<std::vector<double>, 2> next;
    const auto nc = static_cast<size_t>(grid.cell_count());
    for (int c = 0; c < k; ++c) next[c].resize(nc);

    auto emit = [&](long m) {
        traj.states.push_back(
            make_snapshot(grid, k, epsilon, t0 + m * dt, curr, prev, next, dt));
        for (const auto& ob : observers) ob(traj.states.back());
    };
    auto checkpoint = [&](long m) {
        if (hook.every <= 0 || !hook.fn || m == m0) return;
        if (m % hook.every != 0) return;
        Checkpoint c;
        c.grid = grid;
        c.k = k;
        c.epsilon = epsilon;
        c.time = t0 + m * dt;
        c.dt = dt;
        c.step = m;
        for (int comp = 0; comp < k; ++comp) {
            c.u_prev[comp] = prev[comp];
            c.u_curr[comp] = curr[comp];
        }
        hook.fn(c);
    };

    for (long m = m0; m < nsteps; ++m) {
        checkpoint(m);
        kernels::leapfrog_step(grid, k, epsilon, dt, prev, curr, next, 0.0, cfg.exec);
        if (blew_up(k, next, cfg.exec)) {
            traj.status = RunStatus::Diverged;
            emit(m);
            traj.step_count = m;
            return traj;
        }
        const bool cadence = cfg.snapshot_every > 0 && (m % cfg.snapshot_every == 0);
        if (m == 0 || cadence) emit(m);
        prev.swap(curr);
        curr.swap(next);
    }
    // one extra level for the centered derivative of the final snapshot
    kernels::leapfrog_step(grid, k, epsilon, dt, prev, curr, next, 0.0, cfg.exec);
    if (blew_up(k, next, cfg.exec)) traj.status = RunStatus::Diverged;
    emit(nsteps);
    traj.step_count = nsteps;
    return traj;
}

} // namespace

Trajectory run(const FieldState& s0, const SolverConfig& cfg,
               const std::vector<SnapshotObserver>& observers, const CheckpointHook& hook) {
    if (!s0.finite()) throw UsageError("run: non-finite initial state");
    if (s0.grid.spacing > s0.epsilon / cfg.points_per_width * (1.0 + 1e-12))
        throw ConfigError("run: resolution rule h <= eps/points_per_width violated");

    const double dt = stable_dt(s0.grid, cfg.cfl_fraction);
    long nsteps = static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9));
    if (nsteps < 0) nsteps = 0;
    RunStatus status = RunStatus::Completed;
    if (nsteps > cfg.max_steps) {
        nsteps = cfg.max_steps;
        status = RunStatus::MaxSteps;
    }

    if (nsteps == 0) {
        Trajectory traj;
        traj.status = status;
        traj.states.push_back(s0);
        for (const auto& ob : observers) ob(traj.states.back());
        traj.step_count = 0;
        return traj;
    }

    // backward Taylor extension u^{-1} = u^0 - dt u_t^0 + dt^2/2 rhs(u^0):
    // the first forward step then reproduces bootstrap_second_level and the
    // centered du/dt is defined already at t = 0.
    std::array<std::vector<double>, 2> prev, curr, acc;
    kernels::wave_rhs(s0.grid, s0.k, s0.epsilon, s0.u, acc, cfg.exec);
    const auto nc = static_cast<size_t>(s0.grid.cell_count());
    for (int c = 0; c < s0.k; ++c) {
        prev[c].resize(nc);
        for (size_t i = 0; i < nc; ++i)
            prev[c][i] = s0.u[c][i] - dt * s0.ut[c][i] + 0.5 * dt * dt * acc[c][i];
        curr[c] = s0.u[c];
    }
    return run_loop(s0.grid, s0.k, s0.epsilon, s0.time, std::move(prev), std::move(curr), 0, dt,
                    nsteps, status, cfg, observers, hook);
}

Trajectory resume(const Checkpoint& c, const SolverConfig& cfg,
                  const std::vector<SnapshotObserver>& observers, const CheckpointHook& hook) {
    const double dt = stable_dt(c.grid, cfg.cfl_fraction);
    if (std::abs(dt - c.dt) > 1e-15 * c.dt)
        throw ConfigError("resume: solver dt differs from the checkpointed dt");
    long nsteps = static_cast<long>(std::ceil((cfg.t_end + (c.time - c.step * dt)) / dt - 1e-9));
    // nsteps counted from the original t0 = time - step*dt
    RunStatus status = RunStatus::Completed;
    if (nsteps > cfg.max_steps) {
        nsteps = cfg.max_steps;
        status = RunStatus::MaxSteps;
    }
    if (c.step >= nsteps) throw ConfigError("resume: checkpoint is at or past t_end");
    const double t0 = c.time - c.step * dt;
    return run_loop(c.grid, c.k, c.epsilon, t0, c.u_prev, c.u_curr, c.step, dt, nsteps, status,
                    cfg, observers, hook);
}

FieldState relax_damped(const FieldState& s0, double mu, double t_relax,
                        const SolverConfig& cfg) {
    const double dt = stable_dt(s0.grid, cfg.cfl_fraction);
    const long nsteps = static_cast<long>(std::ceil(t_relax / dt - 1e-9));
    std::array<std::vector<double>, 2> prev, curr, next, acc;
    kernels::wave_rhs(s0.grid, s0.k, s0.epsilon, s0.u, acc, cfg.exec);
    const auto nc = static_cast<size_t>(s0.grid.cell_count());
    for (int c = 0; c < s0.k; ++c) {
        prev[c].resize(nc);
        for (size_t i = 0; i < nc; ++i)
            prev[c][i] = s0.u[c][i] - dt * s0.ut[c][i] + 0.5 * dt * dt * acc[c][i];
        curr[c] = s0.u[c];
        next[c].resize(nc);
    }
    for (long m = 0; m < nsteps; ++m) {
        kernels::leapfrog_step(s0.grid, s0.k, s0.epsilon, dt, prev, curr, next, mu, cfg.exec);
        prev.swap(curr);
        curr.swap(next);
    }
    FieldState out;
    out.grid = s0.grid;
    out.k = s0.k;
    out.epsilon = s0.epsilon;
    out.time = 0;
    for (int c = 0; c < s0.k; ++c) {
        out.u[c] = curr[c];
        out.ut[c].assign(nc, 0.0);
    }
    return out;
}

} // namespace hglw
