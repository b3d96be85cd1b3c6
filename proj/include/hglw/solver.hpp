#pragma once

#include <functional>
#include <vector>

#include "hglw/field.hpp"
#include "hglw/kernels.hpp"

namespace hglw {

struct SolverConfig {
    double cfl_fraction = 0.5;      // dt = cfl_fraction * h / sqrt(n), fixed for the run
    double points_per_width = 4.0;  // resolution rule h <= eps / points_per_width
    double t_end = 1.0;
    long max_steps = 100000000;
    int snapshot_every = 0;         // steps between stored snapshots; 0: first and last only
    kernels::Exec exec = kernels::Exec::Parallel;
};

enum class RunStatus { Completed, Diverged, MaxSteps };

std::string to_string(RunStatus s);

struct Trajectory {
    std::vector<FieldState> states; // snapshot times strictly increasing
    long step_count = 0;
    RunStatus status = RunStatus::Completed;
};

// dt = cfl_fraction * h / sqrt(n): CFL bound for unit propagation speed.
double stable_dt(const Grid& g, double cfl_fraction);

// Taylor start u^1 = u^0 + dt u_t^0 + dt^2/2 (lap u^0 - grad W(u^0)/eps^2),
// second-order accurate so the overall scheme stays second order.
std::array<std::vector<double>, 2> bootstrap_second_level(const FieldState& s0, double dt);

// Observers run on the coordinator after each step; they see an immutable
// snapshot whose du/dt is the leapfrog-consistent centered difference
// (u^{m+1} - u^{m-1}) / (2 dt).
using SnapshotObserver = std::function<void(const FieldState&)>;

// Raw leapfrog level pair at one step: everything needed to continue the
// integration bit-exactly.
struct Checkpoint {
    Grid grid;
    int k = 1;
    double epsilon = 0;
    double time = 0; // time of the `curr` level
    double dt = 0;
    std::int64_t step = 0;
    std::array<std::vector<double>, 2> u_prev, u_curr;
};

struct CheckpointHook {
    int every = 0; // steps between checkpoints, 0 disables
    std::function<void(const Checkpoint&)> fn;
};

Trajectory run(const FieldState& s0, const SolverConfig& cfg,
               const std::vector<SnapshotObserver>& observers = {},
               const CheckpointHook& hook = {});

// Continue from a checkpoint; the step sequence (and so every emitted
// snapshot at steps past the checkpoint) is bit-identical to the
// uninterrupted run.
Trajectory resume(const Checkpoint& c, const SolverConfig& cfg,
                  const std::vector<SnapshotObserver>& observers = {},
                  const CheckpointHook& hook = {});

// Damped evolution (u_tt + mu u_t = lap u - grad W/eps^2) used to relax
// ansatz initial data toward a steady profile; returns the relaxed state
// at rest (du/dt = 0, time reset to 0).
FieldState relax_damped(const FieldState& s0, double mu, double t_relax,
                        const SolverConfig& cfg);

} // namespace hglw
