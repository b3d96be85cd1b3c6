#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hglw/field.hpp"
#include "hglw/grid.hpp"

// Data-parallel grid kernels.  Every kernel comes in a serial and an
// OpenMP-parallel flavor producing bit-identical results: per-cell arithmetic
// is independent, and reductions go through a fixed-shape pairwise tree that
// does not depend on the thread count.

namespace hglw::kernels {

enum class Exec { Serial, Parallel };

Exec default_exec();
void set_default_exec(Exec e);

// Second-order 2n+1-point laplacian, (sum_i u(x+he_i)+u(x-he_i) - 2n u)/h^2.
// Periodic wraps indices, Neumann mirrors the boundary-adjacent cell.
void laplacian(const Grid& g, std::span<const double> u, std::span<double> out,
               Exec exec = default_exec());

// Fourth-order central first derivative along `axis`; the two cells next to a
// Neumann boundary fall back to the mirrored second-order stencil.
void gradient4(const Grid& g, std::span<const double> u, int axis, std::span<double> out,
               Exec exec = default_exec());

// Plain second-order central first derivative along `axis` (used by the
// divergence operator on tensor component fields).
void gradient2(const Grid& g, std::span<const double> u, int axis, std::span<double> out,
               Exec exec = default_exec());

// One fused leapfrog level:
//   next = [2 curr - (1 - mu dt/2) prev + dt^2 (lap(curr) + (1-|u|^2)u/eps^2)] / (1 + mu dt/2)
// mu = 0 is the conservative scheme (the damping factors reduce to exact 1.0).
void leapfrog_step(const Grid& g, int k, double epsilon, double dt,
                   const std::array<std::vector<double>, 2>& prev,
                   const std::array<std::vector<double>, 2>& curr,
                   std::array<std::vector<double>, 2>& next, double mu = 0.0,
                   Exec exec = default_exec());

// rhs = lap(u) + (1-|u|^2)u/eps^2, used by the Taylor bootstrap.
void wave_rhs(const Grid& g, int k, double epsilon,
              const std::array<std::vector<double>, 2>& u,
              std::array<std::vector<double>, 2>& out, Exec exec = default_exec());

// Fixed-order pairwise tree; result independent of thread count by
// construction (single-threaded tree over the contribution array).
double pairwise_sum(std::span<const double> v);

std::int64_t nonfinite_count(std::span<const double> v, Exec exec = default_exec());
double max_abs(std::span<const double> v, Exec exec = default_exec());

} // namespace hglw::kernels
