#pragma once

#include <array>
#include <string>
#include <vector>

#include "hglw/common.hpp"

// Independent reference dynamics for time-like minimal hypersurfaces:
// radial ODE, (1+1) minimal graph PDE, and parametric front tracking of
// closed plane curves.  Curvature sign convention, fixed module-wide:
// outward normal, convex curve => kappa < 0, so a circle at rest collapses.

namespace hglw {

enum class SurfaceStatus { Ok, Singular };

// --- radial ----------------------------------------------------------------

struct RadialState {
    double t = 0;
    double r = 1;    // > 0
    double rdot = 0; // |rdot| < 1 (time-like motion)
};

struct RadialDeriv {
    double dr, drdot;
};

// dr = rdot, drdot = -(1 - rdot^2)(n-1)/r
RadialDeriv radial_rhs(const RadialState& s, int n);

struct RadialSolution {
    std::vector<RadialState> samples; // uniform dt, starting at t = 0
    SurfaceStatus status = SurfaceStatus::Ok;
    double t_star = 0; // collapse estimate, valid when status == Singular
    double dt = 0;

    double radius_at(double t) const; // linear interpolation of the samples
};

// Classic RK4 with fixed dt; halts Singular when r < 10 dt or 1 - rdot^2 < 1e-6
// and reports t* by linear extrapolation of the residual fall.
RadialSolution radial_solve(double r0, int n, double dt, double t_end, double rdot0 = 0.0);

// --- (1+1) minimal graph -----------------------------------------------------
// Graph x = h(t,y) on a periodic y-grid; Minkowski area of the graph is
// int sqrt(1 - hdot^2 + h_y^2) dy.  Euler-Lagrange in expanded form:
//   (1 + h_y^2) h_tt - 2 h_t h_y h_ty - (1 - h_t^2) h_yy = 0
// (derivation in docs/graph_pde.md).

struct GraphState {
    double t = 0;
    double y0 = 0; // left edge of the periodic interval
    double dy = 0;
    std::vector<double> h, hdot;
    SurfaceStatus status = SurfaceStatus::Ok;
};

// One velocity-Verlet step (the two-level form of the leapfrog update used by
// the wave solver); preserves the time-like invariant or halts Singular.
GraphState graph_pde_step(const GraphState& s, double dt);

// discrete Minkowski area, the conserved-energy analogue of the graph flow
double graph_minkowski_area(const GraphState& s);

// --- front tracking -----------------------------------------------------------

struct FrontCurve {
    double t = 0;
    std::vector<std::array<double, 2>> vertices; // closed CCW polyline
    std::vector<double> normal_speed;            // scalar V per vertex, |V| < 1
    SurfaceStatus status = SurfaceStatus::Ok;
    double t_star = 0; // set when Singular
};

FrontCurve make_circle_front(double r0, int m, double v0 = 0.0,
                             std::array<double, 2> center = {0, 0});
FrontCurve make_ellipse_front(double a, double b, int m);

// Normal dynamics dV/dt = (1-V^2) kappa, dX/dt = V nu, with per-vertex
// curvature from the circumscribed circle of three consecutive vertices and
// tangential redistribution to uniform arclength after each step.
FrontCurve front_track_step(const FrontCurve& c, double dt);

double front_enclosed_area(const FrontCurve& c);
bool front_is_simple(const FrontCurve& c);
double front_mean_radius(const FrontCurve& c, std::array<double, 2> center = {0, 0});

void export_front_csv(const std::string& path, const std::vector<FrontCurve>& snaps);
void export_graph_csv(const std::string& path, const std::vector<GraphState>& snaps);

} // namespace hglw
