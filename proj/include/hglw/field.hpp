#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "hglw/grid.hpp"

namespace hglw {

// Quartic double-well W(u) = (1 - |u|^2)^2 / 4, vanishing on |u| = 1.
// Kept as a dispatchable kind so other potentials can slot in later.
struct Potential {
    enum class Kind { Quartic };
    Kind kind = Kind::Quartic;
};

double potential_eval(const Potential& p, std::span<const double> u);
// grad W(u) = -(1 - |u|^2) u, componentwise
void potential_grad(const Potential& p, std::span<const double> u, std::span<double> out);

// scalar helpers used in kernels (quartic, k = 1 / k = 2 fast paths)
inline double quartic_w(double usq) { const double m = 1.0 - usq; return 0.25 * m * m; }

// c_1(eps) = eps, c_2(eps) = 1/|log eps|; domain eps in (0,1)
double c_k(int k, double epsilon);

struct ScalingConstant {
    int k;
    double epsilon;
    double value; // c_k(epsilon)
    ScalingConstant(int k_, double eps_) : k(k_), epsilon(eps_), value(c_k(k_, eps_)) {}
};

// Discrete pair (u, du/dt) on a grid at one time instant.  Components are
// stored as separate arrays (structure-of-arrays) so stencil kernels
// vectorize per component.
struct FieldState {
    Grid grid;
    int k = 1;          // 1: scalar, 2: complex written as two real components
    double epsilon = 0.1;
    double time = 0;
    std::array<std::vector<double>, 2> u;
    std::array<std::vector<double>, 2> ut;

    bool finite() const;
    void allocate(); // size arrays to grid.cell_count()
};

using ProfileFn =
    std::function<void(std::span<const double> x, std::span<double> out)>;

// Pointwise sampling of initial data at cell centers; time set to 0.
// A non-finite sample aborts with the offending coordinate in the message.
FieldState init_from_profile(const Grid& grid, int k, double epsilon, const ProfileFn& f,
                             const ProfileFn& g);

} // namespace hglw
