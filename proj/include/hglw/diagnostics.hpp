#pragma once

#include <array>
#include <span>
#include <vector>

#include "hglw/field.hpp"
#include "hglw/kernels.hpp"
#include "hglw/minkowski.hpp"

// Every density, tensor, identity and limit quantity measured on field
// states.  Spatial gradients use the 4th-order central stencil (the
// 2nd-order one leaves an O((h/eps)^2) bias in the equipartition ratio that
// exceeds its tolerance at h = eps/8); the time derivative is the
// leapfrog-consistent centered difference carried by the snapshot.

namespace hglw {

// Per-component time derivative and spatial gradients of a state.
struct FieldDerivs {
    std::array<std::array<std::vector<double>, 3>, 2> grad; // [component][axis]
};

FieldDerivs field_derivatives(const FieldState& s, kernels::Exec exec = kernels::default_exec());

// Rescaled densities at one time:
//   e = c_k ((|u_t|^2 + |grad u|^2)/2 + W/eps^2)
//   l = c_k ((-|u_t|^2 + |grad u|^2)/2 + W/eps^2)
//   w = c_k W/eps^2
struct DensityFields {
    Grid grid;
    std::vector<double> e, l, w;
};

DensityFields densities(const FieldState& s, kernels::Exec exec = kernels::default_exec());
DensityFields densities(const FieldState& s, const FieldDerivs& d, kernels::Exec exec);

// Sum e h^n with the deterministic pairwise reduction.
double total_energy(const FieldState& s, kernels::Exec exec = kernels::default_exec());
double density_total(const DensityFields& d, const std::vector<double>& which);

// Per-cell symmetric stress-energy tensor
//   T^{ab} = -c_k eta^{ag} d_g u . eta^{bd} d_d u + l eta^{ab}
// stored as packed upper-triangle component planes.
struct SymTensorField {
    Grid grid;
    int tensor_dim = 2; // n+1
    std::array<std::vector<double>, 10> comp;

    int pack(int a, int b) const {
        if (a > b) std::swap(a, b);
        return a * tensor_dim - a * (a - 1) / 2 + (b - a);
    }
    double at(std::int64_t cell, int a, int b) const { return comp[pack(a, b)][cell]; }
    SymTensor tensor_at(std::int64_t cell) const;
};

SymTensorField stress_energy(const FieldState& s, kernels::Exec exec = kernels::default_exec());
SymTensorField stress_energy(const FieldState& s, const FieldDerivs& d, const DensityFields& den,
                             kernels::Exec exec);

// max |e - (-T^00)| and max |tr(eta T) - (2w + (n-1)l)| over cells: the two
// algebraic identities that must hold to rounding.
struct IdentityCheck {
    double max_e_vs_T00 = 0;
    double max_trace = 0;
};
IdentityCheck identity_check(const DensityFields& d, const SymTensorField& T);

// d_beta T^{alpha beta} at the middle snapshot of three consecutive,
// equally spaced ones: centered differences in t and x.
struct DivergenceResidual {
    Grid grid;
    int tensor_dim = 2;
    std::array<std::vector<double>, 4> comp; // residual vector per cell
    double max_norm = 0;                     // max over cells/components
    double l2_norm = 0;                      // sqrt(sum |r|^2 h^n)
};

DivergenceResidual divergence_residual(const FieldState& s0, const FieldState& s1,
                                       const FieldState& s2,
                                       kernels::Exec exec = kernels::default_exec());

// Compactly supported C-infinity test field X = psi((t-ct)/rt) prod_a
// psi((x_a-ca)/ra) e_dir with psi(s) = exp(1 - 1/(1-s^2)).
struct BumpField {
    double center_t = 0;
    std::array<double, 3> center_x{};
    double radius_t = 1;
    double radius_x = 1;
    int direction = 0; // 0..n

    double phi(double t, std::span<const double> x) const;
    // d phi / d x^beta (beta = 0 is time)
    double dphi(int beta, double t, std::span<const double> x) const;
};

// Default family: bumps on a per_axis^n lattice over the middle of the
// domain, each coordinate direction, time bump centered mid-window.
std::vector<BumpField> default_test_family(const Grid& g, double t0, double t1, int per_axis);

// Time-slab quadrature of sum (eta T)^{ab} d_b X_a over uniformly spaced
// snapshots (trapezoid in time, midpoint in space).  X must be supported
// inside the domain and the time window.
double stationarity_residual(std::span<const FieldState> window, const BumpField& X,
                             kernels::Exec exec = kernels::default_exec());

// Streaming version for scenario runs: feed uniformly spaced snapshots.
class StationarityAccumulator {
public:
    StationarityAccumulator(std::vector<BumpField> family, kernels::Exec exec);
    void add(const FieldState& s, const SymTensorField& T);
    std::vector<double> finalize() const; // one residual per family member

private:
    std::vector<BumpField> family_;
    kernels::Exec exec_;
    std::vector<double> sums_;
    std::vector<double> first_, last_;
    int count_ = 0;
    double dt_ = 0, last_t_ = 0;
};

// Tube-averaged dw/dl: sum w / sum l over cells with l > theta * max(l).
double equipartition_ratio(const DensityFields& d, double theta);

// Discrete Gamma(t): zero level set (k=1) or vortex points with windings (k=2).
struct InterfaceSet {
    enum class Kind { LevelSet, Vortex };
    Kind kind = Kind::LevelSet;
    int dim = 1;
    std::vector<std::array<double, 3>> points;
    std::vector<std::array<double, 3>> velocities; // filled by the two-snapshot variant
    std::vector<int> windings;                     // Vortex only
    bool has_higher_degree = false;                // |winding| >= 2 seen
};

InterfaceSet interface_extract(const FieldState& s);
// velocity estimate by normal-displacement matching (level sets) or
// nearest-match tracking bounded by 1.5 dt (vortices)
InterfaceSet interface_extract_with_velocity(const FieldState& a, const FieldState& b);

struct ProjectionReport {
    SymTensor T_tilde;
    std::array<double, 4> eigenvalues{}; // descending
    int eigen_count = 0;
    double lambda0 = 0;
    int zero_count = 0; // |lambda| <= 0.05
    double trace = 0;   // tr(eta T_tilde)
    bool spacelike_ok = false;
    bool real_spectrum = true;
    double tube_mass = 0; // sum l h^n over the tube
};

// T_tilde = (sum_tube T h^n) / (sum_tube l h^n) on the spatial ball
// |x - p| < rho; eigenstructure of eta T_tilde; (A3)-style space-like check
// of Id - eta T_tilde over 100 deterministic directions plus eigendirections.
ProjectionReport projection_report(const SymTensorField& T, const DensityFields& d,
                                   double tube_radius, std::span<const double> point);

// l(B_rho(p)) / rho^{n+1-k} for space-time balls over a snapshot window.
std::vector<double> density_ratio_probe(std::span<const FieldState> window,
                                        double pt, std::span<const double> px,
                                        std::span<const double> radii, int k);

} // namespace hglw
