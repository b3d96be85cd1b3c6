#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "hglw/common.hpp"

namespace hglw {

// --- 1D kink -----------------------------------------------------------
// q(s) = tanh(s/sqrt(2)) solves -q'' + W'(q) = 0 for the quartic well.
double kink_profile(double s);
double kink_profile_deriv(double s); // (1 - q^2)/sqrt(2)

struct KinkSpec {
    int n = 1;
    std::array<double, 3> direction{1, 0, 0}; // unit euclidean normal nu
    double speed = 0;                          // v in (-1,1)
    double offset = 0;                         // x0
    double epsilon = 0.05;

    static KinkSpec make(int n, std::span<const double> direction, double speed, double offset,
                         double epsilon);
    double gamma() const;
};

struct FieldSample {
    double u;
    double ut;
};

// u(t,x) = q(gamma (x.nu - v t - x0)/eps); exact traveling-wave solution for
// k = 1, with u_t = -v gamma q'(.)/eps.
FieldSample boosted_kink_field(const KinkSpec& spec, double t, std::span<const double> x);

// Surface-tension constant of the quartic well:
// sigma = int_{-1}^{1} sqrt(2 W(u)) du = 2 sqrt(2)/3.
double sigma_quartic();

// --- rotating wave (k = 2) ----------------------------------------------
// u(t,x) = rho(x) e^{i omega t} with rho built from the planar kink:
// rho(x) = s q(s (x.nu - x0)/eps), s = sqrt(1 + eps^2 omega^2).
struct RotatingWaveSpec {
    int n = 1;
    double omega = 0;
    double epsilon = 0.05;
    std::array<double, 3> direction{1, 0, 0};
    double offset = 0;

    double amplitude() const; // sqrt(1 + eps^2 omega^2)
};

struct ComplexSample {
    std::array<double, 2> u;
    std::array<double, 2> ut;
};

ComplexSample rotating_wave_field(const RotatingWaveSpec& spec, double t,
                                  std::span<const double> x);

// --- pulsating circle / sphere ------------------------------------------
// Radial reduction r'' = -(1 - r'^2)(n-1)/r.  n = 2 has the closed form
// r(t) = r0 cos(t/r0); n = 3 is integrated once at construction.
class PulsatingSphereSpec {
public:
    PulsatingSphereSpec(double r0, int dim);
    double r0() const { return r0_; }
    int dim() const { return dim_; }
    double collapse_time() const { return t_star_; }

private:
    double r0_;
    int dim_;
    double t_star_;
    // dense samples for n = 3 (t, r, rdot), spacing dt_
    double dt_ = 0;
    std::vector<double> rs_, rds_;
    friend struct PulsatingEval;
};

struct RadialPoint {
    double r, rdot, rddot;
};

// Throws SingularTimeError (carrying t*) for t >= collapse time.
RadialPoint pulsating_radius(const PulsatingSphereSpec& spec, double t);

// --- null graph profiles --------------------------------------------------
// h(t,y) = f(y - t) is an exact zero of the time-like minimal graph equation.
struct NullGraphProfile {
    std::function<double(double)> f, fp, fpp;

    double h(double t, double y) const { return f(y - t); }
    double hdot(double t, double y) const { return -fp(y - t); }
    double hy(double t, double y) const { return fp(y - t); }
    // residual (1+h_y^2) h_tt - 2 h_t h_y h_ty - (1-h_t^2) h_yy with analytic
    // derivatives; identically zero for any twice-differentiable f.
    double graph_residual(double t, double y) const;
};

// --- vortex ansatz (k = 2, n = 2) ----------------------------------------
// Product ansatz of degree +-1 zeros with tanh modulus profiles; used as the
// seed for damped-wave relaxation, validated through diagnostics only.
struct VortexAnsatz {
    std::vector<std::array<double, 2>> centers;
    std::vector<int> charges; // +1 / -1
    double epsilon = 0.05;

    std::array<double, 2> operator()(std::span<const double> x) const;
};

} // namespace hglw
