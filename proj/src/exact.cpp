#include "hglw/exact.hpp"

#include <cmath>

namespace hglw {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

double kink_profile(double s) { return std::tanh(s / kSqrt2); }

double kink_profile_deriv(double s) {
    const double q = std::tanh(s / kSqrt2);
    return (1.0 - q * q) / kSqrt2;
}

KinkSpec KinkSpec::make(int n, std::span<const double> direction, double speed, double offset,
                        double epsilon) {
    if (n < 1 || n > 3 || static_cast<int>(direction.size()) != n)
        throw UsageError("KinkSpec: bad dimension");
    double nn = 0;
    for (double d : direction) nn += d * d;
    if (std::abs(std::sqrt(nn) - 1.0) > 1e-12)
        throw UsageError("KinkSpec: direction must be a unit vector");
    if (!(std::abs(speed) < 1)) throw CausalityError("KinkSpec: |v| must be < 1");
    if (!(epsilon > 0)) throw DomainError("KinkSpec: epsilon must be > 0");
    KinkSpec k;
    k.n = n;
    for (int i = 0; i < n; ++i) k.direction[i] = direction[i];
    k.speed = speed;
    k.offset = offset;
    k.epsilon = epsilon;
    return k;
}

double KinkSpec::gamma() const { return 1.0 / std::sqrt(1.0 - speed * speed); }

FieldSample boosted_kink_field(const KinkSpec& spec, double t, std::span<const double> x) {
    double xn = 0;
    for (int i = 0; i < spec.n; ++i) xn += x[i] * spec.direction[i];
    const double g = spec.gamma();
    const double s = g * (xn - spec.speed * t - spec.offset) / spec.epsilon;
    FieldSample out;
    out.u = kink_profile(s);
    out.ut = -spec.speed * g * kink_profile_deriv(s) / spec.epsilon;
    return out;
}

double sigma_quartic() { return 2.0 * kSqrt2 / 3.0; }

double RotatingWaveSpec::amplitude() const {
    return std::sqrt(1.0 + epsilon * epsilon * omega * omega);
}

ComplexSample rotating_wave_field(const RotatingWaveSpec& spec, double t,
                                  std::span<const double> x) {
    double xn = 0;
    for (int i = 0; i < spec.n; ++i) xn += x[i] * spec.direction[i];
    const double s = spec.amplitude();
    const double rho = s * kink_profile(s * (xn - spec.offset) / spec.epsilon);
    const double c = std::cos(spec.omega * t), sn = std::sin(spec.omega * t);
    ComplexSample out;
    out.u = {rho * c, rho * sn};
    out.ut = {-rho * spec.omega * sn, rho * spec.omega * c};
    return out;
}

PulsatingSphereSpec::PulsatingSphereSpec(double r0, int dim) : r0_(r0), dim_(dim) {
    if (!(r0 > 0)) throw UsageError("PulsatingSphereSpec: r0 must be > 0");
    if (dim != 2 && dim != 3) throw UsageError("PulsatingSphereSpec: dim must be 2 or 3");
    if (dim == 2) {
        t_star_ = 0.5 * M_PI * r0;
        return;
    }
    // n = 3: integrate r'' = -(1 - r'^2) (n-1)/r with RK4 until near collapse.
    dt_ = 1e-4 * r0;
    double r = r0, rd = 0, t = 0;
    rs_.push_back(r);
    rds_.push_back(rd);
    auto acc = [&](double rr, double rrd) { return -(1.0 - rrd * rrd) * 2.0 / rr; };
    while (true) {
        const double k1r = rd, k1v = acc(r, rd);
        const double k2r = rd + 0.5 * dt_ * k1v, k2v = acc(r + 0.5 * dt_ * k1r, rd + 0.5 * dt_ * k1v);
        const double k3r = rd + 0.5 * dt_ * k2v, k3v = acc(r + 0.5 * dt_ * k2r, rd + 0.5 * dt_ * k2v);
        const double k4r = rd + dt_ * k3v, k4v = acc(r + dt_ * k3r, rd + dt_ * k3v);
        r += dt_ / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
        rd += dt_ / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        t += dt_;
        if (!(r > 10 * dt_) || 1.0 - rd * rd < 1e-6) break;
        rs_.push_back(r);
        rds_.push_back(rd);
    }
    // linear extrapolation of the remaining fall at near-light speed
    t_star_ = t + (r > 0 ? r / std::max(1e-12, std::abs(rd)) : 0.0);
}

RadialPoint pulsating_radius(const PulsatingSphereSpec& spec, double t) {
    if (t < 0) throw UsageError("pulsating_radius: t must be >= 0");
    if (t >= spec.collapse_time())
        throw SingularTimeError("pulsating_radius: past collapse time", spec.collapse_time());
    RadialPoint p;
    if (spec.dim() == 2) {
        const double w = t / spec.r0();
        p.r = spec.r0() * std::cos(w);
        p.rdot = -std::sin(w);
        p.rddot = -std::cos(w) / spec.r0();
        return p;
    }
    const auto& rs = spec.rs_;
    const auto& rds = spec.rds_;
    const double dtb = spec.dt_;
    const auto i = static_cast<size_t>(t / dtb);
    if (i + 1 >= rs.size())
        throw SingularTimeError("pulsating_radius: past tabulated range", spec.collapse_time());
    // cubic Hermite in (r, rdot)
    const double s = (t - i * dtb) / dtb;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    p.r = h00 * rs[i] + h10 * dtb * rds[i] + h01 * rs[i + 1] + h11 * dtb * rds[i + 1];
    // derivative of the Hermite basis
    const double g00 = 6 * s * (s - 1) / dtb, g10 = (3 * s * s - 4 * s + 1);
    const double g01 = -6 * s * (s - 1) / dtb, g11 = (3 * s * s - 2 * s);
    p.rdot = g00 * rs[i] + g10 * rds[i] * 1.0 + g01 * rs[i + 1] + g11 * rds[i + 1];
    p.rddot = -(1.0 - p.rdot * p.rdot) * 2.0 / p.r;
    return p;
}

double NullGraphProfile::graph_residual(double t, double y) const {
    const double s = y - t;
    const double ht = -fp(s), hy = fp(s);
    const double htt = fpp(s), hyy = fpp(s), hty = -fpp(s);
    return (1 + hy * hy) * htt - 2 * ht * hy * hty - (1 - ht * ht) * hyy;
}

std::array<double, 2> VortexAnsatz::operator()(std::span<const double> x) const {
    // complex product over the centers
    double re = 1.0, im = 0.0;
    for (size_t v = 0; v < centers.size(); ++v) {
        const double dx = x[0] - centers[v][0], dy = x[1] - centers[v][1];
        const double r = std::sqrt(dx * dx + dy * dy);
        const double f = std::tanh(r / (kSqrt2 * epsilon));
        double cr, ci;
        if (r < 1e-300) {
            cr = 0.0;
            ci = 0.0;
        } else if (charges[v] >= 0) {
            cr = f * dx / r;
            ci = f * dy / r;
        } else {
            cr = f * dx / r;
            ci = -f * dy / r;
        }
        const double nre = re * cr - im * ci;
        im = re * ci + im * cr;
        re = nre;
    }
    return {re, im};
}

} // namespace hglw
