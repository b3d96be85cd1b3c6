#include "hglw/field.hpp"

#include <cmath>
#include <sstream>

namespace hglw {

double potential_eval(const Potential& p, std::span<const double> u) {
    (void)p; // single kind for now
    double usq = 0;
    for (double c : u) usq += c * c;
    return quartic_w(usq);
}

void potential_grad(const Potential& p, std::span<const double> u, std::span<double> out) {
    (void)p;
    if (out.size() != u.size()) throw UsageError("potential_grad: size mismatch");
    double usq = 0;
    for (double c : u) usq += c * c;
    const double m = 1.0 - usq;
    for (size_t i = 0; i < u.size(); ++i) out[i] = -m * u[i];
}

double c_k(int k, double epsilon) {
    if (k != 1 && k != 2) throw UsageError("c_k: k must be 1 or 2");
    if (!(epsilon > 0 && epsilon < 1)) throw DomainError("c_k: epsilon must be in (0,1)");
    return k == 1 ? epsilon : 1.0 / std::abs(std::log(epsilon));
}

void FieldState::allocate() {
    const auto nc = static_cast<size_t>(grid.cell_count());
    for (int c = 0; c < k; ++c) {
        u[c].assign(nc, 0.0);
        ut[c].assign(nc, 0.0);
    }
}

bool FieldState::finite() const {
    for (int c = 0; c < k; ++c) {
        for (double v : u[c])
            if (!std::isfinite(v)) return false;
        for (double v : ut[c])
            if (!std::isfinite(v)) return false;
    }
    return true;
}

FieldState init_from_profile(const Grid& grid, int k, double epsilon, const ProfileFn& f,
                             const ProfileFn& g) {
    if (k != 1 && k != 2) throw UsageError("init_from_profile: k must be 1 or 2");
    FieldState s;
    s.grid = grid;
    s.k = k;
    s.epsilon = epsilon;
    s.time = 0;
    s.allocate();
    const std::int64_t nc = grid.cell_count();
    double x[3];
    double val[2];
    for (std::int64_t id = 0; id < nc; ++id) {
        grid.cell_center(id, x);
        std::span<const double> xs(x, static_cast<size_t>(grid.dim));
        std::span<double> vs(val, static_cast<size_t>(k));

        f(xs, vs);
        for (int c = 0; c < k; ++c) {
            if (!std::isfinite(val[c])) {
                std::ostringstream os;
                os << "init_from_profile: non-finite u sample at (";
                for (int a = 0; a < grid.dim; ++a) os << (a ? "," : "") << x[a];
                os << ")";
                throw UsageError(os.str());
            }
            s.u[c][static_cast<size_t>(id)] = val[c];
        }
        g(xs, vs);
        for (int c = 0; c < k; ++c) {
            if (!std::isfinite(val[c])) {
                std::ostringstream os;
                os << "init_from_profile: non-finite du/dt sample at (";
                for (int a = 0; a < grid.dim; ++a) os << (a ? "," : "") << x[a];
                os << ")";
                throw UsageError(os.str());
            }
            s.ut[c][static_cast<size_t>(id)] = val[c];
        }
    }
    return s;
}

} // namespace hglw
