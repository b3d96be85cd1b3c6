#include "hglw/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hglw/exact.hpp"
#include "hglw/snapshot.hpp"

namespace hglw {

double Scenario::spacing() const {
    if (!(extent > 0) || cells[0] <= 0) throw ConfigError("grid extent/cells not set");
    return extent / cells[0];
}

Grid Scenario::make_grid() const {
    const double h = spacing();
    // uniform spacing across axes: reject cell counts that break it
    for (int a = 1; a < dim; ++a)
        if (cells[a] != cells[0])
            throw ConfigError("grid.cells must be equal per axis (uniform spacing)");
    return Grid::make(dim, std::span<const int>(cells.data(), static_cast<size_t>(dim)),
                      std::span<const double>(origin.data(), static_cast<size_t>(dim)), h,
                      boundary);
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
        } catch (...) {
            throw ConfigError("bad numeric list for " + key + ": '" + v + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

double parse_num(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
        if (pos != v.size()) throw std::runtime_error("trail");
        return d;
    } catch (...) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

long parse_int(const std::string& v, const std::string& key) {
    const double d = parse_num(v, key);
    const long l = static_cast<long>(d);
    if (static_cast<double>(l) != d) throw ConfigError(key + " must be an integer");
    return l;
}

const std::set<std::string> kKnownKeys = {
    "name",
    "model.k", "model.epsilon", "model.epsilon_list", "model.potential",
    "grid.dim", "grid.cells", "grid.origin", "grid.extent", "grid.boundary",
    "solver.cfl", "solver.points_per_width", "solver.t_end", "solver.max_steps",
    "initial.kind", "initial.speed", "initial.offset", "initial.direction",
    "initial.radius", "initial.center", "initial.semi_axis_a", "initial.semi_axis_b",
    "initial.amplitude", "initial.wavelength", "initial.omega", "initial.charge",
    "initial.charges", "initial.separation", "initial.relax_time", "initial.relax_damping",
    "initial.ripple_ratio", "initial.ripple_wavelengths", "initial.file",
    "reference.kind",
    "outputs.dir", "outputs.snapshot_every", "outputs.diagnostics_every",
    "outputs.interface_every", "outputs.checkpoint_every", "outputs.heatmap",
    "diagnostics.equipartition_theta", "diagnostics.stationarity",
    "diagnostics.stationarity_per_axis", "diagnostics.projection",
    "diagnostics.projection_tube_cells", "diagnostics.divergence",
};

const std::set<std::string> kKnownKinds = {"kink",       "circle",        "ellipse",
                                           "planar_wave", "vortex",        "vortex_pair",
                                           "rotating_wave", "ripples",     "snapshot"};

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + " must be true|false");
}

} // namespace

Scenario parse_config_text(const std::string& text, const std::string& origin_hint) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin_hint + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!kKnownKeys.count(key))
            throw ConfigError(origin_hint + ":" + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        if (kv.count(key))
            throw ConfigError(origin_hint + ":" + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        kv[key] = val;
    }

    Scenario s;
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };

    if (auto v = take("name")) s.name = *v;
    if (auto v = take("model.k")) s.k = static_cast<int>(parse_int(*v, "model.k"));
    if (s.k != 1 && s.k != 2) throw ConfigError("model.k must be 1 or 2");
    if (auto v = take("model.potential")) {
        if (*v != "quartic") throw ConfigError("model.potential: only 'quartic' is supported");
    }
    if (auto v = take("model.epsilon")) s.epsilon = parse_num(*v, "model.epsilon");
    if (auto v = take("model.epsilon_list")) s.epsilon_list = parse_list(*v, "model.epsilon_list");
    if (auto v = take("grid.dim")) s.dim = static_cast<int>(parse_int(*v, "grid.dim"));
    if (s.dim < 1 || s.dim > 3) throw ConfigError("grid.dim must be 1, 2 or 3");
    if (auto v = take("grid.cells")) {
        const auto lst = parse_list(*v, "grid.cells");
        if (static_cast<int>(lst.size()) != 1 && static_cast<int>(lst.size()) != s.dim)
            throw ConfigError("grid.cells must have 1 or dim entries");
        for (int a = 0; a < s.dim; ++a)
            s.cells[a] = static_cast<int>(lst[lst.size() == 1 ? 0 : a]);
    } else {
        throw ConfigError("grid.cells is required");
    }
    if (auto v = take("grid.origin")) {
        const auto lst = parse_list(*v, "grid.origin");
        if (static_cast<int>(lst.size()) != 1 && static_cast<int>(lst.size()) != s.dim)
            throw ConfigError("grid.origin must have 1 or dim entries");
        for (int a = 0; a < s.dim; ++a) s.origin[a] = lst[lst.size() == 1 ? 0 : a];
    }
    if (auto v = take("grid.extent")) s.extent = parse_num(*v, "grid.extent");
    if (!(s.extent > 0)) throw ConfigError("grid.extent must be > 0");
    if (auto v = take("grid.boundary")) s.boundary = boundary_from_string(*v);

    if (auto v = take("solver.cfl")) s.solver.cfl_fraction = parse_num(*v, "solver.cfl");
    if (!(s.solver.cfl_fraction > 0 && s.solver.cfl_fraction <= 1))
        throw ConfigError("solver.cfl must be in (0,1]");
    if (auto v = take("solver.points_per_width"))
        s.solver.points_per_width = parse_num(*v, "solver.points_per_width");
    if (s.solver.points_per_width < 4)
        throw ConfigError("solver.points_per_width must be >= 4");
    if (auto v = take("solver.t_end")) s.solver.t_end = parse_num(*v, "solver.t_end");
    if (s.solver.t_end < 0) throw ConfigError("solver.t_end must be >= 0");
    if (auto v = take("solver.max_steps")) s.solver.max_steps = parse_int(*v, "solver.max_steps");

    if (auto v = take("initial.kind")) s.initial.kind = *v;
    if (!kKnownKinds.count(s.initial.kind))
        throw ConfigError("initial.kind '" + s.initial.kind + "' is not a registered scenario");
    if (auto v = take("initial.speed")) s.initial.speed = parse_num(*v, "initial.speed");
    if (auto v = take("initial.offset")) s.initial.offset = parse_num(*v, "initial.offset");
    if (auto v = take("initial.direction")) {
        const auto lst = parse_list(*v, "initial.direction");
        if (static_cast<int>(lst.size()) != s.dim)
            throw ConfigError("initial.direction must have dim entries");
        for (int a = 0; a < s.dim; ++a) s.initial.direction[a] = lst[a];
    }
    if (auto v = take("initial.radius")) s.initial.radius = parse_num(*v, "initial.radius");
    if (auto v = take("initial.center")) {
        const auto lst = parse_list(*v, "initial.center");
        if (lst.size() != 2) throw ConfigError("initial.center must have 2 entries");
        s.initial.center = {lst[0], lst[1]};
    }
    if (auto v = take("initial.semi_axis_a")) s.initial.semi_axis_a = parse_num(*v, "initial.semi_axis_a");
    if (auto v = take("initial.semi_axis_b")) s.initial.semi_axis_b = parse_num(*v, "initial.semi_axis_b");
    if (auto v = take("initial.amplitude")) s.initial.amplitude = parse_num(*v, "initial.amplitude");
    if (auto v = take("initial.wavelength")) s.initial.wavelength = parse_num(*v, "initial.wavelength");
    if (auto v = take("initial.omega")) s.initial.omega = parse_num(*v, "initial.omega");
    if (auto v = take("initial.charge")) s.initial.charge = static_cast<int>(parse_int(*v, "initial.charge"));
    if (auto v = take("initial.charges")) {
        const auto lst = parse_list(*v, "initial.charges");
        s.initial.charges.clear();
        for (double d : lst) s.initial.charges.push_back(static_cast<int>(d));
    }
    if (auto v = take("initial.separation")) s.initial.separation = parse_num(*v, "initial.separation");
    if (auto v = take("initial.relax_time")) s.initial.relax_time = parse_num(*v, "initial.relax_time");
    if (auto v = take("initial.relax_damping")) s.initial.relax_damping = parse_num(*v, "initial.relax_damping");
    if (auto v = take("initial.ripple_ratio")) s.initial.ripple_ratio = parse_num(*v, "initial.ripple_ratio");
    if (auto v = take("initial.ripple_wavelengths"))
        s.initial.ripple_wavelengths = parse_list(*v, "initial.ripple_wavelengths");
    if (auto v = take("initial.file")) s.initial.file = *v;

    if (auto v = take("reference.kind")) s.reference = *v;
    if (s.reference != "none" && s.reference != "radial" && s.reference != "front" &&
        s.reference != "graph" && s.reference != "exact")
        throw ConfigError("reference.kind must be none|radial|front|graph|exact");

    if (auto v = take("outputs.dir")) s.outputs.dir = *v;
    if (auto v = take("outputs.snapshot_every"))
        s.outputs.snapshot_every = static_cast<int>(parse_int(*v, "outputs.snapshot_every"));
    if (auto v = take("outputs.diagnostics_every"))
        s.outputs.diagnostics_every = static_cast<int>(parse_int(*v, "outputs.diagnostics_every"));
    if (auto v = take("outputs.interface_every"))
        s.outputs.interface_every = static_cast<int>(parse_int(*v, "outputs.interface_every"));
    if (auto v = take("outputs.checkpoint_every"))
        s.outputs.checkpoint_every = static_cast<int>(parse_int(*v, "outputs.checkpoint_every"));
    if (auto v = take("outputs.heatmap")) {
        std::stringstream hs(*v);
        std::string tok;
        while (std::getline(hs, tok, ',')) {
            if (tok != "e" && tok != "l" && tok != "w" && tok != "u0" && tok != "u1" &&
                tok != "abs_u")
                throw ConfigError("outputs.heatmap field must be e|l|w|u0|u1|abs_u");
            s.outputs.heatmap_fields.push_back(tok);
        }
    }

    if (auto v = take("diagnostics.equipartition_theta"))
        s.diagnostics.equipartition_theta = parse_num(*v, "diagnostics.equipartition_theta");
    if (auto v = take("diagnostics.stationarity"))
        s.diagnostics.stationarity = parse_bool(*v, "diagnostics.stationarity");
    if (auto v = take("diagnostics.stationarity_per_axis"))
        s.diagnostics.stationarity_per_axis =
            static_cast<int>(parse_int(*v, "diagnostics.stationarity_per_axis"));
    if (auto v = take("diagnostics.projection"))
        s.diagnostics.projection = parse_bool(*v, "diagnostics.projection");
    if (auto v = take("diagnostics.projection_tube_cells"))
        s.diagnostics.projection_tube_cells = parse_num(*v, "diagnostics.projection_tube_cells");
    if (auto v = take("diagnostics.divergence"))
        s.diagnostics.divergence = parse_bool(*v, "diagnostics.divergence");

    return s;
}

Scenario parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), path);
}

// ---------------------------------------------------------------------------
// validation

namespace {

// conservative bounding box of the initial interface, for the light-cone rule
bool interface_bbox(const Scenario& s, double lo[3], double hi[3]) {
    const auto& in = s.initial;
    if (in.kind == "kink") {
        // plane x.nu = offset: bound along nu only; treat as full-extent box
        for (int a = 0; a < s.dim; ++a) {
            lo[a] = s.origin[a];
            hi[a] = s.origin[a] + s.extent;
        }
        // tighten the axis most aligned with nu
        int ax = 0;
        for (int a = 1; a < s.dim; ++a)
            if (std::abs(in.direction[a]) > std::abs(in.direction[ax])) ax = a;
        const double span = std::abs(in.speed) * s.solver.t_end;
        lo[ax] = in.offset - span;
        hi[ax] = in.offset + span;
        return true;
    }
    if (in.kind == "circle" || in.kind == "ripples") {
        const double r = in.radius * (in.kind == "ripples" ? 1.0 + in.ripple_ratio : 1.0);
        for (int a = 0; a < 2; ++a) {
            lo[a] = in.center[a] - r;
            hi[a] = in.center[a] + r;
        }
        return true;
    }
    if (in.kind == "ellipse") {
        lo[0] = -in.semi_axis_a;
        hi[0] = in.semi_axis_a;
        lo[1] = -in.semi_axis_b;
        hi[1] = in.semi_axis_b;
        return true;
    }
    if (in.kind == "vortex") {
        lo[0] = hi[0] = in.center[0];
        lo[1] = hi[1] = in.center[1];
        return true;
    }
    if (in.kind == "vortex_pair") {
        lo[0] = std::min(in.center[0] - 0.5 * in.separation, in.center[0] + 0.5 * in.separation);
        hi[0] = std::max(in.center[0] - 0.5 * in.separation, in.center[0] + 0.5 * in.separation);
        lo[1] = hi[1] = in.center[1];
        return true;
    }
    return false; // planar_wave / rotating_wave / snapshot: no compact interface
}

} // namespace

void validate_scenario(const Scenario& s, double epsilon) {
    if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("epsilon must be in (0,1)");
    const double h = s.extent / s.cells[0];
    if (h > epsilon / s.solver.points_per_width * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "resolution rule violated: h = " << h << " > eps/points_per_width = "
           << epsilon / s.solver.points_per_width;
        throw ConfigError(os.str());
    }
    if (s.initial.kind == "ripples") {
        for (double lam : s.initial.ripple_wavelengths.empty()
                              ? std::vector<double>{s.initial.wavelength}
                              : s.initial.ripple_wavelengths) {
            if (!(s.initial.ripple_ratio * lam < lam && lam < s.initial.radius))
                throw ConfigError("ripples: need a < lambda_r < r0");
            if (lam < 16 * h) throw ConfigError("ripples: lambda_r must be resolved by >= 16 cells");
        }
    }
    if (s.boundary == Boundary::Periodic) return;
    double lo[3], hi[3];
    if (!interface_bbox(s, lo, hi)) return;
    const double margin = 0.1 * s.extent;
    for (int a = 0; a < s.dim; ++a) {
        const double wall_lo = s.origin[a], wall_hi = s.origin[a] + s.extent;
        // light cone: interface may spread at most at unit speed
        if (lo[a] - s.solver.t_end - wall_lo < margin ||
            wall_hi - (hi[a] + s.solver.t_end) < margin)
            throw ConfigError(
                "domain too small: interface light cone comes within 0.1*extent of a "
                "non-periodic boundary");
    }
}

// ---------------------------------------------------------------------------
// resolved config echo

std::string resolved_config_text(const Scenario& s) {
    std::ostringstream os;
    os.precision(17);
    os << "name = " << s.name << "\n";
    os << "model.k = " << s.k << "\n";
    os << "model.epsilon = " << s.epsilon << "\n";
    if (!s.epsilon_list.empty()) {
        os << "model.epsilon_list = ";
        for (size_t i = 0; i < s.epsilon_list.size(); ++i)
            os << (i ? "," : "") << s.epsilon_list[i];
        os << "\n";
    }
    os << "grid.dim = " << s.dim << "\n";
    os << "grid.cells = ";
    for (int a = 0; a < s.dim; ++a) os << (a ? "," : "") << s.cells[a];
    os << "\n";
    os << "grid.origin = ";
    for (int a = 0; a < s.dim; ++a) os << (a ? "," : "") << s.origin[a];
    os << "\n";
    os << "grid.extent = " << s.extent << "\n";
    os << "grid.boundary = " << to_string(s.boundary) << "\n";
    os << "solver.cfl = " << s.solver.cfl_fraction << "\n";
    os << "solver.points_per_width = " << s.solver.points_per_width << "\n";
    os << "solver.t_end = " << s.solver.t_end << "\n";
    os << "solver.max_steps = " << s.solver.max_steps << "\n";
    os << "initial.kind = " << s.initial.kind << "\n";
    const auto& in = s.initial;
    if (in.kind == "kink" || in.kind == "rotating_wave") {
        os << "initial.direction = ";
        for (int a = 0; a < s.dim; ++a) os << (a ? "," : "") << in.direction[a];
        os << "\n";
        os << "initial.offset = " << in.offset << "\n";
        if (in.kind == "kink") os << "initial.speed = " << in.speed << "\n";
        if (in.kind == "rotating_wave") os << "initial.omega = " << in.omega << "\n";
    }
    if (in.kind == "circle") {
        os << "initial.radius = " << in.radius << "\n";
        os << "initial.speed = " << in.speed << "\n";
        os << "initial.center = " << in.center[0] << "," << in.center[1] << "\n";
    }
    if (in.kind == "ellipse")
        os << "initial.semi_axis_a = " << in.semi_axis_a << "\n"
           << "initial.semi_axis_b = " << in.semi_axis_b << "\n";
    if (in.kind == "planar_wave")
        os << "initial.amplitude = " << in.amplitude << "\n"
           << "initial.wavelength = " << in.wavelength << "\n";
    if (in.kind == "vortex" || in.kind == "vortex_pair") {
        os << "initial.center = " << in.center[0] << "," << in.center[1] << "\n";
        if (in.kind == "vortex") os << "initial.charge = " << in.charge << "\n";
        if (in.kind == "vortex_pair") {
            os << "initial.separation = " << in.separation << "\n";
            os << "initial.charges = ";
            for (size_t i = 0; i < in.charges.size(); ++i) os << (i ? "," : "") << in.charges[i];
            os << "\n";
        }
        os << "initial.relax_time = " << in.relax_time << "\n";
        os << "initial.relax_damping = " << in.relax_damping << "\n";
    }
    if (in.kind == "ripples") {
        os << "initial.radius = " << in.radius << "\n";
        os << "initial.ripple_ratio = " << in.ripple_ratio << "\n";
        if (!in.ripple_wavelengths.empty()) {
            os << "initial.ripple_wavelengths = ";
            for (size_t i = 0; i < in.ripple_wavelengths.size(); ++i)
                os << (i ? "," : "") << in.ripple_wavelengths[i];
            os << "\n";
        } else {
            os << "initial.wavelength = " << in.wavelength << "\n";
        }
    }
    if (in.kind == "snapshot") os << "initial.file = " << in.file << "\n";
    os << "reference.kind = " << s.reference << "\n";
    os << "outputs.dir = " << s.outputs.dir << "\n";
    os << "outputs.snapshot_every = " << s.outputs.snapshot_every << "\n";
    os << "outputs.diagnostics_every = " << s.outputs.diagnostics_every << "\n";
    os << "outputs.interface_every = " << s.outputs.interface_every << "\n";
    os << "outputs.checkpoint_every = " << s.outputs.checkpoint_every << "\n";
    if (!s.outputs.heatmap_fields.empty()) {
        os << "outputs.heatmap = ";
        for (size_t i = 0; i < s.outputs.heatmap_fields.size(); ++i)
            os << (i ? "," : "") << s.outputs.heatmap_fields[i];
        os << "\n";
    }
    os << "diagnostics.equipartition_theta = " << s.diagnostics.equipartition_theta << "\n";
    os << "diagnostics.stationarity = " << (s.diagnostics.stationarity ? "true" : "false") << "\n";
    os << "diagnostics.stationarity_per_axis = " << s.diagnostics.stationarity_per_axis << "\n";
    os << "diagnostics.projection = " << (s.diagnostics.projection ? "true" : "false") << "\n";
    os << "diagnostics.projection_tube_cells = " << s.diagnostics.projection_tube_cells << "\n";
    os << "diagnostics.divergence = " << (s.diagnostics.divergence ? "true" : "false") << "\n";
    return os.str();
}

std::uint64_t config_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : text) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// initial data builders

namespace {

// exact signed distance to a closed polyline within a band; callers only use
// it where |approx| < band, elsewhere the profile is saturated anyway
double polyline_distance(const std::vector<std::array<double, 2>>& poly, double x, double y) {
    double best = 1e300;
    const size_t m = poly.size();
    for (size_t i = 0; i < m; ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % m];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double px = x - a[0], py = y - a[1];
        const double ee = ex * ex + ey * ey;
        double t = ee > 0 ? (px * ex + py * ey) / ee : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dx = px - t * ex, dy = py - t * ey;
        best = std::min(best, dx * dx + dy * dy);
    }
    return std::sqrt(best);
}

// Kink/antikink composition compatible with a periodic interval of length L:
// an up-step at offset `a` and a down-step half a period away, both moving at
// v along the signed coordinate xi = x.nu.  Relative wrapping plus one image
// on each side keeps the truncation error at the q-tail level exp(-gL/eps).
FieldSample periodic_kink_pair(double xi, double t, double L, double v, double eps, double a) {
    const double g = 1.0 / std::sqrt(1.0 - v * v);
    auto wrap_pm = [L](double d) {
        d = std::fmod(d, L);
        if (d < -0.5 * L) d += L;
        if (d >= 0.5 * L) d -= L;
        return d;
    };
    const double dk = wrap_pm(xi - a - v * t);
    const double da = wrap_pm(xi - a - 0.5 * L - v * t);
    FieldSample out{-1.0, 0.0};
    for (int j = -1; j <= 1; ++j) {
        const double sk = g * (dk + j * L) / eps;
        const double sa = g * (da + j * L) / eps;
        out.u += kink_profile(sk) - kink_profile(sa);
        out.ut += -v * g / eps * (kink_profile_deriv(sk) - kink_profile_deriv(sa));
    }
    return out;
}

// signed coordinate and validity checks shared by the builder and the
// exact-reference evaluator
double kink_axis_coordinate(const Scenario& s, std::span<const double> x,
                            const std::array<double, 3>& nu) {
    double xi = 0;
    for (int a = 0; a < s.dim; ++a) xi += x[a] * nu[a];
    return xi;
}

std::array<double, 3> kink_unit_direction(const Scenario& s) {
    std::array<double, 3> nu = s.initial.direction;
    double nn = 0;
    for (int a = 0; a < s.dim; ++a) nn += nu[a] * nu[a];
    nn = std::sqrt(nn);
    if (!(nn > 0)) throw ConfigError("kink: zero direction");
    for (int a = 0; a < s.dim; ++a) nu[a] /= nn;
    if (s.boundary == Boundary::Periodic) {
        int ax = 0;
        for (int a = 1; a < s.dim; ++a)
            if (std::abs(nu[a]) > std::abs(nu[ax])) ax = a;
        for (int a = 0; a < s.dim; ++a)
            if (a != ax && std::abs(nu[a]) > 1e-14)
                throw ConfigError("kink: periodic boundary requires an axis-aligned direction");
    }
    return nu;
}

FieldState make_kink_state(const Scenario& s, const Grid& g, double eps) {
    const auto& in = s.initial;
    const std::array<double, 3> nu = kink_unit_direction(s);
    if (g.boundary == Boundary::Periodic) {
        // a single kink is topologically incompatible with a periodic box:
        // pair it with an antikink half a period away along nu
        const double L = s.extent, v = in.speed, a = in.offset;
        return init_from_profile(
            g, 1, eps,
            [&](std::span<const double> x, std::span<double> u) {
                u[0] = periodic_kink_pair(kink_axis_coordinate(s, x, nu), 0, L, v, eps, a).u;
            },
            [&](std::span<const double> x, std::span<double> u) {
                u[0] = periodic_kink_pair(kink_axis_coordinate(s, x, nu), 0, L, v, eps, a).ut;
            });
    }
    const KinkSpec spec = KinkSpec::make(
        s.dim, std::span<const double>(nu.data(), static_cast<size_t>(s.dim)), in.speed,
        in.offset, eps);
    return init_from_profile(
        g, 1, eps,
        [&](std::span<const double> x, std::span<double> u) {
            u[0] = boosted_kink_field(spec, 0, x).u;
        },
        [&](std::span<const double> x, std::span<double> u) {
            u[0] = boosted_kink_field(spec, 0, x).ut;
        });
}

FieldState make_circle_state(const Scenario& s, const Grid& g, double eps) {
    const auto& in = s.initial;
    const double v0 = in.speed;
    if (!(std::abs(v0) < 1)) throw ConfigError("circle: |speed| must be < 1");
    const double gn = 1.0 / std::sqrt(1.0 - v0 * v0);
    return init_from_profile(
        g, 1, eps,
        [&](std::span<const double> x, std::span<double> u) {
            double r = 0;
            for (int a = 0; a < s.dim; ++a)
                r += (x[a] - (a < 2 ? in.center[a] : 0.0)) * (x[a] - (a < 2 ? in.center[a] : 0.0));
            r = std::sqrt(r);
            u[0] = kink_profile(gn * (r - in.radius) / eps);
        },
        [&](std::span<const double> x, std::span<double> u) {
            double r = 0;
            for (int a = 0; a < s.dim; ++a)
                r += (x[a] - (a < 2 ? in.center[a] : 0.0)) * (x[a] - (a < 2 ? in.center[a] : 0.0));
            r = std::sqrt(r);
            u[0] = -kink_profile_deriv(gn * (r - in.radius) / eps) * gn * v0 / eps;
        });
}

FieldState make_star_curve_state(const Scenario& s, const Grid& g, double eps,
                                 const std::function<double(double)>& radius_of_theta) {
    // kink profile across a star-shaped curve r = R(theta) at rest; exact
    // polyline distance inside a band, saturated vacuum outside
    if (s.dim != 2) throw ConfigError("curve initial data requires grid.dim = 2");
    const int m = 4096;
    std::vector<std::array<double, 2>> poly(m);
    for (int i = 0; i < m; ++i) {
        const double th = 2 * M_PI * i / m;
        const double r = radius_of_theta(th);
        poly[i] = {s.initial.center[0] + r * std::cos(th), s.initial.center[1] + r * std::sin(th)};
    }
    const double band = 14.0 * eps;
    return init_from_profile(
        g, 1, eps,
        [&](std::span<const double> x, std::span<double> u) {
            const double dx = x[0] - s.initial.center[0], dy = x[1] - s.initial.center[1];
            const double th = std::atan2(dy, dx);
            const double approx = std::hypot(dx, dy) - radius_of_theta(th);
            if (std::abs(approx) > band) {
                u[0] = approx > 0 ? 1.0 : -1.0;
                return;
            }
            const double d = polyline_distance(poly, x[0], x[1]);
            u[0] = kink_profile((approx >= 0 ? d : -d) / eps);
        },
        [&](std::span<const double>, std::span<double> u) { u[0] = 0.0; });
}

FieldState make_planar_wave_state(const Scenario& s, const Grid& g, double eps) {
    // interface graph x0 = h0(x1) moving as a left-to-right null profile,
    // plus a compensating static antikink plane for the periodic box
    if (s.dim != 2) throw ConfigError("planar_wave requires grid.dim = 2");
    if (g.boundary != Boundary::Periodic)
        throw ConfigError("planar_wave requires periodic boundaries");
    const auto& in = s.initial;
    const double ky = 2 * M_PI / in.wavelength;
    auto f = [&](double y) { return in.offset + in.amplitude * std::sin(ky * y); };
    auto fp = [&](double y) { return in.amplitude * ky * std::cos(ky * y); };
    const double z_far = in.offset + 0.5 * s.extent;
    return init_from_profile(
        g, 1, eps,
        [&](std::span<const double> x, std::span<double> u) {
            const double slope = fp(x[1]);
            const double d = (x[0] - f(x[1])) / std::sqrt(1 + slope * slope);
            const double dfar = x[0] - z_far;
            u[0] = kink_profile(d / eps) - kink_profile(dfar / eps) - 1.0;
        },
        [&](std::span<const double> x, std::span<double> u) {
            const double slope = fp(x[1]);
            const double q = 1 + slope * slope;
            const double d = (x[0] - f(x[1])) / std::sqrt(q);
            // h_t = -f' for the null left-mover h(t,y) = f(y - t)
            u[0] = kink_profile_deriv(d / eps) / eps * (slope / std::sqrt(q)) * 1.0;
        });
}

FieldState make_vortex_state(const Scenario& s, const Grid& g, double eps) {
    if (s.dim != 2) throw ConfigError("vortex scenarios require grid.dim = 2");
    VortexAnsatz va;
    va.epsilon = eps;
    if (s.initial.kind == "vortex") {
        va.centers = {s.initial.center};
        va.charges = {s.initial.charge};
    } else {
        if (s.initial.charges.size() != 2) throw ConfigError("vortex_pair: need 2 charges");
        va.centers = {{s.initial.center[0] - 0.5 * s.initial.separation, s.initial.center[1]},
                      {s.initial.center[0] + 0.5 * s.initial.separation, s.initial.center[1]}};
        va.charges = s.initial.charges;
    }
    FieldState st = init_from_profile(
        g, 2, eps,
        [&](std::span<const double> x, std::span<double> u) {
            const auto v = va(x);
            u[0] = v[0];
            u[1] = v[1];
        },
        [&](std::span<const double>, std::span<double> u) { u[0] = u[1] = 0.0; });
    if (s.initial.relax_time > 0) {
        SolverConfig rc = s.solver;
        st = relax_damped(st, s.initial.relax_damping, s.initial.relax_time, rc);
    }
    return st;
}

FieldState make_rotating_state(const Scenario& s, const Grid& g, double eps) {
    RotatingWaveSpec spec;
    spec.n = s.dim;
    spec.omega = s.initial.omega;
    spec.epsilon = eps;
    spec.direction = s.initial.direction;
    double nn = 0;
    for (int a = 0; a < s.dim; ++a) nn += spec.direction[a] * spec.direction[a];
    nn = std::sqrt(nn);
    for (int a = 0; a < s.dim; ++a) spec.direction[a] /= nn;
    spec.offset = s.initial.offset;
    return init_from_profile(
        g, 2, eps,
        [&](std::span<const double> x, std::span<double> u) {
            const auto v = rotating_wave_field(spec, 0, x);
            u[0] = v.u[0];
            u[1] = v.u[1];
        },
        [&](std::span<const double> x, std::span<double> u) {
            const auto v = rotating_wave_field(spec, 0, x);
            u[0] = v.ut[0];
            u[1] = v.ut[1];
        });
}

} // namespace

FieldState build_initial_state(const Scenario& s, double eps) {
    const Grid g = s.make_grid();
    const auto& kind = s.initial.kind;
    if (kind == "kink") return make_kink_state(s, g, eps);
    if (kind == "circle") {
        if (s.dim < 2) throw ConfigError("circle requires grid.dim >= 2");
        return make_circle_state(s, g, eps);
    }
    if (kind == "ellipse")
        return make_star_curve_state(s, g, eps, [&](double th) {
            const double a = s.initial.semi_axis_a, b = s.initial.semi_axis_b;
            const double c = std::cos(th), sn = std::sin(th);
            return a * b / std::sqrt(b * b * c * c + a * a * sn * sn);
        });
    if (kind == "ripples") {
        const double lam = s.initial.ripple_wavelengths.empty()
                               ? s.initial.wavelength
                               : s.initial.ripple_wavelengths.front();
        const double amp = s.initial.ripple_ratio * lam;
        const double r0 = s.initial.radius;
        const int kmode = std::max(1, static_cast<int>(std::lround(2 * M_PI * r0 / lam)));
        return make_star_curve_state(s, g, eps,
                                     [=](double th) { return r0 + amp * std::sin(kmode * th); });
    }
    if (kind == "planar_wave") return make_planar_wave_state(s, g, eps);
    if (kind == "vortex" || kind == "vortex_pair") return make_vortex_state(s, g, eps);
    if (kind == "rotating_wave") return make_rotating_state(s, g, eps);
    if (kind == "snapshot") {
        FieldState st = read_snapshot(s.initial.file, s.boundary);
        if (!st.grid.same_layout(g))
            throw ConfigError("snapshot grid does not match the configured grid");
        return st;
    }
    throw ConfigError("unknown initial kind " + kind);
}

ExactEval exact_field_evaluator(const Scenario& s, double eps) {
    if (s.initial.kind == "kink") {
        const std::array<double, 3> nu = kink_unit_direction(s);
        if (s.boundary == Boundary::Periodic) {
            const Scenario sc = s;
            const double L = s.extent, v = s.initial.speed, a = s.initial.offset;
            return [sc, nu, L, v, eps, a](double t, std::span<const double> x, double* u,
                                          double* ut) {
                const auto f = periodic_kink_pair(kink_axis_coordinate(sc, x, nu), t, L, v, eps, a);
                u[0] = f.u;
                ut[0] = f.ut;
            };
        }
        const KinkSpec spec =
            KinkSpec::make(s.dim, std::span<const double>(nu.data(), static_cast<size_t>(s.dim)),
                           s.initial.speed, s.initial.offset, eps);
        return [spec](double t, std::span<const double> x, double* u, double* ut) {
            const auto f = boosted_kink_field(spec, t, x);
            u[0] = f.u;
            ut[0] = f.ut;
        };
    }
    if (s.initial.kind == "rotating_wave") {
        RotatingWaveSpec spec;
        spec.n = s.dim;
        spec.omega = s.initial.omega;
        spec.epsilon = eps;
        spec.direction = s.initial.direction;
        double nn = 0;
        for (int a = 0; a < s.dim; ++a) nn += spec.direction[a] * spec.direction[a];
        nn = std::sqrt(nn);
        for (int a = 0; a < s.dim; ++a) spec.direction[a] /= nn;
        spec.offset = s.initial.offset;
        return [spec](double t, std::span<const double> x, double* u, double* ut) {
            const auto f = rotating_wave_field(spec, t, x);
            u[0] = f.u[0];
            u[1] = f.u[1];
            ut[0] = f.ut[0];
            ut[1] = f.ut[1];
        };
    }
    return {};
}

Scenario ripples_scenario(const Scenario& base, double amplitude, double lambda_r, double r0) {
    if (!(amplitude < lambda_r && lambda_r < r0))
        throw ConfigError("ripples_scenario: need a < lambda_r < r0");
    Scenario s = base;
    s.initial.kind = "ripples";
    s.initial.radius = r0;
    s.initial.ripple_ratio = amplitude / lambda_r;
    s.initial.wavelength = lambda_r;
    s.initial.ripple_wavelengths.clear();
    s.reference = "radial";
    return s;
}

} // namespace hglw
