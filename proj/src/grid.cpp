#include "hglw/grid.hpp"

#include <cmath>

namespace hglw {

std::string to_string(Boundary b) {
    return b == Boundary::Periodic ? "periodic" : "neumann";
}

Boundary boundary_from_string(const std::string& s) {
    if (s == "periodic") return Boundary::Periodic;
    if (s == "neumann") return Boundary::Neumann;
    throw ConfigError("unknown boundary '" + s + "' (periodic|neumann)");
}

Grid Grid::make(int dim, std::span<const int> cells, std::span<const double> origin,
                double spacing, Boundary boundary) {
    if (dim < 1 || dim > 3) throw UsageError("Grid: dim must be 1, 2 or 3");
    if (static_cast<int>(cells.size()) != dim || static_cast<int>(origin.size()) != dim)
        throw UsageError("Grid: cells/origin size must match dim");
    if (!(spacing > 0) || !std::isfinite(spacing)) throw UsageError("Grid: spacing must be > 0");
    Grid g;
    g.dim = dim;
    g.spacing = spacing;
    g.boundary = boundary;
    for (int a = 0; a < dim; ++a) {
        if (cells[a] < 8) throw UsageError("Grid: need at least 8 cells per axis");
        if (!std::isfinite(origin[a])) throw UsageError("Grid: non-finite origin");
        g.cells[a] = cells[a];
        g.origin[a] = origin[a];
    }
    return g;
}

bool Grid::same_layout(const Grid& o) const {
    if (dim != o.dim || spacing != o.spacing || boundary != o.boundary) return false;
    for (int a = 0; a < dim; ++a)
        if (cells[a] != o.cells[a] || origin[a] != o.origin[a]) return false;
    return true;
}

} // namespace hglw
