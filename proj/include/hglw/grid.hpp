#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "hglw/common.hpp"

namespace hglw {

enum class Boundary { Periodic, Neumann };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

// Uniform cubic lattice in n <= 3 dimensions, cell-centered sampling:
// x_i = origin + (i + 1/2) h along each axis.  Flat index is row-major
// with the last axis fastest.
struct Grid {
    int dim = 1;
    std::array<int, 3> cells{};
    std::array<double, 3> origin{};
    double spacing = 0;
    Boundary boundary = Boundary::Periodic;

    static Grid make(int dim, std::span<const int> cells, std::span<const double> origin,
                     double spacing, Boundary boundary);

    std::int64_t cell_count() const {
        std::int64_t c = 1;
        for (int a = 0; a < dim; ++a) c *= cells[a];
        return c;
    }
    double extent(int axis) const { return cells[axis] * spacing; }

    std::int64_t index(int i, int j = 0, int k = 0) const {
        std::int64_t id = i;
        if (dim > 1) id = id * cells[1] + j;
        if (dim > 2) id = id * cells[2] + k;
        return id;
    }
    void unpack(std::int64_t flat, int idx[3]) const {
        if (dim == 1) { idx[0] = static_cast<int>(flat); idx[1] = idx[2] = 0; return; }
        if (dim == 2) {
            idx[0] = static_cast<int>(flat / cells[1]);
            idx[1] = static_cast<int>(flat % cells[1]);
            idx[2] = 0;
            return;
        }
        const std::int64_t nyz = static_cast<std::int64_t>(cells[1]) * cells[2];
        idx[0] = static_cast<int>(flat / nyz);
        idx[1] = static_cast<int>((flat / cells[2]) % cells[1]);
        idx[2] = static_cast<int>(flat % cells[2]);
    }
    double center(int axis, int i) const { return origin[axis] + (i + 0.5) * spacing; }
    void cell_center(std::int64_t flat, double x[3]) const {
        int idx[3];
        unpack(flat, idx);
        for (int a = 0; a < dim; ++a) x[a] = center(a, idx[a]);
    }

    // neighbor index along one axis under the boundary rule; off may be +-1, +-2
    int wrap(int axis, int i) const {
        const int nc = cells[axis];
        if (boundary == Boundary::Periodic) {
            int r = i % nc;
            return r < 0 ? r + nc : r;
        }
        // Neumann: even reflection about the boundary faces
        if (i < 0) return -i - 1;
        if (i >= nc) return 2 * nc - 1 - i;
        return i;
    }

    bool same_layout(const Grid& o) const;
};

} // namespace hglw
