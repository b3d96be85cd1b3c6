#include "hglw/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hglw {

namespace {

static_assert(sizeof(double) == 8);

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(os, v);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    const std::uint64_t v = get_u64(is);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

void put_f64_array(std::ostream& os, const std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double d : v) put_f64(os, d);
    }
}

void get_f64_array(std::istream& is, std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double& d : v) d = get_f64(is);
    }
}

} // namespace

void write_snapshot(const std::string& path, const FieldState& s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("write_snapshot: cannot open " + path);
    os.write("HGLW", 4);
    put_u32(os, kSnapshotVersion);
    put_u32(os, static_cast<std::uint32_t>(s.grid.dim));
    put_u32(os, static_cast<std::uint32_t>(s.k));
    for (int a = 0; a < s.grid.dim; ++a) put_u32(os, static_cast<std::uint32_t>(s.grid.cells[a]));
    put_f64(os, s.grid.spacing);
    for (int a = 0; a < s.grid.dim; ++a) put_f64(os, s.grid.origin[a]);
    put_f64(os, s.time);
    put_f64(os, s.epsilon);
    for (int c = 0; c < s.k; ++c) put_f64_array(os, s.u[c]);
    for (int c = 0; c < s.k; ++c) put_f64_array(os, s.ut[c]);
    if (!os) throw ConfigError("write_snapshot: write failed for " + path);
}

FieldState read_snapshot(const std::string& path, Boundary boundary) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("read_snapshot: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "HGLW", 4) != 0)
        throw ConfigError("read_snapshot: bad magic in " + path);
    const std::uint32_t version = get_u32(is);
    if (version != kSnapshotVersion)
        throw ConfigError("read_snapshot: unsupported format version in " + path);
    const int n = static_cast<int>(get_u32(is));
    const int k = static_cast<int>(get_u32(is));
    if (n < 1 || n > 3 || (k != 1 && k != 2))
        throw ConfigError("read_snapshot: corrupt header in " + path);
    int cells[3] = {};
    for (int a = 0; a < n; ++a) cells[a] = static_cast<int>(get_u32(is));
    const double spacing = get_f64(is);
    double origin[3] = {};
    for (int a = 0; a < n; ++a) origin[a] = get_f64(is);
    FieldState s;
    s.grid = Grid::make(n, std::span<const int>(cells, static_cast<size_t>(n)),
                        std::span<const double>(origin, static_cast<size_t>(n)), spacing, boundary);
    s.k = k;
    s.time = get_f64(is);
    s.epsilon = get_f64(is);
    s.allocate();
    for (int c = 0; c < k; ++c) get_f64_array(is, s.u[c]);
    for (int c = 0; c < k; ++c) get_f64_array(is, s.ut[c]);
    if (!is) throw ConfigError("read_snapshot: truncated file " + path);
    return s;
}

void write_checkpoint(const std::string& path, const Checkpoint& c) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("write_checkpoint: cannot open " + path);
    os.write("HGLC", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(c.grid.dim));
    put_u32(os, static_cast<std::uint32_t>(c.k));
    for (int a = 0; a < c.grid.dim; ++a) put_u32(os, static_cast<std::uint32_t>(c.grid.cells[a]));
    put_f64(os, c.grid.spacing);
    for (int a = 0; a < c.grid.dim; ++a) put_f64(os, c.grid.origin[a]);
    put_u32(os, c.grid.boundary == Boundary::Periodic ? 0u : 1u);
    put_f64(os, c.time);
    put_f64(os, c.epsilon);
    put_f64(os, c.dt);
    put_u64(os, static_cast<std::uint64_t>(c.step));
    for (int comp = 0; comp < c.k; ++comp) put_f64_array(os, c.u_prev[comp]);
    for (int comp = 0; comp < c.k; ++comp) put_f64_array(os, c.u_curr[comp]);
    if (!os) throw ConfigError("write_checkpoint: write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("read_checkpoint: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "HGLC", 4) != 0)
        throw ConfigError("read_checkpoint: bad magic in " + path);
    if (get_u32(is) != 1) throw ConfigError("read_checkpoint: unsupported version");
    const int n = static_cast<int>(get_u32(is));
    const int k = static_cast<int>(get_u32(is));
    int cells[3] = {};
    for (int a = 0; a < n; ++a) cells[a] = static_cast<int>(get_u32(is));
    const double spacing = get_f64(is);
    double origin[3] = {};
    for (int a = 0; a < n; ++a) origin[a] = get_f64(is);
    const Boundary bd = get_u32(is) == 0 ? Boundary::Periodic : Boundary::Neumann;
    Checkpoint c;
    c.grid = Grid::make(n, std::span<const int>(cells, static_cast<size_t>(n)),
                        std::span<const double>(origin, static_cast<size_t>(n)), spacing, bd);
    c.k = k;
    c.time = get_f64(is);
    c.epsilon = get_f64(is);
    c.dt = get_f64(is);
    c.step = static_cast<std::int64_t>(get_u64(is));
    const auto nc = static_cast<size_t>(c.grid.cell_count());
    for (int comp = 0; comp < k; ++comp) {
        c.u_prev[comp].resize(nc);
        get_f64_array(is, c.u_prev[comp]);
    }
    for (int comp = 0; comp < k; ++comp) {
        c.u_curr[comp].resize(nc);
        get_f64_array(is, c.u_curr[comp]);
    }
    if (!is) throw ConfigError("read_checkpoint: truncated file " + path);
    return c;
}

} // namespace hglw
