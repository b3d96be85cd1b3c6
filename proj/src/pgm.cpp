#include "hglw/pgm.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <vector>

#include "hglw/common.hpp"

namespace hglw {

namespace {

std::vector<unsigned char> encode(int rows, int cols, std::span<const double> values, double lo,
                                  double hi) {
    if (static_cast<std::int64_t>(values.size()) != static_cast<std::int64_t>(rows) * cols)
        throw UsageError("pgm16: value count mismatch");
    char header[64];
    const int hl = std::snprintf(header, sizeof header, "P5\n%d %d\n65535\n", cols, rows);
    std::vector<unsigned char> buf;
    buf.reserve(static_cast<size_t>(hl) + values.size() * 2);
    buf.insert(buf.end(), header, header + hl);
    const double span = hi > lo ? hi - lo : 1.0;
    for (double v : values) {
        double s = (v - lo) / span;
        s = std::clamp(s, 0.0, 1.0);
        const auto q = static_cast<std::uint16_t>(s * 65535.0 + 0.5);
        buf.push_back(static_cast<unsigned char>(q >> 8)); // most significant byte first
        buf.push_back(static_cast<unsigned char>(q & 0xff));
    }
    return buf;
}

} // namespace

void write_pgm16(const std::string& path, int rows, int cols, std::span<const double> values,
                 double lo, double hi) {
    const auto buf = encode(rows, cols, values, lo, hi);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("write_pgm16: cannot open " + path);
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::uint64_t pgm16_hash(int rows, int cols, std::span<const double> values, double lo,
                         double hi) {
    const auto buf = encode(rows, cols, values, lo, hi);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : buf) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace hglw
