#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace hglw {

// 16-bit binary portable graymap (P5, maxval 65535, big-endian samples per
// the format), linear scaling from [lo, hi]; the caller records lo/hi in a
// sidecar.  rows = slowest axis.
void write_pgm16(const std::string& path, int rows, int cols, std::span<const double> values,
                 double lo, double hi);

// FNV-1a over the written bytes, for pixel-hash regression tests.
std::uint64_t pgm16_hash(int rows, int cols, std::span<const double> values, double lo,
                         double hi);

} // namespace hglw
