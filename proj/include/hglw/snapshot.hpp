#pragma once

#include <cstdint>
#include <string>

#include "hglw/field.hpp"
#include "hglw/solver.hpp"

// Binary field snapshot, magic "HGLW", version 1, everything little-endian:
//   char magic[4], u32 version, u32 n, u32 k,
//   u32 cells[n], f64 spacing, f64 origin[n], f64 time, f64 epsilon,
//   payload: u components then du/dt components, f64, row-major (last axis
//   fastest), component-major.
// Round-trips bit-identically; the version field gates incompatible readers.
//
// Checkpoint files ("HGLC", version 1) additionally store the boundary rule,
// step index, dt and the two raw leapfrog levels so a resumed run reproduces
// the uninterrupted one bit-exactly.

namespace hglw {

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const FieldState& s);
// Boundary is not part of the snapshot header; the caller supplies it
// (scenario configs carry it).
FieldState read_snapshot(const std::string& path, Boundary boundary = Boundary::Periodic);

void write_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path);

} // namespace hglw
