#pragma once

#include <filesystem>
#include <variant>

#include "gms/sketches.hpp"

namespace gms {

using AnySketch = std::variant<CountMinSketch, GmHash, GmSketch, GmFactorSketch>;

// Self-describing JSON snapshot of a sketch: config (model, bins, depth,
// seed), stream count and all counter tables. Counters are integers, so the
// round trip is bit-exact; loading re-validates table shapes and row sums.
void save_snapshot(const std::filesystem::path& path, const AnySketch& sketch);
AnySketch load_snapshot(const std::filesystem::path& path);

std::string snapshot_to_json(const AnySketch& sketch);
AnySketch snapshot_from_json(const std::string& text);

// Estimate of the loaded sketch at x, whatever its type.
double query_any(const AnySketch& sketch, std::span<const Value> x);
const SketchConfig& config_any(const AnySketch& sketch);

}  // namespace gms
