#pragma once

#include <map>

#include "contactforge/chart.hpp"
#include "contactforge/rng.hpp"

namespace cforge {

// Deterministic sample points: uniform draws in a per-coordinate box
// (default [-2, 2]), rejected against the chart's positivity constraints
// with a fixed margin. Same (chart, seed, boxes) gives the same points.
std::vector<std::vector<double>> sample_points(
    const Chart& chart, int n, std::uint64_t seed,
    const std::map<std::string, std::pair<double, double>>& boxes = {},
    double margin = 1e-3);

}  // namespace cforge
