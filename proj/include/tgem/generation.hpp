#pragma once

#include "tgem/model.hpp"

#include <cstdint>
#include <vector>

namespace tgem {

/// Parameters of the random benchmark model generator. Defaults follow the
/// benchmark protocol; `horizons` includes 0.5 in addition to {1,...,24}.
struct GenConfig {
    std::size_t nodes = 5;
    double density = 0.2;
    std::vector<double> horizons{0.5, 1, 2, 4, 8, 16, 24};
    std::vector<double> rates{0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64};
    double p_geom = 0.85;
    std::size_t max_indegree = 2;
    std::size_t max_intervals_per_node = 4;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument when out of range.
    void validate() const;
};

/// Random model: Erdos-Renyi edges over all ordered pairs (self pairs
/// included), surplus in-degree trimmed to a uniform subset, initial
/// timescale (0,h] with h uniform from `horizons`, a Geometric(p_geom)
/// number of extra split/extend modifications per edge (skipped when they
/// would exceed the per-node interval cap), and i.i.d. rates from `rates`.
/// Labels are "0", "1", ...
[[nodiscard]] Tgem random_tgem(const GenConfig& config);

} // namespace tgem
