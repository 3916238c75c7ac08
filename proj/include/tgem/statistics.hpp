#pragma once

#include "tgem/event_stream.hpp"
#include "tgem/model.hpp"

#include <span>
#include <vector>

namespace tgem {

/// Per-configuration occurrence counts `n` and occupancy durations `d` of
/// one node. Durations partition (0, t_star] and counts partition the
/// node's occurrences.
struct SufficientStats {
    LabelId node = 0;
    std::vector<std::size_t> n;
    std::vector<double> d;
};

/// Exact statistics by a sweep over configuration change points
/// t_z + a (every parent occurrence, every endpoint including 0). Segments
/// between consecutive change points are left-open right-closed, and an
/// event at a change point belongs to the segment ending there.
[[nodiscard]] SufficientStats sufficient_stats(const EventStream& stream, LabelId node,
                                               std::span<const ParentEdge> parents);
[[nodiscard]] SufficientStats sufficient_stats(const EventStream& stream, const Tgem& model, LabelId node);

} // namespace tgem
