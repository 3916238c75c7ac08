#pragma once

#include "tgem/model.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tgem {

/// Mutually-closest endpoint pairs between two endpoint vectors (each with
/// the leading 0).
struct EndpointMatching {
    std::vector<std::pair<double, double>> pairs;
    std::size_t matched = 0;   // e_m = |pairs|
    std::size_t unmatched = 0; // e_nm, counted over both vectors
};

/// (u, w) is matched iff w is the element of v2 closest to u and u is the
/// element of v1 closest to w; equal distances resolve to the smaller value.
[[nodiscard]] EndpointMatching match_endpoints(std::span<const double> v1, std::span<const double> v2);

/// Set-based distance |v1 xor v2| / (|v1 xor v2| + |v1 and v2|) over
/// endpoint vectors including 0.
[[nodiscard]] double elementary_distance_set(const Timescale& a, const Timescale& b);

/// Refined distance: matched pairs other than (0,0) cost
/// min(1, |u - w| / min(u, w)), unmatched endpoints cost 1, and the total is
/// divided by e_m + e_nm.
[[nodiscard]] double elementary_distance_refined(const Timescale& a, const Timescale& b);

enum class DistanceMode { set, refined };

struct EdgeDistance {
    std::string parent;
    std::string child;
    /// "shared", "only_a" or "only_b".
    std::string status;
    double value;
};

struct DistanceReport {
    double total = 0.0;
    std::vector<EdgeDistance> edges;
};

/// Structural distance: 1 per edge present in only one model plus the
/// elementary distance of every shared edge. Edges are matched by label
/// names; throws std::invalid_argument if the label sets differ.
[[nodiscard]] DistanceReport model_distance_report(const Tgem& a, const Tgem& b, DistanceMode mode);
[[nodiscard]] double model_distance(const Tgem& a, const Tgem& b, DistanceMode mode = DistanceMode::refined);

struct EdgeScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t true_positives = 0;
};

/// Edge recovery over ordered label pairs, ignoring timescales. Ratios with a
/// zero denominator are 0.
[[nodiscard]] EdgeScores edge_f1(const Tgem& truth, const Tgem& learned);

} // namespace tgem
