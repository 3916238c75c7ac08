#include "tgem/statistics.hpp"

#include <algorithm>
#include <stdexcept>

namespace tgem {

SufficientStats sufficient_stats(const EventStream& stream, LabelId node, std::span<const ParentEdge> parents) {
    if (node >= stream.label_count()) {
        throw std::out_of_range("node not in stream vocabulary");
    }
    std::size_t width = 0;
    for (const auto& pe : parents) {
        if (pe.parent >= stream.label_count()) {
            throw std::out_of_range("parent not in stream vocabulary");
        }
        width += pe.timescale.interval_count();
    }
    if (width >= 8 * sizeof(std::size_t) - 1) {
        throw std::length_error("too many parent intervals");
    }
    const double t_star = stream.t_star();
    const auto& times = stream.times_by_label();

    std::vector<double> points{0.0, t_star};
    for (const auto& pe : parents) {
        const auto& offsets = pe.timescale.endpoints;
        for (double tz : times[pe.parent]) {
            if (tz > 0.0 && tz < t_star) {
                points.push_back(tz);
            }
            for (double a : offsets) {
                const double cp = tz + a;
                if (cp >= t_star) {
                    break;
                }
                points.push_back(cp);
            }
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    SufficientStats stats{node, std::vector<std::size_t>(std::size_t{1} << width, 0),
                          std::vector<double>(std::size_t{1} << width, 0.0)};
    // segment_config[k] is the configuration on (points[k], points[k+1]].
    std::vector<std::size_t> segment_config(points.size() - 1);
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        segment_config[k] = config_at(parents, times, points[k + 1]);
        stats.d[segment_config[k]] += points[k + 1] - points[k];
    }
    for (double t : times[node]) {
        const auto right = std::lower_bound(points.begin(), points.end(), t);
        const auto k = static_cast<std::size_t>(right - points.begin()) - 1;
        ++stats.n[segment_config[k]];
    }
    return stats;
}

SufficientStats sufficient_stats(const EventStream& stream, const Tgem& model, LabelId node) {
    if (model.labels() != stream.vocabulary()) {
        throw std::invalid_argument("model and stream vocabularies differ");
    }
    return sufficient_stats(stream, node, model.parents(node));
}

} // namespace tgem
