#include "tgem/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace tgem {

namespace {

// Index of the element of `v` closest to x, preferring the smaller value on ties.
std::size_t closest(std::span<const double> v, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double di = std::abs(v[i] - x);
        const double db = std::abs(v[best] - x);
        if (di < db || (di == db && v[i] < v[best])) {
            best = i;
        }
    }
    return best;
}

using NamedEdges = std::map<std::pair<std::string, std::string>, const Timescale*>;

NamedEdges named_edges(const Tgem& model, std::vector<Edge>& storage) {
    storage = model.edges();
    NamedEdges out;
    for (const auto& e : storage) {
        out.emplace(std::pair{model.label_name(e.parent), model.label_name(e.child)}, &e.timescale);
    }
    return out;
}

void require_same_labels(const Tgem& a, const Tgem& b) {
    const std::set<std::string> la(a.labels().begin(), a.labels().end());
    const std::set<std::string> lb(b.labels().begin(), b.labels().end());
    if (la != lb) {
        throw std::invalid_argument("models have different vocabularies");
    }
}

} // namespace

EndpointMatching match_endpoints(std::span<const double> v1, std::span<const double> v2) {
    EndpointMatching m;
    if (!v1.empty() && !v2.empty()) {
        for (std::size_t i = 0; i < v1.size(); ++i) {
            const auto j = closest(v2, v1[i]);
            if (closest(v1, v2[j]) == i) {
                m.pairs.emplace_back(v1[i], v2[j]);
            }
        }
    }
    m.matched = m.pairs.size();
    m.unmatched = (v1.size() - m.matched) + (v2.size() - m.matched);
    return m;
}

double elementary_distance_set(const Timescale& a, const Timescale& b) {
    const auto va = a.with_origin();
    const auto vb = b.with_origin();
    std::vector<double> common;
    std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common));
    const auto shared = static_cast<double>(common.size());
    const auto exclusive = static_cast<double>(va.size() + vb.size()) - 2.0 * shared;
    return exclusive / (exclusive + shared);
}

double elementary_distance_refined(const Timescale& a, const Timescale& b) {
    const auto va = a.with_origin();
    const auto vb = b.with_origin();
    const auto m = match_endpoints(va, vb);
    double cost = static_cast<double>(m.unmatched);
    for (const auto& [u, w] : m.pairs) {
        if (u == 0.0 && w == 0.0) {
            continue;
        }
        cost += std::min(1.0, std::abs(u - w) / std::min(u, w));
    }
    return cost / static_cast<double>(m.matched + m.unmatched);
}

DistanceReport model_distance_report(const Tgem& a, const Tgem& b, DistanceMode mode) {
    require_same_labels(a, b);
    std::vector<Edge> sa;
    std::vector<Edge> sb;
    const auto ea = named_edges(a, sa);
    const auto eb = named_edges(b, sb);
    DistanceReport report;
    for (const auto& [key, ts] : ea) {
        const auto it = eb.find(key);
        if (it == eb.end()) {
            report.edges.push_back({key.first, key.second, "only_a", 1.0});
        } else {
            const double d = mode == DistanceMode::set ? elementary_distance_set(*ts, *it->second)
                                                       : elementary_distance_refined(*ts, *it->second);
            report.edges.push_back({key.first, key.second, "shared", d});
        }
    }
    for (const auto& [key, ts] : eb) {
        if (!ea.count(key)) {
            report.edges.push_back({key.first, key.second, "only_b", 1.0});
        }
    }
    std::sort(report.edges.begin(), report.edges.end(), [](const EdgeDistance& x, const EdgeDistance& y) {
        return std::tie(x.parent, x.child) < std::tie(y.parent, y.child);
    });
    for (const auto& e : report.edges) {
        report.total += e.value;
    }
    return report;
}

double model_distance(const Tgem& a, const Tgem& b, DistanceMode mode) {
    return model_distance_report(a, b, mode).total;
}

EdgeScores edge_f1(const Tgem& truth, const Tgem& learned) {
    require_same_labels(truth, learned);
    std::vector<Edge> st;
    std::vector<Edge> sl;
    const auto et = named_edges(truth, st);
    const auto el = named_edges(learned, sl);
    EdgeScores s;
    for (const auto& [key, ts] : el) {
        s.true_positives += et.count(key);
    }
    const auto tp = static_cast<double>(s.true_positives);
    s.precision = el.empty() ? 0.0 : tp / static_cast<double>(el.size());
    s.recall = et.empty() ? 0.0 : tp / static_cast<double>(et.size());
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

} // namespace tgem
