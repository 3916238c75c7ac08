#include "tgem/generation.hpp"

#include "tgem/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tgem {

void GenConfig::validate() const {
    if (nodes == 0) {
        throw std::invalid_argument("nodes must be positive");
    }
    if (!(density >= 0.0 && density < 1.0)) {
        throw std::invalid_argument("density must lie in [0, 1)");
    }
    if (horizons.empty() || rates.empty()) {
        throw std::invalid_argument("horizon and rate sets must be non-empty");
    }
    for (double h : horizons) {
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw std::invalid_argument("horizons must be positive");
        }
    }
    for (double r : rates) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw std::invalid_argument("rates must be positive");
        }
    }
    if (!(p_geom > 0.0 && p_geom <= 1.0)) {
        throw std::invalid_argument("p_geom must lie in (0, 1]");
    }
    if (max_indegree == 0 || max_intervals_per_node < max_indegree) {
        throw std::invalid_argument("caps must allow at least one interval per incoming edge");
    }
}

Tgem random_tgem(const GenConfig& config) {
    config.validate();
    Rng rng(config.seed);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < config.nodes; ++i) {
        labels.push_back(std::to_string(i));
    }
    Tgem model(labels);
    const auto n = config.nodes;

    // Draws run in a fixed order: edges by (child, parent), then the
    // in-degree trim per child, then horizons, modifications, rates.
    std::vector<std::vector<LabelId>> incoming(n);
    for (LabelId c = 0; c < n; ++c) {
        for (LabelId p = 0; p < n; ++p) {
            if (rng.bernoulli(config.density)) {
                incoming[c].push_back(p);
            }
        }
    }
    for (LabelId c = 0; c < n; ++c) {
        auto& in = incoming[c];
        if (in.size() > config.max_indegree) {
            for (std::size_t i = 0; i < config.max_indegree; ++i) {
                std::swap(in[i], in[i + rng.index(in.size() - i)]);
            }
            in.resize(config.max_indegree);
            std::sort(in.begin(), in.end());
        }
    }

    for (LabelId c = 0; c < n; ++c) {
        std::vector<ParentEdge> parents;
        for (LabelId p : incoming[c]) {
            parents.push_back({p, Timescale::single(config.horizons[rng.index(config.horizons.size())])});
        }
        std::size_t intervals = parents.size();
        for (auto& pe : parents) {
            const auto modifications = rng.geometric(config.p_geom);
            for (std::size_t m = 0; m < modifications; ++m) {
                const bool split = rng.bernoulli(0.5);
                const auto target = split ? rng.index(pe.timescale.interval_count()) : 0;
                if (intervals + 1 > config.max_intervals_per_node) {
                    continue;
                }
                auto& ep = pe.timescale.endpoints;
                if (split) {
                    const double mid = (pe.timescale.lower(target) + pe.timescale.upper(target)) / 2.0;
                    ep.insert(ep.begin() + static_cast<std::ptrdiff_t>(target), mid);
                } else {
                    ep.push_back(2.0 * ep.back());
                }
                ++intervals;
            }
        }
        model.set_parents(c, std::move(parents));
    }

    for (LabelId l = 0; l < n; ++l) {
        std::vector<double> rates(model.config_count(l));
        for (auto& r : rates) {
            r = config.rates[rng.index(config.rates.size())];
        }
        model.set_rates(l, std::move(rates));
    }
    return model;
}

} // namespace tgem
