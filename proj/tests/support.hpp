#pragma once

#include "tgem/event_stream.hpp"
#include "tgem/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace tgem::test {

inline std::string fixture(const std::string& name) { return std::string(TGEM_FIXTURES) + "/" + name; }

inline std::vector<std::string> letters(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(std::string(1, static_cast<char>('A' + i)));
    }
    return out;
}

// Times on a 0.25 grid so that window boundaries often coincide with events.
inline EventStream random_stream(std::mt19937_64& gen, std::size_t labels, std::size_t max_events, double t_star) {
    std::uniform_int_distribution<std::size_t> count(0, max_events);
    std::uniform_int_distribution<int> slot(1, static_cast<int>(t_star * 4));
    std::uniform_int_distribution<std::size_t> label(0, labels - 1);
    std::vector<double> times;
    const auto k = count(gen);
    for (std::size_t i = 0; i < k; ++i) {
        times.push_back(slot(gen) / 4.0);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::vector<TimedEvent> events;
    for (double t : times) {
        events.push_back({t, label(gen)});
    }
    return EventStream(letters(labels), std::move(events), t_star);
}

// Random parent set for `child` with at most `max_intervals` intervals in total,
// endpoints on a 0.5 grid.
inline std::vector<ParentEdge> random_parents(std::mt19937_64& gen, std::size_t labels, std::size_t max_intervals) {
    std::vector<ParentEdge> parents;
    std::size_t budget = std::uniform_int_distribution<std::size_t>(0, max_intervals)(gen);
    for (LabelId p = 0; p < labels && budget > 0; ++p) {
        if (std::bernoulli_distribution(0.5)(gen)) {
            continue;
        }
        const auto k = std::uniform_int_distribution<std::size_t>(1, budget)(gen);
        budget -= k;
        Timescale ts;
        double e = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            e += std::uniform_int_distribution<int>(1, 8)(gen) / 2.0;
            ts.endpoints.push_back(e);
        }
        parents.push_back({p, ts});
    }
    return parents;
}

inline Tgem random_model(std::mt19937_64& gen, std::size_t labels, std::size_t max_intervals) {
    Tgem model(letters(labels));
    for (LabelId c = 0; c < labels; ++c) {
        model.set_parents(c, random_parents(gen, labels, max_intervals));
        std::vector<double> rates(model.config_count(c));
        for (auto& r : rates) {
            r = std::uniform_real_distribution<double>(0.01, 1.0)(gen);
        }
        model.set_rates(c, rates);
    }
    return model;
}

// Brute-force configuration: scans every parent occurrence.
inline std::size_t brute_config(const std::vector<ParentEdge>& parents, const EventStream& stream, double t) {
    std::size_t value = 0;
    for (const auto& pe : parents) {
        for (std::size_t i = 0; i < pe.timescale.interval_count(); ++i) {
            bool on = false;
            for (double tz : stream.times_of(pe.parent)) {
                on = on || (tz + pe.timescale.lower(i) < t && t <= tz + pe.timescale.upper(i));
            }
            value = (value << 1) | (on ? 1U : 0U);
        }
    }
    return value;
}

} // namespace tgem::test
