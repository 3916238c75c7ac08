#pragma once

#include "tgem/event_stream.hpp"
#include "tgem/model.hpp"

#include <cstdint>
#include <vector>

namespace tgem {

/// Strongly connected components of the model graph in sampling order.
struct Condensation {
    /// Members of each component, ascending label id.
    std::vector<std::vector<LabelId>> components;
    /// Component indices in topological order; among ready components the one
    /// with the smallest member id goes first.
    std::vector<std::size_t> order;
    /// Whether a component contains a cycle (more than one member, or a self-loop).
    std::vector<bool> cyclic;
};

[[nodiscard]] Condensation condensation(const Tgem& model);

/// Draws an event stream on (0, t_end) with t_star = t_end.
///
/// Components are sampled in topological order, so all parents outside a
/// component are known before it is sampled. Within a component, every
/// member draws an exponential inter-arrival at its current rate (members in
/// label order, zero rates draw nothing); the earliest draw is accepted if
/// it precedes the next configuration change of any member, otherwise time
/// advances to that change and rates are refreshed.
///
/// Randomness: component k (in sampling order) uses its own Rng seeded with
/// derive_seed(seed, k). Throws std::invalid_argument for malformed models
/// or t_end <= 0.
[[nodiscard]] EventStream sample(const Tgem& model, double t_end, std::uint64_t seed);

} // namespace tgem
