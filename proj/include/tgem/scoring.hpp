#pragma once

#include "tgem/event_stream.hpp"
#include "tgem/model.hpp"
#include "tgem/statistics.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace tgem {

/// Raised when a configuration has events but zero duration.
class InconsistentStats : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rate table indexed [node][configuration].
using RateTable = std::vector<std::vector<double>>;

/// n[j]/d[j], with 0 wherever n[j] == 0.
[[nodiscard]] std::vector<double> mle_rates(const SufficientStats& stats);

/// Node log-likelihood at the MLE: sum_j n_j ln(n_j/d_j) - sum_j n_j (natural log).
[[nodiscard]] double node_log_likelihood(const SufficientStats& stats);

/// Node log-likelihood at given rates: sum_j n_j ln(r_j) - r_j d_j. -inf if
/// some configuration with events has rate 0.
[[nodiscard]] double node_log_likelihood(const SufficientStats& stats, std::span<const double> rates);

/// Total log-likelihood at the MLE rates.
[[nodiscard]] double log_likelihood(const EventStream& stream, const Tgem& model);
/// Total log-likelihood at the given rates; throws std::invalid_argument on arity mismatch.
[[nodiscard]] double log_likelihood(const EventStream& stream, const Tgem& model, const RateTable& rates);

/// Complexity penalty sum_l |C_l| ln(t_star).
[[nodiscard]] double bic_penalty(const Tgem& model, double t_star);

/// Local BIC term of one node: node log-likelihood minus 2^k ln(t_star).
[[nodiscard]] double local_score(const EventStream& stream, LabelId node, std::span<const ParentEdge> parents);

/// Log-likelihood at the MLE minus the penalty; higher is better.
[[nodiscard]] double bic(const EventStream& stream, const Tgem& model);

/// Model with the same structure and MLE rates on `stream`.
[[nodiscard]] Tgem fit_rates(const EventStream& stream, Tgem model);

} // namespace tgem
