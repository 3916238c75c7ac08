#include "tgem/scoring.hpp"

#include <cmath>
#include <limits>

namespace tgem {

std::vector<double> mle_rates(const SufficientStats& stats) {
    std::vector<double> rates(stats.n.size(), 0.0);
    for (std::size_t j = 0; j < stats.n.size(); ++j) {
        if (stats.n[j] == 0) {
            continue;
        }
        if (!(stats.d[j] > 0.0)) {
            throw InconsistentStats("configuration with events has zero duration");
        }
        rates[j] = static_cast<double>(stats.n[j]) / stats.d[j];
    }
    return rates;
}

double node_log_likelihood(const SufficientStats& stats) {
    double ll = 0.0;
    for (std::size_t j = 0; j < stats.n.size(); ++j) {
        if (stats.n[j] == 0) {
            continue;
        }
        if (!(stats.d[j] > 0.0)) {
            throw InconsistentStats("configuration with events has zero duration");
        }
        const auto n = static_cast<double>(stats.n[j]);
        ll += n * std::log(n / stats.d[j]) - n;
    }
    return ll;
}

double node_log_likelihood(const SufficientStats& stats, std::span<const double> rates) {
    if (rates.size() != stats.n.size()) {
        throw std::invalid_argument("rate arity mismatch");
    }
    double ll = 0.0;
    for (std::size_t j = 0; j < rates.size(); ++j) {
        const auto n = static_cast<double>(stats.n[j]);
        if (stats.n[j] > 0) {
            if (rates[j] <= 0.0) {
                return -std::numeric_limits<double>::infinity();
            }
            ll += n * std::log(rates[j]);
        }
        ll -= rates[j] * stats.d[j];
    }
    return ll;
}

double log_likelihood(const EventStream& stream, const Tgem& model) {
    double ll = 0.0;
    for (LabelId l = 0; l < model.label_count(); ++l) {
        ll += node_log_likelihood(sufficient_stats(stream, model, l));
    }
    return ll;
}

double log_likelihood(const EventStream& stream, const Tgem& model, const RateTable& rates) {
    if (rates.size() != model.label_count()) {
        throw std::invalid_argument("rate table size does not match vocabulary");
    }
    double ll = 0.0;
    for (LabelId l = 0; l < model.label_count(); ++l) {
        if (rates[l].size() != model.config_count(l)) {
            throw std::invalid_argument("rate arity mismatch for node " + model.label_name(l));
        }
        ll += node_log_likelihood(sufficient_stats(stream, model, l), rates[l]);
    }
    return ll;
}

double bic_penalty(const Tgem& model, double t_star) {
    double configs = 0.0;
    for (LabelId l = 0; l < model.label_count(); ++l) {
        configs += static_cast<double>(model.config_count(l));
    }
    return configs * std::log(t_star);
}

double local_score(const EventStream& stream, LabelId node, std::span<const ParentEdge> parents) {
    const auto stats = sufficient_stats(stream, node, parents);
    return node_log_likelihood(stats) - static_cast<double>(stats.n.size()) * std::log(stream.t_star());
}

double bic(const EventStream& stream, const Tgem& model) {
    return log_likelihood(stream, model) - bic_penalty(model, stream.t_star());
}

Tgem fit_rates(const EventStream& stream, Tgem model) {
    for (LabelId l = 0; l < model.label_count(); ++l) {
        model.set_rates(l, mle_rates(sufficient_stats(stream, model, l)));
    }
    return model;
}

} // namespace tgem
