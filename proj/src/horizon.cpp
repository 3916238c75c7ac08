#include "tgem/horizon.hpp"

#include "tgem/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tgem {

namespace {

// Time since the most recent strictly earlier z, for every x that has one.
std::vector<double> lags_to_parent(const EventStream& stream, LabelId z, LabelId x) {
    if (z != x) {
        return inter_event_times(stream, z, x);
    }
    const auto& xs = stream.times_of(x);
    std::vector<double> lags;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        lags.push_back(xs[i] - xs[i - 1]);
    }
    return lags;
}

// Length of the stretch each z occurrence can cover: gap to the next z, or to t_star.
std::vector<double> parent_gaps(const EventStream& stream, LabelId z) {
    const auto& zs = stream.times_of(z);
    std::vector<double> gaps;
    gaps.reserve(zs.size());
    for (std::size_t i = 0; i + 1 < zs.size(); ++i) {
        gaps.push_back(zs[i + 1] - zs[i]);
    }
    if (!zs.empty()) {
        gaps.push_back(stream.t_star() - zs.back());
    }
    return gaps;
}

double count_term(double n, double d) {
    if (n == 0.0) {
        return 0.0;
    }
    if (!(d > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    return n * std::log(n / d);
}

void check_labels(const EventStream& stream, LabelId z, LabelId x) {
    if (z >= stream.label_count() || x >= stream.label_count()) {
        throw std::out_of_range("unknown label");
    }
}

} // namespace

HorizonPolicy HorizonPolicy::quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("quantile must lie in (0, 1)");
    }
    return HorizonPolicy(Kind::quantile, q);
}

HorizonPolicy HorizonPolicy::parse(const std::string& text) {
    if (text == "proximal") {
        return proximal();
    }
    for (const std::string prefix : {"q=", "quantile:", "quantile="}) {
        if (text.rfind(prefix, 0) == 0) {
            if (auto q = parse_double(std::string_view(text).substr(prefix.size()))) {
                return quantile(*q);
            }
        }
    }
    throw std::invalid_argument("unknown horizon heuristic '" + text + "'");
}

double HorizonPolicy::q() const {
    if (kind_ != Kind::quantile) {
        throw std::logic_error("proximal policy has no quantile");
    }
    return q_;
}

std::string HorizonPolicy::name() const {
    return kind_ == Kind::proximal ? "proximal" : "q=" + format_double(q_);
}

std::size_t HorizonTable::defined_count() const {
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); }));
}

std::optional<double> quantile_horizon(const EventStream& stream, LabelId z, LabelId x, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("quantile must lie in (0, 1)");
    }
    auto times = inter_event_times(stream, z, x);
    if (times.empty()) {
        return std::nullopt;
    }
    std::sort(times.begin(), times.end());
    // The 1e-9 guard keeps products such as 0.95 * 20 = 19.000000000000004 at rank 19.
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(times.size()) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, times.size());
    return times[rank - 1];
}

std::vector<double> proximal_candidates(const EventStream& stream, LabelId z, LabelId x) {
    check_labels(stream, z, x);
    if (stream.times_of(z).empty()) {
        return {};
    }
    auto candidates = inter_event_times(stream, z, x);
    const auto self = inter_event_times(stream, z, z);
    if (!self.empty()) {
        candidates.push_back(*std::max_element(self.begin(), self.end()));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    return candidates;
}

double proximal_objective(const EventStream& stream, LabelId z, LabelId x, double h) {
    check_labels(stream, z, x);
    const auto total = static_cast<double>(stream.count(x));
    double n1 = 0.0;
    for (double lag : lags_to_parent(stream, z, x)) {
        n1 += lag <= h ? 1.0 : 0.0;
    }
    double d1 = 0.0;
    for (double g : parent_gaps(stream, z)) {
        d1 += std::min(g, h);
    }
    return count_term(n1, d1) + count_term(total - n1, stream.t_star() - d1) - total;
}

std::optional<double> proximal_horizon(const EventStream& stream, LabelId z, LabelId x) {
    const auto candidates = proximal_candidates(stream, z, x);
    if (candidates.empty()) {
        return std::nullopt;
    }
    auto lags = lags_to_parent(stream, z, x);
    auto gaps = parent_gaps(stream, z);
    std::sort(lags.begin(), lags.end());
    std::sort(gaps.begin(), gaps.end());
    const auto total = static_cast<double>(stream.count(x));

    std::size_t lag_pos = 0;
    std::size_t gap_pos = 0;
    double short_gap_sum = 0.0;
    std::optional<double> best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (double h : candidates) {
        while (lag_pos < lags.size() && lags[lag_pos] <= h) {
            ++lag_pos;
        }
        while (gap_pos < gaps.size() && gaps[gap_pos] <= h) {
            short_gap_sum += gaps[gap_pos++];
        }
        const double n1 = static_cast<double>(lag_pos);
        const double d1 = short_gap_sum + h * static_cast<double>(gaps.size() - gap_pos);
        const double value = count_term(n1, d1) + count_term(total - n1, stream.t_star() - d1) - total;
        if (!best || value > best_value) {
            best = h;
            best_value = value;
        }
    }
    return best;
}

HorizonTable default_horizons(const EventStream& stream, const HorizonPolicy& policy, std::size_t jobs) {
    const auto n = stream.label_count();
    HorizonTable table(n);
    std::vector<std::optional<double>> values(n * n);
    parallel_for(n * n, jobs, [&](std::size_t i) {
        const LabelId z = i / n;
        const LabelId x = i % n;
        values[i] = policy.kind() == HorizonPolicy::Kind::proximal ? proximal_horizon(stream, z, x)
                                                                    : quantile_horizon(stream, z, x, policy.q());
    });
    for (std::size_t i = 0; i < n * n; ++i) {
        table.set(i / n, i % n, values[i]);
    }
    return table;
}

} // namespace tgem
