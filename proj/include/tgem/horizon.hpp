#pragma once

#include "tgem/event_stream.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tgem {

/// How default horizons for new edges are chosen.
class HorizonPolicy {
public:
    enum class Kind { proximal, quantile };

    [[nodiscard]] static HorizonPolicy proximal() { return HorizonPolicy(Kind::proximal, 0.0); }
    /// Throws std::invalid_argument unless 0 < q < 1.
    [[nodiscard]] static HorizonPolicy quantile(double q);
    /// Parses "proximal", "q=0.5" or "quantile:0.5".
    [[nodiscard]] static HorizonPolicy parse(const std::string& text);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double q() const;
    /// "proximal" or "q=<q>".
    [[nodiscard]] std::string name() const;

    friend bool operator==(const HorizonPolicy&, const HorizonPolicy&) = default;

private:
    HorizonPolicy(Kind kind, double q) : kind_(kind), q_(q) {}
    Kind kind_;
    double q_;
};

/// Nearest-rank quantile of inter_event_times(z, x): the element at 1-based
/// rank ceil(q n) of the sorted times; nullopt when there are none.
[[nodiscard]] std::optional<double> quantile_horizon(const EventStream& stream, LabelId z, LabelId x, double q);

/// Candidate horizons for z -> x in ascending order: the distinct values of
/// inter_event_times(z, x) plus max inter_event_times(z, z). Empty if z never occurs.
[[nodiscard]] std::vector<double> proximal_candidates(const EventStream& stream, LabelId z, LabelId x);

/// Log-likelihood of x under the single-edge hypothesis z -> x with
/// timescale (0, h], evaluated in closed form from inter-event gaps.
[[nodiscard]] double proximal_objective(const EventStream& stream, LabelId z, LabelId x, double h);

/// Candidate maximizing the single-edge log-likelihood of x; ties resolve to
/// the smallest horizon. nullopt when z never occurs.
[[nodiscard]] std::optional<double> proximal_horizon(const EventStream& stream, LabelId z, LabelId x);

/// Default horizon per ordered label pair (parent z, child x).
class HorizonTable {
public:
    HorizonTable() = default;
    explicit HorizonTable(std::size_t label_count) : n_(label_count), values_(label_count * label_count) {}

    [[nodiscard]] std::size_t label_count() const noexcept { return n_; }
    [[nodiscard]] const std::optional<double>& get(LabelId parent, LabelId child) const {
        return values_.at(parent * n_ + child);
    }
    void set(LabelId parent, LabelId child, std::optional<double> h) { values_.at(parent * n_ + child) = h; }
    [[nodiscard]] std::size_t defined_count() const;

    friend bool operator==(const HorizonTable&, const HorizonTable&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::optional<double>> values_;
};

/// Applies the policy to every ordered pair, including self pairs. Pairs are
/// evaluated on up to `jobs` threads; the result does not depend on `jobs`.
[[nodiscard]] HorizonTable default_horizons(const EventStream& stream, const HorizonPolicy& policy,
                                            std::size_t jobs = 1);

} // namespace tgem
