#pragma once

#include "tgem/event_stream.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tgem {

/// Partition of (0, horizon] into intervals (0,e0], (e0,e1], ..., stored as
/// the endpoint vector [e0, e1, ...]. A well-formed timescale has at least
/// one endpoint and strictly increasing positive endpoints; validate_model
/// reports violations.
struct Timescale {
    std::vector<double> endpoints;

    [[nodiscard]] static Timescale single(double horizon) { return Timescale{{horizon}}; }

    [[nodiscard]] std::size_t interval_count() const noexcept { return endpoints.size(); }
    [[nodiscard]] double horizon() const { return endpoints.back(); }
    /// Left end of interval i (0 for the first interval).
    [[nodiscard]] double lower(std::size_t i) const { return i == 0 ? 0.0 : endpoints[i - 1]; }
    [[nodiscard]] double upper(std::size_t i) const { return endpoints[i]; }
    /// Endpoint vector with the leading 0, e.g. [0, 2, 4].
    [[nodiscard]] std::vector<double> with_origin() const;

    /// Diagnostic message if malformed.
    [[nodiscard]] std::optional<std::string> check() const;

    friend bool operator==(const Timescale&, const Timescale&) = default;
};

struct ParentEdge {
    LabelId parent;
    Timescale timescale;

    friend bool operator==(const ParentEdge&, const ParentEdge&) = default;
};

struct Edge {
    LabelId parent;
    LabelId child;
    Timescale timescale;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Timescale graphical event model.
///
/// Incoming edges of each node are kept sorted by parent id, which fixes the
/// canonical bit order of parent configurations: parents in vocabulary order,
/// intervals ascending within a parent, leftmost bit most significant. Every
/// node l carries 2^k rates, k being the number of intervals over its
/// incoming edges. Structural edits reset the child's rates to zeros of the
/// new arity; rates are refit by the caller.
class Tgem {
public:
    Tgem() = default;
    explicit Tgem(std::vector<std::string> labels);

    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
    [[nodiscard]] std::size_t label_count() const noexcept { return labels_.size(); }
    [[nodiscard]] std::optional<LabelId> find_label(std::string_view label) const;
    [[nodiscard]] LabelId label_id(std::string_view label) const;
    [[nodiscard]] const std::string& label_name(LabelId id) const { return labels_.at(id); }

    [[nodiscard]] const std::vector<ParentEdge>& parents(LabelId child) const { return incoming_.at(child); }
    [[nodiscard]] const Timescale* timescale(LabelId parent, LabelId child) const;
    [[nodiscard]] bool has_edge(LabelId parent, LabelId child) const { return timescale(parent, child) != nullptr; }
    /// All edges ordered by (parent, child).
    [[nodiscard]] std::vector<Edge> edges() const;
    [[nodiscard]] std::size_t edge_count() const noexcept;
    [[nodiscard]] std::size_t in_degree(LabelId child) const { return incoming_.at(child).size(); }
    [[nodiscard]] std::size_t interval_count(LabelId child) const;
    [[nodiscard]] std::size_t config_count(LabelId child) const { return std::size_t{1} << interval_count(child); }

    /// Inserts or replaces the edge parent -> child.
    void set_edge(LabelId parent, LabelId child, Timescale timescale);
    /// Throws std::invalid_argument if absent.
    void remove_edge(LabelId parent, LabelId child);
    /// Replaces all incoming edges of `child` (sorted internally).
    void set_parents(LabelId child, std::vector<ParentEdge> parents);

    [[nodiscard]] const std::vector<double>& rates(LabelId node) const { return rates_.at(node); }
    /// Stores rates without arity checks; validate_model reports mismatches.
    void set_rates(LabelId node, std::vector<double> rates) { rates_.at(node) = std::move(rates); }

    friend bool operator==(const Tgem&, const Tgem&) = default;

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<ParentEdge>> incoming_;
    std::vector<std::vector<double>> rates_;
};

/// Parent configuration of one node: `width` bits, leftmost most significant.
struct ConfigIndex {
    std::size_t value = 0;
    std::size_t width = 0;

    [[nodiscard]] std::string bits() const;
    [[nodiscard]] bool bit(std::size_t position) const { return (value >> (width - 1 - position)) & 1U; }
    /// Throws std::invalid_argument for characters other than 0/1.
    [[nodiscard]] static ConfigIndex from_bits(std::string_view bits);

    friend bool operator==(const ConfigIndex&, const ConfigIndex&) = default;
};

struct IntervalRef {
    LabelId parent;
    std::size_t interval;
    double lower;
    double upper;
};

/// Bit positions of a node's configuration, most significant first.
[[nodiscard]] std::vector<IntervalRef> canonical_interval_order(const Tgem& model, LabelId node);

/// Configuration value at time t: the bit of interval (a,b] of parent Z is
/// set iff some Z occurrence t_z satisfies t_z + a < t <= t_z + b.
/// `times_by_label` holds sorted occurrence times per label id.
[[nodiscard]] std::size_t config_at(std::span<const ParentEdge> parents,
                                    const std::vector<std::vector<double>>& times_by_label, double t);

[[nodiscard]] ConfigIndex active_config(const Tgem& model, LabelId node, const EventStream& stream, double t);

/// Empty iff the model is well formed; each entry names the offending node or edge.
[[nodiscard]] std::vector<std::string> validate_model(const Tgem& model);

/// Schema violation in model JSON, with a JSON-path style location.
class ModelFormatError : public std::runtime_error {
public:
    ModelFormatError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(path) {}
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

[[nodiscard]] std::string serialize_model(const Tgem& model);
[[nodiscard]] Tgem parse_model(std::string_view json_text);
[[nodiscard]] Tgem load_model(const std::string& path);
void save_model(const std::string& path, const Tgem& model);

} // namespace tgem
