#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tgem {

/// Index into an ordered label vocabulary.
using LabelId = std::size_t;

struct TimedEvent {
    double time;
    LabelId label;

    friend bool operator==(const TimedEvent&, const TimedEvent&) = default;
};

/// Time-ordered labeled occurrences observed on (0, t_star].
///
/// Invariants (checked on construction): event times are strictly increasing,
/// lie in (0, t_star], and reference labels of the vocabulary. Vocabulary
/// labels are unique, non-empty and contain no commas or whitespace. Labels
/// may have zero occurrences.
class EventStream {
public:
    EventStream(std::vector<std::string> vocabulary, std::vector<TimedEvent> events, double t_star);

    [[nodiscard]] const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
    [[nodiscard]] std::size_t label_count() const noexcept { return vocabulary_.size(); }
    [[nodiscard]] std::span<const TimedEvent> events() const noexcept { return events_; }
    [[nodiscard]] std::size_t size() const noexcept { return events_.size(); }
    [[nodiscard]] double t_star() const noexcept { return t_star_; }

    [[nodiscard]] std::optional<LabelId> find_label(std::string_view label) const;
    /// Throws std::out_of_range for unknown labels.
    [[nodiscard]] LabelId label_id(std::string_view label) const;
    [[nodiscard]] const std::string& label_name(LabelId id) const { return vocabulary_.at(id); }

    /// Sorted occurrence times of one label.
    [[nodiscard]] const std::vector<double>& times_of(LabelId id) const { return times_by_label_.at(id); }
    [[nodiscard]] const std::vector<std::vector<double>>& times_by_label() const noexcept { return times_by_label_; }
    [[nodiscard]] std::size_t count(LabelId id) const { return times_of(id).size(); }

    friend bool operator==(const EventStream& a, const EventStream& b) {
        return a.t_star_ == b.t_star_ && a.vocabulary_ == b.vocabulary_ && a.events_ == b.events_;
    }

private:
    std::vector<std::string> vocabulary_;
    std::vector<TimedEvent> events_;
    double t_star_;
    std::vector<std::vector<double>> times_by_label_;
};

/// Parse failure carrying the 1-based line number it refers to.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

[[nodiscard]] bool is_valid_label(std::string_view label);

/// Reads the event CSV format:
///
///     # t_star=<decimal>        (optional)
///     # labels=A,B,C            (optional, declares the vocabulary order)
///     time,label
///     <time>,<label>
///     ...
///
/// The vocabulary is the declared labels, then `vocabulary_override`, then
/// labels in order of first appearance. Without a t_star line, t_star is the
/// last event time.
[[nodiscard]] EventStream parse_events(std::istream& in, std::span<const std::string> vocabulary_override = {});
[[nodiscard]] EventStream parse_events(std::string_view text, std::span<const std::string> vocabulary_override = {});
[[nodiscard]] EventStream load_events(const std::string& path, std::span<const std::string> vocabulary_override = {});

/// The same events over `vocabulary`, which must contain every label of
/// `stream`. Throws std::invalid_argument otherwise.
[[nodiscard]] EventStream with_vocabulary(const EventStream& stream, std::vector<std::string> vocabulary);

/// Writes the CSV format with shortest round-trip decimal times.
void serialize_events(std::ostream& out, const EventStream& stream);
[[nodiscard]] std::string serialize_events(const EventStream& stream);
void save_events(const std::string& path, const EventStream& stream);

/// Inter-event times from `z` to `x`.
///
/// For z != x: for every x occurrence preceded (strictly) by some z, the time
/// since the most recent such z. For z == x: consecutive inter-arrival times
/// of x plus the tail t_star - last occurrence (omitted when zero).
/// Sorted ascending.
[[nodiscard]] std::vector<double> inter_event_times(const EventStream& stream, LabelId z, LabelId x);

/// Shortest decimal string that round-trips to the same double.
[[nodiscard]] std::string format_double(double value);
/// Strict decimal parse of the full string; nullopt on any trailing garbage.
[[nodiscard]] std::optional<double> parse_double(std::string_view text);

} // namespace tgem
