#include "tgem/event_stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace tgem {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

} // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error(message + " at line " + std::to_string(line)), line_(line) {}

bool is_valid_label(std::string_view label) {
    if (label.empty()) {
        return false;
    }
    return std::none_of(label.begin(), label.end(), [](char c) {
        return c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '"';
    });
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

EventStream::EventStream(std::vector<std::string> vocabulary, std::vector<TimedEvent> events, double t_star)
    : vocabulary_(std::move(vocabulary)), events_(std::move(events)), t_star_(t_star) {
    if (!(t_star_ > 0.0) || !std::isfinite(t_star_)) {
        throw std::invalid_argument("t_star must be positive and finite");
    }
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
        if (!is_valid_label(vocabulary_[i])) {
            throw std::invalid_argument("invalid label '" + vocabulary_[i] + "'");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (vocabulary_[j] == vocabulary_[i]) {
                throw std::invalid_argument("duplicate label '" + vocabulary_[i] + "'");
            }
        }
    }
    times_by_label_.assign(vocabulary_.size(), {});
    double previous = 0.0;
    for (const auto& e : events_) {
        if (e.label >= vocabulary_.size()) {
            throw std::invalid_argument("event label index out of vocabulary");
        }
        if (!(e.time > previous)) {
            throw std::invalid_argument("event times must be positive and strictly increasing");
        }
        if (e.time > t_star_) {
            throw std::invalid_argument("event after t_star");
        }
        previous = e.time;
        times_by_label_[e.label].push_back(e.time);
    }
}

std::optional<LabelId> EventStream::find_label(std::string_view label) const {
    const auto it = std::find(vocabulary_.begin(), vocabulary_.end(), label);
    if (it == vocabulary_.end()) {
        return std::nullopt;
    }
    return static_cast<LabelId>(it - vocabulary_.begin());
}

LabelId EventStream::label_id(std::string_view label) const {
    if (auto id = find_label(label)) {
        return *id;
    }
    throw std::out_of_range("unknown label '" + std::string(label) + "'");
}

EventStream parse_events(std::istream& in, std::span<const std::string> vocabulary_override) {
    std::vector<std::string> vocabulary;
    std::unordered_map<std::string, LabelId> ids;
    auto intern = [&](std::string_view label, std::size_t line) {
        const std::string key(label);
        if (auto it = ids.find(key); it != ids.end()) {
            return it->second;
        }
        if (!is_valid_label(label)) {
            throw ParseError(line, "invalid label '" + key + "'");
        }
        ids.emplace(key, vocabulary.size());
        vocabulary.push_back(key);
        return vocabulary.size() - 1;
    };

    std::optional<double> t_star;
    std::vector<TimedEvent> events;
    bool header_seen = false;
    std::string raw;
    std::size_t line = 0;
    bool override_added = false;
    auto add_override = [&] {
        if (!override_added) {
            for (const auto& label : vocabulary_override) {
                intern(label, 0);
            }
            override_added = true;
        }
    };

    while (std::getline(in, raw)) {
        ++line;
        const auto text = trim(raw);
        if (text.empty()) {
            continue;
        }
        if (text.front() == '#') {
            if (header_seen) {
                continue;
            }
            const auto body = trim(text.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            const auto key = trim(body.substr(0, eq));
            const auto value = trim(body.substr(eq + 1));
            if (key == "t_star") {
                t_star = parse_double(value);
                if (!t_star || !(*t_star > 0.0) || !std::isfinite(*t_star)) {
                    throw ParseError(line, "malformed t_star");
                }
            } else if (key == "labels") {
                if (!value.empty()) {
                    for (auto label : split(value, ',')) {
                        if (ids.count(std::string(label)) != 0) {
                            throw ParseError(line, "duplicate label '" + std::string(label) + "'");
                        }
                        intern(label, line);
                    }
                }
            }
            continue;
        }
        if (!header_seen) {
            const auto cols = split(text, ',');
            if (cols.size() != 2 || cols[0] != "time" || cols[1] != "label") {
                throw ParseError(line, "expected header 'time,label'");
            }
            header_seen = true;
            add_override();
            continue;
        }
        const auto cols = split(text, ',');
        if (cols.size() != 2) {
            throw ParseError(line, "malformed row");
        }
        const auto time = parse_double(cols[0]);
        if (!time || !std::isfinite(*time)) {
            throw ParseError(line, "malformed row");
        }
        if (!(*time > 0.0)) {
            throw ParseError(line, "non-positive timestamp");
        }
        if (!events.empty() && !(*time > events.back().time)) {
            throw ParseError(line, "non-increasing timestamps");
        }
        if (t_star && *time > *t_star) {
            throw ParseError(line, "event after t_star");
        }
        events.push_back({*time, intern(cols[1], line)});
    }
    if (!header_seen) {
        throw ParseError(line + 1, "missing header 'time,label'");
    }
    if (!t_star) {
        if (events.empty()) {
            throw ParseError(line + 1, "t_star missing and stream has no events");
        }
        t_star = events.back().time;
    }
    return EventStream(std::move(vocabulary), std::move(events), *t_star);
}

EventStream parse_events(std::string_view text, std::span<const std::string> vocabulary_override) {
    std::istringstream in{std::string(text)};
    return parse_events(in, vocabulary_override);
}

EventStream load_events(const std::string& path, std::span<const std::string> vocabulary_override) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return parse_events(in, vocabulary_override);
}

EventStream with_vocabulary(const EventStream& stream, std::vector<std::string> vocabulary) {
    std::vector<LabelId> remap(stream.label_count());
    for (LabelId l = 0; l < stream.label_count(); ++l) {
        const auto it = std::find(vocabulary.begin(), vocabulary.end(), stream.label_name(l));
        if (it == vocabulary.end()) {
            throw std::invalid_argument("label '" + stream.label_name(l) + "' is not in the target vocabulary");
        }
        remap[l] = static_cast<LabelId>(it - vocabulary.begin());
    }
    std::vector<TimedEvent> events;
    events.reserve(stream.size());
    for (const auto& e : stream.events()) {
        events.push_back({e.time, remap[e.label]});
    }
    return EventStream(std::move(vocabulary), std::move(events), stream.t_star());
}

void serialize_events(std::ostream& out, const EventStream& stream) {
    out << "# t_star=" << format_double(stream.t_star()) << '\n';
    out << "# labels=";
    for (std::size_t i = 0; i < stream.label_count(); ++i) {
        out << (i ? "," : "") << stream.vocabulary()[i];
    }
    out << "\ntime,label\n";
    for (const auto& e : stream.events()) {
        out << format_double(e.time) << ',' << stream.vocabulary()[e.label] << '\n';
    }
}

std::string serialize_events(const EventStream& stream) {
    std::ostringstream out;
    serialize_events(out, stream);
    return out.str();
}

void save_events(const std::string& path, const EventStream& stream) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    serialize_events(out, stream);
}

std::vector<double> inter_event_times(const EventStream& stream, LabelId z, LabelId x) {
    if (z >= stream.label_count() || x >= stream.label_count()) {
        throw std::out_of_range("unknown label");
    }
    std::vector<double> out;
    const auto& xs = stream.times_of(x);
    if (z == x) {
        for (std::size_t i = 1; i < xs.size(); ++i) {
            out.push_back(xs[i] - xs[i - 1]);
        }
        if (!xs.empty() && stream.t_star() > xs.back()) {
            out.push_back(stream.t_star() - xs.back());
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    const auto& zs = stream.times_of(z);
    auto zi = zs.begin();
    for (double tx : xs) {
        while (zi != zs.end() && *zi < tx) {
            ++zi;
        }
        if (zi != zs.begin()) {
            out.push_back(tx - *(zi - 1));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace tgem
