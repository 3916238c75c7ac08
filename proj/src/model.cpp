#include "tgem/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace tgem {

namespace {

// Beyond this many incoming intervals the rate table no longer fits a sane
// amount of memory (2^k doubles per node).
constexpr std::size_t kMaxIntervalsPerNode = 24;

} // namespace

std::vector<double> Timescale::with_origin() const {
    std::vector<double> v;
    v.reserve(endpoints.size() + 1);
    v.push_back(0.0);
    v.insert(v.end(), endpoints.begin(), endpoints.end());
    return v;
}

std::optional<std::string> Timescale::check() const {
    if (endpoints.empty()) {
        return "timescale has no endpoints";
    }
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        if (!std::isfinite(endpoints[i]) || !(endpoints[i] > 0.0)) {
            return "endpoints must be positive and finite";
        }
        if (i > 0 && !(endpoints[i] > endpoints[i - 1])) {
            return "endpoints not strictly increasing";
        }
    }
    return std::nullopt;
}

Tgem::Tgem(std::vector<std::string> labels)
    : labels_(std::move(labels)), incoming_(labels_.size()), rates_(labels_.size(), std::vector<double>(1, 0.0)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!is_valid_label(labels_[i])) {
            throw std::invalid_argument("invalid label '" + labels_[i] + "'");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (labels_[i] == labels_[j]) {
                throw std::invalid_argument("duplicate label '" + labels_[i] + "'");
            }
        }
    }
}

std::optional<LabelId> Tgem::find_label(std::string_view label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<LabelId>(it - labels_.begin());
}

LabelId Tgem::label_id(std::string_view label) const {
    if (auto id = find_label(label)) {
        return *id;
    }
    throw std::out_of_range("unknown label '" + std::string(label) + "'");
}

const Timescale* Tgem::timescale(LabelId parent, LabelId child) const {
    for (const auto& pe : incoming_.at(child)) {
        if (pe.parent == parent) {
            return &pe.timescale;
        }
    }
    return nullptr;
}

std::vector<Edge> Tgem::edges() const {
    std::vector<Edge> out;
    for (LabelId child = 0; child < incoming_.size(); ++child) {
        for (const auto& pe : incoming_[child]) {
            out.push_back({pe.parent, child, pe.timescale});
        }
    }
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.parent, a.child) < std::tie(b.parent, b.child);
    });
    return out;
}

std::size_t Tgem::edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto& in : incoming_) {
        n += in.size();
    }
    return n;
}

std::size_t Tgem::interval_count(LabelId child) const {
    std::size_t k = 0;
    for (const auto& pe : incoming_.at(child)) {
        k += pe.timescale.interval_count();
    }
    return k;
}

void Tgem::set_edge(LabelId parent, LabelId child, Timescale timescale) {
    if (parent >= labels_.size() || child >= labels_.size()) {
        throw std::out_of_range("edge label out of range");
    }
    auto& in = incoming_[child];
    const auto it = std::lower_bound(in.begin(), in.end(), parent,
                                     [](const ParentEdge& pe, LabelId p) { return pe.parent < p; });
    if (it != in.end() && it->parent == parent) {
        it->timescale = std::move(timescale);
    } else {
        in.insert(it, ParentEdge{parent, std::move(timescale)});
    }
    const auto k = interval_count(child);
    rates_[child].assign(k <= kMaxIntervalsPerNode ? std::size_t{1} << k : 0, 0.0);
}

void Tgem::remove_edge(LabelId parent, LabelId child) {
    auto& in = incoming_.at(child);
    const auto it = std::find_if(in.begin(), in.end(), [&](const ParentEdge& pe) { return pe.parent == parent; });
    if (it == in.end()) {
        throw std::invalid_argument("no edge " + labels_.at(parent) + " -> " + labels_[child]);
    }
    in.erase(it);
    rates_[child].assign(config_count(child), 0.0);
}

void Tgem::set_parents(LabelId child, std::vector<ParentEdge> parents) {
    std::sort(parents.begin(), parents.end(),
              [](const ParentEdge& a, const ParentEdge& b) { return a.parent < b.parent; });
    incoming_.at(child) = std::move(parents);
    const auto k = interval_count(child);
    rates_[child].assign(k <= kMaxIntervalsPerNode ? std::size_t{1} << k : 0, 0.0);
}

std::string ConfigIndex::bits() const {
    std::string s(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
        if (bit(i)) {
            s[i] = '1';
        }
    }
    return s;
}

ConfigIndex ConfigIndex::from_bits(std::string_view bits) {
    ConfigIndex c{0, bits.size()};
    for (char ch : bits) {
        if (ch != '0' && ch != '1') {
            throw std::invalid_argument("configuration key must be a bit string");
        }
        c.value = (c.value << 1) | static_cast<std::size_t>(ch == '1');
    }
    return c;
}

std::vector<IntervalRef> canonical_interval_order(const Tgem& model, LabelId node) {
    std::vector<IntervalRef> order;
    for (const auto& pe : model.parents(node)) {
        for (std::size_t i = 0; i < pe.timescale.interval_count(); ++i) {
            order.push_back({pe.parent, i, pe.timescale.lower(i), pe.timescale.upper(i)});
        }
    }
    return order;
}

std::size_t config_at(std::span<const ParentEdge> parents, const std::vector<std::vector<double>>& times_by_label,
                      double t) {
    std::size_t value = 0;
    for (const auto& pe : parents) {
        const auto& times = times_by_label[pe.parent];
        for (std::size_t i = 0; i < pe.timescale.interval_count(); ++i) {
            const double a = pe.timescale.lower(i);
            const double b = pe.timescale.upper(i);
            // Latest occurrence with t_z + a < t; the predicate is monotone in t_z.
            const auto it = std::partition_point(times.begin(), times.end(), [&](double tz) { return tz + a < t; });
            const bool on = it != times.begin() && *(it - 1) + b >= t;
            value = (value << 1) | static_cast<std::size_t>(on);
        }
    }
    return value;
}

ConfigIndex active_config(const Tgem& model, LabelId node, const EventStream& stream, double t) {
    return {config_at(model.parents(node), stream.times_by_label(), t), model.interval_count(node)};
}

std::vector<std::string> validate_model(const Tgem& model) {
    std::vector<std::string> out;
    for (LabelId child = 0; child < model.label_count(); ++child) {
        const auto& node = model.label_name(child);
        LabelId previous = 0;
        bool first = true;
        for (const auto& pe : model.parents(child)) {
            const std::string edge = "edge " + (pe.parent < model.label_count() ? model.label_name(pe.parent)
                                                                                 : std::to_string(pe.parent)) +
                                     " -> " + node;
            if (pe.parent >= model.label_count()) {
                out.push_back(edge + ": parent not in vocabulary");
            }
            if (!first && pe.parent <= previous) {
                out.push_back(edge + ": duplicate edge");
            }
            if (auto msg = pe.timescale.check()) {
                out.push_back(edge + ": " + *msg);
            }
            previous = pe.parent;
            first = false;
        }
        const auto k = model.interval_count(child);
        if (k > kMaxIntervalsPerNode) {
            out.push_back("node " + node + ": too many incoming intervals (" + std::to_string(k) + ")");
            continue;
        }
        const auto& rates = model.rates(child);
        if (rates.size() != (std::size_t{1} << k)) {
            out.push_back("node " + node + ": rate arity mismatch (expected " + std::to_string(std::size_t{1} << k) +
                          ", got " + std::to_string(rates.size()) + ")");
        }
        for (double r : rates) {
            if (!std::isfinite(r) || r < 0.0) {
                out.push_back("node " + node + ": rates must be finite and non-negative");
                break;
            }
        }
    }
    return out;
}

std::string serialize_model(const Tgem& model) {
    nlohmann::ordered_json j;
    j["labels"] = model.labels();
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : model.edges()) {
        edges.push_back({{"from", model.label_name(e.parent)},
                         {"to", model.label_name(e.child)},
                         {"endpoints", e.timescale.endpoints}});
    }
    j["edges"] = std::move(edges);
    auto rates = nlohmann::ordered_json::object();
    for (LabelId l = 0; l < model.label_count(); ++l) {
        auto node = nlohmann::ordered_json::object();
        const auto width = model.interval_count(l);
        const auto& r = model.rates(l);
        for (std::size_t c = 0; c < r.size(); ++c) {
            node[ConfigIndex{c, width}.bits()] = r[c];
        }
        rates[model.label_name(l)] = std::move(node);
    }
    j["rates"] = std::move(rates);
    return j.dump(2) + "\n";
}

Tgem parse_model(std::string_view json_text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ModelFormatError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ModelFormatError("$", "expected an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "labels" && key != "edges" && key != "rates") {
            throw ModelFormatError("$." + key, "unknown field");
        }
    }
    if (!j.contains("labels") || !j["labels"].is_array()) {
        throw ModelFormatError("$.labels", "expected an array of labels");
    }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < j["labels"].size(); ++i) {
        const auto& l = j["labels"][i];
        const auto path = "$.labels[" + std::to_string(i) + "]";
        if (!l.is_string() || !is_valid_label(l.get<std::string>())) {
            throw ModelFormatError(path, "expected a label string");
        }
        if (std::find(labels.begin(), labels.end(), l.get<std::string>()) != labels.end()) {
            throw ModelFormatError(path, "duplicate label");
        }
        labels.push_back(l.get<std::string>());
    }
    Tgem model(labels);

    if (j.contains("edges")) {
        const auto& edges = j["edges"];
        if (!edges.is_array()) {
            throw ModelFormatError("$.edges", "expected an array");
        }
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const auto path = "$.edges[" + std::to_string(i) + "]";
            const auto& e = edges[i];
            if (!e.is_object()) {
                throw ModelFormatError(path, "expected an object");
            }
            for (const auto& [key, value] : e.items()) {
                if (key != "from" && key != "to" && key != "endpoints") {
                    throw ModelFormatError(path + "." + key, "unknown field");
                }
            }
            auto endpoint_label = [&](const char* key) {
                if (!e.contains(key) || !e[key].is_string()) {
                    throw ModelFormatError(path + "." + key, "expected a label string");
                }
                auto id = model.find_label(e[key].get<std::string>());
                if (!id) {
                    throw ModelFormatError(path + "." + key, "unknown label");
                }
                return *id;
            };
            const auto parent = endpoint_label("from");
            const auto child = endpoint_label("to");
            if (!e.contains("endpoints") || !e["endpoints"].is_array()) {
                throw ModelFormatError(path + ".endpoints", "expected an array of numbers");
            }
            Timescale ts;
            for (const auto& v : e["endpoints"]) {
                if (!v.is_number()) {
                    throw ModelFormatError(path + ".endpoints", "expected an array of numbers");
                }
                ts.endpoints.push_back(v.get<double>());
            }
            if (auto msg = ts.check()) {
                throw ModelFormatError(path + ".endpoints", *msg);
            }
            if (model.has_edge(parent, child)) {
                throw ModelFormatError(path, "duplicate edge");
            }
            model.set_edge(parent, child, std::move(ts));
        }
    }

    if (!j.contains("rates") || !j["rates"].is_object()) {
        throw ModelFormatError("$.rates", "expected an object keyed by label");
    }
    const auto& rates = j["rates"];
    for (const auto& [label, table] : rates.items()) {
        const auto path = "$.rates." + label;
        const auto id = model.find_label(label);
        if (!id) {
            throw ModelFormatError(path, "unknown label");
        }
        if (!table.is_object()) {
            throw ModelFormatError(path, "expected an object keyed by configuration bits");
        }
        const auto width = model.interval_count(*id);
        std::vector<double> values(model.config_count(*id), 0.0);
        std::vector<bool> seen(values.size(), false);
        for (const auto& [key, value] : table.items()) {
            ConfigIndex c;
            try {
                c = ConfigIndex::from_bits(key);
            } catch (const std::invalid_argument&) {
                throw ModelFormatError(path + "." + key, "configuration key must be a bit string");
            }
            if (c.width != width) {
                throw ModelFormatError(path + "." + key,
                                       "configuration key must have " + std::to_string(width) + " bits");
            }
            if (!value.is_number()) {
                throw ModelFormatError(path + "." + key, "expected a number");
            }
            values[c.value] = value.get<double>();
            seen[c.value] = true;
        }
        for (std::size_t c = 0; c < seen.size(); ++c) {
            if (!seen[c]) {
                throw ModelFormatError(path, "missing rate for configuration '" + ConfigIndex{c, width}.bits() + "'");
            }
        }
        model.set_rates(*id, std::move(values));
    }
    for (LabelId l = 0; l < model.label_count(); ++l) {
        if (!rates.contains(model.label_name(l))) {
            throw ModelFormatError("$.rates." + model.label_name(l), "missing rates");
        }
    }
    return model;
}

Tgem load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

void save_model(const std::string& path, const Tgem& model) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << serialize_model(model);
}

} // namespace tgem
