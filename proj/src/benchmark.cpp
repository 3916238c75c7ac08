#include "tgem/benchmark.hpp"

#include "tgem/evaluation.hpp"
#include "tgem/parallel.hpp"
#include "tgem/random.hpp"
#include "tgem/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace tgem {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

template <typename T>
T to_integer(const std::string& s, const char* what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error(std::string("malformed ") + what + " '" + s + "'");
    }
    return value;
}

double to_real(const std::string& s, const char* what) {
    if (s.empty()) {
        return std::nan("");
    }
    if (auto v = parse_double(s)) {
        return *v;
    }
    throw std::runtime_error(std::string("malformed ") + what + " '" + s + "'");
}

std::string unit_key(std::size_t nodes, double density, double time_units, std::size_t replicate,
                     const std::string& heuristic) {
    return std::to_string(nodes) + '|' + format_double(density) + '|' + format_double(time_units) + '|' +
           std::to_string(replicate) + '|' + heuristic;
}

std::string sanitize(std::string message) {
    std::replace_if(message.begin(), message.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
    return message;
}

// --- flat TOML subset -------------------------------------------------------

using TomlValue = std::variant<double, std::string, bool, std::vector<std::variant<double, std::string>>>;

std::variant<double, std::string> toml_scalar(std::string_view text, std::size_t line) {
    text = trim(text);
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        return std::string(text.substr(1, text.size() - 2));
    }
    std::string cleaned;
    for (char c : text) {
        if (c != '_') {
            cleaned.push_back(c);
        }
    }
    if (auto v = parse_double(cleaned)) {
        return *v;
    }
    throw std::runtime_error("config line " + std::to_string(line) + ": cannot parse value '" + std::string(text) +
                             "'");
}

std::string strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') {
            in_string = !in_string;
        } else if (s[i] == '#' && !in_string) {
            return std::string(s.substr(0, i));
        }
    }
    return std::string(s);
}

std::map<std::string, std::pair<TomlValue, std::size_t>> parse_flat_toml(std::string_view text) {
    std::map<std::string, std::pair<TomlValue, std::size_t>> out;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::string section;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string content = std::string(trim(strip_comment(raw)));
        if (content.empty()) {
            continue;
        }
        if (content.front() == '[') {
            if (content.back() != ']') {
                throw std::runtime_error("config line " + std::to_string(line) + ": malformed section header");
            }
            section = std::string(trim(std::string_view(content).substr(1, content.size() - 2)));
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line) + ": expected key = value");
        }
        const std::string key = (section.empty() ? "" : section + ".") + std::string(trim(content.substr(0, eq)));
        std::string value = std::string(trim(std::string_view(content).substr(eq + 1)));
        const auto start_line = line;
        if (!value.empty() && value.front() == '[') {
            while (value.find(']') == std::string::npos && std::getline(in, raw)) {
                ++line;
                value += " " + std::string(trim(strip_comment(raw)));
            }
            if (value.back() != ']') {
                throw std::runtime_error("config line " + std::to_string(start_line) + ": unterminated array");
            }
            std::vector<std::variant<double, std::string>> items;
            const auto body = std::string_view(value).substr(1, value.size() - 2);
            std::size_t pos = 0;
            while (pos <= body.size()) {
                const auto comma = body.find(',', pos);
                const auto item = trim(body.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
                if (!item.empty()) {
                    items.push_back(toml_scalar(item, start_line));
                }
                if (comma == std::string_view::npos) {
                    break;
                }
                pos = comma + 1;
            }
            out[key] = {items, start_line};
        } else if (value == "true" || value == "false") {
            out[key] = {value == "true", start_line};
        } else {
            std::visit([&](auto&& v) { out[key] = {TomlValue(v), start_line}; }, toml_scalar(value, start_line));
        }
    }
    return out;
}

} // namespace

void BenchmarkConfig::validate() const {
    if (nodes.empty() || densities.empty() || time_units.empty() || heuristics.empty()) {
        throw std::invalid_argument("benchmark grid lists must be non-empty");
    }
    if (replicates == 0) {
        throw std::invalid_argument("replicates must be at least 1");
    }
    for (double t : time_units) {
        if (!(t > 0.0)) {
            throw std::invalid_argument("time units must be positive");
        }
    }
    for (auto n : nodes) {
        GenConfig g = generator;
        g.nodes = n;
        for (double d : densities) {
            g.density = d;
            g.validate();
        }
    }
}

std::size_t BenchmarkConfig::unit_count() const {
    return nodes.size() * densities.size() * replicates * time_units.size() * heuristics.size();
}

BenchmarkConfig parse_benchmark_config(std::string_view toml) {
    BenchmarkConfig config;
    for (const auto& [key, entry] : parse_flat_toml(toml)) {
        const auto& [value, line] = entry;
        auto fail = [&, line = line](const std::string& why) {
            return std::runtime_error("config line " + std::to_string(line) + ": " + key + ": " + why);
        };
        auto number = [&] {
            if (const auto* d = std::get_if<double>(&value)) {
                return *d;
            }
            throw fail("expected a number");
        };
        auto count = [&] {
            const double d = number();
            if (d < 0.0 || d != std::floor(d)) {
                throw fail("expected a non-negative integer");
            }
            return static_cast<std::size_t>(d);
        };
        auto numbers = [&] {
            const auto* arr = std::get_if<std::vector<std::variant<double, std::string>>>(&value);
            if (arr == nullptr) {
                throw fail("expected an array of numbers");
            }
            std::vector<double> out;
            for (const auto& item : *arr) {
                const auto* d = std::get_if<double>(&item);
                if (d == nullptr) {
                    throw fail("expected an array of numbers");
                }
                out.push_back(*d);
            }
            return out;
        };
        if (key == "nodes") {
            config.nodes.clear();
            for (double d : numbers()) {
                if (d < 1.0 || d != std::floor(d)) {
                    throw fail("node counts must be positive integers");
                }
                config.nodes.push_back(static_cast<std::size_t>(d));
            }
        } else if (key == "densities" || key == "density") {
            config.densities = numbers();
        } else if (key == "time_units") {
            config.time_units = numbers();
        } else if (key == "heuristics") {
            const auto* arr = std::get_if<std::vector<std::variant<double, std::string>>>(&value);
            if (arr == nullptr) {
                throw fail("expected an array of strings");
            }
            config.heuristics.clear();
            for (const auto& item : *arr) {
                const auto* s = std::get_if<std::string>(&item);
                if (s == nullptr) {
                    throw fail("expected an array of strings");
                }
                config.heuristics.push_back(HorizonPolicy::parse(*s));
            }
        } else if (key == "replicates") {
            config.replicates = count();
        } else if (key == "seed") {
            config.seed = count();
        } else if (key == "generator.horizons") {
            config.generator.horizons = numbers();
        } else if (key == "generator.rates") {
            config.generator.rates = numbers();
        } else if (key == "generator.p_geom") {
            config.generator.p_geom = number();
        } else if (key == "generator.max_indegree") {
            config.generator.max_indegree = count();
        } else if (key == "generator.max_intervals") {
            config.generator.max_intervals_per_node = count();
        } else if (key == "learning.max_indegree") {
            const auto c = count();
            config.learn_caps.max_indegree = c == 0 ? std::nullopt : std::optional(c);
        } else if (key == "learning.max_intervals") {
            const auto c = count();
            config.learn_caps.max_intervals = c == 0 ? std::nullopt : std::optional(c);
        } else {
            throw fail("unknown key");
        }
    }
    config.validate();
    return config;
}

BenchmarkConfig load_benchmark_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_benchmark_config(buffer.str());
}

std::string ResultRow::key() const {
    return unit_key(nodes, density, time_units, replicate, heuristic);
}

std::string results_header() {
    return "nodes,density,time_units,replicate,heuristic,model_seed,stream_seed,true_edges,learned_edges,"
           "distance,precision,recall,f1,events_min,events_median,events_max,status";
}

std::string to_csv(const ResultRow& r) {
    std::ostringstream out;
    out << r.nodes << ',' << format_double(r.density) << ',' << format_double(r.time_units) << ',' << r.replicate
        << ',' << r.heuristic << ',' << r.model_seed << ',' << r.stream_seed << ',';
    if (r.ok()) {
        out << r.true_edges << ',' << r.learned_edges << ',' << format_double(r.distance) << ','
            << format_double(r.precision) << ',' << format_double(r.recall) << ',' << format_double(r.f1) << ','
            << r.events_min << ',' << format_double(r.events_median) << ',' << r.events_max;
    } else {
        out << ",,,,,,,,";
    }
    out << ',' << sanitize(r.status);
    return out.str();
}

ResultRow parse_result_row(std::string_view line) {
    const auto f = split_csv(line);
    if (f.size() != 17) {
        throw std::runtime_error("results row has " + std::to_string(f.size()) + " fields, expected 17");
    }
    ResultRow r;
    r.nodes = to_integer<std::size_t>(f[0], "nodes");
    r.density = to_real(f[1], "density");
    r.time_units = to_real(f[2], "time_units");
    r.replicate = to_integer<std::size_t>(f[3], "replicate");
    r.heuristic = f[4];
    r.model_seed = to_integer<std::uint64_t>(f[5], "model_seed");
    r.stream_seed = to_integer<std::uint64_t>(f[6], "stream_seed");
    r.status = f[16];
    if (r.ok()) {
        r.true_edges = to_integer<std::size_t>(f[7], "true_edges");
        r.learned_edges = to_integer<std::size_t>(f[8], "learned_edges");
        r.distance = to_real(f[9], "distance");
        r.precision = to_real(f[10], "precision");
        r.recall = to_real(f[11], "recall");
        r.f1 = to_real(f[12], "f1");
        r.events_min = to_integer<std::size_t>(f[13], "events_min");
        r.events_median = to_real(f[14], "events_median");
        r.events_max = to_integer<std::size_t>(f[15], "events_max");
    }
    return r;
}

namespace {

template <typename Row, typename Parse>
std::vector<Row> read_rows(const std::filesystem::path& path, const std::string& header, Parse parse) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<Row> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != header) {
                throw std::runtime_error(path.string() + ": unexpected header");
            }
            header_seen = true;
            continue;
        }
        rows.push_back(parse(line));
    }
    return rows;
}

} // namespace

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
    return read_rows<ResultRow>(path, results_header(), parse_result_row);
}

std::string per_edge_header() {
    return "nodes,density,time_units,replicate,heuristic,parent,child,true_horizon,true_intervals,distance";
}

std::string to_csv(const PerEdgeRow& r) {
    std::ostringstream out;
    out << r.nodes << ',' << format_double(r.density) << ',' << format_double(r.time_units) << ',' << r.replicate
        << ',' << r.heuristic << ',' << r.parent << ',' << r.child << ',' << format_double(r.true_horizon) << ','
        << r.true_intervals << ',' << format_double(r.distance);
    return out.str();
}

PerEdgeRow parse_per_edge_row(std::string_view line) {
    const auto f = split_csv(line);
    if (f.size() != 10) {
        throw std::runtime_error("per-edge row has " + std::to_string(f.size()) + " fields, expected 10");
    }
    PerEdgeRow r;
    r.nodes = to_integer<std::size_t>(f[0], "nodes");
    r.density = to_real(f[1], "density");
    r.time_units = to_real(f[2], "time_units");
    r.replicate = to_integer<std::size_t>(f[3], "replicate");
    r.heuristic = f[4];
    r.parent = f[5];
    r.child = f[6];
    r.true_horizon = to_real(f[7], "true_horizon");
    r.true_intervals = to_integer<std::size_t>(f[8], "true_intervals");
    r.distance = to_real(f[9], "distance");
    return r;
}

std::vector<PerEdgeRow> read_per_edge(const std::filesystem::path& path) {
    return read_rows<PerEdgeRow>(path, per_edge_header(), parse_per_edge_row);
}

std::vector<BenchmarkUnit> benchmark_units(const BenchmarkConfig& config) {
    std::vector<BenchmarkUnit> units;
    units.reserve(config.unit_count());
    for (auto n : config.nodes) {
        for (double d : config.densities) {
            for (std::size_t r = 0; r < config.replicates; ++r) {
                for (double t : config.time_units) {
                    for (const auto& h : config.heuristics) {
                        units.push_back({n, d, r, t, h});
                    }
                }
            }
        }
    }
    return units;
}

std::uint64_t model_seed(const BenchmarkConfig& config, std::size_t nodes, double density, std::size_t replicate) {
    const auto density_key = static_cast<std::uint64_t>(std::llround(density * 1e6));
    return derive_seed(derive_seed(derive_seed(config.seed, nodes), density_key), replicate);
}

std::uint64_t stream_seed(std::uint64_t model_seed, double time_units) {
    return derive_seed(model_seed, static_cast<std::uint64_t>(std::llround(time_units * 1e3)));
}

UnitOutcome run_unit(const BenchmarkConfig& config, const BenchmarkUnit& unit) {
    const auto start = std::chrono::steady_clock::now();
    UnitOutcome out;
    auto& row = out.row;
    row.nodes = unit.nodes;
    row.density = unit.density;
    row.time_units = unit.time_units;
    row.replicate = unit.replicate;
    row.heuristic = unit.heuristic.name();
    row.model_seed = model_seed(config, unit.nodes, unit.density, unit.replicate);
    row.stream_seed = stream_seed(row.model_seed, unit.time_units);
    try {
        GenConfig gen = config.generator;
        gen.nodes = unit.nodes;
        gen.density = unit.density;
        gen.seed = row.model_seed;
        const auto truth = random_tgem(gen);
        const auto stream = sample(truth, unit.time_units, row.stream_seed);

        SearchOptions options;
        options.caps = config.learn_caps;
        out.learned = learn(stream, unit.heuristic, options);
        const auto& learned = out.learned.model;

        double previous = out.learned.forward.initial_bic;
        for (const auto* trace : {&out.learned.forward, &out.learned.backward}) {
            for (const auto& step : trace->steps) {
                if (!(step.bic_after > previous)) {
                    throw std::logic_error("search trace is not strictly increasing");
                }
                previous = step.bic_after;
            }
        }
        if (out.learned.final_bic < out.learned.empty_bic) {
            throw std::logic_error("final BIC below the empty model");
        }

        row.true_edges = truth.edge_count();
        row.learned_edges = learned.edge_count();
        row.distance = model_distance(truth, learned, DistanceMode::refined);
        const auto scores = edge_f1(truth, learned);
        row.precision = scores.precision;
        row.recall = scores.recall;
        row.f1 = scores.f1;

        std::vector<std::size_t> counts;
        for (LabelId l = 0; l < stream.label_count(); ++l) {
            counts.push_back(stream.count(l));
        }
        std::sort(counts.begin(), counts.end());
        row.events_min = counts.front();
        row.events_max = counts.back();
        const auto mid = counts.size() / 2;
        row.events_median = counts.size() % 2 == 1
                                ? static_cast<double>(counts[mid])
                                : (static_cast<double>(counts[mid - 1]) + static_cast<double>(counts[mid])) / 2.0;

        for (const auto& e : truth.edges()) {
            const auto* learned_ts = learned.timescale(e.parent, e.child);
            out.edges.push_back({unit.nodes, unit.density, unit.time_units, unit.replicate, row.heuristic,
                                 truth.label_name(e.parent), truth.label_name(e.child), e.timescale.horizon(),
                                 e.timescale.interval_count(),
                                 learned_ts ? elementary_distance_refined(e.timescale, *learned_ts) : 1.0});
        }
    } catch (const std::exception& e) {
        row.status = "error: " + sanitize(e.what());
        out.edges.clear();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

BenchmarkRunSummary run_benchmark(const BenchmarkConfig& config, const BenchmarkRunOptions& options) {
    config.validate();
    namespace fs = std::filesystem;
    fs::create_directories(options.out_dir);
    const auto results_path = options.out_dir / "results.csv";
    const auto per_edge_path = options.out_dir / "per_edge.csv";
    const auto runtime_path = options.out_dir / "runtime.csv";

    // Resume: keep complete rows, drop a partially written last line.
    std::set<std::string> done;
    if (fs::exists(results_path)) {
        std::ifstream in(results_path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        std::string content = buffer.str();
        if (!content.empty() && content.back() != '\n') {
            content.erase(content.rfind('\n') == std::string::npos ? 0 : content.rfind('\n') + 1);
        }
        std::istringstream lines(content);
        std::string line;
        std::size_t index = 0;
        std::string kept;
        while (std::getline(lines, line)) {
            if (index == 0 && line != kResultsSchema) {
                throw std::runtime_error(results_path.string() + ": unknown results schema");
            }
            if (index == 1 && line != results_header()) {
                throw std::runtime_error(results_path.string() + ": unexpected header");
            }
            if (index >= 2 && !line.empty()) {
                done.insert(parse_result_row(line).key());
            }
            kept += line + '\n';
            ++index;
        }
        if (index < 2) {
            kept.clear();
        }
        std::ofstream(results_path, std::ios::trunc) << kept;
    }
    if (fs::exists(per_edge_path) || options.per_edge) {
        std::string kept = per_edge_header() + '\n';
        if (fs::exists(per_edge_path)) {
            std::ifstream in(per_edge_path);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line == per_edge_header() || in.eof()) {
                    continue;
                }
                const auto row = parse_per_edge_row(line);
                if (done.count(unit_key(row.nodes, row.density, row.time_units, row.replicate, row.heuristic))) {
                    kept += line + '\n';
                }
            }
        }
        std::ofstream(per_edge_path, std::ios::trunc) << kept;
    }

    std::ofstream results(results_path, std::ios::app);
    if (!results) {
        throw std::runtime_error("cannot write " + results_path.string());
    }
    if (fs::file_size(results_path) == 0) {
        results << kResultsSchema << '\n' << results_header() << '\n';
    }
    std::ofstream per_edge;
    if (options.per_edge) {
        per_edge.open(per_edge_path, std::ios::app);
    }
    std::ofstream runtime(runtime_path, std::ios::app);

    std::vector<BenchmarkUnit> pending;
    BenchmarkRunSummary summary;
    for (const auto& unit : benchmark_units(config)) {
        if (done.count(unit_key(unit.nodes, unit.density, unit.time_units, unit.replicate, unit.heuristic.name()))) {
            ++summary.skipped;
        } else {
            pending.push_back(unit);
        }
    }

    // Finished units wait in `slots` until every earlier unit has been written.
    std::mutex mutex;
    std::vector<std::optional<UnitOutcome>> slots(pending.size());
    std::size_t next = 0;
    bool stopped = false;
    parallel_for(pending.size(), options.jobs, [&](std::size_t i) {
        {
            std::lock_guard lock(mutex);
            if (stopped) {
                return;
            }
        }
        auto outcome = run_unit(config, pending[i]);
        std::lock_guard lock(mutex);
        slots[i] = std::move(outcome);
        while (next < slots.size() && slots[next] && !stopped) {
            if (options.stop_after && summary.written >= *options.stop_after) {
                stopped = true;
                break;
            }
            const auto& o = *slots[next];
            // Per-edge rows go first: a unit counts as done once its results row exists.
            if (options.per_edge) {
                for (const auto& e : o.edges) {
                    per_edge << to_csv(e) << '\n';
                }
                per_edge.flush();
            }
            results << to_csv(o.row) << '\n' << std::flush;
            runtime << o.row.key() << ',' << o.seconds << '\n';
            if (options.on_unit) {
                options.on_unit(o);
            }
            ++summary.written;
            summary.errors += o.row.ok() ? 0 : 1;
            slots[next].reset();
            ++next;
        }
    });
    return summary;
}

} // namespace tgem
