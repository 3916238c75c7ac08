#include "tgem/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace tgem {

std::string Table::to_csv() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "," : "") << cells[i];
        }
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
    return out.str();
}

std::string Table::to_text() const {
    std::vector<std::size_t> width(header.size(), 0);
    auto measure = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) {
            width[i] = std::max(width[i], cells[i].size());
        }
    };
    measure(header);
    for (const auto& r : rows) {
        measure(r);
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        std::string text;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                text += "  ";
            }
            text += std::string(width[i] - cells[i].size(), ' ') + cells[i];
        }
        out << text << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
    return out.str();
}

std::string format_stat(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    std::string s = buf;
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') {
        s.pop_back();
    }
    if (s == "-0") {
        s = "0";
    }
    return s;
}

std::string format_mean_sd(double mean, double sd) {
    return format_stat(mean) + " (" + format_stat(sd) + ")";
}

MeanSd mean_sd(std::span<const double> values) {
    MeanSd out;
    out.n = values.size();
    if (values.empty()) {
        return out;
    }
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

namespace {

// Sort key for heuristic columns: proximal, then quantiles by q, then anything else by name.
std::tuple<int, double, std::string> heuristic_order(const std::string& name) {
    try {
        const auto p = HorizonPolicy::parse(name);
        if (p.kind() == HorizonPolicy::Kind::proximal) {
            return {0, 0.0, name};
        }
        return {1, p.q(), name};
    } catch (const std::exception&) {
        return {2, 0.0, name};
    }
}

using CellKey = std::tuple<std::size_t, double, double>; // nodes, density, time units

struct Cell {
    std::set<std::size_t> models;
    std::map<std::size_t, double> true_edges; // replicate -> count
    std::map<std::string, std::vector<double>> distance;
    std::map<std::string, std::vector<double>> f1;
};

} // namespace

Summary summarize(std::span<const ResultRow> rows) {
    std::map<CellKey, Cell> cells;
    std::set<std::string> names;
    // (nodes, density, replicate, time units) -> event counts of that data set
    std::map<std::tuple<std::size_t, double, std::size_t, double>, const ResultRow*> datasets;
    for (const auto& r : rows) {
        if (!r.ok()) {
            continue;
        }
        auto& c = cells[{r.nodes, r.density, r.time_units}];
        c.models.insert(r.replicate);
        c.true_edges[r.replicate] = static_cast<double>(r.true_edges);
        c.distance[r.heuristic].push_back(r.distance);
        c.f1[r.heuristic].push_back(r.f1);
        names.insert(r.heuristic);
        datasets.emplace(std::tuple{r.nodes, r.density, r.replicate, r.time_units}, &r);
    }
    if (cells.empty()) {
        throw std::invalid_argument("no successful result rows to summarize");
    }
    std::vector<std::string> heuristics(names.begin(), names.end());
    std::sort(heuristics.begin(), heuristics.end(),
              [](const auto& a, const auto& b) { return heuristic_order(a) < heuristic_order(b); });

    Summary s;
    s.distance.header = {"nodes", "time_units", "density", "N"};
    s.distance.header.insert(s.distance.header.end(), heuristics.begin(), heuristics.end());
    s.f1.header = s.distance.header;
    s.distance.header.push_back("empty_model");

    for (const auto& [key, c] : cells) {
        const auto& [nodes, density, time_units] = key;
        std::vector<std::string> lead{std::to_string(nodes), format_double(time_units), format_double(density),
                                      std::to_string(c.models.size())};
        auto drow = lead;
        auto frow = lead;
        for (const auto& h : heuristics) {
            const auto d = c.distance.find(h);
            const auto f = c.f1.find(h);
            if (d == c.distance.end()) {
                drow.emplace_back("");
                frow.emplace_back("");
                continue;
            }
            const auto dm = mean_sd(d->second);
            const auto fm = mean_sd(f->second);
            drow.push_back(format_mean_sd(dm.mean, dm.sd));
            frow.push_back(format_mean_sd(fm.mean, fm.sd));
        }
        std::vector<double> edges;
        for (const auto& [rep, e] : c.true_edges) {
            edges.push_back(e);
        }
        const auto em = mean_sd(edges);
        drow.push_back(format_mean_sd(em.mean, em.sd));
        s.distance.rows.push_back(std::move(drow));
        s.f1.rows.push_back(std::move(frow));
    }

    std::map<double, std::vector<const ResultRow*>> by_length;
    for (const auto& [key, r] : datasets) {
        by_length[std::get<3>(key)].push_back(r);
    }
    s.events.header = {"time_units", "avg_min", "avg_median", "avg_max"};
    for (const auto& [t, list] : by_length) {
        double lo = 0.0;
        double mid = 0.0;
        double hi = 0.0;
        for (const auto* r : list) {
            lo += static_cast<double>(r->events_min);
            mid += r->events_median;
            hi += static_cast<double>(r->events_max);
        }
        const auto n = static_cast<double>(list.size());
        auto whole = [](double v) { return std::to_string(std::llround(v)); };
        s.events.rows.push_back({format_double(t), whole(lo / n), whole(mid / n), whole(hi / n)});
    }
    return s;
}

double quantile_type7(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw std::invalid_argument("quantile of an empty sample");
    }
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<HorizonBox> distance_by_horizon(std::span<const PerEdgeRow> rows) {
    std::map<std::tuple<double, bool, double>, std::vector<double>> groups;
    for (const auto& r : rows) {
        if (r.heuristic == "proximal") {
            groups[{r.time_units, r.true_intervals > 1, r.true_horizon}].push_back(r.distance);
        }
    }
    if (groups.empty()) {
        throw std::invalid_argument("no per-edge rows for the proximal heuristic");
    }
    std::vector<HorizonBox> out;
    for (auto& [key, values] : groups) {
        std::sort(values.begin(), values.end());
        HorizonBox b;
        std::tie(b.time_units, b.multi_interval, b.horizon) = key;
        b.count = values.size();
        b.min = values.front();
        b.q1 = quantile_type7(values, 0.25);
        b.median = quantile_type7(values, 0.5);
        b.q3 = quantile_type7(values, 0.75);
        b.max = values.back();
        out.push_back(b);
    }
    return out;
}

Table horizon_table(std::span<const HorizonBox> boxes) {
    Table t;
    t.header = {"time_units", "timescale", "horizon", "count", "min", "q1", "median", "q3", "max"};
    for (const auto& b : boxes) {
        t.rows.push_back({format_double(b.time_units), b.multi_interval ? "multi" : "single",
                          format_double(b.horizon), std::to_string(b.count), format_double(b.min),
                          format_double(b.q1), format_double(b.median), format_double(b.q3), format_double(b.max)});
    }
    return t;
}

std::string box_plot_svg(std::span<const HorizonBox> boxes, const std::string& title) {
    constexpr double width = 80.0;
    constexpr double top = 40.0;
    constexpr double plot_h = 200.0;
    constexpr double left = 50.0;
    const double total_w = left + width * static_cast<double>(boxes.size()) + 20.0;
    auto y = [&](double v) { return top + plot_h * (1.0 - v); };
    char buf[256];
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total_w << "\" height=\"" << top + plot_h + 50
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<text x=\"" << left << "\" y=\"20\">" << title << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s</text>\n",
                      left, y(tick), total_w - 20.0, y(tick), left - 5.0, y(tick) + 4.0, format_stat(tick).c_str());
        svg << buf;
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& b = boxes[i];
        const double cx = left + width * (static_cast<double>(i) + 0.5);
        const double half = width * 0.3;
        std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                      cx, y(b.max), cx, y(b.min));
        svg << buf;
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"#9ecae1\" stroke=\"black\"/>\n",
                      cx - half, y(b.q3), 2 * half, std::max(y(b.q1) - y(b.q3), 0.5));
        svg << buf;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\" stroke-width=\"2\"/>\n",
                      cx - half, y(b.median), cx + half, y(b.median));
        svg << buf;
        svg << "<text x=\"" << cx << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
            << format_double(b.horizon) << "</text>\n";
        svg << "<text x=\"" << cx << "\" y=\"" << top + plot_h + 34 << "\" text-anchor=\"middle\">n=" << b.count
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_report(const std::filesystem::path& results_dir, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const auto rows = read_results(results_dir / "results.csv");
    const auto summary = summarize(rows);
    fs::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(out_dir / name);
        if (!out) {
            throw std::runtime_error("cannot write " + (out_dir / name).string());
        }
        out << content;
    };
    for (const auto& [name, table] : {std::pair{"distance", &summary.distance}, std::pair{"f1", &summary.f1},
                                      std::pair{"events", &summary.events}}) {
        write(std::string(name) + ".csv", table->to_csv());
        write(std::string(name) + ".txt", table->to_text());
    }
    const auto per_edge_path = results_dir / "per_edge.csv";
    if (!fs::exists(per_edge_path)) {
        return;
    }
    const auto edges = read_per_edge(per_edge_path);
    const auto boxes = distance_by_horizon(edges);
    write("horizon.csv", horizon_table(boxes).to_csv());
    std::map<std::pair<double, bool>, std::vector<HorizonBox>> plots;
    for (const auto& b : boxes) {
        plots[{b.time_units, b.multi_interval}].push_back(b);
    }
    for (const auto& [key, list] : plots) {
        const auto kind = key.second ? "multi" : "single";
        const auto stem = "horizon_T" + format_double(key.first) + "_" + kind;
        write(stem + ".svg", box_plot_svg(list, std::string("T = ") + format_double(key.first) + ", " + kind +
                                                    "-interval edges: distance by true horizon"));
    }
}

} // namespace tgem
