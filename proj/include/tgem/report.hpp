#pragma once

#include "tgem/benchmark.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tgem {

/// A rendered table; every cell is already formatted.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::string to_csv() const;
    /// Columns padded to a common width, separated by two spaces.
    [[nodiscard]] std::string to_text() const;
};

/// Rounds to two decimals and drops trailing zeros: 4.10 -> "4.1", 3.00 -> "3".
[[nodiscard]] std::string format_stat(double value);
/// "mean (sd)" with format_stat on both parts.
[[nodiscard]] std::string format_mean_sd(double mean, double sd);

/// Sample mean and standard deviation (n - 1 denominator; 0 for one value).
struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};
[[nodiscard]] MeanSd mean_sd(std::span<const double> values);

struct Summary {
    /// nodes, time_units, density, N, one column per heuristic, empty_model.
    Table distance;
    /// Same layout as distance, without the empty_model column.
    Table f1;
    /// time_units, avg_min, avg_median, avg_max (rounded to integers).
    Table events;
};

/// Aggregates benchmark rows. Error rows are ignored; N counts the distinct
/// generating models of a cell; the empty_model column is the mean number of
/// true edges, i.e. the distance of the empty model. Heuristic columns are
/// ordered proximal first, then by ascending q. Throws std::invalid_argument
/// when there are no successful rows.
[[nodiscard]] Summary summarize(std::span<const ResultRow> rows);

struct HorizonBox {
    double time_units = 0.0;
    bool multi_interval = false;
    double horizon = 0.0;
    std::size_t count = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

/// Linear-interpolation quantile (R type 7) of sorted values.
[[nodiscard]] double quantile_type7(std::span<const double> sorted, double p);

/// Five-number summaries of the per-edge distance of proximal-learned
/// models, grouped by time units, single/multi-interval and true horizon.
/// Empty groups are absent. Throws std::invalid_argument if no proximal rows.
[[nodiscard]] std::vector<HorizonBox> distance_by_horizon(std::span<const PerEdgeRow> rows);
[[nodiscard]] Table horizon_table(std::span<const HorizonBox> boxes);

/// Standalone SVG box plot of the boxes for one (time units, class).
[[nodiscard]] std::string box_plot_svg(std::span<const HorizonBox> boxes, const std::string& title);

/// Reads results.csv (and per_edge.csv when present) from results_dir and
/// writes distance/f1/events tables as .csv and .txt, plus horizon.csv and
/// one SVG per (time units, class) when per-edge data exists.
void write_report(const std::filesystem::path& results_dir, const std::filesystem::path& out_dir);

} // namespace tgem
