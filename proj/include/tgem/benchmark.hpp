#pragma once

#include "tgem/generation.hpp"
#include "tgem/horizon.hpp"
#include "tgem/learning.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tgem {

/// Version tag written as the first line of every results file.
inline constexpr std::string_view kResultsSchema = "# tgem-results v1";

struct BenchmarkConfig {
    std::vector<std::size_t> nodes{5, 10, 15};
    std::vector<double> densities{0.1, 0.2};
    std::vector<double> time_units{500, 1000, 2000, 4000, 8000};
    std::vector<HorizonPolicy> heuristics{HorizonPolicy::proximal(),      HorizonPolicy::quantile(0.05),
                                          HorizonPolicy::quantile(0.25), HorizonPolicy::quantile(0.5),
                                          HorizonPolicy::quantile(0.75), HorizonPolicy::quantile(0.95)};
    std::size_t replicates = 100;
    std::uint64_t seed = 1;
    /// Generator settings other than nodes/density/seed, which the grid sets.
    GenConfig generator{};
    /// Forward-search caps used when learning.
    StructuralCaps learn_caps{2, 4};

    void validate() const;
    /// Number of work units: models x time units x heuristics.
    [[nodiscard]] std::size_t unit_count() const;
};

/// Reads a flat TOML file. Top-level keys: nodes, densities, time_units,
/// heuristics, replicates, seed; [generator] horizons, rates, p_geom,
/// max_indegree, max_intervals; [learning] max_indegree, max_intervals.
/// Unset keys keep their defaults; unknown keys are errors.
[[nodiscard]] BenchmarkConfig parse_benchmark_config(std::string_view toml);
[[nodiscard]] BenchmarkConfig load_benchmark_config(const std::filesystem::path& path);

/// One (model, time units, heuristic) observation.
struct ResultRow {
    std::size_t nodes = 0;
    double density = 0.0;
    double time_units = 0.0;
    std::size_t replicate = 0;
    std::string heuristic;
    std::uint64_t model_seed = 0;
    std::uint64_t stream_seed = 0;
    std::size_t true_edges = 0;
    std::size_t learned_edges = 0;
    double distance = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t events_min = 0;
    double events_median = 0.0;
    std::size_t events_max = 0;
    /// "ok" or "error: <message>".
    std::string status = "ok";

    [[nodiscard]] bool ok() const { return status == "ok"; }
    /// Identity of the work unit, used for resuming.
    [[nodiscard]] std::string key() const;
};

/// Refined elementary distance of one generating edge to its learned
/// counterpart (1 when not learned).
struct PerEdgeRow {
    std::size_t nodes = 0;
    double density = 0.0;
    double time_units = 0.0;
    std::size_t replicate = 0;
    std::string heuristic;
    std::string parent;
    std::string child;
    double true_horizon = 0.0;
    std::size_t true_intervals = 0;
    double distance = 0.0;
};

[[nodiscard]] std::string results_header();
[[nodiscard]] std::string to_csv(const ResultRow& row);
[[nodiscard]] ResultRow parse_result_row(std::string_view line);
[[nodiscard]] std::vector<ResultRow> read_results(const std::filesystem::path& path);

[[nodiscard]] std::string per_edge_header();
[[nodiscard]] std::string to_csv(const PerEdgeRow& row);
[[nodiscard]] PerEdgeRow parse_per_edge_row(std::string_view line);
[[nodiscard]] std::vector<PerEdgeRow> read_per_edge(const std::filesystem::path& path);

/// Work unit identity.
struct BenchmarkUnit {
    std::size_t nodes;
    double density;
    std::size_t replicate;
    double time_units;
    HorizonPolicy heuristic;
};

/// All units in canonical order (nodes, density, replicate, time units, heuristic).
[[nodiscard]] std::vector<BenchmarkUnit> benchmark_units(const BenchmarkConfig& config);

[[nodiscard]] std::uint64_t model_seed(const BenchmarkConfig& config, std::size_t nodes, double density,
                                       std::size_t replicate);
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t model_seed, double time_units);

struct UnitOutcome {
    ResultRow row;
    std::vector<PerEdgeRow> edges;
    LearnResult learned;
    double seconds = 0.0;
};

/// Generates, samples, learns and evaluates one unit. Failures become error rows.
[[nodiscard]] UnitOutcome run_unit(const BenchmarkConfig& config, const BenchmarkUnit& unit);

struct BenchmarkRunOptions {
    std::filesystem::path out_dir;
    std::size_t jobs = 1;
    bool per_edge = false;
    /// Stop after writing this many rows in this invocation (simulates an interruption).
    std::optional<std::size_t> stop_after;
    /// Called for every finished unit (from worker threads, serialized).
    std::function<void(const UnitOutcome&)> on_unit;
};

struct BenchmarkRunSummary {
    std::size_t written = 0;
    std::size_t skipped = 0;
    std::size_t errors = 0;
};

/// Runs the grid, writing `results.csv` (deterministic, resumable),
/// `runtime.csv` (wall-clock seconds per unit) and, with per_edge,
/// `per_edge.csv` under out_dir. Rows are written in canonical unit order
/// regardless of `jobs`; units already present in results.csv are skipped.
BenchmarkRunSummary run_benchmark(const BenchmarkConfig& config, const BenchmarkRunOptions& options);

} // namespace tgem
