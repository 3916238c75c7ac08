#include "tgem/benchmark.hpp"
#include "tgem/evaluation.hpp"
#include "tgem/event_stream.hpp"
#include "tgem/generation.hpp"
#include "tgem/learning.hpp"
#include "tgem/model.hpp"
#include "tgem/report.hpp"
#include "tgem/sampling.hpp"
#include "tgem/scoring.hpp"
#include "tgem/statistics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::ordered_json;

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto v = tgem::parse_double(item);
        if (!v) {
            throw CLI::ValidationError(what, "cannot parse '" + item + "'");
        }
        out.push_back(*v);
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

int score(const std::string& model_path, const std::string& data_path, bool verbose) {
    const auto model = tgem::load_model(model_path);
    const auto stream = tgem::with_vocabulary(tgem::load_events(data_path), model.labels());
    const double penalty = tgem::bic_penalty(model, stream.t_star());
    const double loglik = tgem::log_likelihood(stream, model);
    ordered_json out;
    out["loglik"] = loglik;
    out["bic"] = loglik - penalty;
    out["penalty"] = penalty;
    if (verbose) {
        out["nodes"] = ordered_json::array();
        for (tgem::LabelId l = 0; l < model.labels().size(); ++l) {
            const auto stats = tgem::sufficient_stats(stream, model, l);
            const double ll = tgem::node_log_likelihood(stats);
            const double pen = static_cast<double>(model.config_count(l)) * std::log(stream.t_star());
            out["nodes"].push_back({{"label", model.label_name(l)},
                                    {"events", stream.count(l)},
                                    {"configs", model.config_count(l)},
                                    {"loglik", ll},
                                    {"penalty", pen},
                                    {"local_bic", ll - pen}});
        }
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timescale graphical event models: scoring, learning, sampling and benchmarking"};
    app.require_subcommand(1);

    std::string model_path;
    std::string data_path;
    std::string out_path;
    bool verbose = false;
    auto* score_cmd = app.add_subcommand("score", "Log-likelihood and BIC of a model on an event stream");
    score_cmd->add_option("--model", model_path, "Model JSON")->required();
    score_cmd->add_option("--data", data_path, "Event CSV")->required();
    score_cmd->add_flag("--verbose", verbose, "Per-node breakdown");

    std::string heuristic = "proximal";
    double q = 0.5;
    std::size_t max_indegree = 0;
    std::size_t max_intervals = 0;
    std::string trace_path;
    std::size_t jobs = 1;
    auto* learn_cmd = app.add_subcommand("learn", "Learn a model by forward-backward BIC search");
    learn_cmd->add_option("--data", data_path, "Event CSV")->required();
    learn_cmd->add_option("--heuristic", heuristic, "Default horizon heuristic")
        ->check(CLI::IsMember({"proximal", "quantile"}));
    learn_cmd->add_option("--q", q, "Quantile level for --heuristic quantile")->check(CLI::Range(0.0, 1.0));
    learn_cmd->add_option("--max-indegree", max_indegree, "Maximum parents per node (0 = unbounded)");
    learn_cmd->add_option("--max-intervals", max_intervals, "Maximum incoming intervals per node (0 = unbounded)");
    learn_cmd->add_option("--out", out_path, "Output model JSON")->required();
    learn_cmd->add_option("--trace", trace_path, "Write the search trace as JSON");
    learn_cmd->add_option("--jobs", jobs, "Worker threads for neighborhood scoring")->check(CLI::PositiveNumber);

    double t_end = 0.0;
    std::uint64_t seed = 0;
    auto* sample_cmd = app.add_subcommand("sample", "Sample an event stream from a model");
    sample_cmd->add_option("--model", model_path, "Model JSON")->required();
    sample_cmd->add_option("--t-end", t_end, "Sampling horizon")->required();
    sample_cmd->add_option("--seed", seed, "Random seed")->required();
    sample_cmd->add_option("--out", out_path, "Output event CSV")->required();

    tgem::GenConfig gen;
    std::string horizons;
    std::string rates;
    auto* generate_cmd = app.add_subcommand("generate", "Generate a random model");
    generate_cmd->add_option("--nodes", gen.nodes, "Number of labels")->required();
    generate_cmd->add_option("--density", gen.density, "Edge probability")->required();
    generate_cmd->add_option("--seed", gen.seed, "Random seed")->required();
    generate_cmd->add_option("--horizons", horizons, "Comma-separated horizon set");
    generate_cmd->add_option("--rates", rates, "Comma-separated rate set");
    generate_cmd->add_option("--out", out_path, "Output model JSON")->required();

    std::string a_path;
    std::string b_path;
    std::string mode = "refined";
    auto* distance_cmd = app.add_subcommand("distance", "Structural distance between two models");
    distance_cmd->add_option("--a", a_path, "First model JSON")->required();
    distance_cmd->add_option("--b", b_path, "Second model JSON")->required();
    distance_cmd->add_option("--mode", mode, "Elementary distance")->check(CLI::IsMember({"set", "refined"}));

    std::string config_path;
    bool per_edge = false;
    auto* bench_cmd = app.add_subcommand("benchmark", "Run the synthetic benchmark grid");
    bench_cmd->add_option("--config", config_path, "TOML config (defaults when omitted)");
    bench_cmd->add_option("--out", out_path, "Output directory")->required();
    bench_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    bench_cmd->add_flag("--per-edge", per_edge, "Also write per_edge.csv");

    std::string results_dir;
    auto* report_cmd = app.add_subcommand("report", "Summarize benchmark results");
    report_cmd->add_option("--results", results_dir, "Benchmark output directory")->required();
    report_cmd->add_option("--out", out_path, "Report directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (score_cmd->parsed()) {
            return score(model_path, data_path, verbose);
        }
        if (learn_cmd->parsed()) {
            const auto stream = tgem::load_events(data_path);
            const auto policy =
                heuristic == "proximal" ? tgem::HorizonPolicy::proximal() : tgem::HorizonPolicy::quantile(q);
            tgem::SearchOptions options;
            if (max_indegree > 0) {
                options.caps.max_indegree = max_indegree;
            }
            if (max_intervals > 0) {
                options.caps.max_intervals = max_intervals;
            }
            options.jobs = jobs;
            const auto result = tgem::learn(stream, policy, options);
            tgem::save_model(out_path, result.model);
            if (!trace_path.empty()) {
                write_text(trace_path, tgem::trace_to_json(result));
            }
            std::cerr << "edges " << result.model.edge_count() << ", bic " << result.final_bic << '\n';
            return 0;
        }
        if (sample_cmd->parsed()) {
            tgem::save_events(out_path, tgem::sample(tgem::load_model(model_path), t_end, seed));
            return 0;
        }
        if (generate_cmd->parsed()) {
            if (!horizons.empty()) {
                gen.horizons = parse_list(horizons, "--horizons");
            }
            if (!rates.empty()) {
                gen.rates = parse_list(rates, "--rates");
            }
            tgem::save_model(out_path, tgem::random_tgem(gen));
            return 0;
        }
        if (distance_cmd->parsed()) {
            const auto report = tgem::model_distance_report(
                tgem::load_model(a_path), tgem::load_model(b_path),
                mode == "set" ? tgem::DistanceMode::set : tgem::DistanceMode::refined);
            ordered_json out;
            out["mode"] = mode;
            out["distance"] = report.total;
            out["edges"] = ordered_json::array();
            for (const auto& e : report.edges) {
                out["edges"].push_back(
                    {{"from", e.parent}, {"to", e.child}, {"status", e.status}, {"distance", e.value}});
            }
            std::cout << out.dump(2) << '\n';
            return 0;
        }
        if (bench_cmd->parsed()) {
            const auto config =
                config_path.empty() ? tgem::BenchmarkConfig{} : tgem::load_benchmark_config(config_path);
            tgem::BenchmarkRunOptions options;
            options.out_dir = out_path;
            options.jobs = jobs;
            options.per_edge = per_edge;
            const auto total = config.unit_count();
            std::size_t done = 0;
            options.on_unit = [&](const tgem::UnitOutcome& o) {
                ++done;
                if (!o.row.ok()) {
                    std::cerr << o.row.key() << ": " << o.row.status << '\n';
                }
                if (done % 50 == 0) {
                    std::cerr << done << " new rows\n";
                }
            };
            const auto summary = tgem::run_benchmark(config, options);
            std::cerr << summary.written << " written, " << summary.skipped << " skipped, " << summary.errors
                      << " errors (" << total << " units)\n";
            return 0;
        }
        if (report_cmd->parsed()) {
            tgem::write_report(results_dir, out_path);
            std::cout << std::ifstream(std::filesystem::path(out_path) / "distance.txt").rdbuf();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
