#include "tgem/generation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace tgem;

TEST_CASE("generated models are valid and respect the caps") {
    GenConfig config;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        config.seed = seed;
        config.nodes = 5 + seed % 11;
        config.density = seed % 2 ? 0.1 : 0.2;
        const auto m = random_tgem(config);
        CHECK(validate_model(m).empty());
        for (LabelId l = 0; l < m.label_count(); ++l) {
            CHECK(m.in_degree(l) <= config.max_indegree);
            CHECK(m.interval_count(l) <= config.max_intervals_per_node);
            for (double r : m.rates(l)) {
                CHECK(std::find(config.rates.begin(), config.rates.end(), r) != config.rates.end());
            }
        }
    }
}

TEST_CASE("density 0 gives the empty model") {
    GenConfig config;
    config.density = 0.0;
    config.nodes = 6;
    const auto m = random_tgem(config);
    CHECK(m.edge_count() == 0);
    for (LabelId l = 0; l < 6; ++l) {
        CHECK(m.rates(l).size() == 1);
    }
    CHECK(m.label_name(5) == "5");
}

TEST_CASE("same seed, same model") {
    GenConfig config;
    config.seed = 42;
    CHECK(random_tgem(config) == random_tgem(config));
    config.nodes = 15;
    auto other = config;
    other.seed = 43;
    CHECK_FALSE(random_tgem(config) == random_tgem(other));
}

TEST_CASE("mean edge count matches the capped binomial expectation") {
    // In-degree of a node is Binomial(n, p) truncated at the cap.
    auto capped_mean = [](std::size_t n, double p, std::size_t cap) {
        double mean = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            const double pk = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) *
                              std::pow(p, static_cast<double>(k)) * std::pow(1 - p, static_cast<double>(n - k));
            mean += pk * static_cast<double>(std::min(k, cap));
        }
        return mean * static_cast<double>(n);
    };
    for (const auto& [nodes, density] : {std::pair{std::size_t{5}, 0.2}, std::pair{std::size_t{15}, 0.1}}) {
        GenConfig config;
        config.nodes = nodes;
        config.density = density;
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            config.seed = seed;
            total += static_cast<double>(random_tgem(config).edge_count());
        }
        const double expected = capped_mean(nodes, density, config.max_indegree);
        CHECK(total / 1000.0 == doctest::Approx(expected).epsilon(0.10));
        CHECK(expected < density * static_cast<double>(nodes * nodes));
    }
}

TEST_CASE("timescales come from the horizon set and its modifications") {
    GenConfig config;
    config.nodes = 10;
    config.density = 0.3;
    std::size_t multi = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        config.seed = seed;
        for (const auto& e : random_tgem(config).edges()) {
            const auto& ep = e.timescale.endpoints;
            multi += ep.size() > 1 ? 1 : 0;
            // Midpoints and doublings of values in H stay on a fine dyadic grid.
            for (double v : ep) {
                CHECK(std::fmod(v * 1024.0, 1.0) == 0.0);
            }
            CHECK(std::is_sorted(ep.begin(), ep.end()));
        }
    }
    CHECK(multi > 0);
}

TEST_CASE("config validation") {
    GenConfig config;
    config.density = 1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.density = 0.2;
    config.rates.clear();
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = GenConfig{};
    config.nodes = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
