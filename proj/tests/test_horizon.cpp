#include "support.hpp"

#include "tgem/horizon.hpp"
#include "tgem/sampling.hpp"
#include "tgem/scoring.hpp"
#include "tgem/statistics.hpp"

#include <doctest.h>

#include <random>

using namespace tgem;

namespace {

// Single-edge log-likelihood through the general statistics path.
double single_edge_ll(const EventStream& s, LabelId z, LabelId x, double h) {
    const std::vector<ParentEdge> parents{{z, Timescale::single(h)}};
    return node_log_likelihood(sufficient_stats(s, x, parents));
}

} // namespace

TEST_CASE("policy parsing and names") {
    CHECK(HorizonPolicy::parse("proximal") == HorizonPolicy::proximal());
    CHECK(HorizonPolicy::parse("q=0.25") == HorizonPolicy::quantile(0.25));
    CHECK(HorizonPolicy::parse("quantile:0.5").q() == 0.5);
    CHECK(HorizonPolicy::quantile(0.05).name() == "q=0.05");
    CHECK_THROWS((void)HorizonPolicy::quantile(1.0));
    CHECK_THROWS((void)HorizonPolicy::parse("median"));
}

TEST_CASE("quantile horizons on the three-label stream") {
    const auto s = load_events(test::fixture("three_label_stream.csv"));
    const auto a = s.label_id("A");
    const auto b = s.label_id("B");
    const auto c = s.label_id("C");
    CHECK(quantile_horizon(s, a, a, 0.5) == 7.5);
    CHECK(quantile_horizon(s, c, b, 0.95) == 3.5);
    CHECK(quantile_horizon(s, c, b, 0.5) == 2.5);
    const EventStream no_z({"Z", "X"}, {{1.0, 1}}, 3.0);
    CHECK_FALSE(quantile_horizon(no_z, 0, 1, 0.5).has_value());
}

TEST_CASE("proximal candidate set") {
    const auto s = load_events(test::fixture("three_label_stream.csv"));
    const auto a = s.label_id("A");
    const auto c = s.label_id("C");
    // {t_AC} = {1, 1.5} plus max {t_AA} = 9.5.
    CHECK(proximal_candidates(s, a, c) == std::vector<double>{1.0, 1.5, 9.5});
}

TEST_CASE("closed-form objective matches the statistics route") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = test::random_stream(gen, 2, 40, 25.0);
        for (LabelId z = 0; z < 2; ++z) {
            for (LabelId x = 0; x < 2; ++x) {
                for (double h : proximal_candidates(s, z, x)) {
                    CHECK(proximal_objective(s, z, x, h) == doctest::Approx(single_edge_ll(s, z, x, h)));
                }
            }
        }
    }
}

TEST_CASE("proximal horizon is the best candidate, ties to the smallest") {
    std::mt19937_64 gen(32);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = test::random_stream(gen, 2, 40, 25.0);
        for (LabelId z = 0; z < 2; ++z) {
            for (LabelId x = 0; x < 2; ++x) {
                const auto candidates = proximal_candidates(s, z, x);
                const auto h = proximal_horizon(s, z, x);
                REQUIRE(h.has_value() == !candidates.empty());
                if (!h) {
                    continue;
                }
                const double best = single_edge_ll(s, z, x, *h);
                for (double c : candidates) {
                    const double v = single_edge_ll(s, z, x, c);
                    CHECK(best >= v - 1e-9);
                    if (c < *h) {
                        CHECK(v < best + 1e-9);
                    }
                }
            }
        }
    }
}

TEST_CASE("proximal edge cases") {
    // x never occurs: objective is 0 everywhere, smallest candidate wins.
    const EventStream quiet({"Z", "X"}, {{1.0, 0}, {4.0, 0}}, 10.0);
    CHECK(proximal_horizon(quiet, 0, 1) == proximal_candidates(quiet, 0, 1).front());
    // No x preceded by z: only max t_ZZ remains.
    const EventStream early({"Z", "X"}, {{1.0, 1}, {3.0, 0}}, 10.0);
    CHECK(proximal_candidates(early, 0, 1) == std::vector<double>{7.0});
    CHECK(proximal_horizon(early, 0, 1) == 7.0);
    const EventStream none({"Z", "X"}, {{1.0, 1}}, 10.0);
    CHECK_FALSE(proximal_horizon(none, 0, 1).has_value());
}

TEST_CASE("proximal recovers a horizon of 2 from sampled data") {
    Tgem m({"Z", "X"});
    m.set_edge(0, 1, Timescale::single(2.0));
    m.set_rates(0, {0.16});
    m.set_rates(1, {0.01, 0.64});
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = sample(m, 4000.0, seed);
        const auto h = proximal_horizon(s, 0, 1);
        hits += (h && *h >= 1.6 && *h <= 2.4) ? 1 : 0;
    }
    CHECK(hits >= 18);
}

TEST_CASE("default horizon tables") {
    const auto s = load_events(test::fixture("three_label_stream.csv"));
    const auto prox = default_horizons(s, HorizonPolicy::proximal());
    CHECK(prox.label_count() == 3);
    CHECK(prox.defined_count() <= 9);
    CHECK(prox.get(s.label_id("C"), s.label_id("B")).has_value());
    const auto med = default_horizons(s, HorizonPolicy::quantile(0.5));
    CHECK(med.get(s.label_id("A"), s.label_id("A")) == 7.5);

    const EventStream with_absent({"A", "B", "Z"}, {{1.0, 0}, {2.0, 1}}, 5.0);
    const auto t = default_horizons(with_absent, HorizonPolicy::proximal());
    for (LabelId x = 0; x < 3; ++x) {
        CHECK_FALSE(t.get(2, x).has_value());
    }

    const EventStream empty({"A", "B"}, {}, 5.0);
    CHECK(default_horizons(empty, HorizonPolicy::proximal()).defined_count() == 0);

    std::mt19937_64 gen(4);
    const auto r = test::random_stream(gen, 4, 60, 30.0);
    CHECK(default_horizons(r, HorizonPolicy::proximal(), 1) == default_horizons(r, HorizonPolicy::proximal(), 4));
}
