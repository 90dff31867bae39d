#include "doctest.h"

#include <algorithm>
#include <array>

#include "schelling/dynamics.hpp"

using namespace schelling;

namespace {

ModelParams make(int n, int w, Rational ta, Rational tb, int dim = 2) {
    ModelParams p;
    p.dim = dim;
    p.n = n;
    p.w = w;
    p.tau_alpha = ta;
    p.tau_beta = tb;
    return p;
}

// Pairs covering the static, takeover-ae, mixed and above-half regimes.
const std::array<std::pair<const char*, const char*>, 10> kTauPairs{{
    {"0.2", "0.15"},
    {"0.3", "0.25"},
    {"0.35", "0.3"},
    {"0.42", "0.38"},
    {"0.45", "0.44"},
    {"0.6", "0.4"},
    {"0.4", "0.6"},
    {"0.7", "0.65"},
    {"0.55", "0.75"},
    {"0.5", "0.5"},
}};

}  // namespace

TEST_CASE("happiness at and around the threshold") {
    Configuration all(make(10, 1, Rational(1, 1), Rational(1, 2)), NodeType::Alpha);
    CHECK(is_happy(build_counts(all), all, 0));

    // alpha node at the origin with exactly one other alpha in its window.
    auto lone = [](Rational ta) {
        Configuration c(make(10, 1, ta, Rational(1, 2)));
        c.set(c.index({0, 0}), NodeType::Alpha);
        c.set(c.index({1, 0}), NodeType::Alpha);
        return c;
    };
    auto c1 = lone(Rational(1, 4));
    CHECK_FALSE(is_happy(build_counts(c1), c1, c1.index({0, 0})));
    auto c2 = lone(Rational(2, 9));
    CHECK(is_happy(build_counts(c2), c2, c2.index({0, 0})));
}

TEST_CASE("single beta node in an alpha sea is hopeful and flips once") {
    const auto p = make(9, 1, Rational(1, 2), Rational(1, 5));
    Configuration c(p, NodeType::Alpha);
    const NodeId u = c.index({4, 4});
    c.set(u, NodeType::Beta);
    const auto counts = build_counts(c);
    CHECK_FALSE(is_happy(counts, c, u));
    CHECK(is_hopeful(counts, c, u));
    CHECK(hopeful_nodes(c, counts) == std::vector<NodeId>{u});

    const auto result = run(c);
    REQUIRE(result.reports.size() == 2);
    CHECK(result.reports[0].flips == 1);
    CHECK(result.reports[1].flips == 0);
    CHECK(result.terminated);
    CHECK(result.final.count(NodeType::Alpha) == 81);
}

TEST_CASE("intolerance one: hopeful only when every other neighbour is opposite") {
    const auto p = make(7, 1, Rational(1, 1), Rational(1, 1));
    const NodeId centre = 3 + 7 * 3;
    for (unsigned mask = 0; mask < 256; ++mask) {
        Configuration c(p, NodeType::Beta);
        c.set(centre, NodeType::Alpha);
        int bit = 0;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0)
                    continue;
                if (mask >> bit++ & 1u)
                    c.set(c.shifted(centre, dx, dy), NodeType::Alpha);
            }
        const auto counts = build_counts(c);
        CHECK(is_hopeful(counts, c, centre) == (mask == 0));
    }
}

TEST_CASE("happy nodes are never hopeful") {
    const auto c = random_config(make(20, 2, Rational(2, 5), Rational(3, 10)), 4);
    const auto counts = build_counts(c);
    for (NodeId u = 0; u < c.size(); ++u)
        if (is_happy(counts, c, u))
            CHECK_FALSE(is_hopeful(counts, c, u));
}

TEST_CASE("uniform configurations terminate immediately") {
    for (NodeType t : {NodeType::Alpha, NodeType::Beta}) {
        Configuration c(make(12, 1, Rational(1, 2), Rational(2, 5)), t);
        const auto fast = run(c);
        CHECK(fast.reports.size() == 1);
        CHECK(fast.reports[0].flips == 0);
        CHECK(fast.terminated);
        const auto slow = naive_reference_run(c, 0);
        CHECK(slow.reports == fast.reports);
    }
}

TEST_CASE("lyapunov hand values") {
    Configuration all(make(5, 1, Rational(1, 2), Rational(1, 2)), NodeType::Alpha);
    CHECK(lyapunov(all) == 225);

    for (int n : {8, 12}) {
        Configuration board(make(n, 1, Rational(1, 2), Rational(1, 2)));
        for (NodeId u = 0; u < board.size(); ++u) {
            const Coord c = board.coord(u);
            board.set(u, (c.x + c.y) % 2 == 0 ? NodeType::Alpha : NodeType::Beta);
        }
        CHECK(lyapunov(board) == 5 * n * n);
    }
}

TEST_CASE("fast engine matches the naive engine stage by stage") {
    int instance = 0;
    for (int w = 1; w <= 3; ++w)
        for (const auto& [ta, tb] : kTauPairs) {
            const auto p = make(20, w, Rational::parse(ta), Rational::parse(tb));
            const auto initial = random_config(p, 1000 + instance++);
            std::vector<Configuration> fast_states, slow_states;
            const auto fast = run(initial, {}, 0, [&](const Configuration& c, const StageReport&) {
                fast_states.push_back(c);
            });
            const auto slow = naive_reference_run(initial, 0, 0, [&](const Configuration& c, const StageReport&) {
                slow_states.push_back(c);
            });
            REQUIRE(fast_states.size() == slow_states.size());
            for (std::size_t s = 0; s < fast_states.size(); ++s)
                REQUIRE(fast_states[s] == slow_states[s]);
            CHECK(fast.reports == slow.reports);
            CHECK(fast.terminated == slow.terminated);
        }
}

TEST_CASE("3D engine matches the naive engine") {
    for (int k = 0; k < 4; ++k) {
        const auto p = make(11, 1, Rational(2, 5), Rational(7, 20), 3);
        const auto initial = random_config(p, 50 + k);
        const auto fast = run(initial);
        const auto slow = naive_reference_run(initial, 0);
        CHECK(fast.reports == slow.reports);
        CHECK(fast.final == slow.final);
    }
}

TEST_CASE("runs are deterministic") {
    const auto p = make(30, 2, Rational(2, 5), Rational(3, 10));
    const auto a = run(p, 77);
    const auto b = run(p, 77);
    CHECK(a.reports == b.reports);
    CHECK(a.final == b.final);
    CHECK(a.seed == 77);
    const auto slow = naive_reference_run(random_config(p, 77), 0, 77);
    CHECK(slow.reports == a.reports);
}

TEST_CASE("stage frontier: only previously hopeful nodes flip") {
    const auto p = make(25, 2, Rational(2, 5), Rational(7, 20));
    StagedProcess process(random_config(p, 12));
    while (!process.finished()) {
        const auto before = process.config();
        const auto hopeful = process.hopeful();
        const auto report = process.run_stage();
        std::uint64_t changed = 0;
        for (NodeId u = 0; u < before.size(); ++u)
            if (!(before[u] == process.config()[u])) {
                ++changed;
                CHECK(std::binary_search(hopeful.begin(), hopeful.end(), u));
            }
        CHECK(changed == report.flips);
        CHECK(report.flips > 0);
        CHECK(process.hopeful() == hopeful_nodes(process.config(), build_counts(process.config())));
    }
    CHECK(process.run_stage().flips == 0);
}

TEST_CASE("lyapunov increases when both intolerances sit on one side of 1/2") {
    const std::array<std::pair<const char*, const char*>, 4> pairs{{
        {"0.4", "0.3"}, {"0.45", "0.44"}, {"0.6", "0.7"}, {"0.55", "0.8"},
    }};
    for (const auto& [ta, tb] : pairs)
        for (int w = 1; w <= 2; ++w) {
            const auto p = make(30, w, Rational::parse(ta), Rational::parse(tb));
            const bool below = Rational::parse(ta) < Rational(1, 2);
            std::int64_t prev = lyapunov(random_config(p, 5));
            const auto r = run(p, 5);
            for (const auto& rep : r.reports) {
                if (below && rep.flips > 0)
                    CHECK(rep.lyapunov > prev);
                else
                    CHECK(rep.lyapunov >= prev);
                prev = rep.lyapunov;
            }
        }
}

TEST_CASE("per-flip lyapunov gain below one half") {
    // A hopeful node below 1/2 has own count c < N/2, and flipping raises
    // the sum by 2(N - 2c + 1) > 0.
    const auto p = make(20, 2, Rational(9, 20), Rational(2, 5));
    auto c = random_config(p, 9);
    auto counts = build_counts(c);
    for (NodeId u : hopeful_nodes(c, counts)) {
        if (!is_hopeful(counts, c, u))
            continue;
        const std::int64_t before = lyapunov(c, counts);
        const std::int64_t own = same_type_count(c, counts, u);
        apply_flip(c, counts, u);
        CHECK(lyapunov(c, counts) - before == 2 * (25 - 2 * own + 1));
        CHECK(lyapunov(c, counts) > before);
    }
}

TEST_CASE("termination below one half within n(2w+1) stages") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = make(60, 2, Rational(11, 25), Rational(21, 50));
        RunOptions opts;
        opts.max_stages = 60 * 5;
        CHECK(run(p, seed, opts).terminated);
    }
}

TEST_CASE("max_stages exhaustion is reported, not thrown") {
    const auto p = make(40, 1, Rational(2, 5), Rational(7, 20));
    RunOptions opts;
    opts.max_stages = 1;
    const auto r = run(p, 3, opts);
    CHECK(r.reports.size() == 1);
    CHECK(r.terminated == (r.reports[0].flips == 0));
    CHECK_FALSE(r.terminated);
}

TEST_CASE("seeded random order gives the same qualitative outcome") {
    const auto p = make(80, 2, Rational(3, 5), Rational(2, 5));
    RunOptions random_order;
    random_order.order = NodeOrder::SeededRandom;
    random_order.order_seed = 99;
    const auto lex = run(p, 21);
    const auto rnd = run(p, 21, random_order);
    CHECK(lex.terminated);
    CHECK(rnd.terminated);
    CHECK(lex.final.count(NodeType::Beta) == lex.final.size());
    CHECK(rnd.final.count(NodeType::Beta) == rnd.final.size());

    const auto q = make(80, 2, Rational(1, 5), Rational(3, 20));
    const auto a = run(q, 4);
    const auto b = run(q, 4, random_order);
    const auto init = random_config(q, 4);
    auto unchanged = [&](const Configuration& f) {
        std::size_t same = 0;
        for (NodeId u = 0; u < f.size(); ++u)
            same += f[u] == init[u];
        return static_cast<double>(same) / static_cast<double>(f.size());
    };
    CHECK(unchanged(a.final) > 0.95);
    CHECK(unchanged(b.final) > 0.95);
}
