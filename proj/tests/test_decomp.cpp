#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest/doctest.h>

#include "hedgetree/decomp.hpp"
#include "hedgetree/emm.hpp"
#include "hedgetree/errors.hpp"
#include "hedgetree/expectation.hpp"
#include "support/fixtures.hpp"

#include <string>

using namespace hedgetree;

namespace {

// V(node) = V(root) + gains - cumulative consumption, checked node by node;
// consumption starts at zero and never decreases along a path.
void check_reconstruction(const fixtures::MarketData& m, const AdaptedProcess& process,
                          const Decomposition& d) {
    CHECK(d.consumption[0] == 0);
    for (NodeId n = 0; n < m.tree.num_nodes(); ++n) {
        Rational wealth = process[0];
        const auto chain = m.tree.path(n);
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
            for (int a = 0; a < m.prices.assets; ++a) {
                wealth += d.strategy.xi[chain[k]][a] * (m.prices.value[chain[k + 1]][a] -
                                                        m.prices.value[chain[k]][a]);
            }
        }
        CHECK(wealth - d.consumption[n] == process[n]);
        if (n > 0) CHECK(d.consumption[n] >= d.consumption[m.tree.parent[n]]);
    }
}

}  // namespace

TEST_CASE("supermartingale check") {
    const auto m = fixtures::trinomial();

    const AdaptedProcess good = fixtures::process_of(
        m, {{"root", Rational(1, 3)}, {"a", Rational(1)}, {"b", Rational(0)},
            {"c", Rational(0)}});
    const SupermartingaleReport ok = check_supermartingale(m.tree, m.prices, good);
    CHECK(ok.holds);

    const AdaptedProcess bad = fixtures::process_of(
        m, {{"root", Rational(1, 4)}, {"a", Rational(1)}, {"b", Rational(0)},
            {"c", Rational(0)}});
    const SupermartingaleReport broken = check_supermartingale(m.tree, m.prices, bad);
    CHECK_FALSE(broken.holds);
    CHECK(broken.violating_node == 0);
    CHECK(broken.gap == Rational(1, 12));
}

TEST_CASE("optional decomposition of the digital upper envelope") {
    const auto m = fixtures::trinomial();
    const AdaptedProcess process = fixtures::process_of(
        m, {{"root", Rational(1, 3)}, {"a", Rational(1)}, {"b", Rational(0)},
            {"c", Rational(0)}});

    const Decomposition d = optional_decomposition(m.tree, m.prices, process);
    CHECK(d.strategy.xi[0][0] == Rational(2, 3));
    CHECK(d.consumption[0] == Rational(0));
    CHECK(d.consumption[1] == Rational(0));
    CHECK(d.consumption[2] == Rational(1, 3));
    CHECK(d.consumption[3] == Rational(0));
    check_reconstruction(m, process, d);
}

TEST_CASE("martingale process needs no consumption") {
    const auto m = fixtures::two_period();
    AdaptedProcess process(m.tree.num_nodes());
    for (NodeId n = 0; n < m.tree.num_nodes(); ++n) process[n] = m.prices.value[n][0];

    const Decomposition d = optional_decomposition(m.tree, m.prices, process);
    for (NodeId n = 0; n < m.tree.num_nodes(); ++n) CHECK(d.consumption[n] == 0);
    for (NodeId n : m.tree.internal_from(0)) CHECK(d.strategy.xi[n][0] == 1);
    check_reconstruction(m, process, d);
}

TEST_CASE("strict supermartingale consumes every step") {
    const auto m = fixtures::two_period();
    // X - t/10 drifts down by 1/10 each period regardless of the path.
    AdaptedProcess process(m.tree.num_nodes());
    for (NodeId n = 0; n < m.tree.num_nodes(); ++n) {
        process[n] = m.prices.value[n][0] - Rational(m.tree.level[n], 10);
    }

    const Decomposition d = optional_decomposition(m.tree, m.prices, process);
    for (NodeId n = 0; n < m.tree.num_nodes(); ++n) {
        CHECK(d.consumption[n] == Rational(m.tree.level[n], 10));
    }
    check_reconstruction(m, process, d);
}

TEST_CASE("decomposition on random supermartingales") {
    for (std::uint64_t seed = 80; seed < 92; ++seed) {
        const auto rm = fixtures::random_market(seed);
        const EventTree& tree = rm.market.tree;
        const Measure planted =
            measure_from_transitions(tree, rm.market.prices, rm.planted);

        // Superhedge value process of a random claim is the canonical example.
        std::mt19937_64 rng(seed + 1000);
        const Claim claim = fixtures::random_claim(tree, rng);
        const HedgeProcess hedge = superhedge_process(tree, rm.market.prices, claim);

        const SupermartingaleReport report =
            check_supermartingale(tree, rm.market.prices, hedge.value);
        CHECK(report.holds);

        const Decomposition d = optional_decomposition(tree, rm.market.prices, hedge.value);
        check_reconstruction(rm.market, hedge.value, d);

        // Gains are mean-zero under any martingale measure, so taking
        // expectations in V_T = V_0 + gains - C_T gives E[V_T] + E[C_T] = V_0.
        Rational expected_terminal = 0;
        Rational expected_consumption = 0;
        for (NodeId leaf : tree.leaves) {
            expected_terminal += planted.node_weight[leaf] * hedge.value[leaf];
            expected_consumption += planted.node_weight[leaf] * d.consumption[leaf];
        }
        CHECK(expected_terminal + expected_consumption == hedge.value[0]);
    }
}

TEST_CASE("failure modes") {
    const auto m = fixtures::trinomial();

    SUBCASE("negative process") {
        const AdaptedProcess negative = fixtures::process_of(
            m, {{"root", Rational(1)}, {"a", Rational(-1)}, {"b", Rational(0)},
                {"c", Rational(0)}});
        try {
            optional_decomposition(m.tree, m.prices, negative);
            FAIL("expected NegativeProcess");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NegativeProcess);
        }
    }

    SUBCASE("not a supermartingale") {
        const AdaptedProcess low = fixtures::process_of(
            m, {{"root", Rational(1, 4)}, {"a", Rational(1)}, {"b", Rational(0)},
                {"c", Rational(0)}});
        try {
            optional_decomposition(m.tree, m.prices, low);
            FAIL("expected NotSupermartingale");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotSupermartingale);
            CHECK(std::string(e.what()).find("root") != std::string::npos);
        }
    }

    SUBCASE("arbitrage market") {
        TreeDescription d;
        d.horizon = 1;
        d.parent = {-1, 0, 0};
        d.leaf_weights = {{1, Rational(1, 2)}, {2, Rational(1, 2)}};
        fixtures::MarketData bad;
        bad.tree = build_tree(d);
        bad.prices = make_price_process(bad.tree, 1,
                                        {{Rational(1)}, {Rational(2)}, {Rational(3, 2)}});
        AdaptedProcess flat(bad.tree.num_nodes(), Rational(2));
        try {
            optional_decomposition(bad.tree, bad.prices, flat);
            FAIL("expected ArbitrageDetected");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ArbitrageDetected);
        }
    }
}
