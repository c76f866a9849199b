#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest/doctest.h>

#include "hedgetree/errors.hpp"
#include "hedgetree/market.hpp"
#include "support/fixtures.hpp"

#include <functional>
#include <stdexcept>

using namespace hedgetree;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a domain error");
    return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("tree structure") {
    const auto m = fixtures::two_period();
    const EventTree& tree = m.tree;

    CHECK(tree.num_nodes() == 7);
    CHECK(tree.horizon == 2);
    CHECK(tree.level[0] == 0);
    CHECK(tree.level[6] == 2);
    CHECK(tree.children[0] == std::vector<NodeId>{1, 2});
    CHECK(tree.atoms_at(0) == std::vector<NodeId>{0});
    CHECK(tree.atoms_at(1) == std::vector<NodeId>{1, 2});
    CHECK(tree.atoms_at(2) == std::vector<NodeId>{3, 4, 5, 6});
    CHECK(tree.leaves == std::vector<NodeId>{3, 4, 5, 6});
    CHECK(tree.leaf_index[5] == 2);
    CHECK(tree.leaf_index[1] == -1);
    CHECK(tree.internal_from(0) == std::vector<NodeId>{0, 1, 2});
    CHECK(tree.internal_from(1) == std::vector<NodeId>{1, 2});
    CHECK(tree.descendants_leaves[1] == std::vector<NodeId>{3, 4});
    CHECK(tree.descendants_leaves[0] == std::vector<NodeId>{3, 4, 5, 6});
    CHECK(tree.ancestor_at(6, 1) == 2);
    CHECK(tree.ancestor_at(6, 2) == 6);
    CHECK(tree.path(4) == std::vector<NodeId>{0, 1, 4});
    CHECK(tree.find_label("du") == 5);
    CHECK(tree.find_label("missing") == -1);
    CHECK(tree.leaf_weight[3] == Rational(1, 4));

    CHECK(code_of([&] { static_cast<void>(tree.atoms_at(3)); }) == ErrorCode::TimeOutOfRange);
    CHECK(code_of([&] { static_cast<void>(tree.atoms_at(-1)); }) == ErrorCode::TimeOutOfRange);
}

TEST_CASE("tree validation") {
    TreeDescription d;
    d.horizon = 1;
    d.parent = {-1, 0, 0};
    d.leaf_weights = {{1, Rational(1, 2)}, {2, Rational(1, 2)}};

    SUBCASE("auto labels") {
        const EventTree tree = build_tree(d);
        CHECK(tree.label[0] == "n0");
        CHECK(tree.label[2] == "n2");
    }
    SUBCASE("non-uniform depth") {
        d.parent = {-1, 0, 1};
        d.leaf_weights = {{2, Rational(1)}};
        CHECK(code_of([&] { build_tree(d); }) == ErrorCode::NonUniformDepth);
    }
    SUBCASE("childless internal node") {
        d.horizon = 2;
        d.parent = {-1, 0, 0, 1, 1};
        d.leaf_weights = {{3, Rational(1, 2)}, {4, Rational(1, 2)}};
        CHECK(code_of([&] { build_tree(d); }) == ErrorCode::NonUniformDepth);
    }
    SUBCASE("zero weight") {
        d.leaf_weights = {{1, Rational(0)}, {2, Rational(1)}};
        CHECK(code_of([&] { build_tree(d); }) == ErrorCode::ZeroWeight);
    }
    SUBCASE("negative weight") {
        d.leaf_weights = {{1, Rational(-1, 2)}, {2, Rational(3, 2)}};
        CHECK(code_of([&] { build_tree(d); }) == ErrorCode::ZeroWeight);
    }
    SUBCASE("weights must sum to one") {
        d.leaf_weights = {{1, Rational(1, 2)}, {2, Rational(1, 3)}};
        CHECK(code_of([&] { build_tree(d); }) == ErrorCode::WeightSum);
    }
    SUBCASE("missing weight") {
        d.leaf_weights = {{1, Rational(1)}};
        CHECK_THROWS_AS(build_tree(d), std::invalid_argument);
    }
    SUBCASE("weight on internal node") {
        d.leaf_weights = {{0, Rational(1, 2)}, {1, Rational(1, 4)}, {2, Rational(1, 4)}};
        CHECK_THROWS_AS(build_tree(d), std::invalid_argument);
    }
    SUBCASE("children before parents") {
        d.parent = {-1, 2, 0};
        CHECK_THROWS_AS(build_tree(d), std::invalid_argument);
    }
    SUBCASE("duplicate labels") {
        d.labels = {"root", "x", "x"};
        CHECK_THROWS_AS(build_tree(d), std::invalid_argument);
    }
    SUBCASE("zero horizon") {
        d.horizon = 0;
        d.parent = {-1};
        d.leaf_weights = {{0, Rational(1)}};
        CHECK_THROWS_AS(build_tree(d), std::invalid_argument);
    }
}

TEST_CASE("price process validation") {
    const auto m = fixtures::binomial();
    CHECK(m.prices.assets == 1);
    CHECK(m.prices.value[1][0] == Rational(2));

    CHECK(code_of([&] {
              make_price_process(m.tree, 1,
                                 {{Rational(1)}, {Rational(2)}, {Rational(-1, 2)}});
          }) == ErrorCode::NegativeProcess);
    CHECK_THROWS_AS(make_price_process(m.tree, 1, {{Rational(1)}, {Rational(2)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_price_process(m.tree, 2,
                                       {{Rational(1)}, {Rational(2)}, {Rational(1, 2)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_price_process(m.tree, 0, {{}, {}, {}}), std::invalid_argument);
}

TEST_CASE("claims") {
    const auto m = fixtures::trinomial();

    const Claim call = fixtures::claim_of(m, {{"a", Rational(1)}});
    CHECK(call.nonnegative);
    CHECK(call.payoff == std::vector<Rational>{Rational(1), Rational(0), Rational(0)});

    const Claim swing = make_claim(m.tree, {Rational(1), Rational(-1), Rational(0)});
    CHECK_FALSE(swing.nonnegative);

    CHECK_THROWS_AS(make_claim(m.tree, {Rational(1)}), std::invalid_argument);

    const Claim measurable = claim_from_atom_values(m.tree, 0, {Rational(5, 7)});
    CHECK(measurable.payoff ==
          std::vector<Rational>{Rational(5, 7), Rational(5, 7), Rational(5, 7)});
    CHECK_THROWS_AS(claim_from_atom_values(m.tree, 0, {Rational(1), Rational(2)}),
                    std::invalid_argument);

    const auto m2 = fixtures::two_period();
    const Claim at1 = claim_from_atom_values(m2.tree, 1, {Rational(3), Rational(4)});
    CHECK(at1.payoff ==
          std::vector<Rational>{Rational(3), Rational(3), Rational(4), Rational(4)});
}

TEST_CASE("gains") {
    const auto m = fixtures::two_period();

    SUBCASE("zero strategy earns nothing") {
        const Claim g = gains(m.tree, m.prices, zero_strategy(m.tree, m.prices), 0);
        for (const auto& v : g.payoff) CHECK(v == 0);
    }

    SUBCASE("buy and hold one share") {
        Strategy s = zero_strategy(m.tree, m.prices);
        for (NodeId n : m.tree.internal_from(0)) s.xi[n][0] = 1;
        const Claim g = gains(m.tree, m.prices, s, 0);
        // X_T - X_0 leaf by leaf: 3, 0, 0, -3/4.
        CHECK(g.payoff == std::vector<Rational>{Rational(3), Rational(0), Rational(0),
                                                Rational(-3, 4)});
        CHECK_FALSE(g.nonnegative);
    }

    SUBCASE("gains from time 1 ignore the first step") {
        Strategy s = zero_strategy(m.tree, m.prices);
        for (NodeId n : m.tree.internal_from(0)) s.xi[n][0] = 1;
        const Claim g = gains(m.tree, m.prices, s, 1);
        // X_T - X_1 under each time-1 atom: 2, -1, 1/2, -1/4.
        CHECK(g.payoff == std::vector<Rational>{Rational(2), Rational(-1), Rational(1, 2),
                                                Rational(-1, 4)});
    }

    SUBCASE("shape checks") {
        Strategy s = zero_strategy(m.tree, m.prices);
        CHECK(code_of([&] { gains(m.tree, m.prices, s, 3); }) == ErrorCode::TimeOutOfRange);
        s.xi[0].push_back(Rational(1));
        CHECK_THROWS_AS(gains(m.tree, m.prices, s, 0), std::invalid_argument);
    }
}

TEST_CASE("random market generator plants a martingale") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto rm = fixtures::random_market(seed);
        const EventTree& tree = rm.market.tree;
        for (NodeId n = 0; n < tree.num_nodes(); ++n) {
            if (tree.is_leaf(n)) continue;
            const auto& kids = tree.children[n];
            Rational total = 0;
            for (std::size_t c = 0; c < kids.size(); ++c) {
                CHECK(rm.planted[n][c] > 0);
                total += rm.planted[n][c];
            }
            CHECK(total == 1);
            for (int a = 0; a < rm.market.prices.assets; ++a) {
                Rational avg = 0;
                for (std::size_t c = 0; c < kids.size(); ++c) {
                    avg += rm.planted[n][c] * rm.market.prices.value[kids[c]][a];
                }
                CHECK(avg == rm.market.prices.value[n][a]);
            }
        }
    }
}
