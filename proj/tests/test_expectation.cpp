#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest/doctest.h>

#include "hedgetree/emm.hpp"
#include "hedgetree/errors.hpp"
#include "hedgetree/expectation.hpp"
#include "support/fixtures.hpp"

#include <algorithm>
#include <stdexcept>

using namespace hedgetree;

namespace {

// price + gains-from-t dominates (Super) or is dominated by (Sub) the claim.
void check_hedge(const fixtures::MarketData& m, const Claim& claim, int t,
                 const HedgeResult& result) {
    const Claim g = gains(m.tree, m.prices, result.strategy, t);
    const auto atoms = m.tree.atoms_at(t);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (NodeId leaf : m.tree.descendants_leaves[atoms[i]]) {
            const auto pos = m.tree.leaf_index[leaf];
            const Rational reach = result.price[i] + g.payoff[pos];
            if (result.side == HedgeSide::Super) {
                CHECK(reach >= claim.payoff[pos]);
            } else {
                CHECK(reach <= claim.payoff[pos]);
            }
        }
    }
}

}  // namespace

TEST_CASE("one-step superhedge") {
    const auto tri = fixtures::trinomial();
    const auto [h, xi] =
        superhedge_step(tri.tree, tri.prices, 0, {Rational(1), Rational(0), Rational(0)});
    CHECK(h == Rational(1, 3));
    REQUIRE(xi.size() == 1);
    CHECK(xi[0] == Rational(2, 3));

    const auto bin = fixtures::binomial();
    const auto [hb, xib] = superhedge_step(bin.tree, bin.prices, 0, {Rational(1), Rational(0)});
    CHECK(hb == Rational(1, 3));
    CHECK(xib[0] == Rational(2, 3));

    SUBCASE("arbitrage node is unbounded below") {
        TreeDescription d;
        d.horizon = 1;
        d.parent = {-1, 0, 0};
        d.leaf_weights = {{1, Rational(1, 2)}, {2, Rational(1, 2)}};
        fixtures::MarketData bad;
        bad.tree = build_tree(d);
        bad.prices = make_price_process(bad.tree, 1,
                                        {{Rational(1)}, {Rational(2)}, {Rational(3, 2)}});
        try {
            superhedge_step(bad.tree, bad.prices, 0, {Rational(1), Rational(1)});
            FAIL("expected Unbounded");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Unbounded);
        }
    }
}

TEST_CASE("two-period call hedge") {
    const auto m = fixtures::two_period();
    const Claim call = fixtures::claim_of(m, {{"uu", Rational(3)}});

    const HedgeResult at0 = superhedge(m.tree, m.prices, call, 0);
    CHECK(at0.price == std::vector<Rational>{Rational(1, 3)});
    CHECK(at0.strategy.xi[0][0] == Rational(2, 3));
    CHECK(at0.strategy.xi[1][0] == Rational(1));
    CHECK(at0.strategy.xi[2][0] == Rational(0));
    check_hedge(m, call, 0, at0);

    const HedgeResult at1 = superhedge(m.tree, m.prices, call, 1);
    CHECK(at1.price == std::vector<Rational>{Rational(1), Rational(0)});
    for (const auto& v : at1.strategy.xi[0]) CHECK(v == 0);
    check_hedge(m, call, 1, at1);

    const HedgeResult sub0 = subhedge(m.tree, m.prices, call, 0);
    CHECK(sub0.price == std::vector<Rational>{Rational(1, 3)});
    check_hedge(m, call, 0, sub0);

    const HedgeProcess process = superhedge_process(m.tree, m.prices, call);
    CHECK(process.value[0] == Rational(1, 3));
    CHECK(process.value[1] == Rational(1));
    CHECK(process.value[2] == Rational(0));
    CHECK(process.value[3] == Rational(3));
}

TEST_CASE("digital claim superhedge and subhedge differ") {
    const auto m = fixtures::trinomial();
    const Claim digital = fixtures::claim_of(m, {{"a", Rational(1)}});

    const HedgeResult super = superhedge(m.tree, m.prices, digital, 0);
    const HedgeResult sub = subhedge(m.tree, m.prices, digital, 0);
    CHECK(super.price == std::vector<Rational>{Rational(1, 3)});
    CHECK(sub.price == std::vector<Rational>{Rational(0)});
    check_hedge(m, digital, 0, super);
    check_hedge(m, digital, 0, sub);
}

TEST_CASE("acceptance oracle equals the superhedge slice") {
    const auto m = fixtures::two_period();
    const Claim call = fixtures::claim_of(m, {{"uu", Rational(3)}});
    const Claim mixed = fixtures::claim_of(
        m, {{"uu", Rational(1, 2)}, {"ud", Rational(2)}, {"du", Rational(1, 3)}});

    for (int t = 0; t <= m.tree.horizon; ++t) {
        for (const Claim* claim : {&call, &mixed}) {
            CHECK(acceptance_oracle(m.tree, m.prices, *claim, t) ==
                  superhedge(m.tree, m.prices, *claim, t).price);
        }
    }

    const auto tri = fixtures::trinomial();
    const Claim digital = fixtures::claim_of(tri, {{"a", Rational(1)}});
    CHECK(acceptance_oracle(tri.tree, tri.prices, digital, 0) ==
          std::vector<Rational>{Rational(1, 3)});
}

TEST_CASE("hedging prices on random markets dominate sampled expectations") {
    for (std::uint64_t seed = 30; seed < 45; ++seed) {
        const auto rm = fixtures::random_market(seed);
        const Measure planted =
            measure_from_transitions(rm.market.tree, rm.market.prices, rm.planted);
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        const Claim claim = fixtures::random_claim(rm.market.tree, rng);
        for (int t = 0; t <= rm.market.tree.horizon; ++t) {
            const auto super = superhedge(rm.market.tree, rm.market.prices, claim, t).price;
            const auto sub = subhedge(rm.market.tree, rm.market.prices, claim, t).price;
            const auto mid = conditional_expectation(rm.market.tree, planted, claim, t);
            for (std::size_t i = 0; i < mid.size(); ++i) {
                CHECK(sub[i] <= mid[i]);
                CHECK(mid[i] <= super[i]);
            }
        }
    }
}

TEST_CASE("stopping times") {
    const auto m = fixtures::two_period();

    const StoppingTime tau = make_stopping_time(m.tree, {1, 5, 6});
    CHECK(tau.nodes == std::vector<NodeId>{1, 5, 6});

    const StoppingTime sigma = make_stopping_time(m.tree, {0});
    const StoppingTime horizon = make_stopping_time(m.tree, {3, 4, 5, 6});
    CHECK(stopping_time_leq(m.tree, sigma, tau));
    CHECK(stopping_time_leq(m.tree, tau, horizon));
    CHECK_FALSE(stopping_time_leq(m.tree, horizon, tau));
    CHECK(stopping_time_leq(m.tree, tau, tau));

    SUBCASE("not an antichain") {
        try {
            make_stopping_time(m.tree, {1, 3, 5, 6});
            FAIL("expected NotAStoppingTime");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotAStoppingTime);
        }
    }
    SUBCASE("does not cover") {
        try {
            make_stopping_time(m.tree, {1, 5});
            FAIL("expected NotAStoppingTime");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotAStoppingTime);
        }
    }

    SUBCASE("expectation at a stopping time") {
        const Claim call = fixtures::claim_of(m, {{"uu", Rational(3)}});
        const auto at_tau = stopping_time_expectation(m.tree, m.prices, call, tau);
        // Stops at u (value 1), du (0), dd (0).
        CHECK(at_tau == std::vector<Rational>{Rational(1), Rational(0), Rational(0)});

        const Claim extended = claim_from_stopping_values(m.tree, tau, at_tau);
        CHECK(extended.payoff ==
              std::vector<Rational>{Rational(1), Rational(1), Rational(0), Rational(0)});

        // Tower property through sigma <= tau.
        const auto at_sigma = stopping_time_expectation(m.tree, m.prices, call, sigma);
        const auto of_extended = stopping_time_expectation(m.tree, m.prices, extended, sigma);
        CHECK(at_sigma == of_extended);
    }
}

TEST_CASE("axioms hold on the fixtures") {
    for (const auto& m :
         {fixtures::binomial(), fixtures::trinomial(), fixtures::two_period()}) {
        for (int t = 0; t <= m.tree.horizon; ++t) {
            const auto reports = check_axioms(m.tree, m.prices, t, {}, 6, 17);
            CHECK(reports.size() == 10);
            for (const auto& report : reports) {
                INFO(report.axiom);
                CHECK(report.holds);
                CHECK_FALSE(report.counterexample.has_value());
            }
        }
    }
}

TEST_CASE("axiom checks catch corrupted evaluators") {
    const auto m = fixtures::trinomial();

    const auto failing = [&](const Evaluator& broken) {
        std::vector<std::string> failed;
        for (const auto& report : check_axioms(m.tree, m.prices, 0, {}, 6, 17, broken)) {
            if (!report.holds) {
                CHECK(report.counterexample.has_value());
                failed.push_back(report.axiom);
            }
        }
        return failed;
    };

    SUBCASE("constant shift breaks measurable preservation") {
        const Evaluator broken = [&](const Claim& claim, int t) {
            auto value = superhedge(m.tree, m.prices, claim, t).price;
            for (auto& v : value) v += 1;
            return value;
        };
        const auto failed = failing(broken);
        CHECK(std::find(failed.begin(), failed.end(), "measurable-preservation") !=
              failed.end());
    }

    SUBCASE("doubling breaks translation invariance") {
        const Evaluator broken = [&](const Claim& claim, int t) {
            auto value = superhedge(m.tree, m.prices, claim, t).price;
            for (auto& v : value) v *= 2;
            return value;
        };
        const auto failed = failing(broken);
        CHECK(std::find(failed.begin(), failed.end(), "translation-invariance") !=
              failed.end());
    }

    SUBCASE("sign flip breaks monotonicity") {
        const Evaluator broken = [&](const Claim& claim, int t) {
            auto value = superhedge(m.tree, m.prices, claim, t).price;
            for (auto& v : value) v = -v;
            return value;
        };
        const auto failed = failing(broken);
        CHECK_FALSE(failed.empty());
        CHECK(std::find(failed.begin(), failed.end(), "monotonicity") != failed.end());
    }

    SUBCASE("scaling breaks positive homogeneity") {
        const Evaluator broken = [&](const Claim& claim, int t) {
            auto value = superhedge(m.tree, m.prices, claim, t).price;
            for (auto& v : value) v = v * v;
            return value;
        };
        const auto failed = failing(broken);
        CHECK(std::find(failed.begin(), failed.end(), "positive-homogeneity") !=
              failed.end());
    }

    SUBCASE("subhedge in place of superhedge breaks domination") {
        const Evaluator broken = [&](const Claim& claim, int t) {
            return subhedge(m.tree, m.prices, claim, t).price;
        };
        const auto failed = failing(broken);
        CHECK(std::find(failed.begin(), failed.end(), "super-dominates-sub") != failed.end());
    }
}
