#pragma once

// Shared fixtures: the three hand-checked markets every suite leans on, plus
// a generator of random arbitrage-free markets. The generator plants a
// strictly positive martingale measure by construction: it samples transition
// weights and terminal prices first and defines earlier prices backward as
// the resulting one-step averages, so the planted transitions certify
// no-arbitrage without solving anything.

#include "hedgetree/io.hpp"
#include "hedgetree/market.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

using hedgetree::AdaptedProcess;
using hedgetree::Claim;
using hedgetree::EventTree;
using hedgetree::MarketData;
using hedgetree::NodeId;
using hedgetree::Rational;

// One period, X0 = 1, children prices 2 and 1/2. Complete; the unique
// transition is (1/3, 2/3).
inline MarketData binomial() {
    hedgetree::TreeDescription d;
    d.horizon = 1;
    d.parent = {-1, 0, 0};
    d.labels = {"root", "up", "down"};
    d.leaf_weights = {{1, Rational(1, 2)}, {2, Rational(1, 2)}};
    MarketData m;
    m.tree = hedgetree::build_tree(d);
    m.prices = hedgetree::make_price_process(
        m.tree, 1, {{Rational(1)}, {Rational(2)}, {Rational(1, 2)}});
    return m;
}

// One period, children prices 2, 1, 1/2. Incomplete; the transition polytope
// has vertices (0, 1, 0) and (1/3, 0, 2/3).
inline MarketData trinomial() {
    hedgetree::TreeDescription d;
    d.horizon = 1;
    d.parent = {-1, 0, 0, 0};
    d.labels = {"root", "a", "b", "c"};
    d.leaf_weights = {{1, Rational(1, 3)}, {2, Rational(1, 3)}, {3, Rational(1, 3)}};
    MarketData m;
    m.tree = hedgetree::build_tree(d);
    m.prices = hedgetree::make_price_process(
        m.tree, 1, {{Rational(1)}, {Rational(2)}, {Rational(1)}, {Rational(1, 2)}});
    return m;
}

// Two-period binomial, every one-step transition (1/3, 2/3). Complete at all
// times.
inline MarketData two_period() {
    hedgetree::TreeDescription d;
    d.horizon = 2;
    d.parent = {-1, 0, 0, 1, 1, 2, 2};
    d.labels = {"root", "u", "d", "uu", "ud", "du", "dd"};
    d.leaf_weights = {{3, Rational(1, 4)},
                      {4, Rational(1, 4)},
                      {5, Rational(1, 4)},
                      {6, Rational(1, 4)}};
    MarketData m;
    m.tree = hedgetree::build_tree(d);
    m.prices = hedgetree::make_price_process(m.tree, 1,
                                             {{Rational(1)},
                                              {Rational(2)},
                                              {Rational(1, 2)},
                                              {Rational(4)},
                                              {Rational(1)},
                                              {Rational(1)},
                                              {Rational(1, 4)}});
    return m;
}

inline Claim claim_of(const MarketData& m, const std::map<std::string, Rational>& payoffs) {
    std::vector<Rational> payoff(m.tree.leaves.size());
    for (const auto& [label, value] : payoffs) {
        const NodeId node = m.tree.find_label(label);
        if (node < 0 || m.tree.leaf_index[node] < 0) {
            throw std::invalid_argument("claim_of: unknown leaf '" + label + "'");
        }
        payoff[m.tree.leaf_index[node]] = value;
    }
    return hedgetree::make_claim(m.tree, std::move(payoff));
}

inline AdaptedProcess process_of(const MarketData& m,
                                 const std::map<std::string, Rational>& values) {
    AdaptedProcess process(m.tree.num_nodes());
    for (const auto& [label, value] : values) {
        const NodeId node = m.tree.find_label(label);
        if (node < 0) throw std::invalid_argument("process_of: unknown node '" + label + "'");
        process[node] = value;
    }
    return process;
}

struct RandomMarket {
    MarketData market;
    std::vector<std::vector<Rational>> planted;  // strictly positive EMM transitions
};

// Arbitrage-free by construction. Depth 1..max_depth, 2..max_branch children
// per internal node, 1..max_assets assets, small denominators throughout.
inline RandomMarket random_market(std::uint64_t seed, int max_depth = 3, int max_branch = 4,
                                  int max_assets = 2) {
    std::mt19937_64 rng(seed);
    const auto pick = [&rng](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };

    const int horizon = pick(1, max_depth);
    const int assets = pick(1, max_assets);

    std::vector<int> parent = {-1};
    std::vector<int> level = {0};
    std::vector<int> frontier = {0};
    for (int t = 0; t < horizon; ++t) {
        std::vector<int> next;
        for (int node : frontier) {
            const int branch = pick(2, max_branch);
            for (int c = 0; c < branch; ++c) {
                parent.push_back(node);
                level.push_back(t + 1);
                next.push_back(static_cast<int>(parent.size()) - 1);
            }
        }
        frontier = std::move(next);
    }

    hedgetree::TreeDescription d;
    d.horizon = horizon;
    d.parent = parent;
    Rational total = 0;
    std::vector<std::pair<int, Rational>> raw;
    for (int leaf : frontier) {
        const Rational w(pick(1, 4));
        raw.emplace_back(leaf, w);
        total += w;
    }
    for (auto& [leaf, w] : raw) d.leaf_weights.emplace_back(leaf, w / total);

    MarketData m;
    m.tree = hedgetree::build_tree(d);

    std::vector<std::vector<Rational>> planted(m.tree.num_nodes());
    std::vector<std::vector<Rational>> value(m.tree.num_nodes(),
                                             std::vector<Rational>(assets));
    for (NodeId leaf : m.tree.leaves) {
        for (int a = 0; a < assets; ++a) {
            value[leaf][a] = Rational(pick(0, 8), pick(1, 4));
        }
    }
    for (NodeId n = m.tree.num_nodes() - 1; n >= 0; --n) {
        if (m.tree.is_leaf(n)) continue;
        const auto& kids = m.tree.children[n];
        Rational sum = 0;
        std::vector<Rational> q;
        for (std::size_t c = 0; c < kids.size(); ++c) {
            q.emplace_back(pick(1, 8));
            sum += q.back();
        }
        for (auto& x : q) x /= sum;
        for (int a = 0; a < assets; ++a) {
            Rational avg = 0;
            for (std::size_t c = 0; c < kids.size(); ++c) avg += q[c] * value[kids[c]][a];
            value[n][a] = avg;
        }
        planted[n] = std::move(q);
    }

    RandomMarket out;
    out.market.tree = std::move(m.tree);
    out.market.prices =
        hedgetree::make_price_process(out.market.tree, assets, std::move(value));
    out.planted = std::move(planted);
    return out;
}

// Nonnegative payoff with small numerators and denominators.
inline Claim random_claim(const EventTree& tree, std::mt19937_64& rng) {
    std::vector<Rational> payoff;
    payoff.reserve(tree.leaves.size());
    for (std::size_t i = 0; i < tree.leaves.size(); ++i) {
        payoff.emplace_back(static_cast<int>(rng() % 9),
                            1 + static_cast<int>(rng() % 4));
    }
    return hedgetree::make_claim(tree, std::move(payoff));
}

}  // namespace fixtures
