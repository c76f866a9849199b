#pragma once

#include "hedgetree/lp.hpp"
#include "hedgetree/market.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hedgetree {

// Strictly positive martingale measure for (tree, X). Invariants re-verified
// exactly on construction: every transition probability > 0, each transition
// sums to one, and the one-step martingale identity
// sum_c q_c (X_c - X_n) = 0 holds at every internal node n.
struct Measure {
    std::vector<std::vector<Rational>> transition;  // per node, aligned with children
    AdaptedProcess node_weight;                     // by NodeId, root = 1
    std::vector<Rational> leaf_weight;              // aligned with tree.leaves
};

Measure measure_from_transitions(const EventTree& tree, const PriceProcess& prices,
                                 std::vector<std::vector<Rational>> transitions);

Measure measure_from_leaf_weights(const EventTree& tree, const PriceProcess& prices,
                                  const std::vector<Rational>& leaf_weights);

bool same_measure(const Measure& a, const Measure& b);

// One-step transition polytope at an internal node:
// {q >= 0, sum q = 1, sum_c q_c (X_c - X_n) = 0}, dimension = #children.
Polytope transition_polytope(const EventTree& tree, const PriceProcess& prices, NodeId node);

// Vertices of the transition polytope, enumerated from basic supports: a
// vertex is a feasible transition whose support columns of the moment matrix
// [1; X_c - X_n] are linearly independent, so supports have at most
// 1 + assets elements. Same set as vertices(transition_polytope(...)), sorted
// and deduplicated, at a fraction of the cost. Empty iff the node admits no
// martingale transition.
std::vector<std::vector<Rational>> transition_vertices(const EventTree& tree,
                                                       const PriceProcess& prices, NodeId node,
                                                       int cap = kDefaultVertexCap);

struct ArbitrageCheck {
    bool arbitrage_free = true;
    std::optional<Measure> witness;       // one strictly positive measure when free
    NodeId violating_node = -1;           // first failing node otherwise
    std::vector<Rational> strategy;       // one-step arbitrage xi at that node
};

// Decides no-arbitrage by probing, node by node, for a strictly positive
// solution of the transition polytope (max-slack program). Either every node
// admits one (the assembled transitions form the witness measure) or the
// failing node yields, by the separation dual, a one-step strategy xi with
// xi . (X_c - X_n) >= 0 for all children and > 0 for at least one; the
// strategy is re-verified exactly before being returned.
ArbitrageCheck check_no_arbitrage(const EventTree& tree, const PriceProcess& prices);

// Draws a strictly positive martingale measure: at each internal node, a
// random strictly positive convex combination of the transition polytope's
// vertices. Deterministic in `seed`. Throws Error(NoInteriorPoint) when some
// node admits no strictly positive transition (the market has arbitrage).
Measure sample_emm(const EventTree& tree, const PriceProcess& prices, std::uint64_t seed,
                   int cap = kDefaultVertexCap);

// Pasting at time t: transitions of `before` at levels < t, of `after` at
// levels >= t. The result is re-validated on construction.
Measure paste(const EventTree& tree, const PriceProcess& prices, const Measure& before,
              const Measure& after, int t);

// E_Q[H | F_t], one value per time-t atom (backward one-step averaging).
std::vector<Rational> conditional_expectation(const EventTree& tree, const Measure& measure,
                                              const Claim& claim, int t);

struct PriceBound {
    std::vector<Rational> value;  // per time-t atom
    // Whether some strictly positive measure attains the bound on the atom,
    // decided per node from the optimal face of the one-step problem.
    std::vector<bool> attained;
};

// Conditional super/sub-hedging bounds over all martingale measures, computed
// on the measure side: a backward pass taking one-step maxima (resp. minima)
// over the vertices of each transition polytope. Independent of the
// LP/strategy route, which makes the duality comparison in the tests a real
// cross-check of two algorithms.
PriceBound upper_price(const EventTree& tree, const PriceProcess& prices, const Claim& claim,
                       int t, int cap = kDefaultVertexCap);
PriceBound lower_price(const EventTree& tree, const PriceProcess& prices, const Claim& claim,
                       int t, int cap = kDefaultVertexCap);

// Mixes measures with strictly positive F_t-measurable weights lambda[k][atom]
// summing to one per atom: all measures are first pasted onto measures[0] at
// time t (so they share history before t), then conditional laws given the
// time-t atoms are mixed. Exact, and the result is re-validated.
Measure convex_combine(const EventTree& tree, const PriceProcess& prices,
                       const std::vector<Measure>& measures,
                       const std::vector<std::vector<Rational>>& lambda, int t);

}  // namespace hedgetree
