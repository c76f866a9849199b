#pragma once

#include "hedgetree/rational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hedgetree {

using NodeId = int;

// Input description of a scenario tree. Nodes are listed parents-first; the
// root is entry 0 with parent -1. Children keep the listed order everywhere.
struct TreeDescription {
    int horizon = 0;
    std::vector<int> parent;
    std::vector<std::string> labels;  // empty to auto-generate "n0", "n1", ...
    std::vector<std::pair<int, Rational>> leaf_weights;
};

// A finite scenario tree of uniform depth `horizon`. Level-t nodes are the
// time-t atoms; leaves carry a strictly positive reference weight summing to
// one. All vectors are indexed by NodeId except `leaves`, which runs in
// increasing NodeId order.
struct EventTree {
    int horizon = 0;
    std::vector<NodeId> parent;
    std::vector<std::vector<NodeId>> children;
    std::vector<int> level;
    std::vector<std::string> label;
    std::vector<NodeId> leaves;
    std::vector<int> leaf_index;                 // NodeId -> position in leaves, -1 if internal
    std::vector<Rational> leaf_weight;           // by NodeId, 0 for internal nodes
    std::vector<std::vector<NodeId>> descendants_leaves;  // leaves under each node

    int num_nodes() const { return static_cast<int>(parent.size()); }
    bool is_leaf(NodeId n) const { return children[n].empty(); }

    // Atoms of the time-t partition: all nodes at level t, increasing id.
    // Throws Error(TimeOutOfRange) unless 0 <= t <= horizon.
    std::vector<NodeId> atoms_at(int t) const;

    // Internal nodes at levels [t, horizon), increasing id.
    std::vector<NodeId> internal_from(int t) const;

    // The level-t ancestor of `node` (node itself if level[node] == t).
    NodeId ancestor_at(NodeId node, int t) const;

    // Root-to-node path, inclusive.
    std::vector<NodeId> path(NodeId node) const;

    NodeId find_label(const std::string& name) const;  // -1 if absent
};

EventTree build_tree(const TreeDescription& description);

// Nonnegative adapted price process, value[node][asset].
struct PriceProcess {
    int assets = 0;
    std::vector<std::vector<Rational>> value;
};

// Validates shape and nonnegativity (Error(NegativeProcess) on a negative entry).
PriceProcess make_price_process(const EventTree& tree, int assets,
                                std::vector<std::vector<Rational>> values);

// Payoff at the horizon, aligned with tree.leaves. The nonnegative flag is
// maintained exactly; pricing entry points that require H >= 0 check it.
struct Claim {
    std::vector<Rational> payoff;
    bool nonnegative = false;
};

Claim make_claim(const EventTree& tree, std::vector<Rational> payoff);

// F_t-measurable claim: one value per atom at time t, extended to leaves.
Claim claim_from_atom_values(const EventTree& tree, int t, const std::vector<Rational>& values);

// One value per node (adapted process on the whole tree).
using AdaptedProcess = std::vector<Rational>;

// Self-financing trading strategy: xi[node] is the holdings vector (one entry
// per asset) chosen at `node` for the step to its children; empty at leaves.
struct Strategy {
    std::vector<std::vector<Rational>> xi;
};

Strategy zero_strategy(const EventTree& tree, const PriceProcess& prices);

// Accumulated trading gains from `from_time` to the horizon, as a claim:
// sum over steps k >= from_time of xi[node_k] . (X[node_{k+1}] - X[node_k]).
Claim gains(const EventTree& tree, const PriceProcess& prices, const Strategy& strategy,
            int from_time);

}  // namespace hedgetree
