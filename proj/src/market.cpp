#include "hedgetree/market.hpp"

#include "hedgetree/errors.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hedgetree {

std::vector<NodeId> EventTree::atoms_at(int t) const {
    if (t < 0 || t > horizon) {
        throw Error(ErrorCode::TimeOutOfRange,
                    "time " + std::to_string(t) + " outside [0, " + std::to_string(horizon) + "]");
    }
    std::vector<NodeId> out;
    for (NodeId n = 0; n < num_nodes(); ++n) {
        if (level[n] == t) out.push_back(n);
    }
    return out;
}

std::vector<NodeId> EventTree::internal_from(int t) const {
    std::vector<NodeId> out;
    for (NodeId n = 0; n < num_nodes(); ++n) {
        if (!is_leaf(n) && level[n] >= t) out.push_back(n);
    }
    return out;
}

NodeId EventTree::ancestor_at(NodeId node, int t) const {
    if (t < 0 || t > level[node]) {
        throw Error(ErrorCode::TimeOutOfRange, "no ancestor at time " + std::to_string(t));
    }
    NodeId cur = node;
    while (level[cur] > t) cur = parent[cur];
    return cur;
}

std::vector<NodeId> EventTree::path(NodeId node) const {
    std::vector<NodeId> out;
    for (NodeId cur = node; cur != -1; cur = parent[cur]) out.push_back(cur);
    std::reverse(out.begin(), out.end());
    return out;
}

NodeId EventTree::find_label(const std::string& name) const {
    for (NodeId n = 0; n < num_nodes(); ++n) {
        if (label[n] == name) return n;
    }
    return -1;
}

EventTree build_tree(const TreeDescription& description) {
    const int count = static_cast<int>(description.parent.size());
    if (count == 0) throw std::invalid_argument("tree has no nodes");
    if (description.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (description.parent[0] != -1) throw std::invalid_argument("node 0 must be the root");
    if (!description.labels.empty() &&
        static_cast<int>(description.labels.size()) != count) {
        throw std::invalid_argument("label list size mismatch");
    }

    EventTree tree;
    tree.horizon = description.horizon;
    tree.parent = description.parent;
    tree.children.resize(count);
    tree.level.resize(count);
    tree.label.resize(count);

    std::set<std::string> seen_labels;
    for (NodeId n = 0; n < count; ++n) {
        const int p = description.parent[n];
        if (n == 0) {
            tree.level[0] = 0;
        } else {
            if (p < 0 || p >= n) {
                throw std::invalid_argument("parents must be listed before children");
            }
            tree.level[n] = tree.level[p] + 1;
            tree.children[p].push_back(n);
        }
        tree.label[n] = description.labels.empty() ? "n" + std::to_string(n)
                                                   : description.labels[n];
        if (tree.label[n].empty() || !seen_labels.insert(tree.label[n]).second) {
            throw std::invalid_argument("node labels must be unique and nonempty");
        }
        if (tree.level[n] > tree.horizon) {
            throw Error(ErrorCode::NonUniformDepth,
                        "node '" + tree.label[n] + "' lies below the horizon");
        }
    }

    tree.leaf_index.assign(count, -1);
    tree.leaf_weight.assign(count, Rational(0));
    for (NodeId n = 0; n < count; ++n) {
        if (!tree.children[n].empty()) continue;
        if (tree.level[n] != tree.horizon) {
            throw Error(ErrorCode::NonUniformDepth,
                        "node '" + tree.label[n] + "' terminates at time " +
                            std::to_string(tree.level[n]) + " before the horizon");
        }
        tree.leaf_index[n] = static_cast<int>(tree.leaves.size());
        tree.leaves.push_back(n);
    }

    std::vector<bool> weighted(count, false);
    Rational total = 0;
    for (const auto& [node, weight] : description.leaf_weights) {
        if (node < 0 || node >= count || tree.leaf_index[node] < 0) {
            throw std::invalid_argument("weight attached to a non-leaf node");
        }
        if (weighted[node]) throw std::invalid_argument("duplicate leaf weight");
        if (weight <= 0) {
            throw Error(ErrorCode::ZeroWeight,
                        "leaf '" + tree.label[node] + "' has non-positive weight");
        }
        weighted[node] = true;
        tree.leaf_weight[node] = weight;
        total += weight;
    }
    for (NodeId leaf : tree.leaves) {
        if (!weighted[leaf]) {
            throw std::invalid_argument("leaf '" + tree.label[leaf] + "' has no weight");
        }
    }
    if (total != 1) {
        throw Error(ErrorCode::WeightSum, "leaf weights sum to " + to_ratio_string(total));
    }

    tree.descendants_leaves.resize(count);
    for (NodeId n = count - 1; n >= 0; --n) {
        if (tree.is_leaf(n)) {
            tree.descendants_leaves[n] = {n};
            continue;
        }
        for (NodeId c : tree.children[n]) {
            auto& dst = tree.descendants_leaves[n];
            dst.insert(dst.end(), tree.descendants_leaves[c].begin(),
                       tree.descendants_leaves[c].end());
        }
        std::sort(tree.descendants_leaves[n].begin(), tree.descendants_leaves[n].end());
    }
    return tree;
}

PriceProcess make_price_process(const EventTree& tree, int assets,
                                std::vector<std::vector<Rational>> values) {
    if (assets < 1) throw std::invalid_argument("need at least one asset");
    if (static_cast<int>(values.size()) != tree.num_nodes()) {
        throw std::invalid_argument("price process size mismatch");
    }
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (static_cast<int>(values[n].size()) != assets) {
            throw std::invalid_argument("price row width mismatch");
        }
        for (const auto& v : values[n]) {
            if (v < 0) {
                throw Error(ErrorCode::NegativeProcess,
                            "negative price at node '" + tree.label[n] + "'");
            }
        }
    }
    return PriceProcess{assets, std::move(values)};
}

Claim make_claim(const EventTree& tree, std::vector<Rational> payoff) {
    if (payoff.size() != tree.leaves.size()) {
        throw std::invalid_argument("claim payoff size mismatch");
    }
    Claim claim{std::move(payoff), true};
    for (const auto& v : claim.payoff) {
        if (v < 0) {
            claim.nonnegative = false;
            break;
        }
    }
    return claim;
}

Claim claim_from_atom_values(const EventTree& tree, int t, const std::vector<Rational>& values) {
    const auto atoms = tree.atoms_at(t);
    if (values.size() != atoms.size()) {
        throw std::invalid_argument("atom value vector size mismatch");
    }
    std::vector<Rational> payoff(tree.leaves.size(), Rational(0));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (NodeId leaf : tree.descendants_leaves[atoms[i]]) {
            payoff[tree.leaf_index[leaf]] = values[i];
        }
    }
    return make_claim(tree, std::move(payoff));
}

Strategy zero_strategy(const EventTree& tree, const PriceProcess& prices) {
    Strategy s;
    s.xi.resize(tree.num_nodes());
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (!tree.is_leaf(n)) s.xi[n].assign(prices.assets, Rational(0));
    }
    return s;
}

Claim gains(const EventTree& tree, const PriceProcess& prices, const Strategy& strategy,
            int from_time) {
    if (from_time < 0 || from_time > tree.horizon) {
        throw Error(ErrorCode::TimeOutOfRange, "gains start time out of range");
    }
    if (static_cast<int>(strategy.xi.size()) != tree.num_nodes()) {
        throw std::invalid_argument("strategy size mismatch");
    }
    std::vector<Rational> payoff;
    payoff.reserve(tree.leaves.size());
    for (NodeId leaf : tree.leaves) {
        Rational acc = 0;
        for (NodeId cur = leaf; tree.parent[cur] != -1; cur = tree.parent[cur]) {
            const NodeId p = tree.parent[cur];
            if (tree.level[p] < from_time) break;
            const auto& xi = strategy.xi[p];
            if (static_cast<int>(xi.size()) != prices.assets) {
                throw std::invalid_argument("strategy row width mismatch");
            }
            for (int a = 0; a < prices.assets; ++a) {
                acc += xi[a] * (prices.value[cur][a] - prices.value[p][a]);
            }
        }
        payoff.push_back(acc);
    }
    return make_claim(tree, std::move(payoff));
}

}  // namespace hedgetree
