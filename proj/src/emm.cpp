#include "hedgetree/emm.hpp"

#include "hedgetree/errors.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace hedgetree {

namespace {

void check_time(const EventTree& tree, int t) {
    if (t < 0 || t > tree.horizon) {
        throw Error(ErrorCode::TimeOutOfRange,
                    "time " + std::to_string(t) + " outside [0, " + std::to_string(tree.horizon) + "]");
    }
}

}  // namespace

Measure measure_from_transitions(const EventTree& tree, const PriceProcess& prices,
                                 std::vector<std::vector<Rational>> transitions) {
    if (static_cast<int>(transitions.size()) != tree.num_nodes()) {
        throw std::invalid_argument("transition table size mismatch");
    }
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        const auto& kids = tree.children[n];
        const auto& q = transitions[n];
        if (q.size() != kids.size()) {
            throw std::invalid_argument("transition row at '" + tree.label[n] +
                                        "' does not match the child count");
        }
        if (kids.empty()) continue;
        Rational total = 0;
        for (const auto& p : q) {
            if (p <= 0) {
                throw Error(ErrorCode::ZeroWeight,
                            "non-positive transition probability at '" + tree.label[n] + "'");
            }
            total += p;
        }
        if (total != 1) {
            throw Error(ErrorCode::WeightSum,
                        "transition at '" + tree.label[n] + "' sums to " + to_ratio_string(total));
        }
        for (int a = 0; a < prices.assets; ++a) {
            Rational drift = 0;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                drift += q[i] * (prices.value[kids[i]][a] - prices.value[n][a]);
            }
            if (drift != 0) {
                throw std::invalid_argument("transition at '" + tree.label[n] +
                                            "' violates the one-step martingale identity");
            }
        }
    }

    Measure measure;
    measure.transition = std::move(transitions);
    measure.node_weight.assign(tree.num_nodes(), Rational(0));
    measure.node_weight[0] = 1;
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        const auto& kids = tree.children[n];
        for (std::size_t i = 0; i < kids.size(); ++i) {
            measure.node_weight[kids[i]] = measure.node_weight[n] * measure.transition[n][i];
        }
    }
    measure.leaf_weight.reserve(tree.leaves.size());
    for (NodeId leaf : tree.leaves) measure.leaf_weight.push_back(measure.node_weight[leaf]);
    return measure;
}

Measure measure_from_leaf_weights(const EventTree& tree, const PriceProcess& prices,
                                  const std::vector<Rational>& leaf_weights) {
    if (leaf_weights.size() != tree.leaves.size()) {
        throw std::invalid_argument("leaf weight vector size mismatch");
    }
    AdaptedProcess weight(tree.num_nodes(), Rational(0));
    for (std::size_t i = 0; i < tree.leaves.size(); ++i) {
        if (leaf_weights[i] <= 0) {
            throw Error(ErrorCode::ZeroWeight, "non-positive leaf weight");
        }
        weight[tree.leaves[i]] = leaf_weights[i];
    }
    for (NodeId n = tree.num_nodes() - 1; n >= 0; --n) {
        for (NodeId c : tree.children[n]) weight[n] += weight[c];
    }
    if (weight[0] != 1) {
        throw Error(ErrorCode::WeightSum, "leaf weights sum to " + to_ratio_string(weight[0]));
    }
    std::vector<std::vector<Rational>> transitions(tree.num_nodes());
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        for (NodeId c : tree.children[n]) transitions[n].push_back(weight[c] / weight[n]);
    }
    return measure_from_transitions(tree, prices, std::move(transitions));
}

bool same_measure(const Measure& a, const Measure& b) {
    return a.transition == b.transition;
}

Polytope transition_polytope(const EventTree& tree, const PriceProcess& prices, NodeId node) {
    if (node < 0 || node >= tree.num_nodes() || tree.is_leaf(node)) {
        throw std::invalid_argument("transition polytope requires an internal node");
    }
    const auto& kids = tree.children[node];
    const int k = static_cast<int>(kids.size());
    Polytope poly;
    poly.dim = k;
    poly.eq_lhs.push_back(std::vector<Rational>(k, Rational(1)));
    poly.eq_rhs.push_back(Rational(1));
    for (int a = 0; a < prices.assets; ++a) {
        std::vector<Rational> row(k);
        for (int i = 0; i < k; ++i) {
            row[i] = prices.value[kids[i]][a] - prices.value[node][a];
        }
        poly.eq_lhs.push_back(std::move(row));
        poly.eq_rhs.push_back(Rational(0));
    }
    for (int i = 0; i < k; ++i) {
        std::vector<Rational> row(k, Rational(0));
        row[i] = 1;
        poly.ineq_lhs.push_back(std::move(row));
        poly.ineq_rhs.push_back(Rational(0));
    }
    return poly;
}

std::vector<std::vector<Rational>> transition_vertices(const EventTree& tree,
                                                       const PriceProcess& prices, NodeId node,
                                                       int cap) {
    const Polytope poly = transition_polytope(tree, prices, node);
    if (poly.dim > cap) {
        throw Error(ErrorCode::DimensionTooLarge,
                    "vertex enumeration over " + std::to_string(poly.dim) +
                        " variables exceeds cap " + std::to_string(cap));
    }
    const std::size_t k = static_cast<std::size_t>(poly.dim);
    const std::size_t rows = poly.eq_lhs.size();
    const std::size_t max_support = std::min(k, rows);

    std::vector<std::vector<Rational>> found;

    // Solve M_S x = r over the support S by Gauss-Jordan elimination. Skips
    // dependent columns (that vertex, if any, has a smaller support that is
    // enumerated too) and inconsistent systems; a unique nonnegative solution
    // padded with zeros is a vertex.
    auto try_support = [&](const std::vector<std::size_t>& support) {
        const std::size_t s = support.size();
        std::vector<std::vector<Rational>> aug(rows, std::vector<Rational>(s + 1, Rational(0)));
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < s; ++j) aug[i][j] = poly.eq_lhs[i][support[j]];
            aug[i][s] = poly.eq_rhs[i];
        }
        std::vector<std::size_t> pivot_row(s);
        std::size_t rank = 0;
        for (std::size_t j = 0; j < s; ++j) {
            std::size_t p = rank;
            while (p < rows && aug[p][j] == 0) ++p;
            if (p == rows) return;
            std::swap(aug[p], aug[rank]);
            const Rational head = aug[rank][j];
            for (std::size_t c = j; c <= s; ++c) aug[rank][c] /= head;
            for (std::size_t i = 0; i < rows; ++i) {
                if (i == rank || aug[i][j] == 0) continue;
                const Rational factor = aug[i][j];
                for (std::size_t c = j; c <= s; ++c) aug[i][c] -= factor * aug[rank][c];
            }
            pivot_row[j] = rank;
            ++rank;
        }
        for (std::size_t i = rank; i < rows; ++i) {
            if (aug[i][s] != 0) return;
        }
        std::vector<Rational> q(k, Rational(0));
        for (std::size_t j = 0; j < s; ++j) {
            if (aug[pivot_row[j]][s] < 0) return;
            q[support[j]] = aug[pivot_row[j]][s];
        }
        found.push_back(std::move(q));
    };

    std::vector<std::size_t> support;
    for (std::size_t size = 1; size <= max_support; ++size) {
        support.resize(size);
        for (std::size_t i = 0; i < size; ++i) support[i] = i;
        for (;;) {
            try_support(support);
            std::size_t i = size;
            while (i > 0) {
                --i;
                if (support[i] != i + k - size) break;
                if (i == 0) {
                    i = size;
                    break;
                }
            }
            if (i == size) break;
            ++support[i];
            for (std::size_t j = i + 1; j < size; ++j) support[j] = support[j - 1] + 1;
        }
    }

    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

namespace {

// Max-slack probe: max eps s.t. q in the transition polytope, q_c >= eps.
// A positive optimum yields a strictly positive transition; otherwise the
// node prices admit one-step arbitrage.
struct SlackProbe {
    bool interior = false;
    std::vector<Rational> transition;  // strictly positive when interior
};

SlackProbe probe_node(const EventTree& tree, const PriceProcess& prices, NodeId node) {
    const int k = static_cast<int>(tree.children[node].size());
    Polytope poly = transition_polytope(tree, prices, node);
    LinearProgram lp;
    lp.sense = LpSense::Maximize;
    lp.objective.assign(k + 1, Rational(0));
    lp.objective[k] = 1;
    for (std::size_t r = 0; r < poly.eq_lhs.size(); ++r) {
        auto row = poly.eq_lhs[r];
        row.push_back(Rational(0));
        lp.eq_lhs.push_back(std::move(row));
        lp.eq_rhs.push_back(poly.eq_rhs[r]);
    }
    for (int i = 0; i < k; ++i) {
        std::vector<Rational> row(k + 1, Rational(0));
        row[i] = 1;
        row[k] = -1;
        lp.ineq_lhs.push_back(std::move(row));
        lp.ineq_rhs.push_back(Rational(0));
    }
    LpOutcome outcome = solve(lp);
    SlackProbe probe;
    if (outcome.status == LpStatus::Optimal && outcome.optimum > 0) {
        probe.interior = true;
        probe.transition.assign(outcome.primal.begin(), outcome.primal.begin() + k);
    }
    return probe;
}

std::vector<Rational> one_step_arbitrage(const EventTree& tree, const PriceProcess& prices,
                                         NodeId node) {
    const auto& kids = tree.children[node];
    const int d = prices.assets;
    LinearProgram lp;
    lp.objective.assign(d, Rational(0));
    std::vector<Rational> total(d, Rational(0));
    for (NodeId c : kids) {
        std::vector<Rational> row(d);
        for (int a = 0; a < d; ++a) {
            row[a] = prices.value[c][a] - prices.value[node][a];
            total[a] += row[a];
        }
        lp.ineq_lhs.push_back(std::move(row));
        lp.ineq_rhs.push_back(Rational(0));
    }
    lp.ineq_lhs.push_back(std::move(total));
    lp.ineq_rhs.push_back(Rational(1));
    LpOutcome outcome = solve(lp);
    if (outcome.status != LpStatus::Optimal) {
        throw InternalError("no one-step arbitrage at a node that failed the interior probe");
    }
    Rational gain_total = 0;
    for (NodeId c : kids) {
        Rational gain = 0;
        for (int a = 0; a < d; ++a) {
            gain += outcome.primal[a] * (prices.value[c][a] - prices.value[node][a]);
        }
        if (gain < 0) throw InternalError("arbitrage strategy has a losing branch");
        gain_total += gain;
    }
    if (gain_total <= 0) throw InternalError("arbitrage strategy has no winning branch");
    return outcome.primal;
}

}  // namespace

ArbitrageCheck check_no_arbitrage(const EventTree& tree, const PriceProcess& prices) {
    ArbitrageCheck result;
    std::vector<std::vector<Rational>> transitions(tree.num_nodes());
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (tree.is_leaf(n)) continue;
        SlackProbe probe = probe_node(tree, prices, n);
        if (!probe.interior) {
            result.arbitrage_free = false;
            result.violating_node = n;
            result.strategy = one_step_arbitrage(tree, prices, n);
            return result;
        }
        transitions[n] = std::move(probe.transition);
    }
    result.witness = measure_from_transitions(tree, prices, std::move(transitions));
    return result;
}

Measure sample_emm(const EventTree& tree, const PriceProcess& prices, std::uint64_t seed,
                   int cap) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> draw(1, 8);
    std::vector<std::vector<Rational>> transitions(tree.num_nodes());
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (tree.is_leaf(n)) continue;
        const auto verts = transition_vertices(tree, prices, n, cap);
        if (verts.empty()) {
            throw Error(ErrorCode::NoInteriorPoint,
                        "no martingale transition at '" + tree.label[n] + "'");
        }
        Rational total = 0;
        std::vector<Rational> weights;
        weights.reserve(verts.size());
        for (std::size_t i = 0; i < verts.size(); ++i) {
            weights.push_back(Rational(draw(rng)));
            total += weights.back();
        }
        std::vector<Rational> q(verts[0].size(), Rational(0));
        for (std::size_t i = 0; i < verts.size(); ++i) {
            for (std::size_t c = 0; c < q.size(); ++c) q[c] += weights[i] * verts[i][c];
        }
        for (auto& p : q) {
            p /= total;
            if (p == 0) {
                throw Error(ErrorCode::NoInteriorPoint,
                            "transition polytope at '" + tree.label[n] +
                                "' has no strictly positive point");
            }
        }
        transitions[n] = std::move(q);
    }
    return measure_from_transitions(tree, prices, std::move(transitions));
}

Measure paste(const EventTree& tree, const PriceProcess& prices, const Measure& before,
              const Measure& after, int t) {
    check_time(tree, t);
    std::vector<std::vector<Rational>> transitions(tree.num_nodes());
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        transitions[n] = tree.level[n] < t ? before.transition[n] : after.transition[n];
    }
    return measure_from_transitions(tree, prices, std::move(transitions));
}

std::vector<Rational> conditional_expectation(const EventTree& tree, const Measure& measure,
                                              const Claim& claim, int t) {
    check_time(tree, t);
    AdaptedProcess value(tree.num_nodes(), Rational(0));
    for (NodeId leaf : tree.leaves) value[leaf] = claim.payoff[tree.leaf_index[leaf]];
    for (NodeId n = tree.num_nodes() - 1; n >= 0; --n) {
        const auto& kids = tree.children[n];
        for (std::size_t i = 0; i < kids.size(); ++i) {
            value[n] += measure.transition[n][i] * value[kids[i]];
        }
    }
    std::vector<Rational> out;
    for (NodeId atom : tree.atoms_at(t)) out.push_back(value[atom]);
    return out;
}

namespace {

enum class BoundSide { Upper, Lower };

struct BoundProcess {
    AdaptedProcess value;
    std::vector<bool> node_attained;  // per node, true at leaves
};

BoundProcess bound_process(const EventTree& tree, const PriceProcess& prices, const Claim& claim,
                           BoundSide side, int cap) {
    BoundProcess out;
    out.value.assign(tree.num_nodes(), Rational(0));
    out.node_attained.assign(tree.num_nodes(), true);
    for (NodeId leaf : tree.leaves) out.value[leaf] = claim.payoff[tree.leaf_index[leaf]];
    for (NodeId n = tree.num_nodes() - 1; n >= 0; --n) {
        if (tree.is_leaf(n)) continue;
        const auto& kids = tree.children[n];
        const auto verts = transition_vertices(tree, prices, n, cap);
        if (verts.empty()) {
            throw Error(ErrorCode::ArbitrageDetected,
                        "no martingale transition at '" + tree.label[n] + "'");
        }
        std::optional<Rational> best;
        for (const auto& v : verts) {
            Rational value = 0;
            for (std::size_t i = 0; i < kids.size(); ++i) value += v[i] * out.value[kids[i]];
            if (!best || (side == BoundSide::Upper ? value > *best : value < *best)) {
                best = value;
            }
        }
        out.value[n] = *best;

        // The optimum is attained by a strictly positive transition iff the
        // average of the optimal vertices is strictly positive.
        std::vector<bool> positive(kids.size(), false);
        for (const auto& v : verts) {
            Rational value = 0;
            for (std::size_t i = 0; i < kids.size(); ++i) value += v[i] * out.value[kids[i]];
            if (value != *best) continue;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                if (v[i] > 0) positive[i] = true;
            }
        }
        for (bool p : positive) {
            if (!p) out.node_attained[n] = false;
        }
    }
    return out;
}

PriceBound slice_bound(const EventTree& tree, const BoundProcess& process, int t) {
    PriceBound bound;
    for (NodeId atom : tree.atoms_at(t)) {
        bound.value.push_back(process.value[atom]);
        bool attained = true;
        for (NodeId n = atom; n < tree.num_nodes(); ++n) {
            if (tree.level[n] >= tree.level[atom] && !tree.is_leaf(n) &&
                tree.ancestor_at(n, tree.level[atom]) == atom && !process.node_attained[n]) {
                attained = false;
                break;
            }
        }
        bound.attained.push_back(attained);
    }
    return bound;
}

}  // namespace

PriceBound upper_price(const EventTree& tree, const PriceProcess& prices, const Claim& claim,
                       int t, int cap) {
    check_time(tree, t);
    return slice_bound(tree, bound_process(tree, prices, claim, BoundSide::Upper, cap), t);
}

PriceBound lower_price(const EventTree& tree, const PriceProcess& prices, const Claim& claim,
                       int t, int cap) {
    check_time(tree, t);
    return slice_bound(tree, bound_process(tree, prices, claim, BoundSide::Lower, cap), t);
}

Measure convex_combine(const EventTree& tree, const PriceProcess& prices,
                       const std::vector<Measure>& measures,
                       const std::vector<std::vector<Rational>>& lambda, int t) {
    check_time(tree, t);
    if (measures.empty()) throw std::invalid_argument("no measures to combine");
    const auto atoms = tree.atoms_at(t);
    if (lambda.size() != measures.size()) {
        throw std::invalid_argument("one weight row per measure required");
    }
    for (const auto& row : lambda) {
        if (row.size() != atoms.size()) {
            throw std::invalid_argument("one weight per time-t atom required");
        }
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        Rational total = 0;
        for (const auto& row : lambda) {
            if (row[i] <= 0) {
                throw Error(ErrorCode::ZeroWeight, "combination weight must be strictly positive");
            }
            total += row[i];
        }
        if (total != 1) {
            throw Error(ErrorCode::WeightSum,
                        "combination weights at atom " + std::to_string(i) + " sum to " +
                            to_ratio_string(total));
        }
    }

    std::vector<Measure> pasted;
    pasted.reserve(measures.size());
    for (const auto& m : measures) pasted.push_back(paste(tree, prices, measures[0], m, t));

    std::vector<Rational> leaf_weights(tree.leaves.size(), Rational(0));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const NodeId atom = atoms[i];
        const Rational base = pasted[0].node_weight[atom];
        for (NodeId leaf : tree.descendants_leaves[atom]) {
            Rational mix = 0;
            for (std::size_t k = 0; k < pasted.size(); ++k) {
                mix += lambda[k][i] * pasted[k].node_weight[leaf] / pasted[k].node_weight[atom];
            }
            leaf_weights[tree.leaf_index[leaf]] = base * mix;
        }
    }
    return measure_from_leaf_weights(tree, prices, leaf_weights);
}

}  // namespace hedgetree
