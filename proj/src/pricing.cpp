#include "hedgetree/pricing.hpp"

#include "hedgetree/errors.hpp"
#include "hedgetree/lp.hpp"

#include <stdexcept>

namespace hedgetree {

namespace {

void require_arbitrage_free(const EventTree& tree, const PriceProcess& prices) {
    ArbitrageCheck check = check_no_arbitrage(tree, prices);
    if (!check.arbitrage_free) {
        throw Error(ErrorCode::ArbitrageDetected,
                    "one-step arbitrage at node '" + tree.label[check.violating_node] + "'");
    }
}

void require_nonnegative(const Claim& claim) {
    if (!claim.nonnegative) {
        throw Error(ErrorCode::NegativeClaim, "operation requires a nonnegative claim");
    }
}

// Exact solvability of the replication system below `atom`: one free capital
// variable plus one holdings vector per internal node below the atom, one
// equality per leaf.
bool replication_system_solvable(const EventTree& tree, const PriceProcess& prices,
                                 const Claim& claim, NodeId atom) {
    const int d = prices.assets;
    std::vector<int> offset(tree.num_nodes(), -1);
    int nvars = 1;
    for (NodeId n = atom; n < tree.num_nodes(); ++n) {
        if (tree.is_leaf(n) || tree.level[n] < tree.level[atom]) continue;
        if (tree.ancestor_at(n, tree.level[atom]) != atom) continue;
        offset[n] = nvars;
        nvars += d;
    }
    LinearProgram lp;
    lp.objective.assign(nvars, Rational(0));
    for (NodeId leaf : tree.descendants_leaves[atom]) {
        std::vector<Rational> row(nvars, Rational(0));
        row[0] = 1;
        for (NodeId cur = leaf; cur != atom; cur = tree.parent[cur]) {
            const NodeId p = tree.parent[cur];
            for (int a = 0; a < d; ++a) {
                row[offset[p] + a] += prices.value[cur][a] - prices.value[p][a];
            }
        }
        lp.eq_lhs.push_back(std::move(row));
        lp.eq_rhs.push_back(claim.payoff[tree.leaf_index[leaf]]);
    }
    return solve(lp).status == LpStatus::Optimal;
}

}  // namespace

PriceInterval price_interval(const EventTree& tree, const PriceProcess& prices,
                             const Claim& claim, int t, int cap) {
    require_nonnegative(claim);
    require_arbitrage_free(tree, prices);
    const PriceBound upper = upper_price(tree, prices, claim, t, cap);
    const PriceBound lower = lower_price(tree, prices, claim, t, cap);

    PriceInterval interval;
    interval.lower = lower.value;
    interval.upper = upper.value;
    for (std::size_t i = 0; i < upper.value.size(); ++i) {
        const bool degenerate = lower.value[i] == upper.value[i];
        const bool open_upper = !upper.attained[i];
        const bool open_lower = !lower.attained[i];
        if (open_upper != !degenerate || open_lower != !degenerate) {
            throw InternalError("interval openness disagrees with attainment flags");
        }
        interval.degenerate.push_back(degenerate);
        interval.open_lower.push_back(open_lower);
        interval.open_upper.push_back(open_upper);
    }
    return interval;
}

AttainabilityResult is_attainable(const EventTree& tree, const PriceProcess& prices,
                                  const Claim& claim, int t, int cap) {
    require_arbitrage_free(tree, prices);
    const auto atoms = tree.atoms_at(t);
    const HedgeResult upper_hedge = superhedge(tree, prices, claim, t);
    const HedgeResult lower_hedge = subhedge(tree, prices, claim, t);
    const PriceBound upper = upper_price(tree, prices, claim, t, cap);
    const PriceBound lower = lower_price(tree, prices, claim, t, cap);

    AttainabilityResult result;
    result.strategy = upper_hedge.strategy;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const bool by_hedges = upper_hedge.price[i] == lower_hedge.price[i];
        const bool by_vertices = upper.value[i] == lower.value[i];
        const bool by_system = replication_system_solvable(tree, prices, claim, atoms[i]);
        if (by_hedges != by_vertices || by_hedges != by_system) {
            throw InternalError("attainability routes disagree");
        }
        result.attainable.push_back(by_hedges);
        result.price.push_back(upper_hedge.price[i]);
    }

    // On attainable atoms the superhedge must replicate exactly; elsewhere
    // zero out the strategy, it carries no meaning.
    const Claim gain = gains(tree, prices, result.strategy, t);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (NodeId leaf : tree.descendants_leaves[atoms[i]]) {
            const int li = tree.leaf_index[leaf];
            if (result.attainable[i]) {
                if (result.price[i] + gain.payoff[li] != claim.payoff[li]) {
                    throw InternalError("superhedge fails to replicate an attainable claim");
                }
            }
        }
        if (!result.attainable[i]) {
            for (NodeId n = atoms[i]; n < tree.num_nodes(); ++n) {
                if (!tree.is_leaf(n) && tree.level[n] >= t &&
                    tree.ancestor_at(n, t) == atoms[i]) {
                    result.strategy.xi[n].assign(prices.assets, Rational(0));
                }
            }
        }
    }
    return result;
}

CompletenessReport is_complete_at(const EventTree& tree, const PriceProcess& prices, int t,
                                  int cap) {
    require_arbitrage_free(tree, prices);
    tree.atoms_at(t);  // validates t
    CompletenessReport report;
    for (NodeId n : tree.internal_from(t)) {
        if (transition_vertices(tree, prices, n, cap).size() > 1) {
            report.complete = false;
            report.violating_nodes.push_back(n);
        }
    }

    bool all_indicators = true;
    for (std::size_t li = 0; li < tree.leaves.size() && all_indicators; ++li) {
        std::vector<Rational> payoff(tree.leaves.size(), Rational(0));
        payoff[li] = 1;
        const auto res = is_attainable(tree, prices, make_claim(tree, std::move(payoff)), t, cap);
        for (bool a : res.attainable) {
            if (!a) {
                all_indicators = false;
                break;
            }
        }
    }
    if (all_indicators != report.complete) {
        throw InternalError("completeness verdicts disagree (structure vs indicators)");
    }
    return report;
}

bool verify_pasting_characterization(const EventTree& tree, const PriceProcess& prices, int t,
                                     const std::vector<std::uint64_t>& seeds, int cap) {
    require_arbitrage_free(tree, prices);
    const bool complete = is_complete_at(tree, prices, t, cap).complete;

    std::vector<Measure> pool;
    for (std::uint64_t seed : seeds) pool.push_back(sample_emm(tree, prices, seed, cap));

    // Deterministic pair that provably disagrees at some level >= t node
    // whenever one exists: tilt the vertex mixture toward the first vertex in
    // one measure and toward the last in the other.
    for (int which = 0; which < 2; ++which) {
        std::vector<std::vector<Rational>> transitions(tree.num_nodes());
        for (NodeId n = 0; n < tree.num_nodes(); ++n) {
            if (tree.is_leaf(n)) continue;
            const auto verts = transition_vertices(tree, prices, n, cap);
            const std::size_t k = verts.size();
            std::vector<Rational> q(verts[0].size(), Rational(0));
            Rational total = 0;
            for (std::size_t i = 0; i < k; ++i) {
                const bool favored = which == 0 ? i == 0 : i == k - 1;
                const Rational w = favored ? Rational(k + 1) : Rational(1);
                for (std::size_t c = 0; c < q.size(); ++c) q[c] += w * verts[i][c];
                total += w;
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
        pool.push_back(measure_from_transitions(tree, prices, std::move(transitions)));
    }

    // Tower identity of pasting, checked exactly on a deterministic claim
    // family: E_paste[H | F_s] = E_before[E_after[H | F_(s max t)] | F_s].
    std::vector<Claim> probes;
    for (std::size_t li = 0; li < tree.leaves.size(); ++li) {
        std::vector<Rational> payoff(tree.leaves.size(), Rational(0));
        payoff[li] = Rational(static_cast<int>(li) + 1);
        probes.push_back(make_claim(tree, std::move(payoff)));
    }

    bool all_pairs_fixed = true;
    for (const Measure& a : pool) {
        for (const Measure& b : pool) {
            const Measure pasted = paste(tree, prices, a, b, t);
            if (!same_measure(pasted, a)) all_pairs_fixed = false;
            for (const Claim& h : probes) {
                for (int s = 0; s <= tree.horizon; ++s) {
                    const int mid = std::max(s, t);
                    const auto inner = conditional_expectation(tree, b, h, mid);
                    const Claim inner_claim = claim_from_atom_values(tree, mid, inner);
                    const auto nested = conditional_expectation(tree, a, inner_claim, s);
                    const auto direct = conditional_expectation(tree, pasted, h, s);
                    if (nested != direct) return false;
                }
            }
        }
    }
    return all_pairs_fixed == complete;
}

std::vector<PriceLabel> classify_price(const EventTree& tree, const PriceProcess& prices,
                                       const Claim& claim, int t,
                                       const std::vector<Rational>& candidate, int cap) {
    const PriceInterval interval = price_interval(tree, prices, claim, t, cap);
    if (candidate.size() != interval.lower.size()) {
        throw std::invalid_argument("one candidate price per time-t atom required");
    }
    std::vector<PriceLabel> labels;
    labels.reserve(candidate.size());
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        const Rational& pi = candidate[i];
        if (interval.degenerate[i]) {
            labels.push_back(pi == interval.lower[i] ? PriceLabel::Interior : PriceLabel::Outside);
        } else if (pi > interval.lower[i] && pi < interval.upper[i]) {
            labels.push_back(PriceLabel::Interior);
        } else if (pi == interval.lower[i] || pi == interval.upper[i]) {
            labels.push_back(PriceLabel::BoundaryNotPrice);
        } else {
            labels.push_back(PriceLabel::Outside);
        }
    }
    return labels;
}

std::pair<Claim, Claim> decompose_claim(const EventTree& tree, const PriceProcess& prices,
                                        const Claim& claim, int t, int cap) {
    const PriceInterval interval = price_interval(tree, prices, claim, t, cap);
    const auto atoms = tree.atoms_at(t);
    std::vector<Rational> unique_part(tree.leaves.size(), Rational(0));
    std::vector<Rational> open_part(tree.leaves.size(), Rational(0));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (NodeId leaf : tree.descendants_leaves[atoms[i]]) {
            const int li = tree.leaf_index[leaf];
            (interval.degenerate[i] ? unique_part : open_part)[li] = claim.payoff[li];
        }
    }
    Claim attainable_part = make_claim(tree, std::move(unique_part));
    Claim residual_part = make_claim(tree, std::move(open_part));

    const auto res = is_attainable(tree, prices, attainable_part, t, cap);
    for (bool a : res.attainable) {
        if (!a) throw InternalError("degenerate part of the decomposition is not attainable");
    }
    const PriceInterval residual = price_interval(tree, prices, residual_part, t, cap);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (residual.degenerate[i] != interval.degenerate[i]) {
            throw InternalError("residual part changes the degeneracy pattern");
        }
    }
    return {std::move(attainable_part), std::move(residual_part)};
}

IntervalPoint interval_membership(const EventTree& tree, const PriceProcess& prices,
                                  const Claim& claim, int t,
                                  const std::vector<Rational>& lambda, int cap) {
    const PriceInterval interval = price_interval(tree, prices, claim, t, cap);
    const auto atoms = tree.atoms_at(t);
    if (lambda.size() != atoms.size()) {
        throw std::invalid_argument("one lambda per time-t atom required");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!interval.degenerate[i] && (lambda[i] <= 0 || lambda[i] >= 1)) {
            throw std::invalid_argument("lambda must lie strictly between 0 and 1");
        }
    }

    std::vector<Rational> target;
    target.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        target.push_back(interval.degenerate[i]
                             ? interval.lower[i]
                             : interval.lower[i] +
                                   lambda[i] * (interval.upper[i] - interval.lower[i]));
    }

    // Per-node building blocks: an interior transition (uniform vertex
    // average) and, for each side, a vertex attaining the one-step optimum of
    // the corresponding backward recursion.
    AdaptedProcess up_value(tree.num_nodes(), Rational(0));
    AdaptedProcess low_value(tree.num_nodes(), Rational(0));
    for (NodeId leaf : tree.leaves) {
        up_value[leaf] = low_value[leaf] = claim.payoff[tree.leaf_index[leaf]];
    }
    std::vector<std::vector<Rational>> interior(tree.num_nodes());
    std::vector<std::vector<Rational>> up_vertex(tree.num_nodes());
    std::vector<std::vector<Rational>> low_vertex(tree.num_nodes());
    for (NodeId n = tree.num_nodes() - 1; n >= 0; --n) {
        if (tree.is_leaf(n)) continue;
        const auto& kids = tree.children[n];
        const auto verts = transition_vertices(tree, prices, n, cap);
        std::vector<Rational> mix(kids.size(), Rational(0));
        for (const auto& v : verts) {
            for (std::size_t c = 0; c < mix.size(); ++c) mix[c] += v[c];
        }
        for (auto& p : mix) {
            p /= Rational(static_cast<int>(verts.size()));
            if (p == 0) throw InternalError("interior mixture hit the boundary");
        }
        interior[n] = std::move(mix);

        for (int side = 0; side < 2; ++side) {
            const AdaptedProcess& value = side == 0 ? up_value : low_value;
            std::optional<Rational> best;
            std::size_t best_index = 0;
            for (std::size_t vi = 0; vi < verts.size(); ++vi) {
                Rational acc = 0;
                for (std::size_t c = 0; c < kids.size(); ++c) acc += verts[vi][c] * value[kids[c]];
                if (!best || (side == 0 ? acc > *best : acc < *best)) {
                    best = acc;
                    best_index = vi;
                }
            }
            (side == 0 ? up_value : low_value)[n] = *best;
            (side == 0 ? up_vertex : low_vertex)[n] = verts[best_index];
        }
    }

    auto tilted = [&](int side, const Rational& eps) {
        std::vector<std::vector<Rational>> transitions(tree.num_nodes());
        for (NodeId n = 0; n < tree.num_nodes(); ++n) {
            if (tree.is_leaf(n)) continue;
            if (tree.level[n] < t) {
                transitions[n] = interior[n];
                continue;
            }
            const auto& opt = side == 0 ? up_vertex[n] : low_vertex[n];
            std::vector<Rational> q(opt.size());
            for (std::size_t c = 0; c < q.size(); ++c) {
                q[c] = (Rational(1) - eps) * opt[c] + eps * interior[n][c];
            }
            transitions[n] = std::move(q);
        }
        return measure_from_transitions(tree, prices, std::move(transitions));
    };

    auto bracket = [&](int side) {
        Rational eps(1, 2);
        for (;;) {
            Measure m = tilted(side, eps);
            const auto values = conditional_expectation(tree, m, claim, t);
            bool ok = true;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (interval.degenerate[i]) continue;
                if (side == 0 ? values[i] <= target[i] : values[i] >= target[i]) {
                    ok = false;
                    break;
                }
            }
            if (ok) return std::make_pair(std::move(m), values);
            eps /= 2;
        }
    };

    auto [high, high_values] = bracket(0);
    auto [low, low_values] = bracket(1);

    std::vector<Rational> mu;
    mu.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (interval.degenerate[i]) {
            mu.push_back(Rational(1, 2));
        } else {
            mu.push_back((target[i] - low_values[i]) / (high_values[i] - low_values[i]));
        }
    }
    std::vector<Rational> mu_rest;
    mu_rest.reserve(mu.size());
    for (const auto& m : mu) mu_rest.push_back(Rational(1) - m);

    IntervalPoint point{std::move(target),
                        convex_combine(tree, prices, {high, low}, {mu, mu_rest}, t)};
    const auto realized = conditional_expectation(tree, point.witness, claim, t);
    if (realized != point.price) {
        throw InternalError("witness measure misses the target price");
    }
    return point;
}

}  // namespace hedgetree
