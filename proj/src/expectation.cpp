#include "hedgetree/expectation.hpp"

#include "hedgetree/errors.hpp"
#include "hedgetree/lp.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace hedgetree {

std::pair<Rational, std::vector<Rational>> superhedge_step(const EventTree& tree,
                                                           const PriceProcess& prices,
                                                           NodeId node,
                                                           const std::vector<Rational>& child_values) {
    const auto& kids = tree.children[node];
    if (kids.empty()) throw std::invalid_argument("superhedge_step requires an internal node");
    if (child_values.size() != kids.size()) {
        throw std::invalid_argument("one value per child required");
    }
    const int d = prices.assets;
    LinearProgram lp;
    lp.objective.assign(d + 1, Rational(0));
    lp.objective[0] = 1;
    for (std::size_t i = 0; i < kids.size(); ++i) {
        std::vector<Rational> row(d + 1, Rational(0));
        row[0] = 1;
        for (int a = 0; a < d; ++a) {
            row[a + 1] = prices.value[kids[i]][a] - prices.value[node][a];
        }
        lp.ineq_lhs.push_back(std::move(row));
        lp.ineq_rhs.push_back(child_values[i]);
    }
    LpOutcome outcome = solve(lp);
    if (outcome.status == LpStatus::Unbounded) {
        throw Error(ErrorCode::Unbounded,
                    "one-step hedge at '" + tree.label[node] + "' is unbounded (arbitrage)");
    }
    if (outcome.status != LpStatus::Optimal) {
        throw InternalError("one-step hedge reported infeasible");
    }
    std::vector<Rational> xi(outcome.primal.begin() + 1, outcome.primal.end());
    return {outcome.primal[0], std::move(xi)};
}

HedgeProcess superhedge_process(const EventTree& tree, const PriceProcess& prices,
                                const Claim& claim) {
    if (claim.payoff.size() != tree.leaves.size()) {
        throw std::invalid_argument("claim payoff size mismatch");
    }
    HedgeProcess out;
    out.value.assign(tree.num_nodes(), Rational(0));
    out.strategy.xi.resize(tree.num_nodes());
    for (NodeId leaf : tree.leaves) out.value[leaf] = claim.payoff[tree.leaf_index[leaf]];
    for (NodeId n = tree.num_nodes() - 1; n >= 0; --n) {
        if (tree.is_leaf(n)) continue;
        std::vector<Rational> child_values;
        child_values.reserve(tree.children[n].size());
        for (NodeId c : tree.children[n]) child_values.push_back(out.value[c]);
        auto [h, xi] = superhedge_step(tree, prices, n, child_values);
        out.value[n] = h;
        out.strategy.xi[n] = std::move(xi);
    }
    return out;
}

namespace {

void verify_hedge(const EventTree& tree, const PriceProcess& prices, const Claim& claim, int t,
                  const HedgeResult& result) {
    const auto atoms = tree.atoms_at(t);
    const Claim gain = gains(tree, prices, result.strategy, t);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (NodeId leaf : tree.descendants_leaves[atoms[i]]) {
            const int li = tree.leaf_index[leaf];
            const Rational wealth = result.price[i] + gain.payoff[li];
            const bool ok = result.side == HedgeSide::Super ? wealth >= claim.payoff[li]
                                                            : wealth <= claim.payoff[li];
            if (!ok) throw InternalError("hedge fails to dominate the claim");
        }
    }
}

Claim negate_claim(const EventTree& tree, const Claim& claim) {
    std::vector<Rational> payoff;
    payoff.reserve(claim.payoff.size());
    for (const auto& v : claim.payoff) payoff.push_back(-v);
    return make_claim(tree, std::move(payoff));
}

}  // namespace

HedgeResult superhedge(const EventTree& tree, const PriceProcess& prices, const Claim& claim,
                       int t) {
    const auto atoms = tree.atoms_at(t);
    HedgeProcess process = superhedge_process(tree, prices, claim);
    HedgeResult result;
    result.side = HedgeSide::Super;
    for (NodeId atom : atoms) result.price.push_back(process.value[atom]);
    result.strategy = std::move(process.strategy);
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (!tree.is_leaf(n) && tree.level[n] < t) {
            result.strategy.xi[n].assign(prices.assets, Rational(0));
        }
    }
    verify_hedge(tree, prices, claim, t, result);
    return result;
}

HedgeResult subhedge(const EventTree& tree, const PriceProcess& prices, const Claim& claim,
                     int t) {
    HedgeResult flipped = superhedge(tree, prices, negate_claim(tree, claim), t);
    HedgeResult result;
    result.side = HedgeSide::Sub;
    for (const auto& v : flipped.price) result.price.push_back(-v);
    result.strategy.xi.resize(tree.num_nodes());
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        for (const auto& v : flipped.strategy.xi[n]) result.strategy.xi[n].push_back(-v);
    }
    verify_hedge(tree, prices, claim, t, result);
    return result;
}

std::vector<Rational> acceptance_oracle(const EventTree& tree, const PriceProcess& prices,
                                        const Claim& claim, int t) {
    const auto atoms = tree.atoms_at(t);
    const auto internal = tree.internal_from(0);
    const int d = prices.assets;
    std::vector<int> xi_offset(tree.num_nodes(), -1);
    for (std::size_t i = 0; i < internal.size(); ++i) {
        xi_offset[internal[i]] = 2 + static_cast<int>(i) * d;
    }
    const std::size_t nvars = 2 + internal.size() * static_cast<std::size_t>(d);

    std::vector<Rational> out;
    out.reserve(atoms.size());
    for (NodeId atom : atoms) {
        // Variables: [h, h0, xi...]; minimize h subject to
        //   h0 + gains(omega) + h >= claim(omega) on the atom,
        //   h0 + gains(omega) >= 0 off the atom, and h0 <= 0.
        LinearProgram lp;
        lp.objective.assign(nvars, Rational(0));
        lp.objective[0] = 1;
        for (NodeId leaf : tree.leaves) {
            const bool inside = tree.ancestor_at(leaf, t) == atom;
            std::vector<Rational> row(nvars, Rational(0));
            row[0] = inside ? 1 : 0;
            row[1] = 1;
            for (NodeId cur = leaf; tree.parent[cur] != -1; cur = tree.parent[cur]) {
                const NodeId p = tree.parent[cur];
                for (int a = 0; a < d; ++a) {
                    row[xi_offset[p] + a] += prices.value[cur][a] - prices.value[p][a];
                }
            }
            lp.ineq_lhs.push_back(std::move(row));
            lp.ineq_rhs.push_back(inside ? claim.payoff[tree.leaf_index[leaf]] : Rational(0));
        }
        std::vector<Rational> cap(nvars, Rational(0));
        cap[1] = -1;
        lp.ineq_lhs.push_back(std::move(cap));
        lp.ineq_rhs.push_back(Rational(0));

        LpOutcome outcome = solve(lp);
        if (outcome.status == LpStatus::Unbounded) {
            throw Error(ErrorCode::Unbounded,
                        "acceptance program unbounded (arbitrage present)");
        }
        if (outcome.status != LpStatus::Optimal) {
            throw InternalError("acceptance program infeasible");
        }
        out.push_back(outcome.optimum);
    }
    return out;
}

StoppingTime make_stopping_time(const EventTree& tree, std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    std::vector<int> covered(tree.leaves.size(), 0);
    for (NodeId n : nodes) {
        if (n < 0 || n >= tree.num_nodes()) {
            throw Error(ErrorCode::NotAStoppingTime, "unknown node id");
        }
        for (NodeId leaf : tree.descendants_leaves[n]) covered[tree.leaf_index[leaf]] += 1;
    }
    for (std::size_t i = 0; i < covered.size(); ++i) {
        if (covered[i] != 1) {
            throw Error(ErrorCode::NotAStoppingTime,
                        covered[i] == 0 ? "stopping nodes miss a scenario"
                                        : "stopping nodes overlap");
        }
    }
    return StoppingTime{std::move(nodes)};
}

bool stopping_time_leq(const EventTree& tree, const StoppingTime& sigma, const StoppingTime& tau) {
    std::vector<int> tau_level(tree.leaves.size());
    for (NodeId n : tau.nodes) {
        for (NodeId leaf : tree.descendants_leaves[n]) {
            tau_level[tree.leaf_index[leaf]] = tree.level[n];
        }
    }
    for (NodeId n : sigma.nodes) {
        for (NodeId leaf : tree.descendants_leaves[n]) {
            if (tree.level[n] > tau_level[tree.leaf_index[leaf]]) return false;
        }
    }
    return true;
}

std::vector<Rational> stopping_time_expectation(const EventTree& tree, const PriceProcess& prices,
                                                const Claim& claim, const StoppingTime& tau) {
    HedgeProcess process = superhedge_process(tree, prices, claim);
    std::vector<Rational> out;
    out.reserve(tau.nodes.size());
    for (NodeId n : tau.nodes) out.push_back(process.value[n]);
    return out;
}

Claim claim_from_stopping_values(const EventTree& tree, const StoppingTime& tau,
                                 const std::vector<Rational>& values) {
    if (values.size() != tau.nodes.size()) {
        throw std::invalid_argument("one value per stopping node required");
    }
    std::vector<Rational> payoff(tree.leaves.size(), Rational(0));
    for (std::size_t i = 0; i < tau.nodes.size(); ++i) {
        for (NodeId leaf : tree.descendants_leaves[tau.nodes[i]]) {
            payoff[tree.leaf_index[leaf]] = values[i];
        }
    }
    return make_claim(tree, std::move(payoff));
}

namespace {

struct AxiomContext {
    const EventTree& tree;
    const PriceProcess& prices;
    int t;
    std::vector<NodeId> atoms;
    Evaluator ev;
    std::vector<Claim> claims;            // general samples
    std::vector<Claim> nonneg;            // nonnegative samples
    std::vector<std::vector<Rational>> measurable;         // per-atom values
    std::vector<std::vector<Rational>> nonneg_measurable;  // per-atom values >= 0
    std::vector<std::vector<bool>> atom_masks;
};

Claim combine(const EventTree& tree, const Claim& a, const Claim& b, int sign_b) {
    std::vector<Rational> payoff(a.payoff.size());
    for (std::size_t i = 0; i < payoff.size(); ++i) {
        payoff[i] = a.payoff[i] + Rational(sign_b) * b.payoff[i];
    }
    return make_claim(tree, std::move(payoff));
}

Claim mask_claim(const AxiomContext& cx, const Claim& a, const std::vector<bool>& mask) {
    std::vector<Rational> payoff(a.payoff.size(), Rational(0));
    for (std::size_t i = 0; i < cx.atoms.size(); ++i) {
        if (!mask[i]) continue;
        for (NodeId leaf : cx.tree.descendants_leaves[cx.atoms[i]]) {
            payoff[cx.tree.leaf_index[leaf]] = a.payoff[cx.tree.leaf_index[leaf]];
        }
    }
    return make_claim(cx.tree, std::move(payoff));
}

Claim scale_claim(const AxiomContext& cx, const Claim& a, const std::vector<Rational>& factors) {
    std::vector<Rational> payoff = a.payoff;
    for (std::size_t i = 0; i < cx.atoms.size(); ++i) {
        for (NodeId leaf : cx.tree.descendants_leaves[cx.atoms[i]]) {
            payoff[cx.tree.leaf_index[leaf]] *= factors[i];
        }
    }
    return make_claim(cx.tree, std::move(payoff));
}

AxiomCounterexample make_cx(std::vector<Claim> claims, NodeId atom,
                            std::vector<Rational> values, std::string note) {
    AxiomCounterexample c;
    c.claims = std::move(claims);
    c.atom = atom;
    c.values = std::move(values);
    c.note = std::move(note);
    return c;
}

void check_monotonicity(const AxiomContext& cx, AxiomReport& report) {
    for (std::size_t i = 0; i < cx.claims.size() && report.holds; ++i) {
        const Claim& low = cx.claims[i];
        const Claim& bump = cx.nonneg[i % cx.nonneg.size()];
        const Claim high = combine(cx.tree, low, bump, 1);
        const auto vl = cx.ev(low, cx.t);
        const auto vh = cx.ev(high, cx.t);
        for (std::size_t a = 0; a < cx.atoms.size(); ++a) {
            if (vl[a] > vh[a]) {
                report.holds = false;
                report.counterexample = make_cx({low, high}, cx.atoms[a], {vl[a], vh[a]},
                                                "value decreased under a pointwise increase");
                break;
            }
        }
    }
}

void check_measurable_preservation(const AxiomContext& cx, AxiomReport& report) {
    for (const auto& values : cx.measurable) {
        const Claim flat = claim_from_atom_values(cx.tree, cx.t, values);
        const auto got = cx.ev(flat, cx.t);
        for (std::size_t a = 0; a < cx.atoms.size(); ++a) {
            if (got[a] != values[a]) {
                report.holds = false;
                report.counterexample = make_cx({flat}, cx.atoms[a], {values[a], got[a]},
                                                "measurable claim not returned verbatim");
                return;
            }
        }
    }
}

void check_translation_invariance(const AxiomContext& cx, AxiomReport& report) {
    for (std::size_t i = 0; i < cx.claims.size() && report.holds; ++i) {
        const auto& shift = cx.measurable[i % cx.measurable.size()];
        const Claim shifted =
            combine(cx.tree, cx.claims[i], claim_from_atom_values(cx.tree, cx.t, shift), 1);
        const auto base = cx.ev(cx.claims[i], cx.t);
        const auto got = cx.ev(shifted, cx.t);
        for (std::size_t a = 0; a < cx.atoms.size(); ++a) {
            if (got[a] != base[a] + shift[a]) {
                report.holds = false;
                report.counterexample =
                    make_cx({cx.claims[i], shifted}, cx.atoms[a], {base[a], shift[a], got[a]},
                            "measurable shift not passed through additively");
                break;
            }
        }
    }
}

void check_locality(const AxiomContext& cx, AxiomReport& report) {
    for (std::size_t i = 0; i < cx.claims.size() && report.holds; ++i) {
        const auto& mask = cx.atom_masks[i % cx.atom_masks.size()];
        const Claim masked = mask_claim(cx, cx.claims[i], mask);
        const auto base = cx.ev(cx.claims[i], cx.t);
        const auto got = cx.ev(masked, cx.t);
        for (std::size_t a = 0; a < cx.atoms.size(); ++a) {
            const Rational want = mask[a] ? base[a] : Rational(0);
            if (got[a] != want) {
                report.holds = false;
                report.counterexample = make_cx({cx.claims[i], masked}, cx.atoms[a],
                                                {base[a], got[a]}, "restriction leaked across atoms");
                break;
            }
        }
    }
}

void check_positive_homogeneity(const AxiomContext& cx, AxiomReport& report) {
    for (std::size_t i = 0; i < cx.claims.size() && report.holds; ++i) {
        const auto& factors = cx.nonneg_measurable[i % cx.nonneg_measurable.size()];
        const Claim scaled = scale_claim(cx, cx.claims[i], factors);
        const auto base = cx.ev(cx.claims[i], cx.t);
        const auto got = cx.ev(scaled, cx.t);
        for (std::size_t a = 0; a < cx.atoms.size(); ++a) {
            if (got[a] != factors[a] * base[a]) {
                report.holds = false;
                report.counterexample =
                    make_cx({cx.claims[i], scaled}, cx.atoms[a], {factors[a], base[a], got[a]},
                            "nonnegative measurable factor not pulled out");
                break;
            }
        }
    }
}

void check_subadditivity(const AxiomContext& cx, AxiomReport& report) {
    for (std::size_t i = 0; i + 1 < cx.claims.size() && report.holds; ++i) {
        const Claim& f = cx.claims[i];
        const Claim& g = cx.claims[i + 1];
        const Claim sum = combine(cx.tree, f, g, 1);
        const auto vf = cx.ev(f, cx.t);
        const auto vg = cx.ev(g, cx.t);
        const auto vs = cx.ev(sum, cx.t);
        for (std::size_t a = 0; a < cx.atoms.size(); ++a) {
            if (vs[a] > vf[a] + vg[a]) {
                report.holds = false;
                report.counterexample = make_cx({f, g, sum}, cx.atoms[a], {vf[a], vg[a], vs[a]},
                                                "value of a sum exceeds the sum of values");
                break;
            }
        }
    }
}

void check_sensitivity(const AxiomContext& cx, AxiomReport& report) {
    std::vector<Claim> probes = cx.nonneg;
    for (std::size_t li = 0; li < cx.tree.leaves.size(); ++li) {
        std::vector<Rational> payoff(cx.tree.leaves.size(), Rational(0));
        payoff[li] = 1;
        probes.push_back(make_claim(cx.tree, std::move(payoff)));
    }
    for (const Claim& h : probes) {
        const auto got = cx.ev(h, cx.t);
        for (std::size_t a = 0; a < cx.atoms.size(); ++a) {
            if (got[a] != 0) continue;
            for (NodeId leaf : cx.tree.descendants_leaves[cx.atoms[a]]) {
                if (h.payoff[cx.tree.leaf_index[leaf]] != 0) {
                    report.holds = false;
                    report.counterexample =
                        make_cx({h}, cx.atoms[a], {got[a]},
                                "zero value on an atom carrying positive payoff");
                    return;
                }
            }
        }
    }
}

void check_super_dominates_sub(const AxiomContext& cx, AxiomReport& report) {
    for (const Claim& h : cx.claims) {
        const auto upper = cx.ev(h, cx.t);
        const auto flipped = cx.ev(negate_claim(cx.tree, h), cx.t);
        for (std::size_t a = 0; a < cx.atoms.size(); ++a) {
            if (-flipped[a] > upper[a]) {
                report.holds = false;
                report.counterexample = make_cx({h}, cx.atoms[a], {-flipped[a], upper[a]},
                                                "lower value exceeds upper value");
                return;
            }
        }
    }
}

void check_consistency(const AxiomContext& cx, AxiomReport& report) {
    for (const Claim& h : cx.claims) {
        const auto at_t = cx.ev(h, cx.t);
        const Claim flattened = claim_from_atom_values(cx.tree, cx.t, at_t);
        for (int s = 0; s <= cx.t && report.holds; ++s) {
            const auto direct = cx.ev(h, s);
            const auto nested = cx.ev(flattened, s);
            const auto atoms_s = cx.tree.atoms_at(s);
            for (std::size_t a = 0; a < atoms_s.size(); ++a) {
                if (direct[a] != nested[a]) {
                    report.holds = false;
                    report.counterexample =
                        make_cx({h, flattened}, atoms_s[a], {direct[a], nested[a]},
                                "tower property fails at time " + std::to_string(s));
                    break;
                }
            }
        }
        if (!report.holds) return;
    }
}

void check_acceptance_monotonicity(const AxiomContext& cx, AxiomReport& report) {
    for (const Claim& h : cx.claims) {
        const auto at_t = cx.ev(h, cx.t);
        const Claim centered =
            combine(cx.tree, h, claim_from_atom_values(cx.tree, cx.t, at_t), -1);
        for (int s = 0; s <= cx.t && report.holds; ++s) {
            const auto vals = cx.ev(centered, s);
            const auto atoms_s = cx.tree.atoms_at(s);
            for (std::size_t a = 0; a < atoms_s.size(); ++a) {
                if (vals[a] > 0) {
                    report.holds = false;
                    report.counterexample =
                        make_cx({h, centered}, atoms_s[a], {vals[a]},
                                "claim accepted at time " + std::to_string(cx.t) +
                                    " but rejected at time " + std::to_string(s));
                    break;
                }
            }
        }
        if (!report.holds) return;
    }
}

}  // namespace

std::vector<AxiomReport> check_axioms(const EventTree& tree, const PriceProcess& prices, int t,
                                      const std::vector<Claim>& extra_claims, int count,
                                      std::uint64_t seed, Evaluator evaluator) {
    const auto atoms = tree.atoms_at(t);
    AxiomContext cx{tree, prices, t, atoms, std::move(evaluator), {}, {}, {}, {}, {}};
    if (!cx.ev) {
        cx.ev = [&tree, &prices](const Claim& claim, int time) {
            return superhedge(tree, prices, claim, time).price;
        };
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-8, 8);
    std::uniform_int_distribution<int> den(1, 4);
    std::uniform_int_distribution<int> small(0, 4);
    std::uniform_int_distribution<int> coin(0, 1);

    cx.claims = extra_claims;
    const int generated = std::max(count, 4);
    for (int i = 0; i < generated; ++i) {
        std::vector<Rational> payoff;
        payoff.reserve(tree.leaves.size());
        for (std::size_t j = 0; j < tree.leaves.size(); ++j) {
            payoff.push_back(Rational(num(rng)) / Rational(den(rng)));
        }
        cx.claims.push_back(make_claim(tree, std::move(payoff)));
    }
    for (const Claim& c : cx.claims) {
        std::vector<Rational> payoff;
        payoff.reserve(c.payoff.size());
        for (const auto& v : c.payoff) payoff.push_back(v < 0 ? -v : v);
        cx.nonneg.push_back(make_claim(tree, std::move(payoff)));
    }
    for (int i = 0; i < 6; ++i) {
        std::vector<Rational> values, nonneg_values;
        std::vector<bool> mask;
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            values.push_back(Rational(num(rng)) / Rational(den(rng)));
            nonneg_values.push_back(Rational(small(rng)));
            mask.push_back(coin(rng) == 1);
        }
        cx.measurable.push_back(std::move(values));
        cx.nonneg_measurable.push_back(std::move(nonneg_values));
        cx.atom_masks.push_back(std::move(mask));
    }

    const std::vector<std::pair<std::string, void (*)(const AxiomContext&, AxiomReport&)>> checks = {
        {"monotonicity", check_monotonicity},
        {"measurable-preservation", check_measurable_preservation},
        {"translation-invariance", check_translation_invariance},
        {"locality", check_locality},
        {"positive-homogeneity", check_positive_homogeneity},
        {"subadditivity", check_subadditivity},
        {"sensitivity", check_sensitivity},
        {"super-dominates-sub", check_super_dominates_sub},
        {"consistency", check_consistency},
        {"acceptance-monotonicity", check_acceptance_monotonicity},
    };

    std::vector<AxiomReport> reports;
    reports.reserve(checks.size());
    for (const auto& [name, fn] : checks) {
        AxiomReport report;
        report.axiom = name;
        fn(cx, report);
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace hedgetree
