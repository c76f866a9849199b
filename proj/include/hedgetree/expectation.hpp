#pragma once

#include "hedgetree/market.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hedgetree {

enum class HedgeSide { Super, Sub };

// Price and strategy of a one-sided hedge started at time t. price is aligned
// with atoms_at(t); strategy rows below level t are zero. The defining
// inequality (price + gains >= claim for Super, <= for Sub, leafwise) is
// re-verified exactly before the result is returned.
struct HedgeResult {
    HedgeSide side = HedgeSide::Super;
    std::vector<Rational> price;
    Strategy strategy;
};

// Cheapest one-step super-replication at a node: min h over (h, xi) with
// h + xi . (X_c - X_n) >= value_c for every child c. Returns (h, xi).
// Throws Error(Unbounded) when the node admits one-step arbitrage.
std::pair<Rational, std::vector<Rational>> superhedge_step(const EventTree& tree,
                                                           const PriceProcess& prices,
                                                           NodeId node,
                                                           const std::vector<Rational>& child_values);

// Backward superhedge over the whole tree: value at every node, strategy at
// every internal node. The slice at level t is the conditional superhedging
// price E_t(claim).
struct HedgeProcess {
    AdaptedProcess value;
    Strategy strategy;
};

HedgeProcess superhedge_process(const EventTree& tree, const PriceProcess& prices,
                                const Claim& claim);

HedgeResult superhedge(const EventTree& tree, const PriceProcess& prices, const Claim& claim,
                       int t);
HedgeResult subhedge(const EventTree& tree, const PriceProcess& prices, const Claim& claim,
                     int t);

// Acceptance-set characterization, computed without any backward recursion:
// for each time-t atom A, the least h such that some initial capital h0 <= 0
// and strategy from time 0 super-replicate 1_A (claim - h) globally. Equals
// the superhedging price slice; the equality is one of the tested theorems.
std::vector<Rational> acceptance_oracle(const EventTree& tree, const PriceProcess& prices,
                                        const Claim& claim, int t);

// A stopping time as the antichain of nodes where it stops: the leaf sets
// below the nodes partition the sample space. make_stopping_time validates
// and sorts; Error(NotAStoppingTime) otherwise.
struct StoppingTime {
    std::vector<NodeId> nodes;
};

StoppingTime make_stopping_time(const EventTree& tree, std::vector<NodeId> nodes);

// sigma <= tau pointwise.
bool stopping_time_leq(const EventTree& tree, const StoppingTime& sigma, const StoppingTime& tau);

// E_tau(claim): one value per stopping node (the superhedge value there).
std::vector<Rational> stopping_time_expectation(const EventTree& tree, const PriceProcess& prices,
                                                const Claim& claim, const StoppingTime& tau);

// Extends per-stopping-node values to a claim (constant below each node).
Claim claim_from_stopping_values(const EventTree& tree, const StoppingTime& tau,
                                 const std::vector<Rational>& values);

// Pluggable evaluator for the axiom checks: maps (claim, time) to values on
// atoms_at(time). The default evaluates the conditional superhedging price.
// Tests inject corrupted evaluators to show each check detects its axiom's
// violation.
using Evaluator = std::function<std::vector<Rational>(const Claim&, int)>;

struct AxiomCounterexample {
    std::vector<Claim> claims;
    NodeId atom = -1;
    std::vector<Rational> values;
    std::string note;
};

struct AxiomReport {
    std::string axiom;
    bool holds = true;
    std::optional<AxiomCounterexample> counterexample;
};

// Checks, by exact finite enumeration over sampled claims, the defining
// properties of the conditional superhedging functional at time t:
// monotonicity, preservation of measurable claims, translation invariance,
// locality, positive homogeneity, subadditivity, sensitivity, domination of
// the subhedging price, tower consistency across s <= t, and monotonicity of
// acceptance sets. Extra claims may be supplied; `count` more are generated
// from `seed`.
std::vector<AxiomReport> check_axioms(const EventTree& tree, const PriceProcess& prices, int t,
                                      const std::vector<Claim>& extra_claims, int count,
                                      std::uint64_t seed, Evaluator evaluator = {});

}  // namespace hedgetree
