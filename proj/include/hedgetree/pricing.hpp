#pragma once

#include "hedgetree/emm.hpp"
#include "hedgetree/expectation.hpp"
#include "hedgetree/market.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace hedgetree {

// Conditional no-arbitrage price interval of a nonnegative claim at time t.
// All vectors are aligned with atoms_at(t). Openness is derived twice, from
// the attainment flags of the bound computation and from non-degeneracy of
// the interval; the two derivations are asserted equal (their equivalence is
// a theorem the engine checks on every call).
struct PriceInterval {
    std::vector<Rational> lower;
    std::vector<Rational> upper;
    std::vector<bool> degenerate;   // lower == upper
    std::vector<bool> open_lower;   // lower endpoint not an arbitrage-free price
    std::vector<bool> open_upper;
};

PriceInterval price_interval(const EventTree& tree, const PriceProcess& prices,
                             const Claim& claim, int t, int cap = kDefaultVertexCap);

// Attainability decided three independent ways per atom and asserted equal:
// (a) superhedge price == subhedge price, (b) the vertex-recursion bounds
// coincide, (c) an exact linear replication system below the atom is
// solvable. On attainable atoms the superhedging strategy replicates; this is
// re-verified exactly and the strategy/price are returned.
struct AttainabilityResult {
    std::vector<bool> attainable;
    std::vector<Rational> price;   // superhedge price (the unique price where attainable)
    Strategy strategy;             // zero below t and below non-attainable atoms
};

AttainabilityResult is_attainable(const EventTree& tree, const PriceProcess& prices,
                                  const Claim& claim, int t, int cap = kDefaultVertexCap);

// Completeness at time t: every transition polytope at levels >= t is a
// singleton. Cross-checked against attainability of every terminal indicator
// claim at t; disagreement would be an engine bug and throws InternalError.
struct CompletenessReport {
    bool complete = true;
    std::vector<NodeId> violating_nodes;  // non-singleton transition polytopes
};

CompletenessReport is_complete_at(const EventTree& tree, const PriceProcess& prices, int t,
                                  int cap = kDefaultVertexCap);

// Checks the pasting characterization of completeness at time t on sampled
// measures: pasting any two sampled measures at t stays a valid measure, the
// pasted measure's conditional expectations factor through the two inputs
// (tower identity, checked exactly on generated claims), and "pasting at t
// changes nothing" holds for all sampled pairs iff the market is complete at
// t. A deterministically constructed disagreeing pair makes the incomplete
// direction non-flaky. Returns true when every check comes out as the
// completeness verdict predicts.
bool verify_pasting_characterization(const EventTree& tree, const PriceProcess& prices, int t,
                                     const std::vector<std::uint64_t>& seeds,
                                     int cap = kDefaultVertexCap);

enum class PriceLabel {
    Interior,          // an arbitrage-free price (includes the degenerate point)
    BoundaryNotPrice,  // endpoint of a non-degenerate interval: not a price
    Outside,
};

std::vector<PriceLabel> classify_price(const EventTree& tree, const PriceProcess& prices,
                                       const Claim& claim, int t,
                                       const std::vector<Rational>& candidate,
                                       int cap = kDefaultVertexCap);

// Splits H into H_A + H_B where H_A lives on the atoms with a unique price
// (attainable part) and H_B on the rest. Asserts exactly: H_A is attainable
// on every atom, and price_interval(H_B) is degenerate exactly where
// price_interval(H) is.
std::pair<Claim, Claim> decompose_claim(const EventTree& tree, const PriceProcess& prices,
                                        const Claim& claim, int t, int cap = kDefaultVertexCap);

// Realizes the interior point lower + lambda (upper - lower) of the price
// interval as a conditional expectation under a strictly positive martingale
// measure, built by bracketing the target with two sampled measures and
// mixing them with F_t-measurable weights. lambda is per atom and must lie
// strictly between 0 and 1 on non-degenerate atoms; on degenerate atoms it is
// irrelevant (the unique price is returned). The witness measure is returned
// and E_witness[H | F_t] == price is asserted exactly.
struct IntervalPoint {
    std::vector<Rational> price;
    Measure witness;
};

IntervalPoint interval_membership(const EventTree& tree, const PriceProcess& prices,
                                  const Claim& claim, int t,
                                  const std::vector<Rational>& lambda,
                                  int cap = kDefaultVertexCap);

}  // namespace hedgetree
