#pragma once

#include "hedgetree/market.hpp"

#include <vector>

namespace hedgetree {

// V is a supermartingale under every martingale measure iff at each internal
// node its value dominates the one-step upper value of its children's values.
struct SupermartingaleReport {
    bool holds = true;
    NodeId violating_node = -1;
    Rational gap;  // one-step upper value minus V at the violating node
};

SupermartingaleReport check_supermartingale(const EventTree& tree, const PriceProcess& prices,
                                            const AdaptedProcess& process);

// Uniform Doob decomposition V = V_0 + (strategy . X) - consumption with
// consumption adapted, nondecreasing along every path, zero at the root.
// The reconstruction identity is re-verified exactly at every node.
struct Decomposition {
    Strategy strategy;
    AdaptedProcess consumption;
};

// Requires V nonnegative (Error(NegativeProcess)), the market arbitrage-free
// (Error(ArbitrageDetected)), and V a supermartingale under every martingale
// measure (Error(NotSupermartingale)).
Decomposition optional_decomposition(const EventTree& tree, const PriceProcess& prices,
                                     const AdaptedProcess& process);

}  // namespace hedgetree
