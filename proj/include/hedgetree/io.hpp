#pragma once

#include "hedgetree/emm.hpp"
#include "hedgetree/market.hpp"

#include <string>

namespace hedgetree {

// A market file bundles the tree and the price process. Grammar (JSON):
//   {
//     "horizon": 2,
//     "assets": 1,
//     "nodes": [
//       {"id": "root", "parent": null, "prices": ["1"]},
//       {"id": "u",    "parent": "root", "prices": ["2"]},
//       ...
//     ],
//     "leaf_weights": {"uu": "1/4", ...}
//   }
// Rationals are strings "num" or "num/den" (bare JSON integers also accepted);
// floats are rejected. Nodes are listed parents-first; children keep file
// order. Every malformed-file condition maps to Error(ParseError) except the
// named domain errors (NonUniformDepth, ZeroWeight, WeightSum), which pass
// through unchanged.
struct MarketData {
    EventTree tree;
    PriceProcess prices;
};

MarketData parse_market(const std::string& text);
MarketData load_market(const std::string& path);
std::string market_to_json(const MarketData& market);

// Claim file: {"payoffs": {"leaf id": rational, ...}}, every leaf present.
Claim parse_claim(const MarketData& market, const std::string& text);
Claim load_claim(const MarketData& market, const std::string& path);
std::string claim_to_json(const MarketData& market, const Claim& claim);

// Process file: {"values": {"node id": rational, ...}}, every node present.
AdaptedProcess parse_process(const MarketData& market, const std::string& text);
AdaptedProcess load_process(const MarketData& market, const std::string& path);
std::string process_to_json(const MarketData& market, const AdaptedProcess& process);

// Measure serialization: {"transitions": {"node id": [rational, ...]}, and a
// derived "leaf_weights" object for readability (ignored on input).
Measure parse_measure(const MarketData& market, const std::string& text);
std::string measure_to_json(const MarketData& market, const Measure& measure);

}  // namespace hedgetree
