#pragma once

#include "hedgetree/lp.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hedgetree {

// Parsed command-line options shared by the subcommands.
struct RunConfig {
    std::string market_path;
    std::string claim_path;
    std::string process_path;
    int time = 0;
    bool time_set = false;
    std::uint64_t seed = 1;
    std::uint64_t seed2 = 2;
    int cap = -1;            // -1: fall back to HEDGETREE_VERTEX_CAP or the default
    int claims = 12;
    std::string format = "table";

    int resolved_cap() const;
};

// Runs the CLI on `args` (without the program name), writing to the given
// streams. Exit codes: 0 success, 1 usage error, 2 domain error (bad input,
// arbitrage, not a supermartingale, ...), 3 violated internal invariant,
// 4 property-check failure reported by `check`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hedgetree
