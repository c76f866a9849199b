#include "hedgetree/decomp.hpp"

#include "hedgetree/emm.hpp"
#include "hedgetree/errors.hpp"
#include "hedgetree/expectation.hpp"

#include <stdexcept>

namespace hedgetree {

namespace {

void check_shape(const EventTree& tree, const AdaptedProcess& process) {
    if (static_cast<int>(process.size()) != tree.num_nodes()) {
        throw std::invalid_argument("process size mismatch");
    }
}

}  // namespace

SupermartingaleReport check_supermartingale(const EventTree& tree, const PriceProcess& prices,
                                            const AdaptedProcess& process) {
    check_shape(tree, process);
    SupermartingaleReport report;
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (tree.is_leaf(n)) continue;
        std::vector<Rational> child_values;
        child_values.reserve(tree.children[n].size());
        for (NodeId c : tree.children[n]) child_values.push_back(process[c]);
        const auto [h, xi] = superhedge_step(tree, prices, n, child_values);
        if (h > process[n]) {
            report.holds = false;
            report.violating_node = n;
            report.gap = h - process[n];
            return report;
        }
    }
    return report;
}

Decomposition optional_decomposition(const EventTree& tree, const PriceProcess& prices,
                                     const AdaptedProcess& process) {
    check_shape(tree, process);
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (process[n] < 0) {
            throw Error(ErrorCode::NegativeProcess,
                        "process is negative at node '" + tree.label[n] + "'");
        }
    }
    {
        const ArbitrageCheck check = check_no_arbitrage(tree, prices);
        if (!check.arbitrage_free) {
            throw Error(ErrorCode::ArbitrageDetected,
                        "one-step arbitrage at node '" + tree.label[check.violating_node] + "'");
        }
    }

    Decomposition out;
    out.strategy.xi.resize(tree.num_nodes());
    out.consumption.assign(tree.num_nodes(), Rational(0));
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (tree.is_leaf(n)) continue;
        const auto& kids = tree.children[n];
        std::vector<Rational> child_values;
        child_values.reserve(kids.size());
        for (NodeId c : kids) child_values.push_back(process[c]);
        auto [h, xi] = superhedge_step(tree, prices, n, child_values);
        if (h > process[n]) {
            throw Error(ErrorCode::NotSupermartingale,
                        "one-step upper value " + to_ratio_string(h) + " exceeds the process (" +
                            to_ratio_string(process[n]) + ") at node '" + tree.label[n] + "'");
        }
        for (NodeId c : kids) {
            Rational gain = 0;
            for (int a = 0; a < prices.assets; ++a) {
                gain += xi[a] * (prices.value[c][a] - prices.value[n][a]);
            }
            const Rational drop = process[n] + gain - process[c];
            if (drop < 0) throw InternalError("consumption increment went negative");
            out.consumption[c] = out.consumption[n] + drop;
        }
        out.strategy.xi[n] = std::move(xi);
    }

    // Reconstruction: V_t = V_0 + gains-to-date - consumption at every node.
    AdaptedProcess wealth(tree.num_nodes(), process[0]);
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        for (NodeId c : tree.children[n]) {
            Rational gain = 0;
            for (int a = 0; a < prices.assets; ++a) {
                gain += out.strategy.xi[n][a] * (prices.value[c][a] - prices.value[n][a]);
            }
            wealth[c] = wealth[n] + gain;
        }
    }
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (wealth[n] - out.consumption[n] != process[n]) {
            throw InternalError("decomposition fails to reconstruct the process");
        }
    }
    return out;
}

}  // namespace hedgetree
