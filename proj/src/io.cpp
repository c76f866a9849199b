#include "hedgetree/io.hpp"

#include "hedgetree/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hedgetree {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

Rational rational_field(const json& value, const std::string& where) {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long long>());
    throw Error(ErrorCode::ParseError,
                where + ": expected a rational string or integer, got " + value.dump());
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw Error(ErrorCode::ParseError, where + ": missing field '" + key + "'");
    }
    return obj.at(key);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

MarketData parse_market(const std::string& text) {
    const json doc = parse_json(text);
    const json& horizon = field(doc, "horizon", "market");
    const json& assets = field(doc, "assets", "market");
    const json& nodes = field(doc, "nodes", "market");
    const json& weights = field(doc, "leaf_weights", "market");
    if (!horizon.is_number_integer() || !assets.is_number_integer()) {
        throw Error(ErrorCode::ParseError, "market: horizon and assets must be integers");
    }
    if (!nodes.is_array() || nodes.empty()) {
        throw Error(ErrorCode::ParseError, "market: nodes must be a nonempty array");
    }
    if (!weights.is_object()) {
        throw Error(ErrorCode::ParseError, "market: leaf_weights must be an object");
    }

    TreeDescription desc;
    desc.horizon = horizon.get<int>();
    const int asset_count = assets.get<int>();
    std::vector<std::vector<Rational>> prices;
    std::map<std::string, int> index_of;
    for (const json& node : nodes) {
        const std::string where = "node #" + std::to_string(desc.parent.size());
        const json& id = field(node, "id", where);
        const json& parent = field(node, "parent", where);
        const json& row = field(node, "prices", where);
        if (!id.is_string()) throw Error(ErrorCode::ParseError, where + ": id must be a string");
        const std::string label = id.get<std::string>();
        if (index_of.count(label)) {
            throw Error(ErrorCode::ParseError, "duplicate node id '" + label + "'");
        }
        int parent_index = -1;
        if (!parent.is_null()) {
            if (!parent.is_string()) {
                throw Error(ErrorCode::ParseError, where + ": parent must be a string or null");
            }
            auto it = index_of.find(parent.get<std::string>());
            if (it == index_of.end()) {
                throw Error(ErrorCode::ParseError,
                            where + ": parent '" + parent.get<std::string>() +
                                "' not defined earlier in the file");
            }
            parent_index = it->second;
        } else if (!desc.parent.empty()) {
            throw Error(ErrorCode::ParseError, "second root '" + label + "'");
        }
        if (!row.is_array() || static_cast<int>(row.size()) != asset_count) {
            throw Error(ErrorCode::ParseError,
                        where + ": prices must list exactly " + std::to_string(asset_count) +
                            " entries");
        }
        std::vector<Rational> price_row;
        for (const json& v : row) price_row.push_back(rational_field(v, where + " prices"));
        index_of[label] = static_cast<int>(desc.parent.size());
        desc.parent.push_back(parent_index);
        desc.labels.push_back(label);
        prices.push_back(std::move(price_row));
    }
    for (const auto& [label, value] : weights.items()) {
        auto it = index_of.find(label);
        if (it == index_of.end()) {
            throw Error(ErrorCode::ParseError, "leaf_weights: unknown node '" + label + "'");
        }
        desc.leaf_weights.emplace_back(it->second, rational_field(value, "leaf_weights"));
    }

    try {
        EventTree tree = build_tree(desc);
        PriceProcess process = make_price_process(tree, asset_count, std::move(prices));
        return MarketData{std::move(tree), std::move(process)};
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

MarketData load_market(const std::string& path) { return parse_market(read_file(path)); }

std::string market_to_json(const MarketData& market) {
    const EventTree& tree = market.tree;
    json nodes = json::array();
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        json row = json::array();
        for (const auto& v : market.prices.value[n]) row.push_back(to_ratio_string(v));
        nodes.push_back({{"id", tree.label[n]},
                         {"parent", n == 0 ? json(nullptr) : json(tree.label[tree.parent[n]])},
                         {"prices", row}});
    }
    json weights = json::object();
    for (NodeId leaf : tree.leaves) {
        weights[tree.label[leaf]] = to_ratio_string(tree.leaf_weight[leaf]);
    }
    return json{{"horizon", tree.horizon},
                {"assets", market.prices.assets},
                {"nodes", nodes},
                {"leaf_weights", weights}}
        .dump(2);
}

namespace {

// Reads {"<outer>": {"node id": rational}} with exactly the given node set.
std::vector<Rational> node_value_map(const MarketData& market, const std::string& text,
                                     const char* outer, const std::vector<NodeId>& required) {
    const json doc = parse_json(text);
    const json& values = field(doc, outer, outer);
    if (!values.is_object()) {
        throw Error(ErrorCode::ParseError, std::string(outer) + " must be an object");
    }
    const EventTree& tree = market.tree;
    std::vector<Rational> out(required.size());
    std::vector<bool> seen(required.size(), false);
    for (const auto& [label, value] : values.items()) {
        const NodeId node = tree.find_label(label);
        std::size_t slot = required.size();
        for (std::size_t i = 0; i < required.size(); ++i) {
            if (required[i] == node) {
                slot = i;
                break;
            }
        }
        if (slot == required.size()) {
            throw Error(ErrorCode::ParseError,
                        std::string(outer) + ": unexpected node '" + label + "'");
        }
        seen[slot] = true;
        out[slot] = rational_field(value, std::string(outer) + " at '" + label + "'");
    }
    for (std::size_t i = 0; i < required.size(); ++i) {
        if (!seen[i]) {
            throw Error(ErrorCode::ParseError, std::string(outer) + ": missing node '" +
                                                   tree.label[required[i]] + "'");
        }
    }
    return out;
}

}  // namespace

Claim parse_claim(const MarketData& market, const std::string& text) {
    return make_claim(market.tree,
                      node_value_map(market, text, "payoffs", market.tree.leaves));
}

Claim load_claim(const MarketData& market, const std::string& path) {
    return parse_claim(market, read_file(path));
}

std::string claim_to_json(const MarketData& market, const Claim& claim) {
    json payoffs = json::object();
    for (NodeId leaf : market.tree.leaves) {
        payoffs[market.tree.label[leaf]] =
            to_ratio_string(claim.payoff[market.tree.leaf_index[leaf]]);
    }
    return json{{"payoffs", payoffs}}.dump(2);
}

AdaptedProcess parse_process(const MarketData& market, const std::string& text) {
    std::vector<NodeId> all(market.tree.num_nodes());
    for (NodeId n = 0; n < market.tree.num_nodes(); ++n) all[n] = n;
    return node_value_map(market, text, "values", all);
}

AdaptedProcess load_process(const MarketData& market, const std::string& path) {
    return parse_process(market, read_file(path));
}

std::string process_to_json(const MarketData& market, const AdaptedProcess& process) {
    json values = json::object();
    for (NodeId n = 0; n < market.tree.num_nodes(); ++n) {
        values[market.tree.label[n]] = to_ratio_string(process[n]);
    }
    return json{{"values", values}}.dump(2);
}

Measure parse_measure(const MarketData& market, const std::string& text) {
    const json doc = parse_json(text);
    const json& transitions = field(doc, "transitions", "measure");
    if (!transitions.is_object()) {
        throw Error(ErrorCode::ParseError, "measure: transitions must be an object");
    }
    const EventTree& tree = market.tree;
    std::vector<std::vector<Rational>> rows(tree.num_nodes());
    std::vector<bool> seen(tree.num_nodes(), false);
    for (const auto& [label, row] : transitions.items()) {
        const NodeId node = tree.find_label(label);
        if (node < 0 || tree.is_leaf(node)) {
            throw Error(ErrorCode::ParseError,
                        "measure: '" + label + "' is not an internal node");
        }
        if (!row.is_array() || row.size() != tree.children[node].size()) {
            throw Error(ErrorCode::ParseError,
                        "measure: transition at '" + label + "' must list one probability per child");
        }
        seen[node] = true;
        for (const json& v : row) {
            rows[node].push_back(rational_field(v, "measure at '" + label + "'"));
        }
    }
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (!tree.is_leaf(n) && !seen[n]) {
            throw Error(ErrorCode::ParseError,
                        "measure: missing transition at '" + tree.label[n] + "'");
        }
    }
    try {
        return measure_from_transitions(tree, market.prices, std::move(rows));
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

std::string measure_to_json(const MarketData& market, const Measure& measure) {
    const EventTree& tree = market.tree;
    json transitions = json::object();
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (tree.is_leaf(n)) continue;
        json row = json::array();
        for (const auto& v : measure.transition[n]) row.push_back(to_ratio_string(v));
        transitions[tree.label[n]] = row;
    }
    json weights = json::object();
    for (std::size_t i = 0; i < tree.leaves.size(); ++i) {
        weights[tree.label[tree.leaves[i]]] = to_ratio_string(measure.leaf_weight[i]);
    }
    return json{{"transitions", transitions}, {"leaf_weights", weights}}.dump(2);
}

}  // namespace hedgetree
