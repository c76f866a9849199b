#include "hedgetree/decomp.hpp"
#include "hedgetree/emm.hpp"
#include "hedgetree/errors.hpp"
#include "hedgetree/expectation.hpp"
#include "hedgetree/io.hpp"
#include "hedgetree/pricing.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace hedgetree;

namespace {

// Every rational crosses the boundary as a canonical "num/den" string, so the
// python side stays exact (fractions.Fraction round-trips losslessly).

std::vector<Rational> claim_values(const MarketData& market,
                                   const std::map<std::string, std::string>& payoffs) {
    const EventTree& tree = market.tree;
    std::vector<Rational> payoff(tree.leaves.size());
    std::vector<bool> seen(tree.leaves.size(), false);
    for (const auto& [label, text] : payoffs) {
        const NodeId node = tree.find_label(label);
        if (node < 0 || tree.leaf_index[node] < 0) {
            throw Error(ErrorCode::ParseError, "unknown leaf '" + label + "'");
        }
        payoff[tree.leaf_index[node]] = parse_rational(text);
        seen[tree.leaf_index[node]] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw Error(ErrorCode::ParseError,
                        "missing payoff for leaf '" + tree.label[tree.leaves[i]] + "'");
        }
    }
    return payoff;
}

std::map<std::string, std::string> claim_dict(const MarketData& market, const Claim& claim) {
    std::map<std::string, std::string> out;
    for (NodeId leaf : market.tree.leaves) {
        out[market.tree.label[leaf]] = to_ratio_string(claim.payoff[market.tree.leaf_index[leaf]]);
    }
    return out;
}

AdaptedProcess process_values(const MarketData& market,
                              const std::map<std::string, std::string>& values) {
    const EventTree& tree = market.tree;
    AdaptedProcess process(tree.num_nodes());
    std::vector<bool> seen(tree.num_nodes(), false);
    for (const auto& [label, text] : values) {
        const NodeId node = tree.find_label(label);
        if (node < 0) throw Error(ErrorCode::ParseError, "unknown node '" + label + "'");
        process[node] = parse_rational(text);
        seen[node] = true;
    }
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (!seen[n]) {
            throw Error(ErrorCode::ParseError, "missing value for node '" + tree.label[n] + "'");
        }
    }
    return process;
}

py::dict measure_dict(const MarketData& market, const Measure& measure) {
    const EventTree& tree = market.tree;
    py::dict transitions;
    for (NodeId n = 0; n < tree.num_nodes(); ++n) {
        if (tree.is_leaf(n)) continue;
        py::list row;
        for (const auto& v : measure.transition[n]) row.append(to_ratio_string(v));
        transitions[py::str(tree.label[n])] = row;
    }
    py::dict weights;
    for (std::size_t i = 0; i < tree.leaves.size(); ++i) {
        weights[py::str(tree.label[tree.leaves[i]])] = to_ratio_string(measure.leaf_weight[i]);
    }
    py::dict out;
    out["transitions"] = transitions;
    out["leaf_weights"] = weights;
    return out;
}

Measure measure_from_dict(const MarketData& market,
                          const std::map<std::string, std::vector<std::string>>& transitions) {
    const EventTree& tree = market.tree;
    std::vector<std::vector<Rational>> rows(tree.num_nodes());
    for (const auto& [label, row] : transitions) {
        const NodeId node = tree.find_label(label);
        if (node < 0) throw Error(ErrorCode::ParseError, "unknown node '" + label + "'");
        for (const auto& v : row) rows[node].push_back(parse_rational(v));
    }
    return measure_from_transitions(tree, market.prices, std::move(rows));
}

std::vector<std::string> atom_labels(const MarketData& market, int t) {
    std::vector<std::string> out;
    for (NodeId atom : market.tree.atoms_at(t)) out.push_back(market.tree.label[atom]);
    return out;
}

py::dict strategy_dict(const MarketData& market, const Strategy& strategy) {
    py::dict out;
    for (NodeId n = 0; n < market.tree.num_nodes(); ++n) {
        if (market.tree.is_leaf(n)) continue;
        py::list row;
        for (const auto& v : strategy.xi[n]) row.append(to_ratio_string(v));
        out[py::str(market.tree.label[n])] = row;
    }
    return out;
}

py::dict hedge_dict(const MarketData& market, int t, const HedgeResult& result) {
    py::dict out;
    out["atoms"] = atom_labels(market, t);
    out["price"] = to_ratio_strings(result.price);
    out["strategy"] = strategy_dict(market, result.strategy);
    return out;
}

using ClaimMap = std::map<std::string, std::string>;

}  // namespace

PYBIND11_MODULE(_hedgetree, m) {
    m.doc() = "exact conditional superhedging prices on finite scenario trees";

    py::register_exception<Error>(m, "DomainError");

    py::class_<MarketData>(m, "Market")
        .def(py::init(&parse_market), py::arg("text"),
             "build a market from its JSON description")
        .def_property_readonly("horizon", [](const MarketData& m_) { return m_.tree.horizon; })
        .def_property_readonly("assets", [](const MarketData& m_) { return m_.prices.assets; })
        .def_property_readonly("leaves",
                               [](const MarketData& m_) {
                                   std::vector<std::string> out;
                                   for (NodeId leaf : m_.tree.leaves) {
                                       out.push_back(m_.tree.label[leaf]);
                                   }
                                   return out;
                               })
        .def("atoms", &atom_labels, py::arg("time"))
        .def("to_json", &market_to_json);

    m.def("check_no_arbitrage", [](const MarketData& market) {
        const ArbitrageCheck check = check_no_arbitrage(market.tree, market.prices);
        py::dict out;
        out["arbitrage_free"] = check.arbitrage_free;
        if (check.arbitrage_free) {
            out["witness"] = measure_dict(market, *check.witness);
        } else {
            out["node"] = market.tree.label[check.violating_node];
            out["strategy"] = to_ratio_strings(check.strategy);
        }
        return out;
    });

    m.def("superhedge", [](const MarketData& market, const ClaimMap& payoffs, int t) {
        const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
        return hedge_dict(market, t, superhedge(market.tree, market.prices, claim, t));
    });

    m.def("subhedge", [](const MarketData& market, const ClaimMap& payoffs, int t) {
        const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
        return hedge_dict(market, t, subhedge(market.tree, market.prices, claim, t));
    });

    m.def("acceptance_oracle", [](const MarketData& market, const ClaimMap& payoffs, int t) {
        const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
        return to_ratio_strings(acceptance_oracle(market.tree, market.prices, claim, t));
    });

    m.def(
        "upper_price",
        [](const MarketData& market, const ClaimMap& payoffs, int t, int cap) {
            const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
            const PriceBound bound = upper_price(market.tree, market.prices, claim, t, cap);
            py::dict out;
            out["atoms"] = atom_labels(market, t);
            out["value"] = to_ratio_strings(bound.value);
            out["attained"] = bound.attained;
            return out;
        },
        py::arg("market"), py::arg("claim"), py::arg("time"), py::arg("cap") = kDefaultVertexCap);

    m.def(
        "lower_price",
        [](const MarketData& market, const ClaimMap& payoffs, int t, int cap) {
            const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
            const PriceBound bound = lower_price(market.tree, market.prices, claim, t, cap);
            py::dict out;
            out["atoms"] = atom_labels(market, t);
            out["value"] = to_ratio_strings(bound.value);
            out["attained"] = bound.attained;
            return out;
        },
        py::arg("market"), py::arg("claim"), py::arg("time"), py::arg("cap") = kDefaultVertexCap);

    m.def("price_interval", [](const MarketData& market, const ClaimMap& payoffs, int t) {
        const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
        const PriceInterval interval = price_interval(market.tree, market.prices, claim, t);
        py::dict out;
        out["atoms"] = atom_labels(market, t);
        out["lower"] = to_ratio_strings(interval.lower);
        out["upper"] = to_ratio_strings(interval.upper);
        out["degenerate"] = interval.degenerate;
        out["open_lower"] = interval.open_lower;
        out["open_upper"] = interval.open_upper;
        return out;
    });

    m.def("is_attainable", [](const MarketData& market, const ClaimMap& payoffs, int t) {
        const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
        const AttainabilityResult result = is_attainable(market.tree, market.prices, claim, t);
        py::dict out;
        out["atoms"] = atom_labels(market, t);
        out["attainable"] = result.attainable;
        out["price"] = to_ratio_strings(result.price);
        out["strategy"] = strategy_dict(market, result.strategy);
        return out;
    });

    m.def("is_complete_at", [](const MarketData& market, int t) {
        const CompletenessReport report = is_complete_at(market.tree, market.prices, t);
        py::dict out;
        out["complete"] = report.complete;
        std::vector<std::string> nodes;
        for (NodeId n : report.violating_nodes) nodes.push_back(market.tree.label[n]);
        out["violating_nodes"] = nodes;
        return out;
    });

    m.def("verify_pasting_characterization",
          [](const MarketData& market, int t, const std::vector<std::uint64_t>& seeds) {
              return verify_pasting_characterization(market.tree, market.prices, t, seeds);
          });

    m.def("classify_price",
          [](const MarketData& market, const ClaimMap& payoffs, int t,
             const std::vector<std::string>& candidate) {
              const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
              std::vector<Rational> pi;
              for (const auto& text : candidate) pi.push_back(parse_rational(text));
              const auto labels = classify_price(market.tree, market.prices, claim, t, pi);
              std::vector<std::string> out;
              for (const auto label : labels) {
                  out.push_back(label == PriceLabel::Interior          ? "interior"
                                : label == PriceLabel::BoundaryNotPrice ? "boundary-not-price"
                                                                        : "outside");
              }
              return out;
          });

    m.def("decompose_claim", [](const MarketData& market, const ClaimMap& payoffs, int t) {
        const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
        const auto [unique_part, open_part] =
            decompose_claim(market.tree, market.prices, claim, t);
        return py::make_tuple(claim_dict(market, unique_part), claim_dict(market, open_part));
    });

    m.def("interval_membership",
          [](const MarketData& market, const ClaimMap& payoffs, int t,
             const std::vector<std::string>& lambdas) {
              const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
              std::vector<Rational> lambda;
              for (const auto& text : lambdas) lambda.push_back(parse_rational(text));
              const IntervalPoint point =
                  interval_membership(market.tree, market.prices, claim, t, lambda);
              py::dict out;
              out["atoms"] = atom_labels(market, t);
              out["price"] = to_ratio_strings(point.price);
              out["witness"] = measure_dict(market, point.witness);
              return out;
          });

    m.def(
        "sample_emm",
        [](const MarketData& market, std::uint64_t seed, int cap) {
            return measure_dict(market, sample_emm(market.tree, market.prices, seed, cap));
        },
        py::arg("market"), py::arg("seed"), py::arg("cap") = kDefaultVertexCap);

    m.def("paste", [](const MarketData& market,
                      const std::map<std::string, std::vector<std::string>>& before,
                      const std::map<std::string, std::vector<std::string>>& after, int t) {
        return measure_dict(market,
                            paste(market.tree, market.prices, measure_from_dict(market, before),
                                  measure_from_dict(market, after), t));
    });

    m.def("conditional_expectation",
          [](const MarketData& market,
             const std::map<std::string, std::vector<std::string>>& transitions,
             const ClaimMap& payoffs, int t) {
              const Claim claim = make_claim(market.tree, claim_values(market, payoffs));
              return to_ratio_strings(conditional_expectation(
                  market.tree, measure_from_dict(market, transitions), claim, t));
          });

    m.def("convex_combine",
          [](const MarketData& market,
             const std::vector<std::map<std::string, std::vector<std::string>>>& transition_maps,
             const std::vector<std::vector<std::string>>& lambdas, int t) {
              std::vector<Measure> measures;
              for (const auto& tm : transition_maps) {
                  measures.push_back(measure_from_dict(market, tm));
              }
              std::vector<std::vector<Rational>> lambda;
              for (const auto& row : lambdas) {
                  std::vector<Rational> parsed;
                  for (const auto& text : row) parsed.push_back(parse_rational(text));
                  lambda.push_back(std::move(parsed));
              }
              return measure_dict(
                  market, convex_combine(market.tree, market.prices, measures, lambda, t));
          });

    m.def(
        "check_axioms",
        [](const MarketData& market, int t, int count, std::uint64_t seed) {
            const auto reports =
                check_axioms(market.tree, market.prices, t, {}, count, seed);
            py::list out;
            for (const auto& report : reports) {
                py::dict row;
                row["axiom"] = report.axiom;
                row["holds"] = report.holds;
                out.append(row);
            }
            return out;
        },
        py::arg("market"), py::arg("time"), py::arg("count") = 12, py::arg("seed") = 1);

    m.def("check_supermartingale",
          [](const MarketData& market, const std::map<std::string, std::string>& values) {
              const SupermartingaleReport report = check_supermartingale(
                  market.tree, market.prices, process_values(market, values));
              py::dict out;
              out["holds"] = report.holds;
              if (!report.holds) {
                  out["node"] = market.tree.label[report.violating_node];
                  out["gap"] = to_ratio_string(report.gap);
              }
              return out;
          });

    m.def("optional_decomposition",
          [](const MarketData& market, const std::map<std::string, std::string>& values) {
              const Decomposition decomposition = optional_decomposition(
                  market.tree, market.prices, process_values(market, values));
              py::dict out;
              out["strategy"] = strategy_dict(market, decomposition.strategy);
              py::dict consumption;
              for (NodeId n = 0; n < market.tree.num_nodes(); ++n) {
                  consumption[py::str(market.tree.label[n])] =
                      to_ratio_string(decomposition.consumption[n]);
              }
              out["consumption"] = consumption;
              return out;
          });
}
