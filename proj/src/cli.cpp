#include "hedgetree/cli.hpp"

#include "hedgetree/decomp.hpp"
#include "hedgetree/emm.hpp"
#include "hedgetree/errors.hpp"
#include "hedgetree/expectation.hpp"
#include "hedgetree/io.hpp"
#include "hedgetree/pricing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <ostream>
#include <random>
#include <sstream>

namespace hedgetree {

namespace {

using nlohmann::json;

int env_cap() {
    if (const char* raw = std::getenv("HEDGETREE_VERTEX_CAP")) {
        try {
            return std::stoi(raw);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError,
                        std::string("HEDGETREE_VERTEX_CAP is not an integer: ") + raw);
        }
    }
    return kDefaultVertexCap;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void print(std::ostream& out) const {
        std::vector<std::size_t> width(header.size());
        for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                width[c] = std::max(width[c], row[c].size());
            }
        }
        auto line = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                out << row[c];
                if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
            }
            out << "\n";
        };
        line(header);
        for (const auto& row : rows) line(row);
    }
};

std::string human(const Rational& v) {
    return to_ratio_string(v) + " (" + to_decimal_string(v, 4) + ")";
}

bool records_mode(const RunConfig& config) { return config.format == "records"; }

void emit(std::ostream& out, const json& record) { out << record.dump() << "\n"; }

json strategy_records(const MarketData& market, const Strategy& strategy, int from_level) {
    json rows = json::array();
    for (NodeId n = 0; n < market.tree.num_nodes(); ++n) {
        if (market.tree.is_leaf(n) || market.tree.level[n] < from_level) continue;
        json holdings = json::array();
        for (const auto& v : strategy.xi[n]) holdings.push_back(to_ratio_string(v));
        rows.push_back({{"node", market.tree.label[n]}, {"holdings", holdings}});
    }
    return rows;
}

// Every subcommand starts here: reports the arbitrage verdict and stops with
// exit code 2 when the market admits arbitrage.
bool arbitrage_gate(const MarketData& market, const RunConfig& config, std::ostream& out) {
    const ArbitrageCheck check = check_no_arbitrage(market.tree, market.prices);
    if (records_mode(config)) {
        json record{{"record", "arbitrage"}, {"free", check.arbitrage_free}};
        if (!check.arbitrage_free) {
            record["node"] = market.tree.label[check.violating_node];
            json xi = json::array();
            for (const auto& v : check.strategy) xi.push_back(to_ratio_string(v));
            record["strategy"] = xi;
        }
        emit(out, record);
    } else if (check.arbitrage_free) {
        out << "arbitrage: none (strictly positive martingale measure exists)\n";
    } else {
        out << "arbitrage: one-step opportunity at node '"
            << market.tree.label[check.violating_node] << "', holdings";
        for (const auto& v : check.strategy) out << " " << to_ratio_string(v);
        out << "\n";
    }
    return check.arbitrage_free;
}

int cmd_price(const RunConfig& config, std::ostream& out) {
    const MarketData market = load_market(config.market_path);
    const Claim claim = load_claim(market, config.claim_path);
    if (!arbitrage_gate(market, config, out)) return 2;
    const int t = config.time;
    const int cap = config.resolved_cap();
    const auto atoms = market.tree.atoms_at(t);

    const PriceInterval interval = price_interval(market.tree, market.prices, claim, t, cap);
    const HedgeResult upper_hedge = superhedge(market.tree, market.prices, claim, t);
    const HedgeResult lower_hedge = subhedge(market.tree, market.prices, claim, t);
    const auto oracle = acceptance_oracle(market.tree, market.prices, claim, t);
    const AttainabilityResult attain = is_attainable(market.tree, market.prices, claim, t, cap);

    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (upper_hedge.price[i] != interval.upper[i] ||
            lower_hedge.price[i] != interval.lower[i] || oracle[i] != upper_hedge.price[i] ||
            attain.attainable[i] != interval.degenerate[i]) {
            throw InternalError("pricing routes disagree at atom '" +
                                market.tree.label[atoms[i]] + "'");
        }
    }

    if (records_mode(config)) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            emit(out, json{{"record", "price"},
                           {"atom", market.tree.label[atoms[i]]},
                           {"time", t},
                           {"lower", to_ratio_string(interval.lower[i])},
                           {"upper", to_ratio_string(interval.upper[i])},
                           {"degenerate", static_cast<bool>(interval.degenerate[i])},
                           {"open_lower", static_cast<bool>(interval.open_lower[i])},
                           {"open_upper", static_cast<bool>(interval.open_upper[i])},
                           {"attainable", static_cast<bool>(attain.attainable[i])},
                           {"superhedge", to_ratio_string(upper_hedge.price[i])},
                           {"subhedge", to_ratio_string(lower_hedge.price[i])},
                           {"oracle", to_ratio_string(oracle[i])}});
        }
        emit(out, json{{"record", "strategy"},
                       {"side", "super"},
                       {"time", t},
                       {"holdings", strategy_records(market, upper_hedge.strategy, t)}});
        return 0;
    }

    Table table;
    table.header = {"atom", "interval", "lower", "upper", "attainable"};
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        std::string shape;
        if (interval.degenerate[i]) {
            shape = "{" + to_ratio_string(interval.lower[i]) + "}";
        } else {
            shape = "(" + to_ratio_string(interval.lower[i]) + ", " +
                    to_ratio_string(interval.upper[i]) + ")";
        }
        table.rows.push_back({market.tree.label[atoms[i]], shape, human(interval.lower[i]),
                              human(interval.upper[i]),
                              attain.attainable[i] ? "yes" : "no"});
    }
    out << "prices at time " << t << " (superhedge == upper, subhedge == lower, exact):\n";
    table.print(out);

    Table strat;
    strat.header = {"node", "superhedge holdings"};
    for (NodeId n = 0; n < market.tree.num_nodes(); ++n) {
        if (market.tree.is_leaf(n) || market.tree.level[n] < t) continue;
        std::string cell;
        for (const auto& v : upper_hedge.strategy.xi[n]) {
            if (!cell.empty()) cell += "  ";
            cell += to_ratio_string(v);
        }
        strat.rows.push_back({market.tree.label[n], cell});
    }
    out << "\n";
    strat.print(out);
    return 0;
}

int cmd_complete(const RunConfig& config, std::ostream& out) {
    const MarketData market = load_market(config.market_path);
    if (!arbitrage_gate(market, config, out)) return 2;
    const int t = config.time;
    const CompletenessReport report =
        is_complete_at(market.tree, market.prices, t, config.resolved_cap());

    if (records_mode(config)) {
        json nodes = json::array();
        for (NodeId n : report.violating_nodes) nodes.push_back(market.tree.label[n]);
        emit(out, json{{"record", "completeness"},
                       {"time", t},
                       {"complete", report.complete},
                       {"violating_nodes", nodes}});
        return 0;
    }
    if (report.complete) {
        out << "complete at time " << t << ": every claim is attainable from time " << t << "\n";
    } else {
        out << "incomplete at time " << t << ": non-unique transition law at";
        for (NodeId n : report.violating_nodes) out << " '" << market.tree.label[n] << "'";
        out << "\n";
    }
    return 0;
}

int cmd_decompose(const RunConfig& config, std::ostream& out) {
    const MarketData market = load_market(config.market_path);
    const AdaptedProcess process = load_process(market, config.process_path);
    if (!arbitrage_gate(market, config, out)) return 2;
    const Decomposition decomposition =
        optional_decomposition(market.tree, market.prices, process);

    if (records_mode(config)) {
        for (NodeId n = 0; n < market.tree.num_nodes(); ++n) {
            json record{{"record", "decomposition"},
                        {"node", market.tree.label[n]},
                        {"value", to_ratio_string(process[n])},
                        {"consumption", to_ratio_string(decomposition.consumption[n])}};
            if (!market.tree.is_leaf(n)) {
                json holdings = json::array();
                for (const auto& v : decomposition.strategy.xi[n]) {
                    holdings.push_back(to_ratio_string(v));
                }
                record["holdings"] = holdings;
            }
            emit(out, record);
        }
        return 0;
    }

    Table table;
    table.header = {"node", "value", "consumption", "holdings"};
    for (NodeId n = 0; n < market.tree.num_nodes(); ++n) {
        std::string cell;
        if (!market.tree.is_leaf(n)) {
            for (const auto& v : decomposition.strategy.xi[n]) {
                if (!cell.empty()) cell += "  ";
                cell += to_ratio_string(v);
            }
        }
        table.rows.push_back({market.tree.label[n], human(process[n]),
                              human(decomposition.consumption[n]), cell});
    }
    out << "uniform decomposition value = initial + gains - consumption (exact at every node):\n";
    table.print(out);
    return 0;
}

int cmd_check(const RunConfig& config, std::ostream& out) {
    const MarketData market = load_market(config.market_path);
    if (!arbitrage_gate(market, config, out)) return 2;
    const EventTree& tree = market.tree;
    const int cap = config.resolved_cap();
    bool all_ok = true;

    std::vector<int> times;
    if (config.time_set) {
        times.push_back(config.time);
    } else {
        for (int t = 0; t <= tree.horizon; ++t) times.push_back(t);
    }

    for (int t : times) {
        const auto reports =
            check_axioms(tree, market.prices, t, {}, config.claims, config.seed);
        for (const auto& report : reports) {
            if (!report.holds) all_ok = false;
            if (records_mode(config)) {
                emit(out, json{{"record", "axiom"},
                               {"time", t},
                               {"axiom", report.axiom},
                               {"holds", report.holds}});
            } else {
                out << "axiom " << report.axiom << " @t=" << t << ": "
                    << (report.holds ? "ok" : "VIOLATED") << "\n";
            }
        }
    }

    // Duality spot check on generated claims: the hedge prices must coincide
    // with the measure-side bounds and with the acceptance oracle, exactly.
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<int> num(0, 8);
    std::uniform_int_distribution<int> den(1, 4);
    int checked = 0;
    bool duality_ok = true;
    for (int i = 0; i < config.claims && duality_ok; ++i) {
        std::vector<Rational> payoff;
        payoff.reserve(tree.leaves.size());
        for (std::size_t j = 0; j < tree.leaves.size(); ++j) {
            payoff.push_back(Rational(num(rng)) / Rational(den(rng)));
        }
        const Claim claim = make_claim(tree, std::move(payoff));
        for (int t = 0; t <= tree.horizon && duality_ok; ++t) {
            const auto upper = upper_price(tree, market.prices, claim, t, cap);
            const auto lower = lower_price(tree, market.prices, claim, t, cap);
            const auto super = superhedge(tree, market.prices, claim, t);
            const auto sub = subhedge(tree, market.prices, claim, t);
            const auto oracle = acceptance_oracle(tree, market.prices, claim, t);
            duality_ok = upper.value == super.price && lower.value == sub.price &&
                         oracle == super.price;
            ++checked;
        }
    }
    if (!duality_ok) all_ok = false;
    if (records_mode(config)) {
        emit(out, json{{"record", "duality"}, {"holds", duality_ok}, {"checked", checked}});
    } else {
        out << "duality (hedge price == measure bound == acceptance value): "
            << (duality_ok ? "ok" : "VIOLATED") << " on " << checked << " claim/time pairs\n";
    }
    return all_ok ? 0 : 4;
}

int cmd_emm_sample(const RunConfig& config, std::ostream& out) {
    const MarketData market = load_market(config.market_path);
    if (!arbitrage_gate(market, config, out)) return 2;
    const Measure measure =
        sample_emm(market.tree, market.prices, config.seed, config.resolved_cap());
    if (records_mode(config)) {
        json record = json::parse(measure_to_json(market, measure));
        record["record"] = "measure";
        emit(out, record);
        return 0;
    }
    out << "strictly positive martingale measure (seed " << config.seed << "):\n"
        << measure_to_json(market, measure) << "\n";
    return 0;
}

int cmd_paste(const RunConfig& config, std::ostream& out) {
    const MarketData market = load_market(config.market_path);
    if (!arbitrage_gate(market, config, out)) return 2;
    const int cap = config.resolved_cap();
    const Measure before = sample_emm(market.tree, market.prices, config.seed, cap);
    const Measure after = sample_emm(market.tree, market.prices, config.seed2, cap);
    const Measure pasted = paste(market.tree, market.prices, before, after, config.time);

    // Tower identity of the pasting, verified exactly on indicator claims.
    for (std::size_t li = 0; li < market.tree.leaves.size(); ++li) {
        std::vector<Rational> payoff(market.tree.leaves.size(), Rational(0));
        payoff[li] = 1;
        const Claim h = make_claim(market.tree, std::move(payoff));
        for (int s = 0; s <= market.tree.horizon; ++s) {
            const int mid = std::max(s, config.time);
            const auto inner = conditional_expectation(market.tree, after, h, mid);
            const auto nested = conditional_expectation(
                market.tree, before, claim_from_atom_values(market.tree, mid, inner), s);
            const auto direct = conditional_expectation(market.tree, pasted, h, s);
            if (nested != direct) throw InternalError("pasting violates the tower identity");
        }
    }

    if (records_mode(config)) {
        json record = json::parse(measure_to_json(market, pasted));
        record["record"] = "measure";
        emit(out, record);
        return 0;
    }
    out << "pasted measure (history of seed " << config.seed << " before t=" << config.time
        << ", dynamics of seed " << config.seed2 << " after), tower identity exact:\n"
        << measure_to_json(market, pasted) << "\n";
    return 0;
}

}  // namespace

int RunConfig::resolved_cap() const { return cap >= 0 ? cap : env_cap(); }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact conditional pricing on finite scenario trees"};
    app.require_subcommand(1);
    RunConfig config;

    auto add_common = [&](CLI::App* cmd, bool needs_claim, bool needs_process) {
        cmd->add_option("--market", config.market_path, "market JSON file")->required();
        if (needs_claim) {
            cmd->add_option("--claim", config.claim_path, "claim JSON file")->required();
        }
        if (needs_process) {
            cmd->add_option("--process", config.process_path, "candidate process JSON file")
                ->required();
        }
        cmd->add_option("--cap", config.cap,
                        "vertex enumeration cap (default: HEDGETREE_VERTEX_CAP or 12)");
        cmd->add_option("--format", config.format, "table or records (JSON lines)")
            ->check(CLI::IsMember({"table", "records"}));
        return cmd;
    };
    auto add_time = [&](CLI::App* cmd) {
        cmd->add_option("--time", config.time, "evaluation time t (default 0)")
            ->check(CLI::NonNegativeNumber);
    };

    CLI::App* price = add_common(app.add_subcommand("price", "price a claim at time t"), true, false);
    add_time(price);

    CLI::App* complete =
        add_common(app.add_subcommand("complete", "decide completeness at time t"), false, false);
    add_time(complete);

    add_common(app.add_subcommand("decompose",
                                  "uniform Doob decomposition of a supermartingale process"),
               false, true);

    CLI::App* check = add_common(
        app.add_subcommand("check", "verify the pricing axioms and duality on random claims"),
        false, false);
    CLI::Option* time_opt = check->add_option("--time", config.time, "restrict to one time");
    check->add_option("--claims", config.claims, "number of random claims");
    check->add_option("--seed", config.seed, "random seed");

    CLI::App* emm = add_common(
        app.add_subcommand("emm-sample", "sample a strictly positive martingale measure"), false,
        false);
    emm->add_option("--seed", config.seed, "random seed");

    CLI::App* paste_cmd = add_common(
        app.add_subcommand("paste", "paste two sampled measures at time t"), false, false);
    add_time(paste_cmd);
    paste_cmd->add_option("--seed", config.seed, "seed of the before-t measure");
    paste_cmd->add_option("--seed2", config.seed2, "seed of the after-t measure");

    std::vector<const char*> argv;
    argv.push_back("hedgetree");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }
    config.time_set = time_opt->count() > 0;

    try {
        if (app.got_subcommand("price")) return cmd_price(config, out);
        if (app.got_subcommand("complete")) return cmd_complete(config, out);
        if (app.got_subcommand("decompose")) return cmd_decompose(config, out);
        if (app.got_subcommand("check")) return cmd_check(config, out);
        if (app.got_subcommand("emm-sample")) return cmd_emm_sample(config, out);
        if (app.got_subcommand("paste")) return cmd_paste(config, out);
        err << "usage error: no subcommand\n";
        return 1;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.message() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace hedgetree
