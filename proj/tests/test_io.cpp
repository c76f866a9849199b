#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest/doctest.h>

#include "hedgetree/errors.hpp"
#include "hedgetree/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

using namespace hedgetree;

namespace {

ErrorCode parse_failure(const std::string& text) {
    try {
        parse_market(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a parse failure");
    return ErrorCode::ParseError;
}

const char* kTwoPeriod = R"({
  "horizon": 2,
  "assets": 1,
  "nodes": [
    {"id": "root", "parent": null, "prices": ["1"]},
    {"id": "u", "parent": "root", "prices": ["2"]},
    {"id": "d", "parent": "root", "prices": ["1/2"]},
    {"id": "uu", "parent": "u", "prices": ["4"]},
    {"id": "ud", "parent": "u", "prices": ["1"]},
    {"id": "du", "parent": "d", "prices": ["1"]},
    {"id": "dd", "parent": "d", "prices": ["1/4"]}
  ],
  "leaf_weights": {"uu": "1/4", "ud": "1/4", "du": "1/4", "dd": "1/4"}
})";

}  // namespace

TEST_CASE("rational parsing") {
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("-3/6") == Rational(-1, 2));
    CHECK(parse_rational("+1") == Rational(1));
    CHECK(parse_rational("0") == 0);
    CHECK(parse_rational("007/014") == Rational(1, 2));

    for (const char* bad : {"", "1/0", "1/-2", "1.5", "2/", "/3", "a", "1e3", "1 / 2"}) {
        INFO(bad);
        try {
            parse_rational(bad);
            FAIL_CHECK("accepted malformed rational");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
        }
    }

    CHECK(to_ratio_string(Rational(1, 3)) == "1/3");
    CHECK(to_ratio_string(Rational(-2)) == "-2/1");
    CHECK(to_ratio_string(parse_rational("4/6")) == "2/3");
    CHECK(to_decimal_string(Rational(1, 3), 6) == "0.333333");
    CHECK(to_decimal_string(Rational(-1, 2), 6) == "-0.500000");
    CHECK(to_decimal_string(Rational(2), 2) == "2.00");
    CHECK(to_decimal_string(Rational(5), 0) == "5");
}

TEST_CASE("market round trip") {
    const MarketData m = parse_market(kTwoPeriod);
    CHECK(m.tree.horizon == 2);
    CHECK(m.tree.num_nodes() == 7);
    CHECK(m.prices.value[m.tree.find_label("dd")][0] == Rational(1, 4));
    CHECK(m.tree.leaf_weight[m.tree.find_label("uu")] == Rational(1, 4));

    const MarketData again = parse_market(market_to_json(m));
    CHECK(again.tree.num_nodes() == m.tree.num_nodes());
    for (NodeId n = 0; n < m.tree.num_nodes(); ++n) {
        CHECK(again.tree.label[n] == m.tree.label[n]);
        CHECK(again.tree.parent[n] == m.tree.parent[n]);
        CHECK(again.prices.value[n] == m.prices.value[n]);
    }
}

TEST_CASE("market grammar errors") {
    CHECK(parse_failure("") == ErrorCode::ParseError);
    CHECK(parse_failure("{") == ErrorCode::ParseError);
    CHECK(parse_failure("{}") == ErrorCode::ParseError);
    CHECK(parse_failure(R"({"horizon": 1, "assets": 1, "nodes": []})") ==
          ErrorCode::ParseError);

    SUBCASE("floats are rejected") {
        std::string text = kTwoPeriod;
        const auto pos = text.find("\"1/2\"");
        text.replace(pos, 5, "0.5");
        CHECK(parse_failure(text) == ErrorCode::ParseError);
    }

    SUBCASE("bare integers are accepted") {
        std::string text = kTwoPeriod;
        const auto pos = text.find("[\"1\"]");
        text.replace(pos, 5, "[1]");
        const MarketData m = parse_market(text);
        CHECK(m.prices.value[0][0] == Rational(1));
    }

    SUBCASE("unknown parent") {
        const char* text = R"({
          "horizon": 1, "assets": 1,
          "nodes": [
            {"id": "root", "parent": null, "prices": ["1"]},
            {"id": "a", "parent": "ghost", "prices": ["1"]},
            {"id": "b", "parent": "root", "prices": ["1"]}
          ],
          "leaf_weights": {"a": "1/2", "b": "1/2"}
        })";
        CHECK(parse_failure(text) == ErrorCode::ParseError);
    }

    SUBCASE("named domain errors pass through") {
        std::string text = kTwoPeriod;
        const auto pos = text.find("\"uu\": \"1/4\"");
        text.replace(pos, 11, "\"uu\": \"0\"");
        CHECK(parse_failure(text) == ErrorCode::ZeroWeight);

        std::string sum = kTwoPeriod;
        const auto spos = sum.find("\"dd\": \"1/4\"");
        sum.replace(spos, 11, "\"dd\": \"1/3\"");
        CHECK(parse_failure(sum) == ErrorCode::WeightSum);
    }

    SUBCASE("negative price is NegativeProcess") {
        std::string text = kTwoPeriod;
        const auto pos = text.find("[\"4\"]");
        text.replace(pos, 5, "[\"-4\"]");
        CHECK(parse_failure(text) == ErrorCode::NegativeProcess);
    }
}

TEST_CASE("claim files") {
    const MarketData m = parse_market(kTwoPeriod);

    const Claim claim = parse_claim(
        m, R"({"payoffs": {"uu": "3", "ud": 0, "du": "0", "dd": "1/8"}})");
    CHECK(claim.payoff ==
          std::vector<Rational>{Rational(3), Rational(0), Rational(0), Rational(1, 8)});
    CHECK(claim.nonnegative);

    const Claim back = parse_claim(m, claim_to_json(m, claim));
    CHECK(back.payoff == claim.payoff);

    for (const char* bad : {
             R"({"payoffs": {"uu": "3"}})",
             R"({"payoffs": {"uu": "3", "ud": 0, "du": "0", "dd": "1/8", "xx": 1}})",
             R"({"payoffs": {"uu": "3", "ud": 0, "du": "0", "dd": "1/8", "u": 1}})",
             R"({"wrong": {}})",
             R"([])",
         }) {
        INFO(bad);
        try {
            parse_claim(m, bad);
            FAIL_CHECK("accepted malformed claim file");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
        }
    }
}

TEST_CASE("process files") {
    const MarketData m = parse_market(kTwoPeriod);

    const std::string text = R"({"values": {
      "root": "1/3", "u": "1", "d": "0",
      "uu": "3", "ud": "0", "du": "0", "dd": "0"
    }})";
    const AdaptedProcess process = parse_process(m, text);
    CHECK(process[0] == Rational(1, 3));
    CHECK(process[m.tree.find_label("uu")] == Rational(3));

    const AdaptedProcess back = parse_process(m, process_to_json(m, process));
    CHECK(back == process);

    try {
        parse_process(m, R"({"values": {"root": "1"}})");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
    }
}

TEST_CASE("measure files") {
    const MarketData m = parse_market(kTwoPeriod);

    const std::string text = R"({"transitions": {
      "root": ["1/3", "2/3"], "u": ["1/3", "2/3"], "d": ["1/3", "2/3"]
    }})";
    const Measure q = parse_measure(m, text);
    CHECK(q.transition[0] == std::vector<Rational>{Rational(1, 3), Rational(2, 3)});
    CHECK(q.leaf_weight[0] == Rational(1, 9));

    const Measure back = parse_measure(m, measure_to_json(m, q));
    CHECK(same_measure(q, back));
    CHECK(measure_to_json(m, q).find("leaf_weights") != std::string::npos);

    SUBCASE("martingale violations are rejected") {
        const std::string bad = R"({"transitions": {
          "root": ["1/2", "1/2"], "u": ["1/3", "2/3"], "d": ["1/3", "2/3"]
        }})";
        try {
            parse_measure(m, bad);
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
        }
    }

    SUBCASE("named errors pass through") {
        const std::string bad = R"({"transitions": {
          "root": ["1", "0"], "u": ["1/3", "2/3"], "d": ["1/3", "2/3"]
        }})";
        try {
            parse_measure(m, bad);
            FAIL("expected ZeroWeight");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ZeroWeight);
        }
    }
}

TEST_CASE("load from files") {
    const std::string dir = "io_test_tmp";
    std::system(("rm -rf " + dir).c_str());
    REQUIRE(std::system(("mkdir -p " + dir).c_str()) == 0);

    {
        std::FILE* f = std::fopen((dir + "/market.json").c_str(), "w");
        REQUIRE(f != nullptr);
        std::fputs(kTwoPeriod, f);
        std::fclose(f);
    }
    const MarketData m = load_market(dir + "/market.json");
    CHECK(m.tree.num_nodes() == 7);

    try {
        load_market(dir + "/missing.json");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
    }
    std::system(("rm -rf " + dir).c_str());
}
