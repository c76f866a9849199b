#include "hedgetree/rational.hpp"

#include "hedgetree/errors.hpp"

#include <cctype>

namespace hedgetree {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonUniformDepth: return "NonUniformDepth";
        case ErrorCode::ZeroWeight: return "ZeroWeight";
        case ErrorCode::WeightSum: return "WeightSum";
        case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorCode::NoInteriorPoint: return "NoInteriorPoint";
        case ErrorCode::NegativeClaim: return "NegativeClaim";
        case ErrorCode::NegativeProcess: return "NegativeProcess";
        case ErrorCode::NotSupermartingale: return "NotSupermartingale";
        case ErrorCode::NotAStoppingTime: return "NotAStoppingTime";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ArbitrageDetected: return "ArbitrageDetected";
    }
    return "UnknownError";
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view num = text;
    std::string_view den;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        num = text.substr(0, slash);
        den = text.substr(slash + 1);
    }
    bool negative = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
        negative = num.front() == '-';
        num.remove_prefix(1);
    }
    if (!all_digits(num) || (!den.empty() && !all_digits(den)) ||
        (den.empty() && text.find('/') != std::string_view::npos)) {
        throw Error(ErrorCode::ParseError,
                    "expected integer or num/den rational, got '" + std::string(text) + "'");
    }
    // Strip redundant leading zeros: the big-integer string constructor would
    // read a leading 0 as an octal prefix.
    const auto strip = [](std::string_view s) {
        while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
        return s;
    };
    num = strip(num);
    den = den.empty() ? den : strip(den);
    Integer n{std::string(num)};
    Integer d = den.empty() ? Integer(1) : Integer{std::string(den)};
    if (d == 0) {
        throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    }
    if (negative) n = -n;
    return Rational(n) / Rational(d);
}

std::string to_ratio_string(const Rational& value) {
    return numerator(value).str() + "/" + denominator(value).str();
}

std::string to_decimal_string(const Rational& value, int digits) {
    Integer num = numerator(value);
    Integer den = denominator(value);
    bool negative = num < 0;
    if (negative) num = -num;
    Integer whole = num / den;
    Integer rem = num % den;
    std::string out = (negative ? "-" : "") + whole.str();
    if (digits > 0) {
        out += '.';
        for (int i = 0; i < digits; ++i) {
            rem *= 10;
            out += Integer(rem / den).str();
            rem %= den;
        }
    }
    return out;
}

std::vector<std::string> to_ratio_strings(const std::vector<Rational>& values) {
    std::vector<std::string> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(to_ratio_string(v));
    return out;
}

}  // namespace hedgetree
