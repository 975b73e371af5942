#include "core/cost.hpp"

#include <cctype>
#include <numeric>

#include "core/error.hpp"

namespace mvrp {

namespace {

struct DecimalParts {
    bool negative = false;
    std::int64_t digits = 0;  // all digits as one integer
    int fraction_digits = 0;
};

DecimalParts split_decimal(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    DecimalParts parts;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        parts.negative = text.front() == '-';
        text.remove_prefix(1);
    }
    bool seen_point = false;
    bool seen_digit = false;
    for (char ch : text) {
        if (ch == '.') {
            if (seen_point) throw Error(ErrorCode::ParseError, "malformed decimal '" + std::string(text) + "'");
            seen_point = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw Error(ErrorCode::ParseError, "malformed decimal '" + std::string(text) + "'");
        seen_digit = true;
        if (parts.digits > (INT64_MAX - 9) / 10) throw Error(ErrorCode::ParseError, "decimal out of range");
        parts.digits = parts.digits * 10 + (ch - '0');
        if (seen_point) ++parts.fraction_digits;
    }
    if (!seen_digit) throw Error(ErrorCode::ParseError, "malformed decimal '" + std::string(text) + "'");
    if (parts.fraction_digits > 15) throw Error(ErrorCode::ParseError, "too many fractional digits");
    return parts;
}

std::int64_t pow10(int k) {
    std::int64_t value = 1;
    for (int i = 0; i < k; ++i) value *= 10;
    return value;
}

// Smallest k >= 1 with den | 10^k, or -1 when den has a prime factor other than 2 and 5.
int decimal_places(std::int64_t den) {
    for (int k = 1; k <= 18; ++k)
        if (pow10(k) % den == 0) return k;
    return -1;
}

}  // namespace

Rational Rational::make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    return g > 1 ? Rational{num / g, den / g} : Rational{num, den};
}

Rational parse_decimal(std::string_view text) {
    const DecimalParts parts = split_decimal(text);
    return Rational::make(parts.negative ? -parts.digits : parts.digits, pow10(parts.fraction_digits));
}

std::string format_decimal(Rational value) {
    const int places = decimal_places(value.den);
    if (places < 0) return std::to_string(value.num) + "/" + std::to_string(value.den);
    return format_cost(Cost(value.num), value.den);
}

Cost arc_cost(int d, int l, Rational eta, int max_platoon) {
    if (l < 1 || l > max_platoon)
        throw Error(ErrorCode::PlatoonTooLarge, "platoon size " + std::to_string(l) + " outside 1.." +
                                                    std::to_string(max_platoon));
    if (eta.den - eta.num * (l - 1) <= 0)
        throw Error(ErrorCode::PlatoonTooLarge, "non-positive cost factor at platoon size " + std::to_string(l));
    return Cost(platoon_cost_scaled(d, l, eta));
}

Cost marginal_add_cost(int d, int l, Rational eta, int max_platoon) {
    if (l < 1 || l >= max_platoon)
        throw Error(ErrorCode::PlatoonTooLarge, "cannot grow a platoon of size " + std::to_string(l) +
                                                    " with maximum " + std::to_string(max_platoon));
    if (eta.den - eta.num * l <= 0)
        throw Error(ErrorCode::PlatoonTooLarge, "non-positive cost factor at platoon size " + std::to_string(l + 1));
    return Cost(marginal_cost_scaled(d, l, eta));
}

std::string format_cost(Cost cost, std::int64_t scale) {
    const int places = decimal_places(scale);
    if (places < 0) {
        // Not a terminating decimal; render as an exact fraction.
        return std::to_string(cost.scaled()) + "/" + std::to_string(scale);
    }
    const std::int64_t factor = pow10(places) / scale;
    std::int64_t value = cost.scaled() * factor;
    const bool negative = value < 0;
    if (negative) value = -value;
    const std::int64_t unit = pow10(places);
    std::string fraction = std::to_string(value % unit);
    fraction.insert(0, static_cast<std::size_t>(places) - fraction.size(), '0');
    // Trim trailing zeros beyond the first fractional digit.
    while (fraction.size() > 1 && fraction.back() == '0') fraction.pop_back();
    return (negative ? "-" : "") + std::to_string(value / unit) + "." + fraction;
}

std::optional<Cost> parse_cost(std::string_view text, std::int64_t scale) {
    const DecimalParts parts = split_decimal(text);
    const std::int64_t unit = pow10(parts.fraction_digits);
    // value = digits / unit; scaled = digits * scale / unit must be an integer.
    const __int128 numerator = static_cast<__int128>(parts.digits) * scale;
    if (numerator % unit != 0) return std::nullopt;
    const auto scaled = static_cast<std::int64_t>(numerator / unit);
    return Cost(parts.negative ? -scaled : scaled);
}

}  // namespace mvrp
