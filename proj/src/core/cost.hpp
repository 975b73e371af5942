#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mvrp {

// Exact rational with positive denominator, always stored reduced.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t num, std::int64_t den);
    friend bool operator==(const Rational&, const Rational&) = default;
};

// Parses a plain decimal such as "0.1" or "0.25" into a reduced rational.
Rational parse_decimal(std::string_view text);

// Renders a rational whose denominator divides a power of ten, e.g. 1/10 -> "0.1".
std::string format_decimal(Rational value);

// Fixed-point cost. The scale (units per distance unit) is the denominator of
// the cost-saving rate and is carried by the instance, so two costs are only
// comparable when they come from the same instance.
class Cost {
public:
    constexpr Cost() = default;
    constexpr explicit Cost(std::int64_t scaled) : scaled_(scaled) {}

    constexpr std::int64_t scaled() const { return scaled_; }

    constexpr Cost& operator+=(Cost other) {
        scaled_ += other.scaled_;
        return *this;
    }
    constexpr Cost& operator-=(Cost other) {
        scaled_ -= other.scaled_;
        return *this;
    }
    friend constexpr Cost operator+(Cost a, Cost b) { return Cost(a.scaled_ + b.scaled_); }
    friend constexpr Cost operator-(Cost a, Cost b) { return Cost(a.scaled_ - b.scaled_); }
    friend constexpr Cost operator-(Cost a) { return Cost(-a.scaled_); }
    friend constexpr auto operator<=>(Cost, Cost) = default;

private:
    std::int64_t scaled_ = 0;
};

// Scaled value of d * l * (1 - eta * (l - 1)); no range checks. l == 0 gives 0.
constexpr std::int64_t platoon_cost_scaled(std::int64_t d, std::int64_t l, Rational eta) {
    return d * l * (eta.den - eta.num * (l - 1));
}

// Scaled value of the cost increase when a platoon of size l grows to l + 1:
// d * (1 - 2 * eta * l). l == 0 gives the plain distance.
constexpr std::int64_t marginal_cost_scaled(std::int64_t d, std::int64_t l, Rational eta) {
    return d * (eta.den - 2 * eta.num * l);
}

// Cost of a platoon of l modular vehicles driving an arc of length d.
// Throws PlatoonTooLarge when l is outside 1..max_platoon or the per-vehicle
// cost factor is not positive.
Cost arc_cost(int d, int l, Rational eta, int max_platoon);

// arc_cost(d, l + 1) - arc_cost(d, l). Requires 1 <= l < max_platoon.
Cost marginal_add_cost(int d, int l, Rational eta, int max_platoon);

// Decimal rendering of a cost at the given scale; at least one fractional digit.
std::string format_cost(Cost cost, std::int64_t scale);

// Parses a decimal cost. Returns nullopt when the value is not representable at
// the scale; throws ParseError when the text is not a decimal number.
std::optional<Cost> parse_cost(std::string_view text, std::int64_t scale);

}  // namespace mvrp
