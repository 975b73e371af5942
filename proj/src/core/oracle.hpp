#pragma once

#include <string>
#include <string_view>

#include "core/state.hpp"

namespace mvrp {

struct OracleResult {
    Plan plan;
    Cost cost;
};

// Exact optimum for tiny instances (N <= 8, K <= 3). Customers are taken in a
// global order; at each step a group of MVs moves to the next customer, one of
// them serving it. MV relabelings are collapsed by keeping the fleet sorted.
// Throws InstanceTooLarge.
OracleResult brute_force_opt(const Instance& inst);

// Same search restricted to plain VRP plans (every customer visited once).
OracleResult brute_force_vrp(const Instance& inst);

// Bounds on the optimum implied by the optimal VRP cost:
// (1 - eta (L - 1)) * vrp  <  optimum  <=  vrp.
struct BoundPair {
    std::int64_t lower_num = 0;  // lower bound in cost units is lower_num / lower_den
    std::int64_t lower_den = 1;
    Cost upper;
    Rational c_min;  // per-MV unit cost in a full platoon
    Rational c_max;  // per-MV unit cost alone
    Rational max_reduction;

    bool contains(Cost c) const;
    std::string lower_text(std::int64_t scale) const;
};

BoundPair platoon_bounds(Cost vrp_cost, Rational eta, int max_platoon);  // throws BadEta

struct MilpCounts {
    long x = 0, y = 0, u = 0, w = 0, d = 0;
    long rows = 0;
    friend bool operator==(const MilpCounts&, const MilpCounts&) = default;
};

// Closed-form sizes of the exported model.
MilpCounts milp_counts(int n, int k, int l);

// LP-format text of the arc-flow model; deterministic ordering.
std::string export_milp(const Instance& inst);

// Counts variables (by name prefix) and constraint rows in LP text.
MilpCounts count_lp(std::string_view text);

}  // namespace mvrp
