#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/neighborhoods.hpp"
#include "core/state.hpp"

namespace mvrp {

struct SearchParams {
    int starts = 10;
    int max_iterations = 1000;
    int shake_trigger = 50;  // non-improving iterations before a shake
    int tenure = 10;
    double sparse_fill = 0.5;  // route load cap as a fraction of Q when sampling
    int shake_max = 0;         // 0: ceil(K / 3)
    std::uint64_t seed = 0;
    bool use_relocate = true;
    bool use_merge = true;  // merge operators inside the tabu search (the CW phase always merges)
    bool use_shaking = true;
    int threads = 0;  // 0: MVRP_THREADS or hardware concurrency
};

void check_params(const SearchParams& params);  // throws InvalidArgument

struct TraceRow {
    int iteration = 0;
    Cost current;
    Cost best;
    std::optional<MoveKind> kind;
    bool shake = false;
};

struct StartResult {
    int start = 0;
    bool ok = false;
    std::string error;
    Plan best;
    Cost best_cost;
    Cost sparse_cost;
    Cost cw_cost;
    int iter_to_best = 0;
    std::vector<TraceRow> trace;
};

struct SearchResult {
    Plan best;
    Cost best_cost;
    int best_start = -1;
    std::vector<StartResult> starts;
};

// Random single-MV routes, each loaded to at most rho * Q. Retries with
// rho = 1 before throwing InfeasibleSparse.
Plan sample_sparse_solution(const Instance& inst, std::uint64_t seed, double rho);

// Applies the best improving serial/parallel merge until none is left.
Plan cw_improve(const Instance& inst, Plan plan);

// Pulls `count` random platoon members out into routes of their own customers.
// Throws NothingToShake when no MV shares an arc with another.
Plan shake(const Instance& inst, const Plan& plan, int count, std::uint64_t seed);

StartResult tabu_search(const Instance& inst, const Plan& initial, const SearchParams& params, std::uint64_t seed);

// Independent sample -> merge -> tabu chains, best result by cost then start index.
SearchResult multi_start(const Instance& inst, const SearchParams& params);

// Seeds used by start i: (sampling seed, tabu seed).
std::pair<std::uint64_t, std::uint64_t> start_seeds(std::uint64_t seed, int start);

std::string trace_csv(const std::vector<TraceRow>& trace, std::int64_t scale);

// Removes MVs that serve nobody.
Plan drop_idle(const Plan& plan);

int worker_count(int requested);

}  // namespace mvrp
