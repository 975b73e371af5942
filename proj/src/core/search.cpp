#include "core/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mvrp {

void check_params(const SearchParams& p) {
    if (p.starts < 1) throw Error(ErrorCode::InvalidArgument, "starts must be positive");
    if (p.max_iterations < 0) throw Error(ErrorCode::InvalidArgument, "iterations must be non-negative");
    if (p.shake_trigger < 1) throw Error(ErrorCode::InvalidArgument, "shake trigger must be positive");
    if (p.tenure < 1) throw Error(ErrorCode::InvalidArgument, "tenure must be positive");
    if (!(p.sparse_fill > 0.0 && p.sparse_fill <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sparse fill ratio must be in (0, 1]");
    if (p.shake_max < 0) throw Error(ErrorCode::InvalidArgument, "shake count must be non-negative");
}

Plan drop_idle(const Plan& plan) {
    Plan out = plan;
    std::vector<char> serving(plan.routes.size(), 0);
    for (std::size_t c = 1; c < plan.server.size(); ++c) serving[plan.server[c]] = 1;
    for (std::size_t m = 0; m < out.routes.size(); ++m)
        if (!serving[m]) out.routes[m].clear();
    return out;
}

namespace {

std::vector<int> nearest_neighbour_order(const Instance& inst, std::vector<int> customers) {
    std::vector<int> out;
    int at = 0;
    while (!customers.empty()) {
        auto best = customers.begin();
        for (auto it = customers.begin(); it != customers.end(); ++it)
            if (inst.d(at, *it) < inst.d(at, *best) || (inst.d(at, *it) == inst.d(at, *best) && *it < *best)) best = it;
        at = *best;
        out.push_back(at);
        customers.erase(best);
    }
    return out;
}

std::optional<Plan> first_fit(const Instance& inst, const std::vector<int>& order, int cap) {
    std::vector<std::vector<int>> bins;
    std::vector<int> load;
    for (int c : order) {
        const int q = inst.demand[c];
        if (q > cap) return std::nullopt;
        std::size_t b = 0;
        while (b < bins.size() && load[b] + q > cap) ++b;
        if (b == bins.size()) {
            if (static_cast<int>(bins.size()) == inst.fleet_size) return std::nullopt;
            bins.emplace_back();
            load.push_back(0);
        }
        bins[b].push_back(c);
        load[b] += q;
    }
    Plan plan = Plan::empty(inst);
    for (std::size_t b = 0; b < bins.size(); ++b) {
        plan.routes[b] = nearest_neighbour_order(inst, bins[b]);
        for (int c : plan.routes[b]) plan.server[c] = static_cast<int>(b);
    }
    return plan;
}

// Cuts `order` into consecutive routes of load <= cap.
std::optional<Plan> next_fit(const Instance& inst, const std::vector<int>& order, int cap) {
    std::vector<std::vector<int>> bins;
    int load = cap + 1;
    for (int c : order) {
        const int q = inst.demand[c];
        if (q > cap) return std::nullopt;
        if (load + q > cap) {
            if (static_cast<int>(bins.size()) == inst.fleet_size) return std::nullopt;
            bins.emplace_back();
            load = 0;
        }
        bins.back().push_back(c);
        load += q;
    }
    Plan plan = Plan::empty(inst);
    for (std::size_t b = 0; b < bins.size(); ++b) {
        plan.routes[b] = nearest_neighbour_order(inst, bins[b]);
        for (int c : plan.routes[b]) plan.server[c] = static_cast<int>(b);
    }
    return plan;
}

}  // namespace

Plan sample_sparse_solution(const Instance& inst, std::uint64_t seed, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sparse fill ratio must be in (0, 1]");
    Rng rng(splitmix64(seed));
    const int n = inst.num_customers();
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i + 1;
    const int cap = static_cast<int>(std::floor(rho * inst.capacity + 1e-9));

    // Randomized sweep: polar order around the depot from a random customer in
    // a random direction.
    std::vector<double> angle(n + 1, 0.0);
    for (int c = 1; c <= n; ++c)
        angle[c] = std::atan2(inst.points[c].y - inst.points[0].y, inst.points[c].x - inst.points[0].x);
    std::vector<int> sweep = order;
    std::stable_sort(sweep.begin(), sweep.end(), [&](int a, int b) { return angle[a] < angle[b]; });
    if (n > 0) {
        std::rotate(sweep.begin(), sweep.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, n)), sweep.end());
        if (uniform_below(rng, 2)) std::reverse(sweep.begin(), sweep.end());
    }
    if (auto plan = next_fit(inst, sweep, cap)) return *plan;
    if (auto plan = next_fit(inst, sweep, inst.capacity)) return *plan;

    // A tight fleet may need bin packing rather than contiguous sectors.
    shuffle(order, rng);
    if (auto plan = first_fit(inst, order, cap)) return *plan;
    if (auto plan = first_fit(inst, order, inst.capacity)) return *plan;
    throw Error(ErrorCode::InfeasibleSparse, "customers do not fit into " + std::to_string(inst.fleet_size) + " routes");
}

Plan cw_improve(const Instance& inst, Plan plan) {
    State st(inst, std::move(plan));
    while (auto m = best_merge(st)) st = State(inst, drop_idle(apply_edit(st.plan(), m->edit)));
    return st.plan();
}

Plan shake(const Instance& inst, const Plan& plan, int count, std::uint64_t seed) {
    const State st(inst, plan);
    MvMask members = 0;
    for (const auto& [u, v] : st.arcs())
        if (st.count(u, v) >= 2) members |= st.arc_mvs(u, v);
    if (members == 0) throw Error(ErrorCode::NothingToShake, "no MV travels in a platoon");
    std::vector<int> candidates;
    for (MvMask m = members; m; m &= m - 1) candidates.push_back(__builtin_ctzll(m));
    Rng rng(splitmix64(seed));
    shuffle(candidates, rng);

    Plan cur = plan;
    int extracted = 0;
    for (int m : candidates) {
        if (extracted == count) break;
        Plan next = cur;
        std::vector<char> own(inst.num_customers() + 1, 0);
        for (int c : cur.routes[m])
            if (cur.server[c] == m) own[c] = 1;
        for (std::size_t k = 0; k < next.routes.size(); ++k) {
            auto& route = next.routes[k];
            const bool self = static_cast<int>(k) == m;
            route.erase(std::remove_if(route.begin(), route.end(), [&](int c) { return self ? !own[c] : own[c] != 0; }),
                        route.end());
        }
        // Extraction only drops visits, so the plan stays acyclic; skipped
        // customers can still push a bypass arc past the platoon limit.
        if (!check_plan(inst, next).empty()) continue;
        cur = drop_idle(next);
        ++extracted;
    }
    if (extracted == 0) throw Error(ErrorCode::NothingToShake, "every extraction would overfill a platoon");
    return cur;
}

StartResult tabu_search(const Instance& inst, const Plan& initial, const SearchParams& params, std::uint64_t seed) {
    StartResult out;
    State cur(inst, initial);
    Plan best = cur.plan();
    Cost best_cost = cur.cost();
    TabuState tabu(cur.num_nodes(), params.tenure);
    Rng rng(splitmix64(seed));
    const int shake_max = params.shake_max > 0 ? params.shake_max : (inst.fleet_size + 2) / 3;
    const NeighborhoodOptions opts{params.use_relocate, params.use_merge};
    int stale = 0;
    out.trace.push_back(TraceRow{0, cur.cost(), best_cost, std::nullopt, false});

    auto do_shake = [&]() {
        if (!params.use_shaking) return false;
        try {
            const int count = uniform_int(rng, 1, std::max(1, shake_max));
            cur = State(inst, shake(inst, cur.plan(), count, rng()));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NothingToShake) throw;
            return false;
        }
        tabu.clear();
        stale = 0;
        return true;
    };

    for (int it = 1; it <= params.max_iterations; ++it) {
        tabu.advance();
        TraceRow row;
        row.iteration = it;
        try {
            const Move m = best_move(cur, Admission{&tabu, best_cost}, opts);
            cur = State(inst, drop_idle(apply_edit(cur.plan(), m.edit)));
            tabu.forbid(list_of(m.kind), m.touched_arcs);
            row.kind = m.kind;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoAdmissibleMove) throw;
            if (!do_shake()) {
                // Nothing to move and nothing to shake: this start is finished.
                break;
            }
            row.shake = true;
        }
        if (cur.cost() < best_cost) {
            best_cost = cur.cost();
            best = cur.plan();
            out.iter_to_best = it;
            stale = 0;
        } else if (!row.shake) {
            ++stale;
        }
        if (stale >= params.shake_trigger) {
            if (do_shake()) row.shake = true;
            else stale = 0;
        }
        row.current = cur.cost();
        row.best = best_cost;
        out.trace.push_back(row);
    }
    out.ok = true;
    out.best = std::move(best);
    out.best_cost = best_cost;
    return out;
}

std::pair<std::uint64_t, std::uint64_t> start_seeds(std::uint64_t seed, int start) {
    const std::uint64_t base = splitmix64(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(start + 1));
    return {splitmix64(base ^ 0x5a5a5a5aULL), splitmix64(base ^ 0xa5a5a5a5ULL)};
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MVRP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SearchResult multi_start(const Instance& inst, const SearchParams& params) {
    check_params(params);
    SearchResult res;
    res.starts.resize(params.starts);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int i = next++; i < params.starts; i = next++) {
            StartResult& r = res.starts[i];
            try {
                const auto [sample_seed, tabu_seed] = start_seeds(params.seed, i);
                const Plan sparse = sample_sparse_solution(inst, sample_seed, params.sparse_fill);
                const Plan merged = cw_improve(inst, sparse);
                r = tabu_search(inst, merged, params, tabu_seed);
                r.sparse_cost = plan_cost(inst, sparse);
                r.cw_cost = plan_cost(inst, merged);
            } catch (const Error& e) {
                r = StartResult{};
                r.error = e.what();
                if (e.code() != ErrorCode::InfeasibleSparse) r.error = std::string("internal: ") + e.what();
            }
            r.start = i;
        }
    };
    const int workers = std::min(worker_count(params.threads), params.starts);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& r : res.starts) {
        if (!r.ok) continue;
        if (res.best_start < 0 || r.best_cost < res.best_cost) {
            res.best_start = r.start;
            res.best_cost = r.best_cost;
            res.best = r.best;
        }
    }
    if (res.best_start < 0) {
        const std::string why = res.starts.empty() ? "no starts" : res.starts.front().error;
        if (why.rfind("internal: ", 0) == 0) throw Error(ErrorCode::InvariantViolation, why);
        throw Error(ErrorCode::InfeasibleSparse, why);
    }
    return res;
}

std::string trace_csv(const std::vector<TraceRow>& trace, std::int64_t scale) {
    std::ostringstream out;
    out << "iteration,current_cost,best_cost,move_kind,shake\n";
    for (const auto& r : trace)
        out << r.iteration << "," << format_cost(r.current, scale) << "," << format_cost(r.best, scale) << ","
            << (r.kind ? to_string(*r.kind) : "none") << "," << (r.shake ? 1 : 0) << "\n";
    return out.str();
}

}  // namespace mvrp
