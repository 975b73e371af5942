#include "doctest.h"

#include <cmath>

#include "core/error.hpp"
#include "core/oracle.hpp"
#include "core/search.hpp"
#include "core/solution.hpp"
#include "support.hpp"

using namespace mvrp;

namespace {

SearchParams small_params(int starts = 3, int iterations = 100) {
    SearchParams p;
    p.starts = starts;
    p.max_iterations = iterations;
    p.threads = 1;
    p.seed = 42;
    return p;
}

}  // namespace

TEST_CASE("parameter checks") {
    SearchParams p;
    CHECK_NOTHROW(check_params(p));
    p.sparse_fill = 0.0;
    CHECK_THROWS_AS(check_params(p), Error);
    p.sparse_fill = 1.5;
    CHECK_THROWS_AS(check_params(p), Error);
    p = SearchParams{};
    p.starts = 0;
    CHECK_THROWS_AS(check_params(p), Error);
}

TEST_CASE("sparse sampling") {
    SUBCASE("one customer") {
        const Instance inst = test::make_instance({{0, 0}, {3, 3}}, {0, 2}, 5, 1, 1);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Plan p = sample_sparse_solution(inst, seed, 0.5);
            CHECK(p.routes[0] == std::vector<int>{1});
        }
    }
    SUBCASE("T2 at full fill") {
        const Instance inst = test::t2();
        const Plan p = sample_sparse_solution(inst, 1, 1.0);
        CHECK(check_plan(inst, p).empty());
        CHECK(validate(to_doc(State(inst, p)), inst).ok());
    }
    SUBCASE("loads respect the fill ratio") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Instance inst = synthesize_cvrp(AugeratSet::A, 30, 100, seed);
            Instance mvrp = inst;
            mvrp.max_platoon = 3;
            mvrp.eta = Rational{1, 10};
            mvrp.metric = Metric::Manhattan;
            // room for half-full routes
            mvrp.fleet_size = 2 * Instance::default_fleet(mvrp.total_demand(), mvrp.capacity);
            mvrp.build();
            const Plan p = sample_sparse_solution(mvrp, seed, 0.5);
            const State st(mvrp, p);
            for (int m = 0; m < st.num_mvs(); ++m) CHECK(st.load(m) <= 50);
            for (const auto& s : st.segments()) CHECK(popcount(s.mvs) == 1);
            CHECK(st.single_brunch().size() == st.segments().size());
        }
    }
    SUBCASE("routes are angular sectors") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Instance inst = synthesize_cvrp(AugeratSet::B, 40, 100, seed);
            inst.fleet_size = 2 * Instance::default_fleet(inst.total_demand(), inst.capacity);
            inst.build();
            const Plan p = sample_sparse_solution(inst, seed, 0.5);
            // rank customers by polar angle; each route must own one cyclic run of ranks
            const int n = inst.num_customers();
            std::vector<std::pair<double, int>> polar;
            for (int c = 1; c <= n; ++c)
                polar.emplace_back(std::atan2(inst.points[c].y - inst.points[0].y, inst.points[c].x - inst.points[0].x), c);
            std::stable_sort(polar.begin(), polar.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<int> owner(n);
            for (int i = 0; i < n; ++i) owner[i] = p.server[polar[i].second];
            int changes = 0;
            for (int i = 0; i < n; ++i) changes += owner[i] != owner[(i + 1) % n];
            int used = 0;
            for (const auto& r : p.routes) used += !r.empty();
            CAPTURE(seed);
            CHECK(changes == (used == 1 ? 0 : used));
        }
    }
    SUBCASE("tight fleet falls back to packing") {
        // demands 5, 5, 5, 2, 2, 2 around the depot with Q = 7 and K = 3: no cut of
        // the circular order fits in three routes, only pairs {5, 2} do
        std::vector<Point> pts{{0, 0}};
        for (int i = 0; i < 6; ++i) pts.push_back(Point{10 * std::cos(i * M_PI / 3), 10 * std::sin(i * M_PI / 3)});
        const Instance inst = test::make_instance(pts, {0, 5, 5, 5, 2, 2, 2}, 7, 3, 2);
        int built = 0;
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            try {
                const Plan p = sample_sparse_solution(inst, seed, 1.0);
                CHECK(check_plan(inst, p).empty());
                ++built;
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::InfeasibleSparse);
            }
        }
        CHECK(built > 0);
    }
    SUBCASE("infeasible") {
        // every construction at ratio 1 needs three routes for demands {4, 4, 4} with Q = 6
        const Instance inst = test::make_instance({{0, 0}, {1, 0}, {2, 0}, {3, 0}}, {0, 4, 4, 4}, 6, 2, 2);
        try {
            sample_sparse_solution(inst, 0, 0.5);
            FAIL("expected InfeasibleSparse");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InfeasibleSparse);
        }
    }
}

TEST_CASE("shaking") {
    const Instance inst = test::t2();
    SUBCASE("nothing to shake") {
        Plan p;
        p.routes = {{1}, {2}};
        p.server = {-1, 0, 1};
        try {
            shake(inst, p, 1, 0);
            FAIL("expected NothingToShake");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NothingToShake);
        }
    }
    SUBCASE("extraction keeps service") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const Instance tiny = test::random_tiny(seed, 3 + static_cast<int>(seed % 4), 3, 3);
            const Plan opt = brute_force_opt(tiny).plan;
            const State st(tiny, opt);
            bool platoon = false;
            for (const auto& [u, v] : st.arcs())
                if (st.count(u, v) >= 2) platoon = true;
            if (!platoon) continue;
            const Plan shaken = shake(tiny, opt, 1, seed);
            CHECK(check_plan(tiny, shaken).empty());
            CHECK(shaken.server == opt.server);
            CHECK(validate(to_doc(State(tiny, shaken)), tiny).ok());
        }
    }
    SUBCASE("segments re-merge after extraction") {
        // MV 2 joins MV 0 on c1 -> c2 and MV 1 on c3 -> c4 (one shared chain each)
        const Instance four = test::make_instance({{0, 0}, {5, 0}, {6, 0}, {5, 5}, {5, 6}}, {0, 1, 1, 1, 1}, 2, 3, 2);
        Plan p = Plan::empty(four);
        p.routes = {{1, 2}, {3, 4}, {1, 2, 3, 4}};
        p.server = {-1, 0, 0, 1, 1};
        const State before(four, p);
        const Plan shaken = shake(four, p, 3, 7);
        const State after(four, shaken);
        CHECK(after.segments().size() <= before.segments().size());
        CHECK(shaken.routes[2].empty());
    }
}

TEST_CASE("tabu search reaches the small optima") {
    SUBCASE("T1") {
        const Instance inst = test::t1();
        Plan p;
        p.routes = {{1}, {2}};
        p.server = {-1, 0, 1};
        const StartResult r = tabu_search(inst, p, small_params(1, 50), 1);
        CHECK(r.best_cost == test::units(4, inst));
    }
    SUBCASE("T2") {
        const Instance inst = test::t2();
        Plan p;
        p.routes = {{1}, {2}};
        p.server = {-1, 0, 1};
        const StartResult r = tabu_search(inst, p, small_params(1, 50), 1);
        CHECK(format_cost(r.best_cost, inst.scale()) == "21.0");
        CHECK(r.trace.front().iteration == 0);
        CHECK(r.trace.front().best == test::units(22, inst));
        for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].best <= r.trace[i - 1].best);
        const StartResult again = tabu_search(inst, p, small_params(1, 50), 1);
        CHECK(trace_csv(again.trace, 10) == trace_csv(r.trace, 10));
    }
}

TEST_CASE("multi-start") {
    const Instance inst = test::t2();
    const SearchResult r = multi_start(inst, small_params(5, 100));
    CHECK(format_cost(r.best_cost, inst.scale()) == "21.0");
    CHECK(validate(to_doc(State(inst, r.best)), inst).ok());

    SUBCASE("one start equals the single pipeline") {
        const SearchParams p = small_params(1, 60);
        const SearchResult one = multi_start(inst, p);
        const auto [sample_seed, tabu_seed] = start_seeds(p.seed, 0);
        const Plan merged = cw_improve(inst, sample_sparse_solution(inst, sample_seed, p.sparse_fill));
        const StartResult direct = tabu_search(inst, merged, p, tabu_seed);
        CHECK(one.best == direct.best);
        CHECK(trace_csv(one.starts[0].trace, 10) == trace_csv(direct.trace, 10));
    }
    SUBCASE("thread count does not change the result") {
        const Instance big = test::random_tiny(5, 6, 3, 3);
        SearchParams p = small_params(6, 80);
        const SearchResult a = multi_start(big, p);
        p.threads = 3;
        const SearchResult b = multi_start(big, p);
        CHECK(a.best == b.best);
        CHECK(a.best_start == b.best_start);
        for (int i = 0; i < 6; ++i) CHECK(trace_csv(a.starts[i].trace, 10) == trace_csv(b.starts[i].trace, 10));
    }
}

TEST_CASE("pipeline dominance and anytime validity") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance base = synthesize_cvrp(seed % 2 ? AugeratSet::B : AugeratSet::A, 32, 100, seed);
        DeriveOverrides o;
        o.max_platoon = 3;
        o.eta = Rational{1, 10};
        o.metric = Metric::Manhattan;
        const Instance inst = derive_instance(base, sample_customers(base, 14, seed), o);
        const SearchResult r = multi_start(inst, small_params(2, 60));
        for (const auto& s : r.starts) {
            REQUIRE(s.ok);
            CHECK(s.cw_cost <= s.sparse_cost);
            CHECK(s.best_cost <= s.cw_cost);
            CHECK(s.trace.front().current == s.cw_cost);
            for (std::size_t i = 1; i < s.trace.size(); ++i) CHECK(s.trace[i].best <= s.trace[i - 1].best);
        }
        CHECK(validate(to_doc(State(inst, r.best)), inst).ok());
        CHECK(plan_cost(inst, r.best) == r.best_cost);
    }
}

TEST_CASE("trace csv layout") {
    std::vector<TraceRow> rows{{0, Cost(220), Cost(220), std::nullopt, false}, {1, Cost(210), Cost(210), MoveKind::ParallelMerge, false}};
    CHECK(trace_csv(rows, 10) == "iteration,current_cost,best_cost,move_kind,shake\n0,22.0,22.0,none,0\n1,21.0,21.0,ParallelMerge,0\n");
}
