#include "doctest.h"

#include "core/error.hpp"
#include "core/oracle.hpp"
#include "core/solution.hpp"
#include "mutations.hpp"

using namespace mvrp;

TEST_CASE("T2 optimal document") {
    const Instance inst = test::t2();
    const SolutionDoc doc = test::t2_optimal_doc();
    CHECK(doc.cost == "21.0");
    REQUIRE(doc.segments.size() == 4);
    CHECK(doc.segments[1].mvs == std::vector<int>{0, 1});
    CHECK(doc.segments[2].mvs == std::vector<int>{1});
    CHECK(doc.mv_paths.at(0) == std::vector<int>{0, 1, 3});
    CHECK(doc.mv_paths.at(1) == std::vector<int>{0, 1, 2, 3});
    CHECK(validate(doc, inst).ok());
    CHECK(total_cost(doc, inst) == test::units(21, inst));

    const auto routes = mv_routes(doc, inst);
    CHECK(routes.at(0) == std::vector<int>{0, 1, 3});
    CHECK(routes.at(1) == std::vector<int>{0, 1, 2, 3});

    const auto vrp = drop_repeats(routes, test::t2_optimal_plan().server);
    CHECK(vrp.at(0) == std::vector<int>{0, 1, 3});
    CHECK(vrp.at(1) == std::vector<int>{0, 2, 3});
    CHECK(check_vrp(inst, vrp).empty());
    CHECK(vrp_cost(inst, vrp) == test::units(22, inst));
}

TEST_CASE("serialize and parse a solution") {
    const SolutionDoc doc = test::t2_optimal_doc();
    const std::string text = serialize_solution(doc);
    const SolutionDoc back = parse_solution(text);
    CHECK(serialize_solution(back) == text);
    CHECK(text.find("\"serving_mv\"") != std::string::npos);
    CHECK_THROWS_AS(parse_solution("{"), Error);
    CHECK_THROWS_AS(parse_solution("{\"cost\": \"1.0\"}"), Error);
}

TEST_CASE("empty and single-route documents") {
    const Instance one = test::make_instance({{0, 0}, {5, 0}}, {0, 1}, 1, 1, 1);
    Plan p = Plan::empty(one);
    p.routes[0] = {1};
    p.server[1] = 0;
    const SolutionDoc doc = to_doc(State(one, p));
    CHECK(doc.cost == "10.0");
    CHECK(validate(doc, one).ok());
    CHECK(mv_routes(doc, one).at(0) == std::vector<int>{0, 1, 2});
    CHECK(drop_repeats(mv_routes(doc, one), p.server) == mv_routes(doc, one));

    SolutionDoc empty;
    empty.cost = "0.0";
    empty.segments = {test::seg(0, {}), test::seg(1, {})};
    CHECK(total_cost(empty, one) == Cost(0));
}

TEST_CASE("pass-through customers in separate segments are allowed") {
    const Instance inst = test::t2(2);
    const SolutionDoc doc = test::t2_split_doc(std::nullopt);
    const auto report = validate(doc, inst);
    for (const auto& [v, d] : report.violations) MESSAGE((std::string(to_string(v)) + " " + d));
    CHECK(report.ok());
}

TEST_CASE("both MVs serving c1") {
    const Instance inst = test::t2();
    SolutionDoc split = test::t2_split_doc(1);
    split.segments[2].customers[1].serving_mv.reset();
    const auto r = validate(split, inst);
    CHECK(r.has(Violation::MultiServedCustomer));
    CHECK(r.has(Violation::UnservedCustomer));
}

TEST_CASE("mutation suite: each defect yields exactly its code") {
    for (const auto& m : test::mutation_suite()) {
        const std::string expected = to_string(m.expected);
        CAPTURE(expected);
        const auto r = validate(m.doc, m.inst);
        for (const auto& [v, d] : r.violations) MESSAGE((std::string(to_string(v)) + " " + d));
        CHECK(test::only(r, m.expected));
    }
}

TEST_CASE("platoon overflow detail names the segment") {
    const auto suite = test::mutation_suite();
    const auto r = validate(suite[0].doc, suite[0].inst);
    bool named = false;
    for (const auto& [v, d] : r.violations)
        if (v == Violation::PlatoonOverflow && d.rfind("segment=1 size=3", 0) == 0) named = true;
    CHECK(named);
}

TEST_CASE("documents from random plans validate and round-trip") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Instance inst = test::random_tiny(seed, 2 + static_cast<int>(seed % 5), 3, 2 + static_cast<int>(seed % 2));
        const OracleResult opt = brute_force_opt(inst);
        const State st(inst, opt.plan);
        const SolutionDoc doc = to_doc(st);
        const auto r = validate(doc, inst);
        for (const auto& [v, d] : r.violations) MESSAGE((std::string(to_string(v)) + " " + d));
        CHECK(r.ok());
        CHECK(plan_from_doc(doc, inst) == opt.plan);
        CHECK(total_cost(doc, inst) == st.cost());
        // rebuilding the document from its own Gantt rows gives the same document
        CHECK(serialize_solution(to_doc(State(inst, plan_from_doc(doc, inst)))) == serialize_solution(doc));
        // dropping repeated visits gives a VRP solution that is no cheaper at single-MV cost
        const auto vrp = drop_repeats(mv_routes(doc, inst), opt.plan.server);
        CHECK(check_vrp(inst, vrp).empty());
        std::int64_t single = 0;
        for (const auto& [mv, route] : mv_routes(doc, inst))
            for (std::size_t i = 1; i < route.size(); ++i) single += inst.d(route[i - 1], route[i]);
        CHECK(vrp_cost(inst, vrp) <= Cost(single * inst.scale()));
    }
}
