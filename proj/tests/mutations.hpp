#pragma once

// Known-good T2 solution documents and one hand-made defect per violation class.

#include <string>
#include <vector>

#include "core/solution.hpp"
#include "support.hpp"

namespace mvrp::test {

inline Plan t2_optimal_plan() {
    Plan p;
    p.routes = {{1}, {1, 2}};
    p.server = {-1, 0, 1};
    return p;
}

// MV 0 and MV 1 platoon to c1; MV 0 serves it and goes home, MV 1 serves c2.
inline SolutionDoc t2_optimal_doc() {
    const Instance inst = t2();
    return to_doc(State(inst, t2_optimal_plan()));
}

inline SegmentDoc seg(int id, std::vector<int> mvs, std::vector<SegmentEntry> customers = {}) {
    return SegmentDoc{id, std::move(mvs), std::move(customers)};
}

// Q = 2: each MV runs its own segment through c1, only MV 0 serves it.
inline SolutionDoc t2_split_doc(std::optional<int> second_server_of_c1) {
    SolutionDoc doc;
    doc.instance_name = "test";
    doc.cost = "21.0";
    doc.segments = {seg(0, {0, 1}), seg(1, {0}, {{1, 0}}), seg(2, {1}, {{1, second_server_of_c1}, {2, 1}}),
                    seg(3, {0, 1})};
    doc.dag_arcs = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    doc.mv_paths = {{0, {0, 1, 3}}, {1, {0, 2, 3}}};
    return doc;
}

struct Mutation {
    Violation expected;
    Instance inst;
    SolutionDoc doc;
};

inline std::vector<Mutation> mutation_suite() {
    std::vector<Mutation> out;
    {
        // A third MV joins the c1 platoon.
        const Instance inst = make_instance({{0, 0}, {5, 0}, {6, 0}}, {0, 1, 1}, 1, 3, 2);
        SolutionDoc doc = t2_optimal_doc();
        for (auto& s : doc.segments)
            if (s.id != 2) s.mvs.push_back(2);
        doc.mv_paths[2] = {0, 1, 3};
        doc.cost = "28.0";
        out.push_back({Violation::PlatoonOverflow, inst, doc});
    }
    {
        out.push_back({Violation::MultiServedCustomer, t2(2), t2_split_doc(1)});
    }
    {
        SolutionDoc doc = t2_optimal_doc();
        doc.segments[2].customers[0].serving_mv.reset();
        out.push_back({Violation::UnservedCustomer, t2(), doc});
    }
    {
        SolutionDoc doc = t2_optimal_doc();
        doc.segments[1].customers[0].serving_mv = 1;
        out.push_back({Violation::CapacityBreach, t2(), doc});
    }
    {
        // MV 0 drives c1 -> c2, MV 1 drives c2 -> c1.
        SolutionDoc doc;
        doc.instance_name = "test";
        doc.cost = "24.0";
        doc.segments = {seg(0, {0, 1}), seg(1, {0}, {{1, 0}, {2, std::nullopt}}),
                        seg(2, {1}, {{2, 1}, {1, std::nullopt}}), seg(3, {0, 1})};
        doc.dag_arcs = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
        doc.mv_paths = {{0, {0, 1, 3}}, {1, {0, 2, 3}}};
        out.push_back({Violation::DagCycle, t2(), doc});
    }
    {
        SolutionDoc doc = t2_optimal_doc();
        doc.segments[2].mvs = {0, 1};
        out.push_back({Violation::GanttMismatch, t2(), doc});
    }
    {
        SolutionDoc doc = t2_optimal_doc();
        doc.cost = "20.0";
        out.push_back({Violation::CostMismatch, t2(), doc});
    }
    return out;
}

// True when the report holds at least one violation and all of them have the given code.
inline bool only(const ValidationReport& r, Violation v) {
    if (r.violations.empty()) return false;
    for (const auto& [code, detail] : r.violations)
        if (code != v) return false;
    return true;
}

}  // namespace mvrp::test
