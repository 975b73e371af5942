#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/instance.hpp"
#include "core/state.hpp"

namespace mvrp {

// Segment/ST-DAG/Gantt form of a solution as written to and read from disk.
// Segment 0 is the source dummy, the highest id is the sink dummy; both have
// no customers and list every used MV.
struct SegmentEntry {
    int node = 0;
    std::optional<int> serving_mv;  // nullopt: the platoon only passes through
};

struct SegmentDoc {
    int id = 0;
    std::vector<int> mvs;
    std::vector<SegmentEntry> customers;
};

struct SolutionDoc {
    std::string instance_name;
    std::string cost;
    std::vector<SegmentDoc> segments;
    std::vector<std::pair<int, int>> dag_arcs;
    std::map<int, std::vector<int>> mv_paths;
};

SolutionDoc to_doc(const State& state);
std::string serialize_solution(const SolutionDoc& doc);
SolutionDoc parse_solution(std::string_view text);  // throws ParseError

enum class Violation {
    UnservedCustomer,
    MultiServedCustomer,
    CapacityBreach,
    PlatoonOverflow,
    DagCycle,
    GanttMismatch,
    MvConservation,
    CostMismatch,
};

const char* to_string(Violation v);

struct ValidationReport {
    std::vector<std::pair<Violation, std::string>> violations;
    bool ok() const { return violations.empty(); }
    bool has(Violation v) const;
};

ValidationReport validate(const SolutionDoc& doc, const Instance& inst);

// Objective of a structurally sound document (paths reference known segments).
Cost total_cost(const SolutionDoc& doc, const Instance& inst);

// Working plan of a document that passed validate().
Plan plan_from_doc(const SolutionDoc& doc, const Instance& inst);

// Full visit sequence of each used MV, depot first and sink (N + 1) last.
std::map<int, std::vector<int>> mv_routes(const SolutionDoc& doc, const Instance& inst);

// Keeps only the customers each MV serves; MVs left with no customer disappear.
std::map<int, std::vector<int>> drop_repeats(const std::map<int, std::vector<int>>& routes,
                                             const std::vector<int>& server);

// Plain VRP check on depot-to-sink routes: every customer exactly once,
// capacity respected, at most K routes. Empty string when feasible.
std::string check_vrp(const Instance& inst, const std::map<int, std::vector<int>>& routes);

// Sum of route lengths at the instance's cost scale.
Cost vrp_cost(const Instance& inst, const std::map<int, std::vector<int>>& routes);

}  // namespace mvrp
