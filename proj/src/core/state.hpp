#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/cost.hpp"
#include "core/instance.hpp"

namespace mvrp {

using Arc = std::pair<int, int>;
using MvMask = std::uint64_t;

inline int popcount(MvMask m) { return __builtin_popcountll(m); }

// Working form of a solution: every MV's visit sequence (customers only, the
// depot legs are implicit) plus the serving MV of each customer. An unused MV
// has an empty route.
struct Plan {
    std::vector<std::vector<int>> routes;  // size K
    std::vector<int> server;               // size N + 1, server[0] == -1

    static Plan empty(const Instance& inst);
    friend bool operator==(const Plan&, const Plan&) = default;
};

// Route replacement and reassignment applied on top of a plan.
struct Edit {
    std::vector<std::pair<int, std::vector<int>>> routes;  // mv -> new route
    std::vector<std::pair<int, int>> servers;             // customer -> mv
};

Plan apply_edit(const Plan& plan, const Edit& edit);

// Empty string when the plan is feasible, otherwise the first problem found.
std::string check_plan(const Instance& inst, const Plan& plan);

// Exact objective: every node arc is charged as one platoon of the MVs on it.
Cost plan_cost(const Instance& inst, const Plan& plan);

// Maximal chain of customers visited by the same platoon with no docking or
// splitting in between.
struct Segment {
    std::vector<int> customers;
    MvMask mvs = 0;
};

// Plan plus the derived data the operators query: per-arc MV sets, visitors,
// loads, a node topological order and the canonical segmentation.
class State {
public:
    State(const Instance& inst, Plan plan);  // throws InvariantViolation on an infeasible plan

    const Instance& inst() const { return *inst_; }
    const Plan& plan() const { return plan_; }
    Cost cost() const { return cost_; }
    int num_nodes() const { return v_; }
    int num_mvs() const { return static_cast<int>(plan_.routes.size()); }

    MvMask arc_mvs(int u, int v) const { return arc_mvs_[static_cast<std::size_t>(u) * v_ + v]; }
    int count(int u, int v) const { return count_[static_cast<std::size_t>(u) * v_ + v]; }
    MvMask visitors(int node) const { return visitors_[node]; }
    int load(int mv) const { return load_[mv]; }
    MvMask used_mvs() const { return used_; }

    // Neighbours of a visited node along an MV's route (depot / sink at the ends).
    int pred(int mv, int node) const;
    int succ(int mv, int node) const;
    int position(int mv, int node) const { return pos_[static_cast<std::size_t>(mv) * v_ + node]; }

    const std::vector<int>& topo() const { return topo_; }
    int rank(int node) const { return rank_[node]; }
    const std::vector<Arc>& arcs() const { return arcs_; }  // positive-count arcs, sorted

    const std::vector<Segment>& segments() const { return segments_; }  // topological order
    int segment_of(int customer) const { return segment_of_[customer]; }
    // Indices of segments that form a whole source-to-sink route on their own.
    const std::vector<int>& single_brunch() const { return single_brunch_; }

    // Lowest-id MV with an empty route, or -1.
    int free_mv() const;

private:
    const Instance* inst_;
    Plan plan_;
    int v_ = 0;
    Cost cost_;
    std::vector<MvMask> arc_mvs_;
    std::vector<std::uint8_t> count_;
    std::vector<MvMask> visitors_;
    std::vector<int> load_;
    std::vector<int> pos_;
    MvMask used_ = 0;
    std::vector<int> topo_;
    std::vector<int> rank_;
    std::vector<Arc> arcs_;
    std::vector<Segment> segments_;
    std::vector<int> segment_of_;
    std::vector<int> single_brunch_;
};

}  // namespace mvrp
