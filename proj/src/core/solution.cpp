#include "core/solution.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <json.hpp>

#include "core/error.hpp"

namespace mvrp {

using ordered_json = nlohmann::ordered_json;

SolutionDoc to_doc(const State& state) {
    const Instance& inst = state.inst();
    const Plan& plan = state.plan();
    const int sink_id = static_cast<int>(state.segments().size()) + 1;
    SolutionDoc doc;
    doc.instance_name = inst.name;
    doc.cost = format_cost(state.cost(), inst.scale());

    std::vector<int> used;
    for (int m = 0; m < state.num_mvs(); ++m)
        if (!plan.routes[m].empty()) used.push_back(m);

    doc.segments.push_back(SegmentDoc{0, used, {}});
    for (std::size_t s = 0; s < state.segments().size(); ++s) {
        const Segment& seg = state.segments()[s];
        SegmentDoc out;
        out.id = static_cast<int>(s) + 1;
        for (MvMask m = seg.mvs; m; m &= m - 1) out.mvs.push_back(__builtin_ctzll(m));
        for (int c : seg.customers) out.customers.push_back(SegmentEntry{c, plan.server[c]});
        doc.segments.push_back(std::move(out));
    }
    doc.segments.push_back(SegmentDoc{sink_id, used, {}});

    std::set<std::pair<int, int>> arcs;
    for (int m : used) {
        std::vector<int> path{0};
        for (int c : plan.routes[m]) {
            const int id = state.segment_of(c) + 1;
            if (path.back() != id) path.push_back(id);
        }
        path.push_back(sink_id);
        for (std::size_t i = 1; i < path.size(); ++i) arcs.emplace(path[i - 1], path[i]);
        doc.mv_paths[m] = std::move(path);
    }
    doc.dag_arcs.assign(arcs.begin(), arcs.end());
    return doc;
}

std::string serialize_solution(const SolutionDoc& doc) {
    ordered_json j;
    j["instance_name"] = doc.instance_name;
    j["cost"] = doc.cost;
    j["segments"] = ordered_json::array();
    for (const auto& seg : doc.segments) {
        ordered_json s;
        s["id"] = seg.id;
        s["mvs"] = seg.mvs;
        s["customers"] = ordered_json::array();
        for (const auto& e : seg.customers) {
            ordered_json c;
            c["node"] = e.node;
            c["serving_mv"] = e.serving_mv ? ordered_json(*e.serving_mv) : ordered_json(nullptr);
            s["customers"].push_back(c);
        }
        j["segments"].push_back(s);
    }
    j["dag_arcs"] = ordered_json::array();
    for (const auto& [a, b] : doc.dag_arcs) j["dag_arcs"].push_back({a, b});
    j["mv_paths"] = ordered_json::object();
    for (const auto& [mv, path] : doc.mv_paths) j["mv_paths"][std::to_string(mv)] = path;
    return j.dump(2) + "\n";
}

SolutionDoc parse_solution(std::string_view text) {
    SolutionDoc doc;
    try {
        const auto j = nlohmann::json::parse(text);
        doc.instance_name = j.at("instance_name").get<std::string>();
        doc.cost = j.at("cost").get<std::string>();
        for (const auto& s : j.at("segments")) {
            SegmentDoc seg;
            seg.id = s.at("id").get<int>();
            seg.mvs = s.at("mvs").get<std::vector<int>>();
            for (const auto& c : s.at("customers")) {
                SegmentEntry e;
                e.node = c.at("node").get<int>();
                if (!c.at("serving_mv").is_null()) e.serving_mv = c.at("serving_mv").get<int>();
                seg.customers.push_back(e);
            }
            doc.segments.push_back(std::move(seg));
        }
        for (const auto& a : j.at("dag_arcs")) {
            if (!a.is_array() || a.size() != 2) throw Error(ErrorCode::ParseError, "dag arcs must be [from, to] pairs");
            doc.dag_arcs.emplace_back(a[0].get<int>(), a[1].get<int>());
        }
        for (const auto& [key, path] : j.at("mv_paths").items()) {
            int mv = 0;
            auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), mv);
            if (ec != std::errc() || ptr != key.data() + key.size())
                throw Error(ErrorCode::ParseError, "mv_paths key '" + key + "' is not an integer");
            doc.mv_paths[mv] = path.get<std::vector<int>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("solution file: ") + e.what());
    }
    return doc;
}

const char* to_string(Violation v) {
    switch (v) {
        case Violation::UnservedCustomer: return "UnservedCustomer";
        case Violation::MultiServedCustomer: return "MultiServedCustomer";
        case Violation::CapacityBreach: return "CapacityBreach";
        case Violation::PlatoonOverflow: return "PlatoonOverflow";
        case Violation::DagCycle: return "DagCycle";
        case Violation::GanttMismatch: return "GanttMismatch";
        case Violation::MvConservation: return "MvConservation";
        case Violation::CostMismatch: return "CostMismatch";
    }
    return "Unknown";
}

bool ValidationReport::has(Violation v) const {
    return std::any_of(violations.begin(), violations.end(), [v](const auto& p) { return p.first == v; });
}

namespace {

// Routes per MV by concatenating the customers of the segments on its path.
// Returns false when a path names an unknown segment.
bool collect_routes(const SolutionDoc& doc, std::map<int, std::vector<int>>& routes) {
    std::map<int, const SegmentDoc*> by_id;
    for (const auto& s : doc.segments) by_id[s.id] = &s;
    for (const auto& [mv, path] : doc.mv_paths) {
        auto& route = routes[mv];
        for (int id : path) {
            auto it = by_id.find(id);
            if (it == by_id.end()) return false;
            for (const auto& e : it->second->customers) route.push_back(e.node);
        }
    }
    return true;
}

bool has_cycle(int n, const std::vector<std::vector<int>>& out) {
    std::vector<int> indeg(n, 0);
    for (const auto& adj : out)
        for (int w : adj) ++indeg[w];
    std::vector<int> stack;
    for (int u = 0; u < n; ++u)
        if (indeg[u] == 0) stack.push_back(u);
    int seen = 0;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        ++seen;
        for (int w : out[u])
            if (--indeg[w] == 0) stack.push_back(w);
    }
    return seen != n;
}

}  // namespace

ValidationReport validate(const SolutionDoc& doc, const Instance& inst) {
    ValidationReport report;
    auto add = [&](Violation v, std::string detail) { report.violations.emplace_back(v, std::move(detail)); };
    const int n = inst.num_customers();
    const int k = inst.fleet_size;
    const int sink_node = n + 1;
    bool paths_sound = true;

    // Segment table and dummies.
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < doc.segments.size(); ++i)
        if (!index.emplace(doc.segments[i].id, i).second)
            add(Violation::GanttMismatch, "segment=" + std::to_string(doc.segments[i].id) + " listed twice");
    std::vector<int> dummies;
    for (const auto& s : doc.segments)
        if (s.customers.empty()) dummies.push_back(s.id);
    int source = 0;
    int sink = -1;
    if (dummies.size() != 2 || !index.count(0) || !doc.segments[index[0]].customers.empty()) {
        add(Violation::GanttMismatch, "expected source segment 0 and exactly one sink segment");
        paths_sound = false;
    } else {
        sink = dummies[0] == 0 ? dummies[1] : dummies[0];
    }

    for (const auto& s : doc.segments) {
        std::set<int> members;
        for (int m : s.mvs) {
            if (m < 0 || m >= k) add(Violation::GanttMismatch, "segment=" + std::to_string(s.id) + " names unknown mv " + std::to_string(m));
            if (!members.insert(m).second) add(Violation::GanttMismatch, "segment=" + std::to_string(s.id) + " repeats mv " + std::to_string(m));
        }
        // The terminals hold the whole fleet; only real segments are platoons.
        const bool terminal = s.customers.empty();
        if (members.empty() && !terminal) add(Violation::GanttMismatch, "segment=" + std::to_string(s.id) + " has no platoon");
        if (!terminal && static_cast<int>(members.size()) > inst.max_platoon)
            add(Violation::PlatoonOverflow, "segment=" + std::to_string(s.id) + " size=" + std::to_string(members.size()) +
                                                " max=" + std::to_string(inst.max_platoon));
        for (const auto& e : s.customers) {
            if (e.node < 1 || e.node > n) {
                add(Violation::GanttMismatch, "segment=" + std::to_string(s.id) + " names unknown customer " + std::to_string(e.node));
                paths_sound = false;
            }
            if (e.serving_mv && !members.count(*e.serving_mv))
                add(Violation::GanttMismatch, "segment=" + std::to_string(s.id) + " customer " + std::to_string(e.node) +
                                                  " served by mv " + std::to_string(*e.serving_mv) + " outside the platoon");
        }
    }

    // ST-DAG arcs.
    std::set<std::pair<int, int>> arc_set;
    const int segs = static_cast<int>(doc.segments.size());
    std::vector<std::vector<int>> seg_out(segs);
    for (const auto& [a, b] : doc.dag_arcs) {
        if (!index.count(a) || !index.count(b)) {
            add(Violation::GanttMismatch, "dag arc " + std::to_string(a) + "->" + std::to_string(b) + " names an unknown segment");
            continue;
        }
        if (b == source || a == sink)
            add(Violation::GanttMismatch, "dag arc " + std::to_string(a) + "->" + std::to_string(b) + " runs against the terminals");
        if (arc_set.emplace(a, b).second) seg_out[index[a]].push_back(static_cast<int>(index[b]));
    }
    if (has_cycle(segs, seg_out)) add(Violation::DagCycle, "segment graph has a cycle");

    // Gantt rows.
    std::set<std::pair<int, int>> used_arcs;
    std::map<int, std::set<int>> column;  // segment id -> MVs whose path visits it
    std::set<int> path_mvs;
    for (const auto& [mv, path] : doc.mv_paths) {
        const std::string who = "mv=" + std::to_string(mv);
        if (mv < 0 || mv >= k) add(Violation::GanttMismatch, who + " is not in the fleet");
        path_mvs.insert(mv);
        if (path.size() < 2 || path.front() != source || path.back() != sink)
            add(Violation::GanttMismatch, who + " path does not run from source to sink");
        std::set<int> on_path;
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (!index.count(path[i])) {
                add(Violation::GanttMismatch, who + " path names unknown segment " + std::to_string(path[i]));
                paths_sound = false;
                continue;
            }
            if (!on_path.insert(path[i]).second) add(Violation::DagCycle, who + " passes segment " + std::to_string(path[i]) + " twice");
            column[path[i]].insert(mv);
            if (i > 0) {
                const std::pair<int, int> step{path[i - 1], path[i]};
                used_arcs.insert(step);
                if (!arc_set.count(step))
                    add(Violation::GanttMismatch, who + " moves " + std::to_string(step.first) + "->" +
                                                      std::to_string(step.second) + " without a dag arc");
            }
        }
    }
    for (const auto& arc : arc_set)
        if (!used_arcs.count(arc))
            add(Violation::MvConservation, "dag arc " + std::to_string(arc.first) + "->" + std::to_string(arc.second) + " carries no mv");
    for (const auto& s : doc.segments) {
        const std::set<int> stated(s.mvs.begin(), s.mvs.end());
        const std::set<int>& rows = (s.id == source || s.id == sink) ? path_mvs : column[s.id];
        if (stated != rows && !s.mvs.empty())
            add(Violation::GanttMismatch, "segment=" + std::to_string(s.id) + " platoon differs from the mv paths through it");
    }

    // Node-level routes: revisits, cycles and per-arc platoon sizes.
    std::map<int, std::vector<int>> routes;
    if (paths_sound && collect_routes(doc, routes)) {
        const int v = n + 2;
        std::vector<int> count(static_cast<std::size_t>(v) * v, 0);
        std::vector<std::vector<int>> out(v);
        for (const auto& [mv, route] : routes) {
            std::vector<char> seen(v, 0);
            int prev = 0;
            for (int c : route) {
                if (seen[c]++) add(Violation::DagCycle, "mv=" + std::to_string(mv) + " visits customer " + std::to_string(c) + " twice");
                if (count[static_cast<std::size_t>(prev) * v + c]++ == 0) out[prev].push_back(c);
                prev = c;
            }
            if (!route.empty() && count[static_cast<std::size_t>(prev) * v + sink_node]++ == 0) out[prev].push_back(sink_node);
        }
        if (has_cycle(v, out)) add(Violation::DagCycle, "customer visits form a cycle");
        for (int a = 0; a < v; ++a)
            for (int b = 0; b < v; ++b)
                if (count[static_cast<std::size_t>(a) * v + b] > inst.max_platoon)
                    add(Violation::PlatoonOverflow, "arc=" + std::to_string(a) + "->" + std::to_string(b) +
                                                        " size=" + std::to_string(count[static_cast<std::size_t>(a) * v + b]));
    } else {
        paths_sound = false;
    }

    // Service and capacity.
    std::vector<int> served(n + 1, 0);
    std::map<int, int> load;
    for (const auto& s : doc.segments)
        for (const auto& e : s.customers)
            if (e.serving_mv && e.node >= 1 && e.node <= n) {
                ++served[e.node];
                load[*e.serving_mv] += inst.demand[e.node];
            }
    for (int c = 1; c <= n; ++c) {
        if (served[c] == 0) add(Violation::UnservedCustomer, "customer=" + std::to_string(c));
        if (served[c] > 1) add(Violation::MultiServedCustomer, "customer=" + std::to_string(c) + " served " + std::to_string(served[c]) + " times");
    }
    for (const auto& [mv, q] : load)
        if (q > inst.capacity)
            add(Violation::CapacityBreach, "mv=" + std::to_string(mv) + " load=" + std::to_string(q) + " capacity=" + std::to_string(inst.capacity));

    // Cached cost.
    if (paths_sound) {
        const Cost computed = total_cost(doc, inst);
        std::optional<Cost> stated;
        try {
            stated = parse_cost(doc.cost, inst.scale());
        } catch (const Error&) {
        }
        if (!stated || *stated != computed)
            add(Violation::CostMismatch, "stated=" + doc.cost + " computed=" + format_cost(computed, inst.scale()));
    }
    return report;
}

Cost total_cost(const SolutionDoc& doc, const Instance& inst) {
    std::map<int, std::vector<int>> routes;
    if (!collect_routes(doc, routes)) throw Error(ErrorCode::InvalidArgument, "mv path names an unknown segment");
    const int v = inst.num_nodes_with_sink();
    std::map<std::pair<int, int>, int> count;
    for (const auto& [mv, route] : routes) {
        if (route.empty()) continue;
        int prev = 0;
        for (int c : route) {
            if (c < 1 || c >= v - 1) throw Error(ErrorCode::InvalidArgument, "unknown customer in solution");
            ++count[{prev, c}];
            prev = c;
        }
        ++count[{prev, v - 1}];
    }
    Cost total;
    for (const auto& [arc, l] : count) total += Cost(platoon_cost_scaled(inst.d(arc.first, arc.second), l, inst.eta));
    return total;
}

Plan plan_from_doc(const SolutionDoc& doc, const Instance& inst) {
    Plan plan = Plan::empty(inst);
    std::map<int, std::vector<int>> routes;
    if (!collect_routes(doc, routes)) throw Error(ErrorCode::InvalidArgument, "mv path names an unknown segment");
    for (auto& [mv, route] : routes) {
        if (mv < 0 || mv >= inst.fleet_size) throw Error(ErrorCode::InvalidArgument, "mv outside the fleet");
        plan.routes[mv] = std::move(route);
    }
    for (const auto& s : doc.segments)
        for (const auto& e : s.customers)
            if (e.serving_mv) plan.server[e.node] = *e.serving_mv;
    return plan;
}

std::map<int, std::vector<int>> mv_routes(const SolutionDoc& doc, const Instance& inst) {
    std::map<int, std::vector<int>> routes;
    if (!collect_routes(doc, routes)) throw Error(ErrorCode::InvalidArgument, "mv path names an unknown segment");
    for (auto& [mv, route] : routes) {
        route.insert(route.begin(), 0);
        route.push_back(inst.sink());
    }
    return routes;
}

std::map<int, std::vector<int>> drop_repeats(const std::map<int, std::vector<int>>& routes, const std::vector<int>& server) {
    std::map<int, std::vector<int>> out;
    for (const auto& [mv, route] : routes) {
        std::vector<int> kept;
        for (int node : route) {
            const bool customer = node > 0 && node < static_cast<int>(server.size());
            if (!customer || server[node] == mv) kept.push_back(node);
        }
        if (kept.size() > 2) out[mv] = std::move(kept);
    }
    return out;
}

std::string check_vrp(const Instance& inst, const std::map<int, std::vector<int>>& routes) {
    const int n = inst.num_customers();
    if (static_cast<int>(routes.size()) > inst.fleet_size) return "more routes than vehicles";
    std::vector<int> seen(n + 1, 0);
    for (const auto& [mv, route] : routes) {
        if (route.size() < 2 || route.front() != 0 || route.back() != n + 1) return "route of mv " + std::to_string(mv) + " does not start and end at the depot";
        int load = 0;
        for (std::size_t i = 1; i + 1 < route.size(); ++i) {
            const int c = route[i];
            if (c < 1 || c > n) return "route of mv " + std::to_string(mv) + " holds a non-customer";
            if (seen[c]++) return "customer " + std::to_string(c) + " visited twice";
            load += inst.demand[c];
        }
        if (load > inst.capacity) return "route of mv " + std::to_string(mv) + " exceeds capacity";
    }
    for (int c = 1; c <= n; ++c)
        if (!seen[c]) return "customer " + std::to_string(c) + " not visited";
    return {};
}

Cost vrp_cost(const Instance& inst, const std::map<int, std::vector<int>>& routes) {
    std::int64_t total = 0;
    for (const auto& [mv, route] : routes)
        for (std::size_t i = 1; i < route.size(); ++i) total += inst.d(route[i - 1], route[i]);
    return Cost(total * inst.scale());
}

}  // namespace mvrp
