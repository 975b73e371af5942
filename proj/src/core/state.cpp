#include "core/state.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "core/error.hpp"

namespace mvrp {

Plan Plan::empty(const Instance& inst) {
    Plan plan;
    plan.routes.assign(inst.fleet_size, {});
    plan.server.assign(inst.num_customers() + 1, -1);
    return plan;
}

Plan apply_edit(const Plan& plan, const Edit& edit) {
    Plan out = plan;
    for (const auto& [mv, route] : edit.routes) out.routes[mv] = route;
    for (const auto& [c, mv] : edit.servers) out.server[c] = mv;
    return out;
}

namespace {

// Kahn's algorithm with smallest-id tie-break; empty result on a cycle.
std::vector<int> topological_order(int v, const std::vector<std::vector<int>>& out) {
    std::vector<int> indeg(v, 0);
    for (int u = 0; u < v; ++u)
        for (int w : out[u]) ++indeg[w];
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int u = 0; u < v; ++u)
        if (indeg[u] == 0) ready.push(u);
    std::vector<int> order;
    order.reserve(v);
    while (!ready.empty()) {
        const int u = ready.top();
        ready.pop();
        order.push_back(u);
        for (int w : out[u])
            if (--indeg[w] == 0) ready.push(w);
    }
    if (static_cast<int>(order.size()) != v) order.clear();
    return order;
}

}  // namespace

std::string check_plan(const Instance& inst, const Plan& plan) {
    const int n = inst.num_customers();
    const int k = inst.fleet_size;
    const int v = n + 2;
    if (static_cast<int>(plan.routes.size()) != k) return "route count differs from fleet size";
    if (static_cast<int>(plan.server.size()) != n + 1) return "server table has wrong size";
    std::vector<int> seen(static_cast<std::size_t>(k) * v, 0);
    std::vector<int> load(k, 0);
    std::vector<int> count(static_cast<std::size_t>(v) * v, 0);
    std::vector<std::vector<int>> out(v);
    for (int m = 0; m < k; ++m) {
        int prev = 0;
        for (int c : plan.routes[m]) {
            if (c < 1 || c > n) return "route of mv " + std::to_string(m) + " holds a non-customer node";
            if (seen[static_cast<std::size_t>(m) * v + c]++) return "mv " + std::to_string(m) + " visits " + std::to_string(c) + " twice";
            if (count[static_cast<std::size_t>(prev) * v + c]++ == 0) out[prev].push_back(c);
            prev = c;
        }
        if (!plan.routes[m].empty() && count[static_cast<std::size_t>(prev) * v + n + 1]++ == 0) out[prev].push_back(n + 1);
    }
    for (int c = 1; c <= n; ++c) {
        const int m = plan.server[c];
        if (m < 0 || m >= k) return "customer " + std::to_string(c) + " has no serving mv";
        if (!seen[static_cast<std::size_t>(m) * v + c]) return "customer " + std::to_string(c) + " is served by an mv that does not visit it";
        load[m] += inst.demand[c];
    }
    for (int m = 0; m < k; ++m)
        if (load[m] > inst.capacity) return "mv " + std::to_string(m) + " exceeds capacity";
    for (int i = 0; i < v * v; ++i)
        if (count[i] > inst.max_platoon) return "arc " + std::to_string(i / v) + "->" + std::to_string(i % v) + " exceeds max platoon";
    if (topological_order(v, out).empty()) return "routes form a cycle";
    return {};
}

Cost plan_cost(const Instance& inst, const Plan& plan) {
    const int v = inst.num_nodes_with_sink();
    std::vector<int> count(static_cast<std::size_t>(v) * v, 0);
    for (const auto& route : plan.routes) {
        if (route.empty()) continue;
        int prev = 0;
        for (int c : route) {
            ++count[static_cast<std::size_t>(prev) * v + c];
            prev = c;
        }
        ++count[static_cast<std::size_t>(prev) * v + v - 1];
    }
    Cost total;
    for (int u = 0; u < v; ++u)
        for (int w = 0; w < v; ++w)
            if (const int l = count[static_cast<std::size_t>(u) * v + w])
                total += arc_cost(inst.d(u, w), l, inst.eta, inst.max_platoon);
    return total;
}

State::State(const Instance& inst, Plan plan) : inst_(&inst), plan_(std::move(plan)) {
    if (std::string problem = check_plan(inst, plan_); !problem.empty())
        throw Error(ErrorCode::InvariantViolation, problem);
    const int n = inst.num_customers();
    const int k = num_mvs();
    v_ = n + 2;
    const int sink = n + 1;
    arc_mvs_.assign(static_cast<std::size_t>(v_) * v_, 0);
    count_.assign(static_cast<std::size_t>(v_) * v_, 0);
    visitors_.assign(v_, 0);
    load_.assign(k, 0);
    pos_.assign(static_cast<std::size_t>(k) * v_, -1);
    std::vector<std::vector<int>> out(v_);

    auto add_arc = [&](int u, int w, int m) {
        const std::size_t i = static_cast<std::size_t>(u) * v_ + w;
        if (arc_mvs_[i] == 0) {
            out[u].push_back(w);
            arcs_.emplace_back(u, w);
        }
        arc_mvs_[i] |= MvMask{1} << m;
        ++count_[i];
    };
    for (int m = 0; m < k; ++m) {
        const auto& route = plan_.routes[m];
        if (route.empty()) continue;
        used_ |= MvMask{1} << m;
        visitors_[0] |= MvMask{1} << m;
        visitors_[sink] |= MvMask{1} << m;
        int prev = 0;
        for (std::size_t i = 0; i < route.size(); ++i) {
            const int c = route[i];
            visitors_[c] |= MvMask{1} << m;
            pos_[static_cast<std::size_t>(m) * v_ + c] = static_cast<int>(i);
            add_arc(prev, c, m);
            prev = c;
        }
        add_arc(prev, sink, m);
    }
    std::sort(arcs_.begin(), arcs_.end());
    for (int c = 1; c <= n; ++c) load_[plan_.server[c]] += inst.demand[c];
    for (const auto& [u, w] : arcs_) cost_ += Cost(platoon_cost_scaled(inst.d(u, w), count(u, w), inst.eta));

    topo_ = topological_order(v_, out);
    rank_.assign(v_, 0);
    for (int i = 0; i < v_; ++i) rank_[topo_[i]] = i;

    // Canonical segmentation: u -> w is internal when the whole platoon at u
    // moves on to w and nobody else arrives at w.
    auto internal = [&](int u, int w) {
        return u >= 1 && u <= n && w >= 1 && w <= n && visitors_[u] == visitors_[w] &&
               count(u, w) == popcount(visitors_[u]);
    };
    segment_of_.assign(n + 1, -1);
    for (int u : topo_) {
        if (u < 1 || u > n || segment_of_[u] >= 0) continue;
        Segment seg;
        seg.mvs = visitors_[u];
        int cur = u;
        while (true) {
            segment_of_[cur] = static_cast<int>(segments_.size());
            seg.customers.push_back(cur);
            const int m = __builtin_ctzll(seg.mvs);
            const int next = succ(m, cur);
            if (!internal(cur, next)) break;
            cur = next;
        }
        segments_.push_back(std::move(seg));
    }
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const Segment& seg = segments_[s];
        bool whole = true;
        for (MvMask m = seg.mvs; m && whole; m &= m - 1)
            whole = plan_.routes[__builtin_ctzll(m)].size() == seg.customers.size();
        if (whole) single_brunch_.push_back(static_cast<int>(s));
    }
}

int State::pred(int mv, int node) const {
    const int p = position(mv, node);
    return p <= 0 ? 0 : plan_.routes[mv][p - 1];
}

int State::succ(int mv, int node) const {
    const auto& route = plan_.routes[mv];
    const int p = position(mv, node);
    return p + 1 >= static_cast<int>(route.size()) ? v_ - 1 : route[p + 1];
}

int State::free_mv() const {
    for (int m = 0; m < num_mvs(); ++m)
        if (!(used_ >> m & 1)) return m;
    return -1;
}

}  // namespace mvrp
