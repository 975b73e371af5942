#include "core/neighborhoods.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "core/error.hpp"

namespace mvrp {

const char* to_string(MoveKind kind) {
    switch (kind) {
        case MoveKind::SerialMerge: return "SerialMerge";
        case MoveKind::ParallelMerge: return "ParallelMerge";
        case MoveKind::RelocateIntraSegment: return "RelocateIntraSegment";
        case MoveKind::RelocateIntraMv: return "RelocateIntraMv";
        case MoveKind::RelocateInterMv: return "RelocateInterMv";
    }
    return "Unknown";
}

const char* to_string(Rejection r) {
    switch (r) {
        case Rejection::Infeasible: return "Infeasible";
        case Rejection::NoFeasiblePath: return "NoFeasiblePath";
        case Rejection::Tabu: return "Tabu";
    }
    return "Unknown";
}

TabuState::TabuState(int num_nodes, int tenure)
    : n_(num_nodes),
      tenure_(tenure),
      merge_(static_cast<std::size_t>(num_nodes) * num_nodes, 0),
      relocate_(static_cast<std::size_t>(num_nodes) * num_nodes, 0) {}

void TabuState::forbid(TabuList list, const std::vector<Arc>& arcs) {
    auto& t = list == TabuList::Merge ? merge_ : relocate_;
    for (const auto& [u, v] : arcs) t[idx(u, v)] = iteration_ + tenure_ + 1;
}

void TabuState::clear() {
    std::fill(merge_.begin(), merge_.end(), 0);
    std::fill(relocate_.begin(), relocate_.end(), 0);
}

PairSet pair_mvs(const std::vector<int>& kr, const std::vector<int>& ks, int capacity) {
    std::vector<int> r(kr.size()), s(ks.size());
    std::iota(r.begin(), r.end(), 0);
    std::iota(s.begin(), s.end(), 0);
    std::stable_sort(r.begin(), r.end(), [&](int a, int b) { return kr[a] > kr[b]; });
    std::stable_sort(s.begin(), s.end(), [&](int a, int b) { return ks[a] < ks[b]; });
    PairSet out;
    std::size_t head = 0;
    for (int i : r) {
        if (head < s.size() && kr[i] + ks[s[head]] <= capacity) {
            out.pairs.emplace_back(i, s[head]);
            ++head;
        } else {
            out.unpaired_r.push_back(i);
        }
    }
    out.unpaired_s.assign(s.begin() + static_cast<std::ptrdiff_t>(head), s.end());
    std::sort(out.unpaired_r.begin(), out.unpaired_r.end());
    std::sort(out.unpaired_s.begin(), out.unpaired_s.end());
    return out;
}

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

std::int64_t add_scaled(int d, int c, int k, Rational eta) {
    return platoon_cost_scaled(d, c + k, eta) - platoon_cost_scaled(d, c, eta);
}

template <class F>
void for_route_arcs(const std::vector<int>& route, int sink, F&& f) {
    if (route.empty()) return;
    int prev = 0;
    for (int c : route) {
        f(prev, c);
        prev = c;
    }
    f(prev, sink);
}

class ArcDiff {
public:
    struct Item {
        int u, v, d;
    };
    void add(int u, int v, int d) {
        for (auto& e : items_)
            if (e.u == u && e.v == v) {
                e.d += d;
                return;
            }
        items_.push_back({u, v, d});
    }
    const std::vector<Item>& items() const { return items_; }

private:
    std::vector<Item> items_;
};

struct Eval {
    bool feasible = true;
    bool tabu = false;
    std::int64_t delta = 0;
};

Eval evaluate(const State& st, const ArcDiff& diff, const TabuState* tabu) {
    const Instance& inst = st.inst();
    Eval e;
    for (const auto& it : diff.items()) {
        if (it.d == 0) continue;
        const int c = st.count(it.u, it.v);
        const int nc = c + it.d;
        if (nc < 0) throw Error(ErrorCode::InvariantViolation, "move removes an arc that is not in the plan");
        if (nc > inst.max_platoon) {
            e.feasible = false;
            return e;
        }
        const int d = inst.d(it.u, it.v);
        e.delta += platoon_cost_scaled(d, nc, inst.eta) - platoon_cost_scaled(d, c, inst.eta);
        if (c == 0 && tabu && tabu->blocks(it.u, it.v)) e.tabu = true;
    }
    return e;
}

ArcDiff edit_diff(const State& st, const Edit& edit) {
    ArcDiff diff;
    const int sink = st.inst().sink();
    for (const auto& [mv, route] : edit.routes) {
        for_route_arcs(st.plan().routes[mv], sink, [&](int u, int v) { diff.add(u, v, -1); });
        for_route_arcs(route, sink, [&](int u, int v) { diff.add(u, v, +1); });
    }
    return diff;
}

Move finalize(const State& st, MoveKind kind, std::vector<int> params, Edit edit) {
    Move m;
    m.kind = kind;
    m.params = std::move(params);
    const ArcDiff diff = edit_diff(st, edit);
    const Eval e = evaluate(st, diff, nullptr);
    if (!e.feasible) throw Error(ErrorCode::InvariantViolation, "built move breaks the platoon limit");
    m.delta = Cost(e.delta);
    for (const auto& it : diff.items()) {
        const int c = st.count(it.u, it.v);
        if (c > 0 && c + it.d == 0) m.touched_arcs.emplace_back(it.u, it.v);
        if (c == 0 && it.d > 0) m.created_arcs.emplace_back(it.u, it.v);
    }
    std::sort(m.touched_arcs.begin(), m.touched_arcs.end());
    std::sort(m.created_arcs.begin(), m.created_arcs.end());
    m.edit = std::move(edit);
    return m;
}

// Keeps the best admissible candidate; the edit is only built when a
// candidate takes the lead.
class Tracker {
public:
    bool offer_needed(std::int64_t delta, MoveKind kind, const std::vector<int>& params) const {
        if (!has_) return true;
        if (delta != delta_) return delta < delta_;
        if (kind != kind_) return kind < kind_;
        return params < params_;
    }
    template <class Build>
    void offer(std::int64_t delta, MoveKind kind, std::vector<int> params, Build&& build) {
        if (!offer_needed(delta, kind, params)) return;
        has_ = true;
        delta_ = delta;
        kind_ = kind;
        params_ = std::move(params);
        edit_ = build();
    }
    bool has() const { return has_; }
    Move take(const State& st) {
        Move m = finalize(st, kind_, params_, std::move(edit_));
        if (m.delta.scaled() != delta_)
            throw Error(ErrorCode::InvariantViolation, std::string("delta mismatch for ") + to_string(kind_));
        return m;
    }

private:
    bool has_ = false;
    std::int64_t delta_ = 0;
    MoveKind kind_ = MoveKind::SerialMerge;
    std::vector<int> params_;
    Edit edit_;
};

enum class Outcome { Offered, Infeasible, NoPath, Tabu };

// Cheapest ways for k extra MVs travelling together to get from the depot to
// each node (g) and from each node to the sink (h), moving forward in the
// state's topological order so no cycle can appear. With a tabu table, new
// arcs on the merge list are forbidden.
struct Tables {
    std::vector<std::int64_t> g, h;
    std::vector<int> g_prev, h_next, g_hops, h_hops;
    std::vector<char> g_shared, h_shared;  // chosen path rides with some MV on at least one arc
};

Tables attach_tables(const State& st, int k, const std::vector<char>& excluded, const TabuState* tabu) {
    const Instance& inst = st.inst();
    const int v = st.num_nodes();
    const int sink = v - 1;
    const auto& topo = st.topo();
    Tables t;
    t.g.assign(v, kInf);
    t.h.assign(v, kInf);
    t.g_prev.assign(v, -1);
    t.h_next.assign(v, -1);
    t.g_hops.assign(v, 0);
    t.h_hops.assign(v, 0);
    t.g_shared.assign(v, 0);
    t.h_shared.assign(v, 0);
    t.g[0] = 0;
    t.h[sink] = 0;
    auto usable = [&](int a, int b, int c) {
        if (c + k > inst.max_platoon) return false;
        return !(c == 0 && tabu && tabu->blocks(a, b));
    };
    for (int i = 1; i < v; ++i) {
        const int x = topo[i];
        if (excluded[x] || x == sink) continue;
        for (int j = 0; j < i; ++j) {
            const int p = topo[j];
            if (excluded[p] || t.g[p] >= kInf) continue;
            const int c = st.count(p, x);
            if (!usable(p, x, c)) continue;
            const std::int64_t val = t.g[p] + add_scaled(inst.d(p, x), c, k, inst.eta);
            const int hops = t.g_hops[p] + 1;
            if (val < t.g[x] || (val == t.g[x] && hops < t.g_hops[x])) {
                t.g[x] = val;
                t.g_prev[x] = p;
                t.g_hops[x] = hops;
                t.g_shared[x] = t.g_shared[p] || c > 0;
            }
        }
    }
    for (int i = v - 2; i >= 0; --i) {
        const int x = topo[i];
        if (excluded[x]) continue;
        for (int j = i + 1; j < v; ++j) {
            const int q = topo[j];
            if (excluded[q] || t.h[q] >= kInf) continue;
            const int c = st.count(x, q);
            if (!usable(x, q, c)) continue;
            const std::int64_t val = t.h[q] + add_scaled(inst.d(x, q), c, k, inst.eta);
            const int hops = t.h_hops[q] + 1;
            if (val < t.h[x] || (val == t.h[x] && hops < t.h_hops[x])) {
                t.h[x] = val;
                t.h_next[x] = q;
                t.h_hops[x] = hops;
                t.h_shared[x] = t.h_shared[q] || c > 0;
            }
        }
    }
    return t;
}

std::vector<int> prefix_nodes(const Tables& t, int p) {
    std::vector<int> out;
    for (int x = p; x != 0; x = t.g_prev[x]) out.push_back(x);
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<int> suffix_nodes(const Tables& t, int q, int sink) {
    std::vector<int> out;
    for (int x = q; x != sink; x = t.h_next[x]) out.push_back(x);
    return out;
}

std::vector<int> mv_list(MvMask m) {
    std::vector<int> out;
    for (; m; m &= m - 1) out.push_back(__builtin_ctzll(m));
    return out;
}

std::vector<int> insert_after(std::vector<int> route, int a, const std::vector<int>& block) {
    const auto at = a == 0 ? route.begin() : std::find(route.begin(), route.end(), a) + 1;
    route.insert(at, block.begin(), block.end());
    return route;
}

// Shared state for scanning one plan.
class Scanner {
public:
    Scanner(const State& st, const Admission& adm) : st_(st), inst_(st.inst()), adm_(adm) {
        served_.assign(st.num_mvs(), 0);
        for (int c = 1; c <= inst_.num_customers(); ++c) ++served_[st.plan().server[c]];
    }

    Tracker tracker;

    bool admissible(const Eval& e) const {
        if (!e.feasible) return false;
        return !e.tabu || st_.cost().scaled() + e.delta < adm_.best_cost.scaled();
    }
    bool aspirates(std::int64_t delta) const { return st_.cost().scaled() + delta < adm_.best_cost.scaled(); }

    // ---- relocate -------------------------------------------------------

    struct Removal {
        int c = 0;
        MvMask visitors = 0;
        int s0 = 0;
        bool s0_sole = false;
        std::vector<std::tuple<int, int, MvMask>> bypass;  // (pred, succ, MVs)
        ArcDiff diff;
    };

    Removal removal(int c) const {
        Removal r;
        r.c = c;
        r.visitors = st_.visitors(c);
        r.s0 = st_.plan().server[c];
        r.s0_sole = served_[r.s0] == 1;
        for (int m : mv_list(r.visitors)) {
            const int p = st_.pred(m, c);
            const int n = st_.succ(m, c);
            r.diff.add(p, c, -1);
            r.diff.add(c, n, -1);
            r.diff.add(p, n, +1);
            bool merged = false;
            for (auto& [bp, bn, bm] : r.bypass)
                if (bp == p && bn == n) {
                    bm |= MvMask{1} << m;
                    merged = true;
                }
            if (!merged) r.bypass.emplace_back(p, n, MvMask{1} << m);
        }
        return r;
    }

    // MVs on arc a->b once the customer is taken out.
    MvMask arc_without(const Removal& r, int a, int b) const {
        if (a == r.c || b == r.c) return 0;
        MvMask w = st_.arc_mvs(a, b);
        for (const auto& [bp, bn, bm] : r.bypass)
            if (bp == a && bn == b) w |= bm;
        return w;
    }

    bool is_identity(const Removal& r, int a, int b, MvMask w, int server) const {
        return server == r.s0 && w == r.visitors && r.bypass.size() == 1 && std::get<0>(r.bypass[0]) == a &&
               std::get<1>(r.bypass[0]) == b;
    }

    // The customer is a route of its own; moving it to a fresh MV only relabels.
    bool alone(const Removal& r) const {
        return r.s0_sole && r.visitors == (MvMask{1} << r.s0) && st_.plan().routes[r.s0].size() == 1;
    }

    Outcome relocate_into(const Removal& r, int a, int b, int server) {
        const int c = r.c;
        const int sink = inst_.sink();
        const bool new_route = a == 0 && b == sink && st_.plan().routes[server].empty();
        MvMask w = new_route ? (MvMask{1} << server) : arc_without(r, a, b);
        const bool s0_idle = r.s0_sole && server != r.s0;
        if (s0_idle) w &= ~(MvMask{1} << r.s0);
        if (!(w >> server & 1)) return Outcome::Infeasible;
        if (server != r.s0 && st_.load(server) + inst_.demand[c] > inst_.capacity) return Outcome::Infeasible;

        ArcDiff diff = r.diff;
        if (s0_idle)
            for_route_arcs(route_without(r.s0, c), sink, [&](int u, int v) { diff.add(u, v, -1); });
        const int n = popcount(w);
        if (!new_route) diff.add(a, b, -n);
        diff.add(a, c, n);
        diff.add(c, b, n);
        const Eval e = evaluate(st_, diff, adm_.tabu);
        if (!e.feasible) return Outcome::Infeasible;
        if (!admissible(e)) return Outcome::Tabu;

        MoveKind kind = MoveKind::RelocateInterMv;
        if (server == r.s0) kind = w == r.visitors ? MoveKind::RelocateIntraSegment : MoveKind::RelocateIntraMv;
        tracker.offer(e.delta, kind, {c, a, b, server}, [&] {
            Edit edit;
            std::map<int, std::vector<int>> routes;
            for (int m : mv_list(r.visitors)) routes[m] = route_without(m, c);
            if (s0_idle) routes[r.s0].clear();
            for (int m : mv_list(w)) {
                auto it = routes.find(m);
                std::vector<int> base = it != routes.end() ? it->second : st_.plan().routes[m];
                routes[m] = insert_after(std::move(base), a, {c});
            }
            edit.routes.assign(routes.begin(), routes.end());
            edit.servers.emplace_back(c, server);
            return edit;
        });
        return Outcome::Offered;
    }

    void scan_relocates() {
        const int sink = inst_.sink();
        const int free = st_.free_mv();
        for (int c = 1; c <= inst_.num_customers(); ++c) {
            const Removal r = removal(c);
            auto try_arc = [&](int a, int b) {
                const MvMask w = arc_without(r, a, b);
                for (int server : mv_list(w)) {
                    if (is_identity(r, a, b, w, server)) continue;
                    relocate_into(r, a, b, server);
                }
            };
            for (const auto& [a, b] : st_.arcs()) {
                if (a == c || b == c) continue;
                try_arc(a, b);
            }
            for (const auto& [bp, bn, bm] : r.bypass)
                if (st_.count(bp, bn) == 0) try_arc(bp, bn);
            if (free >= 0 && !alone(r)) relocate_into(r, 0, sink, free);
        }
    }

    // ---- merges ---------------------------------------------------------

    struct RouteInfo {
        int id = 0;  // solution-file segment id
        const Segment* seg = nullptr;
        std::vector<int> mvs;
        std::vector<char> excluded;
        std::int64_t own_cost = 0;  // cost of the route's arcs
    };

    RouteInfo route_info(int seg_index) const {
        RouteInfo ri;
        ri.id = seg_index + 1;
        ri.seg = &st_.segments()[seg_index];
        ri.mvs = mv_list(ri.seg->mvs);
        ri.excluded.assign(st_.num_nodes(), 0);
        for (int c : ri.seg->customers) ri.excluded[c] = 1;
        const int k = static_cast<int>(ri.mvs.size());
        for_route_arcs(ri.seg->customers, inst_.sink(),
                       [&](int u, int v) { ri.own_cost += platoon_cost_scaled(inst_.d(u, v), k, inst_.eta); });
        return ri;
    }

    const Tables& tables(const RouteInfo& ri, int k, bool restricted) {
        const auto key = std::make_tuple(ri.id, k, restricted);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, attach_tables(st_, k, ri.excluded, restricted ? adm_.tabu : nullptr)).first;
        return it->second;
    }

    // Serial merge of route ri into arc a->b.
    Outcome serial(const RouteInfo& ri, int a, int b) {
        const auto& R = ri.seg->customers;
        const int j1 = R.front(), jr = R.back();
        const int sink = inst_.sink();
        if (ri.excluded[a] || ri.excluded[b] || st_.count(a, b) == 0) return Outcome::Infeasible;
        const std::vector<int> w_mvs = mv_list(st_.arc_mvs(a, b));
        const int w = static_cast<int>(w_mvs.size());
        const int kr = static_cast<int>(ri.mvs.size());

        std::vector<int> kr_load, ks_load;
        for (int m : ri.mvs) kr_load.push_back(st_.load(m));
        for (int m : w_mvs) ks_load.push_back(st_.load(m));
        const PairSet ps = pair_mvs(kr_load, ks_load, inst_.capacity);
        // Without a single pair nothing is folded together; riding along is the parallel merge's job.
        if (ps.pairs.empty()) return Outcome::Infeasible;
        std::vector<int> riders;
        for (int i : ps.unpaired_r) riders.push_back(ri.mvs[i]);
        const int u = static_cast<int>(riders.size());

        ArcDiff diff;
        for_route_arcs(R, sink, [&](int x, int y) { diff.add(x, y, -kr); });
        diff.add(a, b, -w);
        diff.add(a, j1, w);
        for (std::size_t i = 1; i < R.size(); ++i) diff.add(R[i - 1], R[i], w + u);
        diff.add(jr, b, w);
        const Eval base = evaluate(st_, diff, adm_.tabu);
        if (!base.feasible) return Outcome::Infeasible;

        auto build = [&](const Tables* t, int p, int q) {
            Edit edit;
            for (int m : w_mvs) edit.routes.emplace_back(m, insert_after(st_.plan().routes[m], a, R));
            for (const auto& [ir, is] : ps.pairs) {
                const int gone = ri.mvs[ir];
                edit.routes.emplace_back(gone, std::vector<int>{});
                for (int c : R)
                    if (st_.plan().server[c] == gone) edit.servers.emplace_back(c, w_mvs[is]);
            }
            if (u > 0) {
                std::vector<int> route = prefix_nodes(*t, p);
                route.insert(route.end(), R.begin(), R.end());
                const std::vector<int> tail = suffix_nodes(*t, q, sink);
                route.insert(route.end(), tail.begin(), tail.end());
                for (int m : riders) edit.routes.emplace_back(m, route);
            }
            return edit;
        };

        if (u == 0) {
            if (!admissible(base)) return Outcome::Tabu;
            tracker.offer(base.delta, MoveKind::SerialMerge, {ri.id, a, b}, [&] { return build(nullptr, 0, 0); });
            return Outcome::Offered;
        }

        // Riders need their own way in and out; they join the spliced block at j1
        // and leave it at jR, sharing a->j1 / jR->b with the arc's MVs if they come that way.
        auto best_ends = [&](const Tables& t, bool restricted, int& p_best, int& q_best) -> std::int64_t {
            std::int64_t pre = kInf;
            p_best = -1;
            for (int p : st_.topo()) {
                if (st_.rank(p) > st_.rank(a)) break;
                if (ri.excluded[p] || t.g[p] >= kInf) continue;
                std::int64_t val;
                if (p == a) {
                    if (w + u > inst_.max_platoon) continue;
                    val = t.g[p] + add_scaled(inst_.d(p, j1), w, u, inst_.eta);
                } else {
                    if (restricted && p != 0 && adm_.tabu && adm_.tabu->blocks(p, j1)) continue;
                    val = t.g[p] + add_scaled(inst_.d(p, j1), 0, u, inst_.eta);
                }
                if (val < pre) {
                    pre = val;
                    p_best = p;
                }
            }
            std::int64_t suf = kInf;
            q_best = -1;
            for (int q : st_.topo()) {
                if (st_.rank(q) <= st_.rank(a) || ri.excluded[q] || t.h[q] >= kInf) continue;
                std::int64_t val;
                if (q == b) {
                    if (w + u > inst_.max_platoon) continue;
                    val = t.h[q] + add_scaled(inst_.d(jr, q), w, u, inst_.eta);
                } else {
                    if (restricted && q != sink && adm_.tabu && adm_.tabu->blocks(jr, q)) continue;
                    val = t.h[q] + add_scaled(inst_.d(jr, q), 0, u, inst_.eta);
                }
                if (val < suf) {
                    suf = val;
                    q_best = q;
                }
            }
            if (pre >= kInf || suf >= kInf) return kInf;
            return pre + suf;
        };

        bool offered = false;
        bool reachable = false;
        {
            const Tables& t = tables(ri, u, false);
            int p, q;
            const std::int64_t ends = best_ends(t, false, p, q);
            if (ends < kInf) {
                reachable = true;
                const std::int64_t delta = base.delta + ends;
                if (!adm_.tabu || aspirates(delta)) {
                    tracker.offer(delta, MoveKind::SerialMerge, {ri.id, a, b}, [&] { return build(&t, p, q); });
                    offered = true;
                }
            }
        }
        if (adm_.tabu && !base.tabu) {
            const Tables& t = tables(ri, u, true);
            int p, q;
            const std::int64_t ends = best_ends(t, true, p, q);
            if (ends < kInf) {
                tracker.offer(base.delta + ends, MoveKind::SerialMerge, {ri.id, a, b}, [&] { return build(&t, p, q); });
                offered = true;
            }
        }
        if (offered) return Outcome::Offered;
        return reachable ? Outcome::Tabu : Outcome::NoPath;
    }

    // Parallel merge: route ri's MVs go depot ~> p -> R -> q ~> sink.
    Outcome parallel(const RouteInfo& ri, int p, int q) {
        const auto& R = ri.seg->customers;
        const int j1 = R.front(), jr = R.back();
        const int sink = inst_.sink();
        const int k = static_cast<int>(ri.mvs.size());
        if (p < 0 || q < 0 || p == sink || q == 0 || ri.excluded[p] || ri.excluded[q]) return Outcome::Infeasible;
        if (st_.rank(p) >= st_.rank(q) || (p == 0 && q == sink)) return Outcome::Infeasible;
        const std::int64_t old_ends =
            platoon_cost_scaled(inst_.d(0, j1), k, inst_.eta) + platoon_cost_scaled(inst_.d(jr, sink), k, inst_.eta);

        auto ends = [&](const Tables& t, bool restricted) -> std::int64_t {
            if (t.g[p] >= kInf || t.h[q] >= kInf) return kInf;
            // riding alone on both ends forms no platoon: that is a detour, not a merge
            if (!t.g_shared[p] && !t.h_shared[q]) return kInf;
            if (restricted && adm_.tabu) {
                if (p != 0 && adm_.tabu->blocks(p, j1)) return kInf;
                if (q != sink && adm_.tabu->blocks(jr, q)) return kInf;
            }
            return t.g[p] + add_scaled(inst_.d(p, j1), 0, k, inst_.eta) + add_scaled(inst_.d(jr, q), 0, k, inst_.eta) +
                   t.h[q];
        };
        auto build = [&](const Tables& t) {
            std::vector<int> route = prefix_nodes(t, p);
            route.insert(route.end(), R.begin(), R.end());
            const std::vector<int> tail = suffix_nodes(t, q, sink);
            route.insert(route.end(), tail.begin(), tail.end());
            Edit edit;
            for (int m : ri.mvs) edit.routes.emplace_back(m, route);
            return edit;
        };

        bool offered = false;
        bool reachable = false;
        {
            const Tables& t = tables(ri, k, false);
            if (t.g[p] < kInf && t.h[q] < kInf && !t.g_shared[p] && !t.h_shared[q]) return Outcome::Infeasible;
            const std::int64_t e = ends(t, false);
            if (e < kInf) {
                reachable = true;
                const std::int64_t delta = e - old_ends;
                if (!adm_.tabu || aspirates(delta)) {
                    tracker.offer(delta, MoveKind::ParallelMerge, {ri.id, p, q}, [&] { return build(t); });
                    offered = true;
                }
            }
        }
        if (adm_.tabu) {
            const Tables& t = tables(ri, k, true);
            const std::int64_t e = ends(t, true);
            if (e < kInf) {
                tracker.offer(e - old_ends, MoveKind::ParallelMerge, {ri.id, p, q}, [&] { return build(t); });
                offered = true;
            }
        }
        if (offered) return Outcome::Offered;
        return reachable ? Outcome::Tabu : Outcome::NoPath;
    }

    void scan_merges() {
        for (int s : st_.single_brunch()) {
            const RouteInfo ri = route_info(s);
            for (const auto& [a, b] : st_.arcs())
                if (!ri.excluded[a] && !ri.excluded[b]) serial(ri, a, b);
            // Pair scan for the parallel merge over the topological order.
            const auto& topo = st_.topo();
            for (std::size_t i = 0; i < topo.size(); ++i) {
                const int p = topo[i];
                if (ri.excluded[p] || p == inst_.sink()) continue;
                for (std::size_t j = i + 1; j < topo.size(); ++j) {
                    const int q = topo[j];
                    if (ri.excluded[q] || (p == 0 && q == inst_.sink())) continue;
                    parallel(ri, p, q);
                }
            }
        }
    }

    int segment_index(int id) const {
        const int idx = id - 1;
        if (idx < 0 || idx >= static_cast<int>(st_.segments().size())) return -1;
        return idx;
    }

    bool is_single_brunch(int idx) const {
        const auto& sb = st_.single_brunch();
        return std::find(sb.begin(), sb.end(), idx) != sb.end();
    }

private:
    std::vector<int> route_without(int m, int c) const {
        std::vector<int> out;
        for (int x : st_.plan().routes[m])
            if (x != c) out.push_back(x);
        return out;
    }

    const State& st_;
    const Instance& inst_;
    Admission adm_;
    std::vector<int> served_;
    std::map<std::tuple<int, int, bool>, Tables> cache_;
};

MoveResult to_result(Scanner& sc, Outcome o, const State& st) {
    switch (o) {
        case Outcome::Offered: return sc.tracker.take(st);
        case Outcome::Infeasible: return Rejection::Infeasible;
        case Outcome::NoPath: return Rejection::NoFeasiblePath;
        case Outcome::Tabu: return Rejection::Tabu;
    }
    return Rejection::Infeasible;
}

}  // namespace

AttachPath cheapest_attach_path(const State& state, int segment, Direction direction) {
    const int idx = segment - 1;
    if (idx < 0 || idx >= static_cast<int>(state.segments().size()))
        throw Error(ErrorCode::InvalidArgument, "unknown segment " + std::to_string(segment));
    const Instance& inst = state.inst();
    const Segment& seg = state.segments()[idx];
    const int l = popcount(seg.mvs);
    if (l >= inst.max_platoon)
        throw Error(ErrorCode::NoFeasiblePath, "segment " + std::to_string(segment) + " already holds a full platoon");
    const std::vector<char> none(state.num_nodes(), 0);
    const Tables t = attach_tables(state, 1, none, nullptr);
    const int sink = inst.sink();
    AttachPath out;
    std::int64_t cost = 0;
    if (direction == Direction::FromSource) {
        const int first = seg.customers.front();
        if (t.g[first] >= kInf) throw Error(ErrorCode::NoFeasiblePath, "no way in to segment " + std::to_string(segment));
        cost = t.g[first];
        out.nodes.push_back(0);
        for (int x : prefix_nodes(t, first)) out.nodes.push_back(x);
        for (std::size_t i = 1; i < seg.customers.size(); ++i) {
            cost += add_scaled(inst.d(seg.customers[i - 1], seg.customers[i]), l, 1, inst.eta);
            out.nodes.push_back(seg.customers[i]);
        }
    } else {
        const int last = seg.customers.back();
        if (t.h[last] >= kInf) throw Error(ErrorCode::NoFeasiblePath, "no way out of segment " + std::to_string(segment));
        cost = t.h[last];
        out.nodes = suffix_nodes(t, last, sink);
        out.nodes.push_back(sink);
    }
    out.cost = Cost(cost);
    const int sink_id = static_cast<int>(state.segments().size()) + 1;
    for (int x : out.nodes) {
        const int id = x == 0 ? 0 : x == sink ? sink_id : state.segment_of(x) + 1;
        if (out.segments.empty() || out.segments.back() != id) out.segments.push_back(id);
    }
    return out;
}

MoveResult serial_merge(const State& state, int route_segment, int a, int b, const Admission& adm) {
    Scanner sc(state, adm);
    const int idx = sc.segment_index(route_segment);
    if (idx < 0 || !sc.is_single_brunch(idx)) return Rejection::Infeasible;
    if (a < 0 || b < 0 || a >= state.num_nodes() || b >= state.num_nodes()) return Rejection::Infeasible;
    return to_result(sc, sc.serial(sc.route_info(idx), a, b), state);
}

MoveResult parallel_merge(const State& state, int route_segment, int p, int q, const Admission& adm) {
    Scanner sc(state, adm);
    const int idx = sc.segment_index(route_segment);
    if (idx < 0 || !sc.is_single_brunch(idx)) return Rejection::Infeasible;
    if (p < 0 || q < 0 || p >= state.num_nodes() || q >= state.num_nodes()) return Rejection::Infeasible;
    return to_result(sc, sc.parallel(sc.route_info(idx), p, q), state);
}

MoveResult relocate(const State& state, int customer, int a, int b, int server, const Admission& adm) {
    const Instance& inst = state.inst();
    if (customer < 1 || customer > inst.num_customers()) return Rejection::Infeasible;
    if (server < 0 || server >= state.num_mvs()) return Rejection::Infeasible;
    if (a < 0 || b < 0 || a >= state.num_nodes() || b >= state.num_nodes()) return Rejection::Infeasible;
    Scanner sc(state, adm);
    const auto r = sc.removal(customer);
    const bool new_route = a == 0 && b == inst.sink() && state.plan().routes[server].empty();
    if (!new_route && sc.arc_without(r, a, b) == 0) return Rejection::Infeasible;
    if (new_route ? sc.alone(r) : sc.is_identity(r, a, b, sc.arc_without(r, a, b), server)) {
        Move m;
        m.kind = MoveKind::RelocateIntraSegment;
        m.params = {customer, a, b, server};
        return m;
    }
    return to_result(sc, sc.relocate_into(r, a, b, server), state);
}

Move best_move(const State& state, const Admission& adm, const NeighborhoodOptions& opts) {
    Scanner sc(state, adm);
    if (opts.merge) sc.scan_merges();
    if (opts.relocate) sc.scan_relocates();
    if (!sc.tracker.has()) throw Error(ErrorCode::NoAdmissibleMove, "no admissible move");
    return sc.tracker.take(state);
}

std::optional<Move> best_merge(const State& state) {
    Scanner sc(state, Admission{nullptr, state.cost()});
    sc.scan_merges();
    if (!sc.tracker.has()) return std::nullopt;
    Move m = sc.tracker.take(state);
    if (m.delta.scaled() >= 0) return std::nullopt;
    return m;
}

}  // namespace mvrp
