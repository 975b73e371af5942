#include "core/oracle.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>
#include <unordered_map>

#include "core/error.hpp"

namespace mvrp {

namespace {

constexpr int kMaxCustomers = 8;
constexpr int kMaxFleet = 3;
constexpr int kNoSlot = 15;
constexpr int kLoadBits = 14;

struct Slot {
    int pos = 0;  // 0: still at the depot
    int load = 0;
    friend bool operator<(const Slot& a, const Slot& b) { return a.pos != b.pos ? a.pos < b.pos : a.load < b.load; }
    friend bool operator==(const Slot& a, const Slot& b) = default;
};

using Fleet = std::array<Slot, kMaxFleet>;

std::uint64_t pack(unsigned mask, const Fleet& f) {
    std::uint64_t key = mask;
    for (int i = 0; i < kMaxFleet; ++i) {
        key = (key << 4) | static_cast<std::uint64_t>(f[i].pos);
        key = (key << kLoadBits) | static_cast<std::uint64_t>(f[i].load);
    }
    return key;
}

void unpack(std::uint64_t key, unsigned& mask, Fleet& f) {
    for (int i = kMaxFleet - 1; i >= 0; --i) {
        f[i].load = static_cast<int>(key & ((1u << kLoadBits) - 1));
        key >>= kLoadBits;
        f[i].pos = static_cast<int>(key & 15u);
        key >>= 4;
    }
    mask = static_cast<unsigned>(key);
}

struct Entry {
    std::int64_t cost;
    std::uint64_t parent;
    int customer;
    int movers;  // bit set over the parent's slots
    int server;  // slot index in the parent
};

OracleResult solve(const Instance& inst, bool single_visit) {
    const int n = inst.num_customers();
    const int k = inst.fleet_size;
    if (n > kMaxCustomers || k > kMaxFleet)
        throw Error(ErrorCode::InstanceTooLarge, "exact search supports at most " + std::to_string(kMaxCustomers) +
                                                     " customers and " + std::to_string(kMaxFleet) + " MVs");
    if (inst.capacity >= (1 << kLoadBits)) throw Error(ErrorCode::InstanceTooLarge, "capacity too large for exact search");
    const int sink = n + 1;
    const int max_l = single_visit ? 1 : inst.max_platoon;

    Fleet start;
    for (int i = 0; i < kMaxFleet; ++i) start[i] = i < k ? Slot{0, 0} : Slot{kNoSlot, 0};
    std::vector<std::unordered_map<std::uint64_t, Entry>> layer(1u << n);
    layer[0].emplace(pack(0, start), Entry{0, 0, 0, 0, 0});

    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        for (const auto& [key, entry] : layer[mask]) {
            unsigned m;
            Fleet f;
            unpack(key, m, f);
            for (int v = 1; v <= n; ++v) {
                if (mask >> (v - 1) & 1) continue;
                const unsigned next_mask = mask | (1u << (v - 1));
                for (int movers = 1; movers < (1 << k); ++movers) {
                    if (single_visit && __builtin_popcount(movers) != 1) continue;
                    // Group movers by their current node; each group shares one arc.
                    std::int64_t step = 0;
                    bool ok = true;
                    for (int i = 0; i < k && ok; ++i) {
                        if (!(movers >> i & 1)) continue;
                        bool first = true;
                        for (int j = 0; j < i; ++j)
                            if ((movers >> j & 1) && f[j].pos == f[i].pos) first = false;
                        if (!first) continue;
                        int count = 0;
                        for (int j = i; j < k; ++j)
                            if ((movers >> j & 1) && f[j].pos == f[i].pos) ++count;
                        if (count > max_l) ok = false;
                        else step += platoon_cost_scaled(inst.d(f[i].pos, v), count, inst.eta);
                    }
                    if (!ok) continue;
                    for (int s = 0; s < k; ++s) {
                        if (!(movers >> s & 1)) continue;
                        if (f[s].load + inst.demand[v] > inst.capacity) continue;
                        // Identical slots give identical children; try only the first.
                        bool dup = false;
                        for (int j = 0; j < s; ++j)
                            if ((movers >> j & 1) && f[j] == f[s]) dup = true;
                        if (dup) continue;
                        Fleet g = f;
                        for (int i = 0; i < k; ++i)
                            if (movers >> i & 1) g[i].pos = v;
                        g[s].load += inst.demand[v];
                        std::sort(g.begin(), g.begin() + k);
                        const std::uint64_t child = pack(next_mask, g);
                        const std::int64_t cost = entry.cost + step;
                        auto [it, inserted] = layer[next_mask].try_emplace(child, Entry{cost, key, v, movers, s});
                        if (!inserted && cost < it->second.cost) it->second = Entry{cost, key, v, movers, s};
                    }
                }
            }
        }
    }

    const unsigned full = (1u << n) - 1;
    std::int64_t best = -1;
    std::uint64_t best_key = 0;
    for (const auto& [key, entry] : layer[full]) {
        unsigned m;
        Fleet f;
        unpack(key, m, f);
        std::int64_t close = 0;
        bool ok = true;
        for (int i = 0; i < k && ok; ++i) {
            if (f[i].pos == 0) continue;
            if (i > 0 && f[i - 1].pos == f[i].pos) continue;
            int count = 0;
            for (int j = i; j < k; ++j)
                if (f[j].pos == f[i].pos) ++count;
            if (count > max_l) ok = false;
            else close += platoon_cost_scaled(inst.d(f[i].pos, sink), count, inst.eta);
        }
        if (!ok) continue;
        const std::int64_t total = entry.cost + close;
        if (best < 0 || total < best || (total == best && key < best_key)) {
            best = total;
            best_key = key;
        }
    }
    if (best < 0) throw Error(ErrorCode::InvariantViolation, "exact search found no feasible plan");

    // Walk back to the start, then replay with concrete MV labels.
    std::vector<std::uint64_t> chain;
    for (std::uint64_t key = best_key;;) {
        chain.push_back(key);
        unsigned m;
        Fleet f;
        unpack(key, m, f);
        if (m == 0) break;
        key = layer[m].at(key).parent;
    }
    std::reverse(chain.begin(), chain.end());

    OracleResult out;
    out.plan = Plan::empty(inst);
    std::array<int, kMaxFleet> label{};
    for (int i = 0; i < k; ++i) label[i] = i;
    Fleet f = start;
    for (std::size_t step = 1; step < chain.size(); ++step) {
        unsigned m;
        Fleet child;
        unpack(chain[step], m, child);
        const Entry& e = layer[m].at(chain[step]);
        std::array<std::pair<Slot, int>, kMaxFleet> tagged;
        for (int i = 0; i < k; ++i) {
            tagged[i] = {f[i], label[i]};
            if (e.movers >> i & 1) {
                tagged[i].first.pos = e.customer;
                out.plan.routes[label[i]].push_back(e.customer);
            }
        }
        tagged[e.server].first.load += inst.demand[e.customer];
        out.plan.server[e.customer] = label[e.server];
        std::stable_sort(tagged.begin(), tagged.begin() + k, [](const auto& a, const auto& b) { return a.first < b.first; });
        for (int i = 0; i < k; ++i) {
            f[i] = tagged[i].first;
            label[i] = tagged[i].second;
        }
    }
    out.cost = Cost(best);
    const Cost check = plan_cost(inst, out.plan);
    if (check != out.cost || !check_plan(inst, out.plan).empty())
        throw Error(ErrorCode::InvariantViolation, "exact search reconstruction disagrees with its cost");
    return out;
}

}  // namespace

OracleResult brute_force_opt(const Instance& inst) { return solve(inst, false); }

OracleResult brute_force_vrp(const Instance& inst) { return solve(inst, true); }

bool BoundPair::contains(Cost c) const {
    return static_cast<__int128>(c.scaled()) * lower_den > lower_num && c <= upper;
}

std::string BoundPair::lower_text(std::int64_t scale) const {
    // lower_num / lower_den in cost units; render at scale * lower_den when exact.
    if (lower_num % lower_den == 0) return format_cost(Cost(lower_num / lower_den), scale);
    return format_cost(Cost(lower_num), scale * lower_den);
}

BoundPair platoon_bounds(Cost vrp_cost, Rational eta, int max_platoon) {
    if (max_platoon < 1 || eta.num < 0 || eta.num * (max_platoon - 1) >= eta.den)
        throw Error(ErrorCode::BadEta, "cost factor 1 - eta (L - 1) must be positive");
    BoundPair b;
    b.upper = vrp_cost;
    b.c_max = Rational{1, 1};
    b.c_min = Rational::make(eta.den - eta.num * (max_platoon - 1), eta.den);
    b.max_reduction = Rational::make(eta.num * (max_platoon - 1), eta.den);
    b.lower_num = vrp_cost.scaled() * b.c_min.num;
    b.lower_den = b.c_min.den;
    return b;
}

MilpCounts milp_counts(int n, int k, int l) {
    const long a = static_cast<long>(n) * n + n + 1;
    MilpCounts c;
    c.x = k * a;
    c.y = l * a;
    c.u = n + 2;
    c.w = static_cast<long>(k) * n;
    c.d = static_cast<long>(k) * (n + 2);
    c.rows = n                                  // visit
             + static_cast<long>(k) * n         // flow
             + 2L * k                           // depot out / in
             + k * a                            // ordering
             + static_cast<long>(k) * n * n     // load increase (served heads only)
             + k * a                            // load carry
             + n                                // one server
             + static_cast<long>(k) * n         // server visits
             + (a - 1)                          // platoon limit
             + (a - 1)                          // platoon indicator lower
             + l * (a - 1);                     // platoon indicator upper
    return c;
}

namespace {

// Writes "name: terms sense rhs" with line wrapping.
class RowWriter {
public:
    explicit RowWriter(std::ostringstream& out) : out_(out) {}
    void begin(const std::string& name) {
        out_ << " " << name << ":";
        terms_ = 0;
    }
    void term(std::int64_t coef, const std::string& var) {
        if (terms_ > 0 && terms_ % 8 == 0) out_ << "\n   ";
        if (coef < 0) out_ << " - ";
        else if (terms_ > 0) out_ << " + ";
        else out_ << " ";
        const std::int64_t mag = coef < 0 ? -coef : coef;
        if (mag != 1) out_ << mag << " ";
        out_ << var;
        ++terms_;
    }
    void term_text(const std::string& coef, const std::string& var) {
        if (terms_ > 0 && terms_ % 8 == 0) out_ << "\n   ";
        out_ << (terms_ > 0 ? " + " : " ") << coef << " " << var;
        ++terms_;
    }
    void end(const char* sense, std::int64_t rhs) { out_ << " " << sense << " " << rhs << "\n"; }

private:
    std::ostringstream& out_;
    int terms_ = 0;
};

}  // namespace

std::string export_milp(const Instance& inst) {
    const int n = inst.num_customers();
    const int k = inst.fleet_size;
    const int l_max = inst.max_platoon;
    const int sink = n + 1;
    const int q_cap = inst.capacity;

    std::vector<Arc> arcs;
    for (int j = 1; j <= n; ++j) arcs.emplace_back(0, j);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (i != j) arcs.emplace_back(i, j);
    for (int i = 1; i <= n; ++i) arcs.emplace_back(i, sink);
    arcs.emplace_back(0, sink);
    auto is_idle_arc = [&](const Arc& a) { return a.first == 0 && a.second == sink; };

    auto x = [](int m, int i, int j) { return "x_" + std::to_string(m) + "_" + std::to_string(i) + "_" + std::to_string(j); };
    auto y = [](int l, int i, int j) { return "y_" + std::to_string(l) + "_" + std::to_string(i) + "_" + std::to_string(j); };
    auto u = [](int i) { return "u_" + std::to_string(i); };
    auto w = [](int m, int i) { return "w_" + std::to_string(m) + "_" + std::to_string(i); };
    auto d = [](int m, int i) { return "d_" + std::to_string(m) + "_" + std::to_string(i); };

    std::ostringstream out;
    out << "\\ MVRP arc-flow model for " << inst.name << "\n";
    out << "\\ N=" << n << " K=" << k << " L=" << l_max << " Q=" << q_cap << " eta=" << format_decimal(inst.eta)
        << " nodes 0 (depot) and " << sink << " (return depot)\n";
    out << "Minimize\n obj:";
    {
        int terms = 0;
        for (const auto& [i, j] : arcs)
            for (int l = 1; l <= l_max; ++l) {
                if (terms > 0 && terms % 6 == 0) out << "\n   ";
                const Cost c(platoon_cost_scaled(inst.d(i, j), l, inst.eta));
                out << (terms > 0 ? " + " : " ") << format_cost(c, inst.scale()) << " " << y(l, i, j);
                ++terms;
            }
        out << "\n";
    }
    out << "Subject To\n";
    RowWriter row(out);

    for (int j = 1; j <= n; ++j) {
        row.begin("visit_" + std::to_string(j));
        for (int m = 0; m < k; ++m)
            for (const auto& a : arcs)
                if (a.second == j) row.term(1, x(m, a.first, j));
        row.end(">=", 1);
    }
    for (int m = 0; m < k; ++m)
        for (int j = 1; j <= n; ++j) {
            row.begin("flow_" + std::to_string(m) + "_" + std::to_string(j));
            for (const auto& a : arcs)
                if (a.second == j) row.term(1, x(m, a.first, j));
            for (const auto& a : arcs)
                if (a.first == j) row.term(-1, x(m, j, a.second));
            row.end("=", 0);
        }
    for (int m = 0; m < k; ++m) {
        row.begin("leave_" + std::to_string(m));
        for (const auto& a : arcs)
            if (a.first == 0) row.term(1, x(m, 0, a.second));
        row.end("=", 1);
        row.begin("return_" + std::to_string(m));
        for (const auto& a : arcs)
            if (a.second == sink) row.term(1, x(m, a.first, sink));
        row.end("=", 1);
    }
    // u_i + 1 - N (1 - x) <= u_j
    for (int m = 0; m < k; ++m)
        for (const auto& [i, j] : arcs) {
            row.begin("order_" + std::to_string(m) + "_" + std::to_string(i) + "_" + std::to_string(j));
            row.term(1, u(i));
            row.term(-1, u(j));
            row.term(n, x(m, i, j));
            row.end("<=", n - 1);
        }
    // d_i + q_j - (Q + q_i)(2 - x - w_j) <= d_j, for customer heads j
    for (int m = 0; m < k; ++m)
        for (const auto& [i, j] : arcs) {
            if (j < 1 || j > n) continue;
            const int big = q_cap + inst.demand[i == sink ? 0 : i];
            row.begin("load_" + std::to_string(m) + "_" + std::to_string(i) + "_" + std::to_string(j));
            row.term(1, d(m, i));
            row.term(-1, d(m, j));
            row.term(big, x(m, i, j));
            row.term(big, w(m, j));
            row.end("<=", 2L * big - inst.demand[j]);
        }
    // d_i - Q (1 - x) <= d_j
    for (int m = 0; m < k; ++m)
        for (const auto& [i, j] : arcs) {
            row.begin("carry_" + std::to_string(m) + "_" + std::to_string(i) + "_" + std::to_string(j));
            row.term(1, d(m, i));
            row.term(-1, d(m, j));
            row.term(q_cap, x(m, i, j));
            row.end("<=", q_cap);
        }
    for (int i = 1; i <= n; ++i) {
        row.begin("server_" + std::to_string(i));
        for (int m = 0; m < k; ++m) row.term(1, w(m, i));
        row.end("=", 1);
    }
    for (int m = 0; m < k; ++m)
        for (int j = 1; j <= n; ++j) {
            row.begin("reach_" + std::to_string(m) + "_" + std::to_string(j));
            for (const auto& a : arcs)
                if (a.second == j) row.term(1, x(m, a.first, j));
            row.term(-1, w(m, j));
            row.end(">=", 0);
        }
    // Platoon rows. The idle arc 0 -> 0' carries every unused MV at zero cost,
    // so it is left out of the size limit and the indicator rows.
    for (const auto& a : arcs) {
        if (is_idle_arc(a)) continue;
        row.begin("platoon_" + std::to_string(a.first) + "_" + std::to_string(a.second));
        for (int m = 0; m < k; ++m) row.term(1, x(m, a.first, a.second));
        row.end("<=", l_max);
    }
    // L * sum_l y >= sum_k x
    for (const auto& a : arcs) {
        if (is_idle_arc(a)) continue;
        row.begin("size_lo_" + std::to_string(a.first) + "_" + std::to_string(a.second));
        for (int l = 1; l <= l_max; ++l) row.term(l_max, y(l, a.first, a.second));
        for (int m = 0; m < k; ++m) row.term(-1, x(m, a.first, a.second));
        row.end(">=", 0);
    }
    // L * y_l + sum_k x <= L + l
    for (const auto& a : arcs) {
        if (is_idle_arc(a)) continue;
        for (int l = 1; l <= l_max; ++l) {
            row.begin("size_hi_" + std::to_string(l) + "_" + std::to_string(a.first) + "_" + std::to_string(a.second));
            row.term(l_max, y(l, a.first, a.second));
            for (int m = 0; m < k; ++m) row.term(1, x(m, a.first, a.second));
            row.end("<=", l_max + l);
        }
    }

    out << "Bounds\n";
    for (int i = 0; i <= sink; ++i) out << " 0 <= " << u(i) << " <= " << n + 1 << "\n";
    for (int m = 0; m < k; ++m)
        for (int i = 0; i <= sink; ++i) out << " 0 <= " << d(m, i) << " <= " << q_cap << "\n";
    out << "Binaries\n";
    int col = 0;
    auto bin = [&](const std::string& name) {
        out << (col == 0 ? " " : " ") << name;
        if (++col == 8) {
            out << "\n";
            col = 0;
        }
    };
    for (int m = 0; m < k; ++m)
        for (const auto& [i, j] : arcs) bin(x(m, i, j));
    for (int l = 1; l <= l_max; ++l)
        for (const auto& [i, j] : arcs) bin(y(l, i, j));
    for (int m = 0; m < k; ++m)
        for (int i = 1; i <= n; ++i) bin(w(m, i));
    if (col != 0) out << "\n";
    out << "End\n";
    return out.str();
}

MilpCounts count_lp(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::set<std::string> vars;
    MilpCounts c;
    bool in_rows = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '\\') continue;
        if (line == "Subject To") {
            in_rows = true;
            continue;
        }
        if (line == "Bounds" || line == "Binaries" || line == "End" || line == "Minimize") {
            in_rows = false;
            continue;
        }
        std::istringstream words(line);
        std::string tok;
        bool first = true;
        while (words >> tok) {
            if (in_rows && first && tok.back() == ':') ++c.rows;
            first = false;
            if (tok.size() > 2 && tok[1] == '_' && std::string("xyuwd").find(tok[0]) != std::string::npos) vars.insert(tok);
        }
    }
    for (const auto& v : vars) {
        switch (v[0]) {
            case 'x': ++c.x; break;
            case 'y': ++c.y; break;
            case 'u': ++c.u; break;
            case 'w': ++c.w; break;
            case 'd': ++c.d; break;
        }
    }
    return c;
}

}  // namespace mvrp
