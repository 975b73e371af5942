#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/state.hpp"

namespace mvrp {

// Declaration order is the tie-break order between equal-delta moves.
enum class MoveKind { SerialMerge, ParallelMerge, RelocateIntraSegment, RelocateIntraMv, RelocateInterMv };

const char* to_string(MoveKind kind);
inline bool is_merge(MoveKind kind) { return kind == MoveKind::SerialMerge || kind == MoveKind::ParallelMerge; }

// A candidate change. `touched_arcs` are the arcs the move removes from the
// plan (they become tabu); `created_arcs` are arcs it introduces.
//   SerialMerge:   params = {route segment, a, b}      route spliced into arc a->b
//   ParallelMerge: params = {route segment, p, q}      route rides p ... q
//   Relocate*:     params = {customer, a, b, server}
struct Move {
    MoveKind kind = MoveKind::SerialMerge;
    std::vector<int> params;
    Cost delta;
    std::vector<Arc> touched_arcs;
    std::vector<Arc> created_arcs;
    Edit edit;
};

enum class TabuList { Merge, Relocate };

inline TabuList list_of(MoveKind kind) { return is_merge(kind) ? TabuList::Merge : TabuList::Relocate; }

// Arc-indexed tabu lists, one for the merge operators and one for relocates.
class TabuState {
public:
    TabuState(int num_nodes, int tenure);

    bool is_tabu(TabuList list, int u, int v) const { return table(list)[idx(u, v)] > iteration_; }
    // Each family records into its own list, but recreating an arc either list holds
    // is refused. Checking only the mover's list lets a merge and a relocate undo each
    // other indefinitely.
    bool blocks(int u, int v) const { return is_tabu(TabuList::Merge, u, v) || is_tabu(TabuList::Relocate, u, v); }
    void forbid(TabuList list, const std::vector<Arc>& arcs);
    void advance() { ++iteration_; }
    void clear();
    int iteration() const { return iteration_; }
    int tenure() const { return tenure_; }

private:
    std::size_t idx(int u, int v) const { return static_cast<std::size_t>(u) * n_ + v; }
    const std::vector<int>& table(TabuList list) const { return list == TabuList::Merge ? merge_ : relocate_; }

    int n_;
    int tenure_;
    int iteration_ = 0;
    std::vector<int> merge_;
    std::vector<int> relocate_;
};

// Tabu lists plus the aspiration threshold: a tabu move is still admissible
// when it leads strictly below `best_cost`. A null tabu pointer admits all.
struct Admission {
    const TabuState* tabu = nullptr;
    Cost best_cost;
};

// Greedy pairing of route MVs with segment MVs. Inputs are served demands;
// outputs are indices into them.
struct PairSet {
    std::vector<std::pair<int, int>> pairs;  // (index in kr, index in ks)
    std::vector<int> unpaired_r;
    std::vector<int> unpaired_s;
};

PairSet pair_mvs(const std::vector<int>& kr, const std::vector<int>& ks, int capacity);

enum class Direction { FromSource, ToSink };

struct AttachPath {
    std::vector<int> nodes;     // depot/sink included
    std::vector<int> segments;  // solution-file segment ids, source/sink included
    Cost cost;
};

// Cheapest way for one extra MV to reach a segment (riding it to its end) or
// to leave it for the sink. Throws NoFeasiblePath when the segment is full.
AttachPath cheapest_attach_path(const State& state, int segment, Direction direction);

enum class Rejection { Infeasible, NoFeasiblePath, Tabu };
const char* to_string(Rejection r);

using MoveResult = std::variant<Move, Rejection>;

// Splices the single-brunch route `route_segment` into arc a->b for every MV on
// that arc. Route MVs are paired with arc MVs; unpaired ones ride along.
MoveResult serial_merge(const State& state, int route_segment, int a, int b, const Admission& adm);

// Moves the single-brunch route so that its MVs travel from the depot to p,
// serve the route, and continue from q to the sink, platooning where possible.
MoveResult parallel_merge(const State& state, int route_segment, int p, int q, const Admission& adm);

// Removes `customer` from every MV visiting it and inserts it into arc a->b
// (of the plan without the customer) for every MV on that arc; `server`
// serves it. a = 0, b = sink with an unused server opens a new route.
MoveResult relocate(const State& state, int customer, int a, int b, int server, const Admission& adm);

struct NeighborhoodOptions {
    bool relocate = true;
    bool merge = true;
};

// Best admissible move by (delta, kind, params). Throws NoAdmissibleMove.
Move best_move(const State& state, const Admission& adm, const NeighborhoodOptions& opts = {});

// Best improving merge (delta < 0) ignoring tabu, if any.
std::optional<Move> best_merge(const State& state);

}  // namespace mvrp
