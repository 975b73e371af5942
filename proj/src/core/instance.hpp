#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/cost.hpp"

namespace mvrp {

enum class Metric { Manhattan, Euclidean };

struct Point {
    double x = 0;
    double y = 0;
};

// Integer length between two points. Euclidean is rounded to nearest (TSPLIB EUC_2D).
int distance(Point a, Point b, Metric metric);

// Immutable after build(). Node 0 is the depot, 1..N are customers and index
// N + 1 is the return copy of the depot (same coordinates, zero demand).
class Instance {
public:
    std::string name = "unnamed";
    std::string comment;
    std::vector<Point> points;  // depot + customers, size N + 1
    std::vector<int> demand;    // size N + 1, demand[0] == 0
    int capacity = 0;
    int fleet_size = 0;  // 0 before build() means "use the default"
    int max_platoon = 1;
    Rational eta;
    Metric metric = Metric::Manhattan;

    // Checks the invariants, fills in the default fleet size and the distance
    // matrix. Throws DemandExceedsCapacity, BadEta or InvariantViolation.
    void build();

    int num_customers() const { return static_cast<int>(points.size()) - 1; }
    int sink() const { return num_customers() + 1; }
    int num_nodes_with_sink() const { return num_customers() + 2; }
    int d(int i, int j) const { return dist_[static_cast<std::size_t>(i) * stride_ + j]; }
    std::int64_t scale() const { return eta.den; }
    int total_demand() const;

    // ceil(total demand / Q) + 2
    static int default_fleet(int total_demand, int capacity);

private:
    std::vector<int> dist_;
    std::size_t stride_ = 0;
};

// Instance file in the MVRP keyword format.
Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& inst);
Instance load_instance(const std::string& path);

// TSPLIB-style CVRP file (Augerat sets). The result has L = 1, eta = 0 and the
// file's EDGE_WEIGHT_TYPE as metric; customers keep their file order.
Instance parse_cvrp(std::string_view text);
std::string serialize_cvrp(const Instance& inst);

struct DeriveOverrides {
    std::optional<int> capacity;
    std::optional<int> max_platoon;
    std::optional<Rational> eta;
    std::optional<int> fleet_size;  // default: recomputed for the kept customers
    std::optional<Metric> metric;
    std::optional<std::string> name;
};

// Sub-instance keeping the listed customers, renumbered 1..|keep| in ascending
// original order. Throws UnknownCustomer or InvariantViolation.
Instance derive_instance(const Instance& base, std::vector<int> keep, const DeriveOverrides& overrides);

// Picks `count` distinct customers uniformly at random (sorted ascending).
std::vector<int> sample_customers(const Instance& base, int count, std::uint64_t seed);

enum class AugeratSet { A, B };

// Augerat-style random CVRP instance: set A has uniform coordinates in
// [0,100]^2, set B clusters customers around a few centers. Demands are 1..30.
Instance synthesize_cvrp(AugeratSet set, int nodes, int capacity, std::uint64_t seed);

const char* metric_name(Metric metric);

}  // namespace mvrp
