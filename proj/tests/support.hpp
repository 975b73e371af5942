#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core/cost.hpp"
#include "core/instance.hpp"
#include "core/rng.hpp"
#include "core/state.hpp"

#ifndef MVRP_TEST_DATA
#define MVRP_TEST_DATA "tests/data"
#endif

namespace mvrp::test {

inline std::string data_path(const std::string& file) { return std::string(MVRP_TEST_DATA) + "/" + file; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Cost units(std::int64_t whole, const Instance& inst) { return Cost(whole * inst.scale()); }

// Builds an instance from integer coordinates; index 0 is the depot.
inline Instance make_instance(std::vector<Point> points, std::vector<int> demand, int capacity, int fleet,
                              int max_platoon, Rational eta = Rational{1, 10}, Metric metric = Metric::Manhattan) {
    Instance inst;
    inst.name = "test";
    inst.points = std::move(points);
    inst.demand = std::move(demand);
    inst.capacity = capacity;
    inst.fleet_size = fleet;
    inst.max_platoon = max_platoon;
    inst.eta = eta;
    inst.metric = metric;
    inst.build();
    return inst;
}

// T1: customers on opposite sides of the depot; platooning never pays.
inline Instance t1() { return make_instance({{0, 0}, {1, 0}, {-1, 0}}, {0, 1, 1}, 1, 2, 2); }

// T2: two customers on a ray; optimum platoons to c1, then MV B goes on to c2.
inline Instance t2(int capacity = 1) { return make_instance({{0, 0}, {5, 0}, {6, 0}}, {0, 1, 1}, capacity, 2, 2); }

// Random tiny Manhattan instance on a 0..10 grid, at most `max_fleet` MVs.
inline Instance random_tiny(std::uint64_t seed, int n, int max_fleet, int max_platoon, Rational eta = Rational{1, 10}) {
    Rng rng(splitmix64(seed));
    for (;;) {
        std::vector<Point> pts{{5, 5}};
        std::vector<int> q{0};
        const int cap = uniform_int(rng, 3, 10);
        int total = 0;
        for (int i = 0; i < n; ++i) {
            pts.push_back({static_cast<double>(uniform_int(rng, 0, 10)), static_cast<double>(uniform_int(rng, 0, 10))});
            q.push_back(uniform_int(rng, 1, std::max(1, cap / 2)));
            total += q.back();
        }
        // Leave one route of slack so random first-fit always succeeds.
        const int need = (total + cap - 1) / cap;
        if (need + 1 > max_fleet || 2 * total > (max_fleet - 1) * cap + cap) continue;
        const int fleet = uniform_int(rng, need + 1, max_fleet);
        if (2 * total > fleet * cap) continue;
        Instance inst = make_instance(pts, q, cap, fleet, max_platoon, eta);
        inst.name = "tiny-" + std::to_string(seed);
        return inst;
    }
}

}  // namespace mvrp::test
