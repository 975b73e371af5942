#include "doctest.h"

#include "core/error.hpp"
#include "core/instance.hpp"
#include "support.hpp"

using namespace mvrp;

namespace {

std::string minimal_file(const std::string& extra_demand = "1 10", const std::string& capacity = "70") {
    return "NAME : mini\nTYPE : MVRP\nDIMENSION : 2\nMETRIC : MANHATTAN\nCAPACITY : " + capacity +
           "\nMAX_PLATOON : 2\nETA : 0.1\nNODE_COORD_SECTION\n0 0 0\n1 3 4\nDEMAND_SECTION\n0 0\n" + extra_demand +
           "\nDEPOT_SECTION\n0\n-1\nEOF\n";
}

ErrorCode code_of(const std::string& text) {
    try {
        parse_instance(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("distance metrics") {
    CHECK(distance({0, 0}, {3, 4}, Metric::Manhattan) == 7);
    CHECK(distance({0, 0}, {3, 4}, Metric::Euclidean) == 5);
    CHECK(distance({2, 2}, {2, 2}, Metric::Manhattan) == 0);
    CHECK(distance({0, 0}, {1, 1}, Metric::Euclidean) == 1);
}

TEST_CASE("manhattan distance is a metric on random points") {
    Rng rng(3);
    auto pt = [&] { return Point{static_cast<double>(uniform_int(rng, -50, 50)), static_cast<double>(uniform_int(rng, -50, 50))}; };
    for (int i = 0; i < 1000; ++i) {
        const Point a = pt(), b = pt(), c = pt();
        CHECK(distance(a, b, Metric::Manhattan) == distance(b, a, Metric::Manhattan));
        CHECK(distance(a, c, Metric::Manhattan) <= distance(a, b, Metric::Manhattan) + distance(b, c, Metric::Manhattan));
        CHECK(distance(a, b, Metric::Euclidean) == distance(b, a, Metric::Euclidean));
    }
}

TEST_CASE("parse minimal instance") {
    const Instance inst = parse_instance(minimal_file());
    CHECK(inst.num_customers() == 1);
    CHECK(inst.capacity == 70);
    CHECK(inst.max_platoon == 2);
    CHECK(inst.eta == Rational{1, 10});
    CHECK(inst.d(0, 1) == 7);
    CHECK(inst.d(1, inst.sink()) == 7);
    CHECK(inst.d(0, inst.sink()) == 0);
    CHECK(inst.fleet_size == Instance::default_fleet(10, 70));
}

TEST_CASE("parse errors") {
    CHECK(code_of(minimal_file("1 80")) == ErrorCode::DemandExceedsCapacity);
    CHECK(code_of(minimal_file("1 10\n1 10")) == ErrorCode::DuplicateNodeId);
    std::string no_cap = minimal_file();
    no_cap.erase(no_cap.find("CAPACITY"), std::string("CAPACITY : 70\n").size());
    CHECK(code_of(no_cap) == ErrorCode::MissingKeyword);
    std::string unknown = minimal_file();
    unknown.insert(unknown.find("NODE_COORD"), "COLOR : red\n");
    CHECK(code_of(unknown) == ErrorCode::ParseError);
    std::string bad_eta = minimal_file();
    bad_eta.replace(bad_eta.find("ETA : 0.1"), 9, "ETA : 1.0");
    CHECK(code_of(bad_eta) == ErrorCode::BadEta);
    CHECK(code_of("garbage") == ErrorCode::ParseError);
}

TEST_CASE("ten-node instance with capacity 70") {
    const Instance base = synthesize_cvrp(AugeratSet::A, 32, 100, 5);
    DeriveOverrides o;
    o.capacity = 70;
    o.max_platoon = 2;
    o.eta = Rational{1, 10};
    o.metric = Metric::Manhattan;
    const Instance inst = derive_instance(base, sample_customers(base, 9, 1), o);
    const Instance back = parse_instance(serialize_instance(inst));
    CHECK(back.num_customers() == 9);
    CHECK(back.capacity == 70);
}

TEST_CASE("serialize and parse round-trip") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Instance inst = test::random_tiny(seed, 1 + static_cast<int>(seed % 6), 3, 2 + static_cast<int>(seed % 2));
        const Instance back = parse_instance(serialize_instance(inst));
        CHECK(serialize_instance(back) == serialize_instance(inst));
        CHECK(back.fleet_size == inst.fleet_size);
        CHECK(back.eta == inst.eta);
        for (int i = 0; i <= inst.sink(); ++i)
            for (int j = 0; j <= inst.sink(); ++j) CHECK(back.d(i, j) == inst.d(i, j));
    }
}

TEST_CASE("derive keeps order and applies overrides") {
    const Instance base = synthesize_cvrp(AugeratSet::A, 32, 100, 1);
    CHECK(base.num_customers() == 31);
    SUBCASE("identity subset") {
        std::vector<int> all;
        for (int i = 1; i <= 31; ++i) all.push_back(i);
        DeriveOverrides o;
        o.max_platoon = 3;
        o.eta = Rational{1, 10};
        const Instance d = derive_instance(base, all, o);
        CHECK(d.num_customers() == 31);
        for (int i = 0; i <= 31; ++i) {
            CHECK(d.points[i].x == base.points[i].x);
            CHECK(d.demand[i] == base.demand[i]);
        }
        CHECK(d.max_platoon == 3);
    }
    SUBCASE("29 random customers give a 30-node instance") {
        DeriveOverrides o;
        o.capacity = 100;
        o.max_platoon = 3;
        o.eta = Rational{1, 10};
        const auto keep = sample_customers(base, 29, 42);
        CHECK(keep == sample_customers(base, 29, 42));
        const Instance d = derive_instance(base, keep, o);
        CHECK(d.num_customers() + 1 == 30);
        for (int i = 1; i <= 29; ++i) CHECK(d.demand[i] == base.demand[keep[i - 1]]);
    }
    SUBCASE("unknown customer") {
        try {
            derive_instance(base, {1, 99}, {});
            FAIL("expected UnknownCustomer");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnknownCustomer);
        }
    }
    SUBCASE("kept demand above new capacity") {
        DeriveOverrides o;
        o.capacity = 1;
        try {
            derive_instance(base, {1, 2}, o);
            FAIL("expected InvariantViolation");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvariantViolation);
        }
    }
    SUBCASE("eta too large for L") {
        DeriveOverrides o;
        o.eta = Rational{1, 2};
        o.max_platoon = 4;
        try {
            derive_instance(base, {1, 2}, o);
            FAIL("expected BadEta");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BadEta);
        }
    }
}

TEST_CASE("cvrp text round-trip") {
    const Instance base = synthesize_cvrp(AugeratSet::B, 20, 50, 9);
    const Instance back = parse_cvrp(serialize_cvrp(base));
    CHECK(back.num_customers() == 19);
    CHECK(serialize_cvrp(back) == serialize_cvrp(base));
}

TEST_CASE("test data files parse") {
    const Instance inst = load_instance(test::data_path("t2.mvrp"));
    CHECK(inst.num_customers() == 2);
    CHECK(inst.fleet_size == 2);
    CHECK(inst.d(0, 2) == 6);
}
