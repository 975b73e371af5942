#include "core/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mvrp {

int distance(Point a, Point b, Metric metric) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    if (metric == Metric::Manhattan) return static_cast<int>(std::llround(std::fabs(dx) + std::fabs(dy)));
    return static_cast<int>(std::llround(std::sqrt(dx * dx + dy * dy)));
}

const char* metric_name(Metric metric) { return metric == Metric::Manhattan ? "MANHATTAN" : "EUC_2D"; }

int Instance::total_demand() const {
    int total = 0;
    for (int q : demand) total += q;
    return total;
}

int Instance::default_fleet(int total_demand, int capacity) { return (total_demand + capacity - 1) / capacity + 2; }

void Instance::build() {
    const int n = num_customers();
    if (n < 0) throw Error(ErrorCode::InvariantViolation, "instance has no depot");
    if (static_cast<int>(demand.size()) != n + 1)
        throw Error(ErrorCode::InvariantViolation, "demand list does not match node list");
    if (capacity <= 0) throw Error(ErrorCode::InvariantViolation, "capacity must be positive");
    if (max_platoon < 1) throw Error(ErrorCode::InvariantViolation, "max platoon size must be at least 1");
    if (eta.num < 0 || eta.num * (max_platoon - 1) >= eta.den)
        throw Error(ErrorCode::BadEta, "eta " + format_decimal(eta) + " with max platoon " +
                                           std::to_string(max_platoon) + " gives a non-positive cost factor");
    if (demand[0] != 0) throw Error(ErrorCode::InvariantViolation, "depot demand must be zero");
    for (int i = 1; i <= n; ++i) {
        if (demand[i] < 0) throw Error(ErrorCode::InvariantViolation, "negative demand at customer " + std::to_string(i));
        if (demand[i] > capacity)
            throw Error(ErrorCode::DemandExceedsCapacity, "customer " + std::to_string(i) + " demand " +
                                                              std::to_string(demand[i]) + " exceeds capacity " +
                                                              std::to_string(capacity));
    }
    for (const Point& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::InvariantViolation, "non-finite coordinate");
    if (fleet_size == 0) fleet_size = default_fleet(total_demand(), capacity);
    if (fleet_size < 1 || fleet_size > 64)
        throw Error(ErrorCode::InvariantViolation, "fleet size must be in 1..64");
    if (static_cast<long long>(total_demand()) > static_cast<long long>(fleet_size) * capacity)
        throw Error(ErrorCode::InvariantViolation, "total demand exceeds fleet capacity");

    stride_ = static_cast<std::size_t>(n) + 2;
    dist_.assign(stride_ * stride_, 0);
    auto point_of = [&](int i) { return points[i == n + 1 ? 0 : i]; };
    for (int i = 0; i <= n + 1; ++i)
        for (int j = 0; j <= n + 1; ++j) dist_[i * stride_ + j] = distance(point_of(i), point_of(j), metric);
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

long long to_integer(const std::string& tok, const char* what) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + tok + "'");
    return v;
}

double to_real(const std::string& tok) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw Error(ErrorCode::ParseError, "bad coordinate '" + tok + "'");
    return v;
}

std::string fmt_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Keyword/section file shared by the MVRP and CVRP readers.
struct KeywordFile {
    std::map<std::string, std::string> header;
    std::map<std::string, std::vector<std::vector<std::string>>> sections;
};

KeywordFile read_keyword_file(std::string_view text, const std::set<std::string>& header_keys,
                              const std::set<std::string>& section_keys) {
    KeywordFile file;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line == "EOF") break;
        // A line opening with a letter is a keyword; section rows start with digits or signs.
        if (std::isalpha(static_cast<unsigned char>(line[0]))) {
            std::string key;
            std::string value;
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                key = trim(line.substr(0, colon));
                value = trim(line.substr(colon + 1));
            } else {
                const auto space = line.find_first_of(" \t");
                key = line.substr(0, space);
                value = space == std::string::npos ? "" : trim(line.substr(space));
            }
            if (section_keys.count(key)) {
                if (file.sections.count(key))
                    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": repeated " + key);
                section = key;
                file.sections[key];
                continue;
            }
            if (!header_keys.count(key))
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown keyword '" + key + "'");
            if (file.header.count(key))
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": repeated " + key);
            file.header[key] = value;
            section.clear();
            continue;
        }
        if (section.empty())
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": data outside of a section");
        file.sections[section].push_back(split_ws(line));
    }
    return file;
}

const std::string& require(const KeywordFile& f, const std::string& key) {
    auto it = f.header.find(key);
    if (it == f.header.end()) throw Error(ErrorCode::MissingKeyword, "missing " + key);
    return it->second;
}

const std::vector<std::vector<std::string>>& require_section(const KeywordFile& f, const std::string& key) {
    auto it = f.sections.find(key);
    if (it == f.sections.end()) throw Error(ErrorCode::MissingKeyword, "missing " + key);
    return it->second;
}

Metric parse_metric(const std::string& value) {
    if (value == "MANHATTAN" || value == "MAN_2D") return Metric::Manhattan;
    if (value == "EUC_2D") return Metric::Euclidean;
    throw Error(ErrorCode::ParseError, "unsupported metric '" + value + "'");
}

// Reads coordinates and demands keyed by file id; `first_id` is the id of the
// lowest node (0 for MVRP files, 1 for TSPLIB).
void read_nodes(const KeywordFile& f, int dimension, int first_id, int depot_id, Instance& inst) {
    const auto& coords = require_section(f, "NODE_COORD_SECTION");
    const auto& demands = require_section(f, "DEMAND_SECTION");
    std::vector<std::optional<Point>> pts(dimension);
    std::vector<std::optional<int>> qs(dimension);
    auto slot = [&](const std::string& tok) {
        const long long id = to_integer(tok, "node id");
        if (id < first_id || id >= first_id + dimension)
            throw Error(ErrorCode::ParseError, "node id " + tok + " outside 0.." + std::to_string(dimension - 1 + first_id));
        return static_cast<int>(id - first_id);
    };
    for (const auto& row : coords) {
        if (row.size() != 3) throw Error(ErrorCode::ParseError, "coordinate rows need 'id x y'");
        const int k = slot(row[0]);
        if (pts[k]) throw Error(ErrorCode::DuplicateNodeId, "node " + row[0] + " listed twice in NODE_COORD_SECTION");
        pts[k] = Point{to_real(row[1]), to_real(row[2])};
    }
    for (const auto& row : demands) {
        if (row.size() != 2) throw Error(ErrorCode::ParseError, "demand rows need 'id q'");
        const int k = slot(row[0]);
        if (qs[k]) throw Error(ErrorCode::DuplicateNodeId, "node " + row[0] + " listed twice in DEMAND_SECTION");
        qs[k] = static_cast<int>(to_integer(row[1], "demand"));
    }
    const int depot = depot_id - first_id;
    if (depot < 0 || depot >= dimension) throw Error(ErrorCode::ParseError, "depot id out of range");
    inst.points.clear();
    inst.demand.clear();
    auto push = [&](int k) {
        if (!pts[k]) throw Error(ErrorCode::ParseError, "node " + std::to_string(k + first_id) + " has no coordinates");
        if (!qs[k]) throw Error(ErrorCode::ParseError, "node " + std::to_string(k + first_id) + " has no demand");
        inst.points.push_back(*pts[k]);
        inst.demand.push_back(*qs[k]);
    };
    push(depot);
    for (int k = 0; k < dimension; ++k)
        if (k != depot) push(k);
    if (inst.demand[0] != 0) throw Error(ErrorCode::ParseError, "depot demand must be zero");
}

int read_depot(const KeywordFile& f, int fallback) {
    auto it = f.sections.find("DEPOT_SECTION");
    if (it == f.sections.end()) return fallback;
    std::vector<long long> ids;
    for (const auto& row : it->second)
        for (const auto& tok : row) ids.push_back(to_integer(tok, "depot id"));
    if (ids.size() != 2 || ids[1] != -1) throw Error(ErrorCode::ParseError, "DEPOT_SECTION must hold one id followed by -1");
    return static_cast<int>(ids[0]);
}

int positive_int(const std::string& value, const char* what) {
    const long long v = to_integer(value, what);
    if (v <= 0 || v > 1'000'000'000) throw Error(ErrorCode::ParseError, std::string(what) + " must be positive");
    return static_cast<int>(v);
}

}  // namespace

Instance parse_instance(std::string_view text) {
    static const std::set<std::string> header = {"NAME",     "TYPE",       "COMMENT",     "DIMENSION", "METRIC",
                                                 "CAPACITY", "FLEET_SIZE", "MAX_PLATOON", "ETA"};
    static const std::set<std::string> sections = {"NODE_COORD_SECTION", "DEMAND_SECTION", "DEPOT_SECTION"};
    const KeywordFile f = read_keyword_file(text, header, sections);

    Instance inst;
    if (auto it = f.header.find("NAME"); it != f.header.end()) inst.name = it->second;
    if (auto it = f.header.find("COMMENT"); it != f.header.end()) inst.comment = it->second;
    if (auto it = f.header.find("TYPE"); it != f.header.end() && it->second != "MVRP")
        throw Error(ErrorCode::ParseError, "TYPE must be MVRP, got '" + it->second + "'");
    const int dimension = positive_int(require(f, "DIMENSION"), "DIMENSION");
    inst.capacity = positive_int(require(f, "CAPACITY"), "CAPACITY");
    inst.max_platoon = positive_int(require(f, "MAX_PLATOON"), "MAX_PLATOON");
    inst.eta = parse_decimal(require(f, "ETA"));
    if (auto it = f.header.find("METRIC"); it != f.header.end()) inst.metric = parse_metric(it->second);
    if (auto it = f.header.find("FLEET_SIZE"); it != f.header.end())
        inst.fleet_size = positive_int(it->second, "FLEET_SIZE");
    const int depot = read_depot(f, 0);
    if (depot != 0) throw Error(ErrorCode::ParseError, "the depot must be node 0");
    read_nodes(f, dimension, 0, 0, inst);
    inst.build();
    return inst;
}

std::string serialize_instance(const Instance& inst) {
    std::ostringstream out;
    out << "NAME : " << inst.name << "\n";
    out << "TYPE : MVRP\n";
    if (!inst.comment.empty()) out << "COMMENT : " << inst.comment << "\n";
    out << "DIMENSION : " << inst.points.size() << "\n";
    out << "METRIC : " << metric_name(inst.metric) << "\n";
    out << "CAPACITY : " << inst.capacity << "\n";
    out << "FLEET_SIZE : " << inst.fleet_size << "\n";
    out << "MAX_PLATOON : " << inst.max_platoon << "\n";
    out << "ETA : " << format_decimal(inst.eta) << "\n";
    out << "NODE_COORD_SECTION\n";
    for (std::size_t i = 0; i < inst.points.size(); ++i)
        out << i << " " << fmt_real(inst.points[i].x) << " " << fmt_real(inst.points[i].y) << "\n";
    out << "DEMAND_SECTION\n";
    for (std::size_t i = 0; i < inst.demand.size(); ++i) out << i << " " << inst.demand[i] << "\n";
    out << "DEPOT_SECTION\n0\n-1\nEOF\n";
    return out.str();
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

Instance parse_cvrp(std::string_view text) {
    static const std::set<std::string> header = {"NAME",     "TYPE",    "COMMENT",         "DIMENSION",
                                                 "CAPACITY", "VEHICLES", "EDGE_WEIGHT_TYPE", "DISTANCE"};
    static const std::set<std::string> sections = {"NODE_COORD_SECTION", "DEMAND_SECTION", "DEPOT_SECTION"};
    const KeywordFile f = read_keyword_file(text, header, sections);

    Instance inst;
    if (auto it = f.header.find("NAME"); it != f.header.end()) inst.name = it->second;
    if (auto it = f.header.find("COMMENT"); it != f.header.end()) inst.comment = it->second;
    if (auto it = f.header.find("TYPE"); it != f.header.end() && it->second != "CVRP")
        throw Error(ErrorCode::ParseError, "TYPE must be CVRP, got '" + it->second + "'");
    const int dimension = positive_int(require(f, "DIMENSION"), "DIMENSION");
    inst.capacity = positive_int(require(f, "CAPACITY"), "CAPACITY");
    inst.metric = Metric::Euclidean;
    if (auto it = f.header.find("EDGE_WEIGHT_TYPE"); it != f.header.end()) inst.metric = parse_metric(it->second);
    inst.max_platoon = 1;
    inst.eta = Rational{0, 10};
    read_nodes(f, dimension, 1, read_depot(f, 1), inst);
    inst.fleet_size = std::min(64, Instance::default_fleet(inst.total_demand(), inst.capacity));
    inst.build();
    return inst;
}

std::string serialize_cvrp(const Instance& inst) {
    std::ostringstream out;
    out << "NAME : " << inst.name << "\n";
    if (!inst.comment.empty()) out << "COMMENT : " << inst.comment << "\n";
    out << "TYPE : CVRP\n";
    out << "DIMENSION : " << inst.points.size() << "\n";
    out << "EDGE_WEIGHT_TYPE : " << metric_name(inst.metric) << "\n";
    out << "CAPACITY : " << inst.capacity << "\n";
    out << "NODE_COORD_SECTION\n";
    for (std::size_t i = 0; i < inst.points.size(); ++i)
        out << i + 1 << " " << fmt_real(inst.points[i].x) << " " << fmt_real(inst.points[i].y) << "\n";
    out << "DEMAND_SECTION\n";
    for (std::size_t i = 0; i < inst.demand.size(); ++i) out << i + 1 << " " << inst.demand[i] << "\n";
    out << "DEPOT_SECTION\n1\n-1\nEOF\n";
    return out.str();
}

Instance derive_instance(const Instance& base, std::vector<int> keep, const DeriveOverrides& overrides) {
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw Error(ErrorCode::InvalidArgument, "keep list repeats a customer");
    for (int c : keep)
        if (c < 1 || c > base.num_customers())
            throw Error(ErrorCode::UnknownCustomer, "customer " + std::to_string(c) + " is not in " + base.name);

    Instance inst;
    inst.name = overrides.name.value_or(base.name);
    inst.comment = base.comment;
    inst.points.push_back(base.points[0]);
    inst.demand.push_back(0);
    for (int c : keep) {
        inst.points.push_back(base.points[c]);
        inst.demand.push_back(base.demand[c]);
    }
    inst.capacity = overrides.capacity.value_or(base.capacity);
    inst.max_platoon = overrides.max_platoon.value_or(base.max_platoon);
    inst.eta = overrides.eta.value_or(base.eta);
    inst.metric = overrides.metric.value_or(base.metric);
    inst.fleet_size = overrides.fleet_size.value_or(0);
    try {
        inst.build();
    } catch (const Error& e) {
        // A derived instance can only break invariants through its overrides.
        if (e.code() == ErrorCode::BadEta) throw;
        throw Error(ErrorCode::InvariantViolation, e.what());
    }
    return inst;
}

std::vector<int> sample_customers(const Instance& base, int count, std::uint64_t seed) {
    const int n = base.num_customers();
    if (count < 0 || count > n)
        throw Error(ErrorCode::InvalidArgument, "cannot keep " + std::to_string(count) + " of " + std::to_string(n) + " customers");
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i + 1;
    Rng rng(splitmix64(seed));
    shuffle(ids, rng);
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
    return ids;
}

Instance synthesize_cvrp(AugeratSet set, int nodes, int capacity, std::uint64_t seed) {
    if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "need at least a depot and one customer");
    if (capacity < 30) throw Error(ErrorCode::InvalidArgument, "capacity must cover the largest demand (30)");
    Rng rng(splitmix64(seed ^ (set == AugeratSet::A ? 0xA : 0xB)));
    Instance inst;
    inst.name = std::string(set == AugeratSet::A ? "A" : "B") + "-n" + std::to_string(nodes) + "-s" + std::to_string(seed);
    inst.comment = "synthetic Augerat-style set " + std::string(set == AugeratSet::A ? "A" : "B");
    inst.metric = Metric::Euclidean;
    inst.capacity = capacity;
    inst.max_platoon = 1;
    inst.eta = Rational{0, 10};

    std::vector<Point> centers;
    if (set == AugeratSet::B) {
        const int k = std::max(2, nodes / 10);
        for (int i = 0; i < k; ++i)
            centers.push_back(Point{static_cast<double>(uniform_int(rng, 10, 90)), static_cast<double>(uniform_int(rng, 10, 90))});
    }
    auto random_point = [&]() {
        if (centers.empty())
            return Point{static_cast<double>(uniform_int(rng, 0, 100)), static_cast<double>(uniform_int(rng, 0, 100))};
        const Point c = centers[uniform_below(rng, centers.size())];
        const double x = std::clamp(c.x + uniform_int(rng, -10, 10), 0.0, 100.0);
        const double y = std::clamp(c.y + uniform_int(rng, -10, 10), 0.0, 100.0);
        return Point{x, y};
    };
    inst.points.push_back(random_point());
    inst.demand.push_back(0);
    for (int i = 1; i < nodes; ++i) {
        inst.points.push_back(random_point());
        inst.demand.push_back(uniform_int(rng, 1, 30));
    }
    inst.fleet_size = std::min(64, Instance::default_fleet(inst.total_demand(), capacity));
    inst.build();
    return inst;
}

}  // namespace mvrp
