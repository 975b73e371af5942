// Command-line front end. Talks to the solver only through the C API.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvrp/mvrp.h"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kParse = 1, kInfeasible = 2, kInvalid = 3 };

struct Failure {
    int code;
    std::string message;
};

int exit_for(mvrp_status s) {
    switch (s) {
        case MVRP_ERR_PARSE:
        case MVRP_ERR_MISSING_KEYWORD:
        case MVRP_ERR_DUPLICATE_NODE_ID:
        case MVRP_ERR_IO: return kParse;
        default: return kInfeasible;
    }
}

void check(mvrp_status s) {
    if (s != MVRP_OK) throw Failure{exit_for(s), mvrp_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
    ~Handle() { Free(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Instance = Handle<mvrp_instance, mvrp_instance_free>;
using Solution = Handle<mvrp_solution, mvrp_solution_free>;
using Result = Handle<mvrp_result, mvrp_result_free>;
using Report = Handle<mvrp_report, mvrp_report_free>;

std::string take(char* s) {
    std::string out(s ? s : "");
    mvrp_string_free(s);
    return out;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kParse, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Failure{kParse, "cannot write " + path};
}

Instance load(const std::string& path) {
    Instance inst;
    check(mvrp_instance_parse(read_text(path).c_str(), inst.out()));
    return inst;
}

struct SearchFlags {
    mvrp_params p{};
    bool no_relocate = false, no_merge = false, no_shaking = false;

    SearchFlags() { mvrp_params_default(&p); }

    void add(CLI::App* app) {
        app->add_option("--seed", p.seed, "RNG seed");
        app->add_option("--starts", p.starts, "number of independent starts")->check(CLI::PositiveNumber);
        app->add_option("--iterations", p.max_iterations, "tabu iterations per start")->check(CLI::NonNegativeNumber);
        app->add_option("--tenure", p.tenure, "tabu tenure")->check(CLI::PositiveNumber);
        app->add_option("--shake-trigger", p.shake_trigger, "non-improving iterations before a shake")
            ->check(CLI::PositiveNumber);
        app->add_option("--shake-max", p.shake_max, "largest shake count (0: ceil(K/3))");
        app->add_option("--sparse-fill", p.sparse_fill, "load cap of sampled routes as a fraction of Q");
        app->add_option("--threads", p.threads, "worker threads (0: MVRP_THREADS or all cores)");
        app->add_flag("--no-relocate", no_relocate, "disable the relocate operators");
        app->add_flag("--no-merge", no_merge, "disable merges inside the tabu search");
        app->add_flag("--no-shaking", no_shaking, "disable shaking");
    }

    mvrp_params params() const {
        mvrp_params q = p;
        if (no_relocate) q.use_relocate = 0;
        if (no_merge) q.use_merge = 0;
        if (no_shaking) q.use_shaking = 0;
        return q;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- solve

struct SolveArgs {
    std::string instance, output, trace_dir;
    SearchFlags flags;
};

int cmd_solve(const SolveArgs& a) {
    const Instance inst = load(a.instance);
    const auto t0 = std::chrono::steady_clock::now();
    Result res;
    const mvrp_params p = a.flags.params();
    check(mvrp_solve(inst.get(), &p, res.out()));
    const double secs = seconds_since(t0);
    mvrp_result_info info;
    check(mvrp_result_get_info(res.get(), &info));

    char* obj = nullptr;
    check(mvrp_result_objective(res.get(), &obj));
    std::cout << "objective " << take(obj) << "\n";
    std::printf("time_s %.3f\n", secs);
    std::cout << "best_start " << info.best_start << " iter_to_best " << info.iter_to_best << "\n";

    if (!a.output.empty()) {
        Solution sol;
        check(mvrp_result_solution(res.get(), sol.out()));
        char* text = nullptr;
        check(mvrp_solution_serialize(sol.get(), &text));
        write_text(a.output, take(text));
    }
    if (!a.trace_dir.empty()) {
        fs::create_directories(a.trace_dir);
        for (int s = 0; s < info.starts; ++s) {
            char* csv = nullptr;
            check(mvrp_result_trace_csv(res.get(), s, &csv));
            write_text((fs::path(a.trace_dir) / ("trace_" + std::to_string(s) + ".csv")).string(), take(csv));
        }
    }
    return kOk;
}

// ---- validate

int cmd_validate(const std::string& instance, const std::string& solution) {
    const Instance inst = load(instance);
    Solution sol;
    check(mvrp_solution_parse(read_text(solution).c_str(), sol.out()));
    Report rep;
    check(mvrp_validate(inst.get(), sol.get(), rep.out()));
    if (mvrp_report_ok(rep.get())) {
        std::cout << "ok cost " << mvrp_solution_cost(sol.get()) << "\n";
        return kOk;
    }
    for (size_t i = 0; i < mvrp_report_count(rep.get()); ++i)
        std::cout << mvrp_report_code(rep.get(), i) << " " << mvrp_report_detail(rep.get(), i) << "\n";
    return kInvalid;
}

// ---- derive

struct DeriveArgs {
    std::string source, output, eta, name, metric;
    int keep = 0, capacity = 0, max_platoon = 0, fleet = 0;
    std::uint64_t seed = 0;
};

// Accepts either an MVRP instance file or a TSPLIB CVRP file.
Instance load_any(const std::string& path) {
    const std::string text = read_text(path);
    Instance inst;
    if (mvrp_instance_parse(text.c_str(), inst.out()) == MVRP_OK) return inst;
    const std::string first = mvrp_last_error();
    Instance cvrp;
    const mvrp_status s = mvrp_instance_parse_cvrp(text.c_str(), cvrp.out());
    if (s != MVRP_OK) throw Failure{exit_for(s), std::string("not an instance file: ") + first + "; " + mvrp_last_error()};
    return cvrp;
}

int cmd_derive(const DeriveArgs& a) {
    const Instance base = load_any(a.source);
    mvrp_derive_options o;
    mvrp_derive_options_default(&o);
    o.keep_random = a.keep;
    o.seed = a.seed;
    o.capacity = a.capacity;
    o.max_platoon = a.max_platoon;
    o.fleet_size = a.fleet;
    if (!a.eta.empty()) o.eta = a.eta.c_str();
    if (!a.name.empty()) o.name = a.name.c_str();
    if (a.metric == "manhattan") o.metric = MVRP_METRIC_MANHATTAN;
    else if (a.metric == "euclidean") o.metric = MVRP_METRIC_EUCLIDEAN;
    Instance out;
    const mvrp_status s = mvrp_instance_derive(base.get(), &o, out.out());
    if (s != MVRP_OK) throw Failure{kInfeasible, mvrp_last_error()};
    char* text = nullptr;
    check(mvrp_instance_serialize(out.get(), &text));
    write_text(a.output, take(text));
    return kOk;
}

// ---- synth

int cmd_synth(const std::string& set, int nodes, int capacity, std::uint64_t seed, const std::string& output) {
    Instance inst;
    check(mvrp_instance_synthesize(set == "B" ? 1 : 0, nodes, capacity, seed, inst.out()));
    char* text = nullptr;
    check(mvrp_instance_serialize_cvrp(inst.get(), &text));
    write_text(output, take(text));
    return kOk;
}

// ---- export-lp

int cmd_export_lp(const std::string& instance, const std::string& output) {
    const Instance inst = load(instance);
    char* text = nullptr;
    mvrp_lp_counts c;
    check(mvrp_export_lp(inst.get(), &text, &c));
    const std::string lp = take(text);
    if (!output.empty()) write_text(output, lp);
    std::cout << "x:" << c.x << " y:" << c.y << " u:" << c.u << " w:" << c.w << " d:" << c.d << "\n";
    std::cout << "rows:" << c.rows << "\n";
    return kOk;
}

// ---- brute

int cmd_brute(const std::string& instance, const std::string& output) {
    const Instance inst = load(instance);
    Solution opt, vrp;
    check(mvrp_brute_force(inst.get(), 0, opt.out()));
    check(mvrp_brute_force(inst.get(), 1, vrp.out()));
    std::cout << "objective " << mvrp_solution_cost(opt.get()) << "\n";
    std::cout << "vrp " << mvrp_solution_cost(vrp.get()) << "\n";
    char* lo = nullptr;
    char* up = nullptr;
    check(mvrp_platoon_bounds(inst.get(), mvrp_solution_cost(vrp.get()), &lo, &up));
    std::cout << "bounds (" << take(lo) << ", " << take(up) << "]\n";
    if (!output.empty()) {
        char* text = nullptr;
        check(mvrp_solution_serialize(opt.get(), &text));
        write_text(output, take(text));
    }
    return kOk;
}

// ---- bench

struct BenchArgs {
    std::string dir, csv, ratio_csv, l_sweep, ablate;
    SearchFlags flags;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

struct BenchRow {
    std::string instance, config;
    int n = 0, k = 0, l = 0;
    std::string objective;
    double secs = 0;
    int iter_to_best = -1, best_start = -1;
    std::string status = "ok";
};

int cmd_bench(const BenchArgs& a) {
    std::vector<fs::path> files;
    if (!fs::is_directory(a.dir)) throw Failure{kParse, "not a directory: " + a.dir};
    for (const auto& e : fs::directory_iterator(a.dir))
        if (e.is_regular_file() && e.path().extension() == ".mvrp") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    std::vector<int> ls;
    for (const auto& t : split(a.l_sweep, ',')) ls.push_back(std::stoi(t));

    std::vector<std::pair<std::string, mvrp_params>> configs{{"full", a.flags.params()}};
    for (const auto& c : split(a.ablate, ',')) {
        mvrp_params p = a.flags.params();
        if (c == "relocate") p.use_relocate = 0;
        else if (c == "merge") p.use_merge = 0;
        else if (c == "shaking") p.use_shaking = 0;
        else if (c == "multi-start") p.starts = 1;
        else throw Failure{kParse, "unknown ablation component: " + c};
        configs.emplace_back("no-" + c, p);
    }

    std::vector<BenchRow> rows;
    for (const auto& path : files) {
        Instance base;
        const mvrp_status ps = mvrp_instance_parse(read_text(path.string()).c_str(), base.out());
        const std::string name = path.stem().string();
        if (ps != MVRP_OK) {
            BenchRow r;
            r.instance = name;
            r.config = "-";
            r.status = mvrp_status_name(ps);
            rows.push_back(r);
            continue;
        }
        mvrp_instance_info base_info;
        check(mvrp_instance_get_info(base.get(), &base_info));
        const std::vector<int> sweep = ls.empty() ? std::vector<int>{base_info.max_platoon} : ls;
        for (int l : sweep) {
            Instance inst;
            mvrp_derive_options o;
            mvrp_derive_options_default(&o);
            o.max_platoon = l;
            const mvrp_status ds = mvrp_instance_derive(base.get(), &o, inst.out());
            for (const auto& [config, params] : configs) {
                BenchRow r;
                r.instance = name;
                r.config = config;
                r.n = base_info.customers;
                r.k = base_info.fleet_size;
                r.l = l;
                if (ds != MVRP_OK) {
                    r.status = mvrp_status_name(ds);
                    rows.push_back(r);
                    continue;
                }
                const auto t0 = std::chrono::steady_clock::now();
                Result res;
                const mvrp_status ss = mvrp_solve(inst.get(), &params, res.out());
                r.secs = seconds_since(t0);
                if (ss != MVRP_OK) {
                    r.status = mvrp_status_name(ss);
                } else {
                    mvrp_result_info info;
                    check(mvrp_result_get_info(res.get(), &info));
                    char* obj = nullptr;
                    check(mvrp_result_objective(res.get(), &obj));
                    r.objective = take(obj);
                    r.iter_to_best = info.iter_to_best;
                    r.best_start = info.best_start;
                }
                std::cerr << name << " " << config << " L=" << l << " " << (r.objective.empty() ? r.status : r.objective)
                          << "\n";
                rows.push_back(r);
            }
        }
    }

    std::ostringstream out;
    out << "instance,config,N,K,L,objective,time_s,iter_to_best,best_start,status\n";
    for (const auto& r : rows) {
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.3f", r.secs);
        out << csv_field(r.instance) << ',' << r.config << ',' << r.n << ',' << r.k << ',' << r.l << ',' << r.objective
            << ',' << secs << ',' << r.iter_to_best << ',' << r.best_start << ',' << r.status << "\n";
    }
    write_text(a.csv, out.str());

    if (!a.ratio_csv.empty()) {
        // Obj_L / Obj_1 per instance and config, when an L = 1 row exists.
        std::map<std::pair<std::string, std::string>, std::string> base_obj;
        for (const auto& r : rows)
            if (r.l == 1 && r.status == "ok") base_obj[{r.instance, r.config}] = r.objective;
        std::ostringstream ratio;
        ratio << "instance,config,L,objective,objective_l1,ratio\n";
        for (const auto& r : rows) {
            const auto it = base_obj.find({r.instance, r.config});
            if (r.status != "ok" || it == base_obj.end()) continue;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", std::stod(r.objective) / std::stod(it->second));
            ratio << csv_field(r.instance) << ',' << r.config << ',' << r.l << ',' << r.objective << ',' << it->second
                  << ',' << buf << "\n";
        }
        write_text(a.ratio_csv, ratio.str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modular vehicle routing solver"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "run the multi-start tabu search");
    s->add_option("instance", solve.instance, "instance file")->required();
    s->add_option("-o,--output", solve.output, "solution JSON path");
    s->add_option("--trace-dir", solve.trace_dir, "directory for per-start trace CSVs");
    solve.flags.add(s);

    std::string v_inst, v_sol;
    auto* v = app.add_subcommand("validate", "check a solution file against an instance");
    v->add_option("instance", v_inst)->required();
    v->add_option("solution", v_sol)->required();

    DeriveArgs derive;
    auto* d = app.add_subcommand("derive", "derive an instance from a CVRP or instance file");
    d->add_option("source", derive.source)->required();
    d->add_option("-o,--output", derive.output, "output path (default: stdout)");
    d->add_option("--keep-random", derive.keep, "keep this many random customers");
    d->add_option("--seed", derive.seed);
    d->add_option("--capacity", derive.capacity);
    d->add_option("--max-platoon", derive.max_platoon);
    d->add_option("--eta", derive.eta, "cost-saving rate as a decimal, e.g. 0.1");
    d->add_option("--fleet", derive.fleet);
    d->add_option("--metric", derive.metric)->check(CLI::IsMember({"manhattan", "euclidean"}));
    d->add_option("--name", derive.name);

    std::string syn_set = "A", syn_out;
    int syn_nodes = 32, syn_cap = 100;
    std::uint64_t syn_seed = 0;
    auto* y = app.add_subcommand("synth", "write a random Augerat-style CVRP file");
    y->add_option("--set", syn_set)->check(CLI::IsMember({"A", "B"}));
    y->add_option("--nodes", syn_nodes)->check(CLI::Range(2, 10000));
    y->add_option("--capacity", syn_cap)->check(CLI::PositiveNumber);
    y->add_option("--seed", syn_seed);
    y->add_option("-o,--output", syn_out);

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "solve every .mvrp file in a directory");
    b->add_option("directory", bench.dir)->required();
    b->add_option("--csv", bench.csv, "results CSV (default: stdout)");
    b->add_option("--ratio-csv", bench.ratio_csv, "Obj_L / Obj_1 summary CSV");
    b->add_option("--l-sweep", bench.l_sweep, "comma-separated platoon limits, e.g. 1,2,3");
    b->add_option("--ablate", bench.ablate, "comma-separated subset of relocate,merge,shaking,multi-start");
    bench.flags.add(b);

    std::string lp_inst, lp_out;
    auto* e = app.add_subcommand("export-lp", "write the arc-flow model in LP format");
    e->add_option("instance", lp_inst)->required();
    e->add_option("-o,--output", lp_out, "LP file path");

    std::string br_inst, br_out;
    auto* r = app.add_subcommand("brute", "exact optimum of a tiny instance");
    r->add_option("instance", br_inst)->required();
    r->add_option("-o,--output", br_out, "solution JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : kParse;
    }

    try {
        if (*s) return cmd_solve(solve);
        if (*v) return cmd_validate(v_inst, v_sol);
        if (*d) return cmd_derive(derive);
        if (*y) return cmd_synth(syn_set, syn_nodes, syn_cap, syn_seed, syn_out);
        if (*b) return cmd_bench(bench);
        if (*e) return cmd_export_lp(lp_inst, lp_out);
        if (*r) return cmd_brute(br_inst, br_out);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kInfeasible;
    }
    return kOk;
}
