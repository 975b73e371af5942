#include "mvrp/mvrp.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>

#include "core/error.hpp"
#include "core/instance.hpp"
#include "core/oracle.hpp"
#include "core/search.hpp"
#include "core/solution.hpp"

struct mvrp_instance {
    mvrp::Instance inst;
};

struct mvrp_solution {
    mvrp::SolutionDoc doc;
};

struct mvrp_result {
    mvrp::Instance inst;
    mvrp::SearchResult res;
};

struct mvrp_report {
    mvrp::ValidationReport report;
    std::vector<std::string> codes;
};

namespace {

thread_local std::string last_error;

mvrp_status status_of(mvrp::ErrorCode code) {
    using mvrp::ErrorCode;
    switch (code) {
        case ErrorCode::ParseError: return MVRP_ERR_PARSE;
        case ErrorCode::MissingKeyword: return MVRP_ERR_MISSING_KEYWORD;
        case ErrorCode::DuplicateNodeId: return MVRP_ERR_DUPLICATE_NODE_ID;
        case ErrorCode::DemandExceedsCapacity: return MVRP_ERR_DEMAND_EXCEEDS_CAPACITY;
        case ErrorCode::BadEta: return MVRP_ERR_BAD_ETA;
        case ErrorCode::UnknownCustomer: return MVRP_ERR_UNKNOWN_CUSTOMER;
        case ErrorCode::InvariantViolation: return MVRP_ERR_INVARIANT_VIOLATION;
        case ErrorCode::PlatoonTooLarge: return MVRP_ERR_PLATOON_TOO_LARGE;
        case ErrorCode::NoFeasiblePath: return MVRP_ERR_NO_FEASIBLE_PATH;
        case ErrorCode::InfeasibleSparse: return MVRP_ERR_INFEASIBLE_SPARSE;
        case ErrorCode::NothingToShake: return MVRP_ERR_NOTHING_TO_SHAKE;
        case ErrorCode::NoAdmissibleMove: return MVRP_ERR_NO_ADMISSIBLE_MOVE;
        case ErrorCode::InstanceTooLarge: return MVRP_ERR_INSTANCE_TOO_LARGE;
        case ErrorCode::InvalidArgument: return MVRP_ERR_INVALID_ARGUMENT;
    }
    return MVRP_ERR_INTERNAL;
}

mvrp_status fail(mvrp_status s, const std::string& message) {
    last_error = message;
    return s;
}

// Runs f, turning exceptions into status codes.
template <class F>
mvrp_status guard(F&& f) {
    try {
        last_error.clear();
        f();
        return MVRP_OK;
    } catch (const mvrp::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(MVRP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MVRP_ERR_INTERNAL, e.what());
    }
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

mvrp::SearchParams to_params(const mvrp_params& p) {
    mvrp::SearchParams q;
    q.starts = p.starts;
    q.max_iterations = p.max_iterations;
    q.shake_trigger = p.shake_trigger;
    q.tenure = p.tenure;
    q.sparse_fill = p.sparse_fill;
    q.shake_max = p.shake_max;
    q.seed = p.seed;
    q.use_relocate = p.use_relocate != 0;
    q.use_merge = p.use_merge != 0;
    q.use_shaking = p.use_shaking != 0;
    q.threads = p.threads;
    return q;
}

#define REQUIRE_ARG(cond)                                                   \
    do {                                                                    \
        if (!(cond)) return fail(MVRP_ERR_INVALID_ARGUMENT, "null argument"); \
    } while (0)

}  // namespace

extern "C" {

const char* mvrp_status_name(mvrp_status status) {
    switch (status) {
        case MVRP_OK: return "Ok";
        case MVRP_ERR_PARSE: return "ParseError";
        case MVRP_ERR_MISSING_KEYWORD: return "MissingKeyword";
        case MVRP_ERR_DUPLICATE_NODE_ID: return "DuplicateNodeId";
        case MVRP_ERR_DEMAND_EXCEEDS_CAPACITY: return "DemandExceedsCapacity";
        case MVRP_ERR_BAD_ETA: return "BadEta";
        case MVRP_ERR_UNKNOWN_CUSTOMER: return "UnknownCustomer";
        case MVRP_ERR_INVARIANT_VIOLATION: return "InvariantViolation";
        case MVRP_ERR_PLATOON_TOO_LARGE: return "PlatoonTooLarge";
        case MVRP_ERR_NO_FEASIBLE_PATH: return "NoFeasiblePath";
        case MVRP_ERR_INFEASIBLE_SPARSE: return "InfeasibleSparse";
        case MVRP_ERR_NOTHING_TO_SHAKE: return "NothingToShake";
        case MVRP_ERR_NO_ADMISSIBLE_MOVE: return "NoAdmissibleMove";
        case MVRP_ERR_INSTANCE_TOO_LARGE: return "InstanceTooLarge";
        case MVRP_ERR_INVALID_ARGUMENT: return "InvalidArgument";
        case MVRP_ERR_IO: return "IoError";
        case MVRP_ERR_INTERNAL: return "InternalError";
    }
    return "Unknown";
}

const char* mvrp_last_error(void) { return last_error.c_str(); }

void mvrp_string_free(char* s) { std::free(s); }

mvrp_status mvrp_instance_parse(const char* text, mvrp_instance** out) {
    REQUIRE_ARG(text && out);
    return guard([&] { *out = new mvrp_instance{mvrp::parse_instance(text)}; });
}

mvrp_status mvrp_instance_load(const char* path, mvrp_instance** out) {
    REQUIRE_ARG(path && out);
    if (!std::ifstream(path)) return fail(MVRP_ERR_IO, std::string("cannot open ") + path);
    return guard([&] { *out = new mvrp_instance{mvrp::load_instance(path)}; });
}

mvrp_status mvrp_instance_parse_cvrp(const char* text, mvrp_instance** out) {
    REQUIRE_ARG(text && out);
    return guard([&] { *out = new mvrp_instance{mvrp::parse_cvrp(text)}; });
}

mvrp_status mvrp_instance_synthesize(int set, int nodes, int capacity, uint64_t seed, mvrp_instance** out) {
    REQUIRE_ARG(out);
    if (set != 0 && set != 1) return fail(MVRP_ERR_INVALID_ARGUMENT, "set must be 0 (A) or 1 (B)");
    return guard([&] {
        *out = new mvrp_instance{
            mvrp::synthesize_cvrp(set == 0 ? mvrp::AugeratSet::A : mvrp::AugeratSet::B, nodes, capacity, seed)};
    });
}

void mvrp_instance_free(mvrp_instance* inst) { delete inst; }

mvrp_status mvrp_instance_serialize(const mvrp_instance* inst, char** out) {
    REQUIRE_ARG(inst && out);
    return guard([&] { *out = dup(mvrp::serialize_instance(inst->inst)); });
}

mvrp_status mvrp_instance_serialize_cvrp(const mvrp_instance* inst, char** out) {
    REQUIRE_ARG(inst && out);
    return guard([&] { *out = dup(mvrp::serialize_cvrp(inst->inst)); });
}

mvrp_status mvrp_instance_get_info(const mvrp_instance* inst, mvrp_instance_info* out) {
    REQUIRE_ARG(inst && out);
    const mvrp::Instance& i = inst->inst;
    out->customers = i.num_customers();
    out->capacity = i.capacity;
    out->fleet_size = i.fleet_size;
    out->max_platoon = i.max_platoon;
    out->eta_num = i.eta.num;
    out->eta_den = i.eta.den;
    out->metric = i.metric == mvrp::Metric::Manhattan ? MVRP_METRIC_MANHATTAN : MVRP_METRIC_EUCLIDEAN;
    out->total_demand = i.total_demand();
    return MVRP_OK;
}

const char* mvrp_instance_name(const mvrp_instance* inst) { return inst ? inst->inst.name.c_str() : nullptr; }

void mvrp_derive_options_default(mvrp_derive_options* opts) {
    if (!opts) return;
    *opts = mvrp_derive_options{};
    opts->metric = -1;
}

mvrp_status mvrp_instance_derive(const mvrp_instance* base, const mvrp_derive_options* opts, mvrp_instance** out) {
    REQUIRE_ARG(base && opts && out);
    return guard([&] {
        const mvrp::Instance& b = base->inst;
        mvrp::DeriveOverrides o;
        if (opts->capacity > 0) o.capacity = opts->capacity;
        if (opts->max_platoon > 0) o.max_platoon = opts->max_platoon;
        if (opts->eta) o.eta = mvrp::parse_decimal(opts->eta);
        if (opts->fleet_size > 0) o.fleet_size = opts->fleet_size;
        if (opts->metric == MVRP_METRIC_MANHATTAN) o.metric = mvrp::Metric::Manhattan;
        else if (opts->metric == MVRP_METRIC_EUCLIDEAN) o.metric = mvrp::Metric::Euclidean;
        else if (opts->metric != -1) throw mvrp::Error(mvrp::ErrorCode::InvalidArgument, "unknown metric");
        if (opts->name) o.name = std::string(opts->name);
        std::vector<int> keep;
        if (opts->keep_random > 0) {
            keep = mvrp::sample_customers(b, opts->keep_random, opts->seed);
        } else {
            for (int c = 1; c <= b.num_customers(); ++c) keep.push_back(c);
            // keeping everyone is a parameter override, so the fleet is not recomputed
            if (!o.fleet_size && !o.capacity) o.fleet_size = b.fleet_size;
        }
        *out = new mvrp_instance{mvrp::derive_instance(b, keep, o)};
    });
}

void mvrp_params_default(mvrp_params* params) {
    if (!params) return;
    const mvrp::SearchParams d;
    params->starts = d.starts;
    params->max_iterations = d.max_iterations;
    params->shake_trigger = d.shake_trigger;
    params->tenure = d.tenure;
    params->sparse_fill = d.sparse_fill;
    params->shake_max = d.shake_max;
    params->seed = d.seed;
    params->use_relocate = d.use_relocate;
    params->use_merge = d.use_merge;
    params->use_shaking = d.use_shaking;
    params->threads = d.threads;
}

mvrp_status mvrp_solve(const mvrp_instance* inst, const mvrp_params* params, mvrp_result** out) {
    REQUIRE_ARG(inst && params && out);
    return guard([&] {
        mvrp::SearchResult res = mvrp::multi_start(inst->inst, to_params(*params));
        if (res.best_start < 0) {
            std::string why = "every start failed";
            if (!res.starts.empty() && !res.starts[0].error.empty()) why += ": " + res.starts[0].error;
            throw mvrp::Error(mvrp::ErrorCode::InfeasibleSparse, why);
        }
        *out = new mvrp_result{inst->inst, std::move(res)};
    });
}

void mvrp_result_free(mvrp_result* result) { delete result; }

mvrp_status mvrp_result_get_info(const mvrp_result* result, mvrp_result_info* out) {
    REQUIRE_ARG(result && out);
    const auto& r = result->res;
    out->objective_scaled = r.best_cost.scaled();
    out->scale = result->inst.scale();
    out->best_start = r.best_start;
    out->iter_to_best = r.starts[r.best_start].iter_to_best;
    out->starts = static_cast<int>(r.starts.size());
    out->failed_starts = 0;
    for (const auto& s : r.starts)
        if (!s.ok) ++out->failed_starts;
    return MVRP_OK;
}

mvrp_status mvrp_result_objective(const mvrp_result* result, char** out) {
    REQUIRE_ARG(result && out);
    return guard([&] { *out = dup(mvrp::format_cost(result->res.best_cost, result->inst.scale())); });
}

mvrp_status mvrp_result_trace_csv(const mvrp_result* result, int start, char** out) {
    REQUIRE_ARG(result && out);
    if (start < 0 || start >= static_cast<int>(result->res.starts.size()))
        return fail(MVRP_ERR_INVALID_ARGUMENT, "start index out of range");
    return guard([&] { *out = dup(mvrp::trace_csv(result->res.starts[start].trace, result->inst.scale())); });
}

mvrp_status mvrp_result_solution(const mvrp_result* result, mvrp_solution** out) {
    REQUIRE_ARG(result && out);
    return guard([&] { *out = new mvrp_solution{mvrp::to_doc(mvrp::State(result->inst, result->res.best))}; });
}

mvrp_status mvrp_solution_parse(const char* text, mvrp_solution** out) {
    REQUIRE_ARG(text && out);
    return guard([&] { *out = new mvrp_solution{mvrp::parse_solution(text)}; });
}

mvrp_status mvrp_solution_serialize(const mvrp_solution* sol, char** out) {
    REQUIRE_ARG(sol && out);
    return guard([&] { *out = dup(mvrp::serialize_solution(sol->doc)); });
}

const char* mvrp_solution_cost(const mvrp_solution* sol) { return sol ? sol->doc.cost.c_str() : nullptr; }

void mvrp_solution_free(mvrp_solution* sol) { delete sol; }

mvrp_status mvrp_validate(const mvrp_instance* inst, const mvrp_solution* sol, mvrp_report** out) {
    REQUIRE_ARG(inst && sol && out);
    return guard([&] {
        auto* r = new mvrp_report{mvrp::validate(sol->doc, inst->inst), {}};
        for (const auto& [v, d] : r->report.violations) r->codes.emplace_back(mvrp::to_string(v));
        *out = r;
    });
}

int mvrp_report_ok(const mvrp_report* report) { return report && report->report.ok() ? 1 : 0; }

size_t mvrp_report_count(const mvrp_report* report) { return report ? report->report.violations.size() : 0; }

const char* mvrp_report_code(const mvrp_report* report, size_t i) {
    if (!report || i >= report->codes.size()) return nullptr;
    return report->codes[i].c_str();
}

const char* mvrp_report_detail(const mvrp_report* report, size_t i) {
    if (!report || i >= report->report.violations.size()) return nullptr;
    return report->report.violations[i].second.c_str();
}

void mvrp_report_free(mvrp_report* report) { delete report; }

mvrp_status mvrp_brute_force(const mvrp_instance* inst, int vrp_only, mvrp_solution** out) {
    REQUIRE_ARG(inst && out);
    return guard([&] {
        const mvrp::OracleResult r = vrp_only ? mvrp::brute_force_vrp(inst->inst) : mvrp::brute_force_opt(inst->inst);
        *out = new mvrp_solution{mvrp::to_doc(mvrp::State(inst->inst, r.plan))};
    });
}

mvrp_status mvrp_platoon_bounds(const mvrp_instance* inst, const char* vrp_cost, char** lower, char** upper) {
    REQUIRE_ARG(inst && vrp_cost && lower && upper);
    return guard([&] {
        const std::int64_t scale = inst->inst.scale();
        const auto vrp = mvrp::parse_cost(vrp_cost, scale);
        if (!vrp) throw mvrp::Error(mvrp::ErrorCode::InvalidArgument, "cost is finer than the instance scale");
        const mvrp::BoundPair b = mvrp::platoon_bounds(*vrp, inst->inst.eta, inst->inst.max_platoon);
        char* lo = dup(b.lower_text(scale));
        try {
            *upper = dup(mvrp::format_cost(b.upper, scale));
        } catch (...) {
            std::free(lo);
            throw;
        }
        *lower = lo;
    });
}

mvrp_status mvrp_export_lp(const mvrp_instance* inst, char** text, mvrp_lp_counts* counts) {
    REQUIRE_ARG(inst && text);
    return guard([&] {
        const std::string lp = mvrp::export_milp(inst->inst);
        if (counts) {
            const mvrp::MilpCounts c = mvrp::count_lp(lp);
            *counts = mvrp_lp_counts{c.x, c.y, c.u, c.w, c.d, c.rows};
        }
        *text = dup(lp);
    });
}

void mvrp_lp_counts_formula(int customers, int fleet, int max_platoon, mvrp_lp_counts* out) {
    if (!out) return;
    const mvrp::MilpCounts c = mvrp::milp_counts(customers, fleet, max_platoon);
    *out = mvrp_lp_counts{c.x, c.y, c.u, c.w, c.d, c.rows};
}

}  // extern "C"
