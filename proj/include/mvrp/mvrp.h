#ifndef MVRP_H
#define MVRP_H

#include <stddef.h>
#include <stdint.h>

#if defined(MVRP_BUILDING_LIBRARY)
#define MVRP_API __attribute__((visibility("default")))
#else
#define MVRP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

// Every call that can fail returns a status; the message of the last failure on
// the calling thread is available from mvrp_last_error().
typedef enum mvrp_status {
    MVRP_OK = 0,
    MVRP_ERR_PARSE,
    MVRP_ERR_MISSING_KEYWORD,
    MVRP_ERR_DUPLICATE_NODE_ID,
    MVRP_ERR_DEMAND_EXCEEDS_CAPACITY,
    MVRP_ERR_BAD_ETA,
    MVRP_ERR_UNKNOWN_CUSTOMER,
    MVRP_ERR_INVARIANT_VIOLATION,
    MVRP_ERR_PLATOON_TOO_LARGE,
    MVRP_ERR_NO_FEASIBLE_PATH,
    MVRP_ERR_INFEASIBLE_SPARSE,
    MVRP_ERR_NOTHING_TO_SHAKE,
    MVRP_ERR_NO_ADMISSIBLE_MOVE,
    MVRP_ERR_INSTANCE_TOO_LARGE,
    MVRP_ERR_INVALID_ARGUMENT,
    MVRP_ERR_IO,
    MVRP_ERR_INTERNAL
} mvrp_status;

typedef struct mvrp_instance mvrp_instance;
typedef struct mvrp_solution mvrp_solution;
typedef struct mvrp_result mvrp_result;
typedef struct mvrp_report mvrp_report;

MVRP_API const char* mvrp_status_name(mvrp_status status);
MVRP_API const char* mvrp_last_error(void);

// Strings handed out as char** are owned by the caller.
MVRP_API void mvrp_string_free(char* s);

/* instances */

typedef enum mvrp_metric { MVRP_METRIC_MANHATTAN = 0, MVRP_METRIC_EUCLIDEAN = 1 } mvrp_metric;

typedef struct mvrp_instance_info {
    int customers;
    int capacity;
    int fleet_size;
    int max_platoon;
    int64_t eta_num;
    int64_t eta_den;
    int metric;
    int total_demand;
} mvrp_instance_info;

MVRP_API mvrp_status mvrp_instance_parse(const char* text, mvrp_instance** out);
MVRP_API mvrp_status mvrp_instance_load(const char* path, mvrp_instance** out);
// TSPLIB-style CVRP text (Augerat sets): L = 1, eta = 0.
MVRP_API mvrp_status mvrp_instance_parse_cvrp(const char* text, mvrp_instance** out);
// set: 0 for A (uniform), 1 for B (clustered).
MVRP_API mvrp_status mvrp_instance_synthesize(int set, int nodes, int capacity, uint64_t seed, mvrp_instance** out);
MVRP_API void mvrp_instance_free(mvrp_instance* inst);

MVRP_API mvrp_status mvrp_instance_serialize(const mvrp_instance* inst, char** out);
MVRP_API mvrp_status mvrp_instance_serialize_cvrp(const mvrp_instance* inst, char** out);
MVRP_API mvrp_status mvrp_instance_get_info(const mvrp_instance* inst, mvrp_instance_info* out);
MVRP_API const char* mvrp_instance_name(const mvrp_instance* inst);

// Zero / NULL fields keep the base value; keep_random <= 0 keeps every customer.
typedef struct mvrp_derive_options {
    int keep_random;
    uint64_t seed;
    int capacity;
    int max_platoon;
    const char* eta;  // decimal text, e.g. "0.1"
    int fleet_size;
    int metric;  // -1 keeps the base metric
    const char* name;
} mvrp_derive_options;

MVRP_API void mvrp_derive_options_default(mvrp_derive_options* opts);
MVRP_API mvrp_status mvrp_instance_derive(const mvrp_instance* base, const mvrp_derive_options* opts,
                                          mvrp_instance** out);

/* search */

typedef struct mvrp_params {
    int starts;
    int max_iterations;
    int shake_trigger;
    int tenure;
    double sparse_fill;
    int shake_max;  // 0: ceil(K / 3)
    uint64_t seed;
    int use_relocate;
    int use_merge;
    int use_shaking;
    int threads;  // 0: MVRP_THREADS or hardware concurrency
} mvrp_params;

MVRP_API void mvrp_params_default(mvrp_params* params);

MVRP_API mvrp_status mvrp_solve(const mvrp_instance* inst, const mvrp_params* params, mvrp_result** out);
MVRP_API void mvrp_result_free(mvrp_result* result);

typedef struct mvrp_result_info {
    int64_t objective_scaled;  // objective times the cost scale
    int64_t scale;
    int best_start;
    int iter_to_best;  // of the best start
    int starts;
    int failed_starts;
} mvrp_result_info;

MVRP_API mvrp_status mvrp_result_get_info(const mvrp_result* result, mvrp_result_info* out);
MVRP_API mvrp_status mvrp_result_objective(const mvrp_result* result, char** out);
// CSV: iteration,current_cost,best_cost,move_kind,shake
MVRP_API mvrp_status mvrp_result_trace_csv(const mvrp_result* result, int start, char** out);
MVRP_API mvrp_status mvrp_result_solution(const mvrp_result* result, mvrp_solution** out);

/* solutions */

MVRP_API mvrp_status mvrp_solution_parse(const char* text, mvrp_solution** out);
MVRP_API mvrp_status mvrp_solution_serialize(const mvrp_solution* sol, char** out);
MVRP_API const char* mvrp_solution_cost(const mvrp_solution* sol);
MVRP_API void mvrp_solution_free(mvrp_solution* sol);

MVRP_API mvrp_status mvrp_validate(const mvrp_instance* inst, const mvrp_solution* sol, mvrp_report** out);
MVRP_API int mvrp_report_ok(const mvrp_report* report);
MVRP_API size_t mvrp_report_count(const mvrp_report* report);
// Violation name (e.g. "PlatoonOverflow") and detail of entry i; NULL when out of range.
MVRP_API const char* mvrp_report_code(const mvrp_report* report, size_t i);
MVRP_API const char* mvrp_report_detail(const mvrp_report* report, size_t i);
MVRP_API void mvrp_report_free(mvrp_report* report);

/* exact solver and model export */

// Exhaustive optimum for N <= 8, K <= 3. vrp_only restricts to one MV per arc step.
MVRP_API mvrp_status mvrp_brute_force(const mvrp_instance* inst, int vrp_only, mvrp_solution** out);

// Interval (lower, upper] around the MVRP optimum given the VRP optimum cost text.
MVRP_API mvrp_status mvrp_platoon_bounds(const mvrp_instance* inst, const char* vrp_cost, char** lower, char** upper);

typedef struct mvrp_lp_counts {
    int64_t x, y, u, w, d;
    int64_t rows;
} mvrp_lp_counts;

MVRP_API mvrp_status mvrp_export_lp(const mvrp_instance* inst, char** text, mvrp_lp_counts* counts);
MVRP_API void mvrp_lp_counts_formula(int customers, int fleet, int max_platoon, mvrp_lp_counts* out);

#ifdef __cplusplus
}
#endif

#endif
