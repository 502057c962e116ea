#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinenv/backend.hpp"

namespace twinenv {

inline constexpr double SPS_STABLE_CV = 0.03;
inline constexpr double MIN_RUN_SECONDS = 0.1;  // timer-resolution guard

// Steps-per-second samples from n_runs timed runs after one full untimed
// warm-up run; run_samples excludes the warm-up entirely.
struct ThroughputReport {
    std::string backend_id;
    int64_t batch_size = 0;
    int64_t steps_per_run = 0;
    int64_t warmup_steps = 0;
    int32_t n_runs = 0;
    std::vector<double> run_samples;  // SPS per timed run
    double mean_sps = 0.0;
    double std_sps = 0.0;
    double cv = 0.0;
    bool stable = false;  // cv <= SPS_STABLE_CV

    nlohmann::json to_json() const;
};

ThroughputReport measure_sps(Backend& backend, int64_t batch_size, int64_t steps_per_run,
                             int32_t n_runs, uint64_t base_seed);

// One independent ThroughputReport per batch size (list must be non-empty and
// ascending).
std::vector<ThroughputReport> sweep_batches(Backend& backend,
                                            std::span<const int64_t> batch_sizes,
                                            int64_t steps_per_run, int32_t n_runs,
                                            uint64_t base_seed);

inline constexpr int64_t DEFAULT_BATCH_SIZES[] = {32, 128, 512, 2048, 8192};

// Picks a steps_per_run that makes one run take roughly target_seconds on
// this backend and batch size (at least enough to clear MIN_RUN_SECONDS).
int64_t calibrate_steps_per_run(Backend& backend, int64_t batch_size, double target_seconds,
                                uint64_t base_seed);

// Fraction of wall time spent in the environment when each batched step is
// followed by a synthetic policy cost of synthetic_param_count multiply-adds
// per instance.
struct BreakdownReport {
    double env_time_fraction = 0.0;
    double policy_time_fraction = 0.0;
    int64_t synthetic_param_count = 0;
    int64_t batch_size = 0;
    int64_t steps = 0;

    nlohmann::json to_json() const;
};

BreakdownReport measure_breakdown(Backend& backend, int64_t batch_size,
                                  int64_t synthetic_param_count, int64_t steps,
                                  uint64_t base_seed);

// Stability invariant: doubling steps_per_run moves mean SPS by less than
// three reported CVs.
bool sps_stability_check(Backend& backend, int64_t batch_size, int64_t steps_per_run,
                         int32_t n_runs, uint64_t base_seed);

// Drives the backend through exactly the step sequence measure_sps times
// (warm-up plus n_runs runs) without any timing, so end states can be
// compared against a measured run.
void replay_sps_workload(Backend& backend, int64_t batch_size, int64_t steps_per_run,
                         int32_t n_runs, uint64_t base_seed);

}  // namespace twinenv
