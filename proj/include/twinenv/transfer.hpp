#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinenv/backend.hpp"
#include "twinenv/policy.hpp"
#include "twinenv/tost.hpp"

namespace twinenv {

inline constexpr int32_t EVAL_EPISODES = 20;  // episodes per seed / per candidate

// Per-seed mean returns: seed i chains EVAL_EPISODES episodes on the stream
// derive_stream(base_seed, i) (each episode continues the stream where the
// previous one left it) and contributes the mean episode return. Length of
// the result is n_seeds. Deterministic for any thread count.
std::vector<double> evaluate_policy(Backend& env, const Policy& policy, int32_t n_seeds,
                                    uint64_t base_seed);

// Cross-entropy method over linear policy parameters: population sampled from
// a diagonal Gaussian (initial mean 0, std 1), each candidate scored by mean
// return over EVAL_EPISODES episodes (common episode streams per generation),
// mean/std refit to the top elite_frac. Returns the final mean policy.
// generations == 0 returns the all-zero policy. Deterministic given seed.
Policy train_cem(Backend& env, int32_t generations, int32_t population, float elite_frac,
                 uint64_t seed);

struct TransferPolicySpec {
    PolicyKind kind = PolicyKind::Tracker;
    int32_t cem_generations = 30;
    int32_t cem_population = 64;
    float cem_elite_frac = 0.125f;
    uint64_t train_seed = 0;
};

// One row of a cross-backend transfer table: the policy is trained (or
// selected) on the designated backend and evaluated on both with the same
// base seed; TOST decides equivalence of the two per-seed return vectors.
struct TransferRow {
    std::string train_backend;
    double eval_perf_mean = 0.0, eval_perf_std = 0.0;
    double eval_ref_mean = 0.0, eval_ref_std = 0.0;
    bool equivalent = false;
    bool vectors_bit_identical = false;
    TostResult tost;
    std::vector<double> perf_returns, ref_returns;

    nlohmann::json to_json() const;
};

TransferRow cross_backend_transfer(Backend& env_ref, Backend& env_perf, bool train_on_perf,
                                   const TransferPolicySpec& policy_spec, TostConfig tost,
                                   int32_t n_seeds, uint64_t base_seed);

}  // namespace twinenv
