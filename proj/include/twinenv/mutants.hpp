#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinenv/verify.hpp"

namespace twinenv {

enum class CatchLevel { L1 = 1, L2 = 2, L3 = 3 };

std::string catch_level_name(CatchLevel level);

// A deliberately bugged compiled-in backend variant. Each registered mutant
// is distinguishable from the reference at its expected level and invisible
// to every lower level.
struct MutantSpec {
    std::string id;           // backend id in the registry
    std::string environment;  // "pong" | "cartpole"
    std::string bug_class;    // arithmetic | ordering | drift | reset
    std::string description;
    CatchLevel expected_catch_level;
};

std::span<const MutantSpec> mutant_registry();

struct MutantResult {
    MutantSpec spec;
    std::optional<CatchLevel> caught_at;  // lowest level that caught it
    bool ok = false;                      // caught exactly at the expected level

    nlohmann::json to_json() const;
};

struct MutationMatrixReport {
    std::vector<MutantResult> rows;
    int64_t episodes = 0;
    uint64_t base_seed = 0;

    bool passed() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Runs every mutant through L1, then L2, then an L3 comparison against its
// environment's reference twin, recording the lowest level that catches it.
// A mutant caught at no level is a kill gap and fails the matrix.
MutationMatrixReport run_mutation_matrix(std::span<const MutantSpec> mutants,
                                         int64_t episodes = 100, uint64_t base_seed = 0);

}  // namespace twinenv
