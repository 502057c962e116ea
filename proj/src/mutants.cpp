#include "twinenv/mutants.hpp"

#include <sstream>

#include "twinenv/backend.hpp"

namespace twinenv {

using nlohmann::json;

std::string catch_level_name(CatchLevel level) {
    switch (level) {
        case CatchLevel::L1: return "L1";
        case CatchLevel::L2: return "L2";
        case CatchLevel::L3: return "L3";
    }
    return "?";
}

std::span<const MutantSpec> mutant_registry() {
    static const std::vector<MutantSpec> mutants = {
        {"pong-mut-wall-vy", "pong", "arithmetic",
         "wall reflection flips the position but keeps vy", CatchLevel::L1},
        {"pong-mut-obs-norm", "pong", "arithmetic",
         "paddle observation skips the min/range normalization", CatchLevel::L1},
        {"cartpole-mut-denom", "cartpole", "arithmetic",
         "pole acceleration denominator uses 3/4 instead of 4/3", CatchLevel::L1},
        {"pong-mut-paddle-stale", "pong", "ordering",
         "paddle collision reads the player position from before the move",
         CatchLevel::L2},
        {"pong-mut-opp-peek", "pong", "ordering",
         "opponent tracker targets the ball position from after the move",
         CatchLevel::L2},
        {"pong-mut-vx-decay", "pong", "drift",
         "horizontal ball speed shrinks by 3e-5 per step", CatchLevel::L3},
        {"cartpole-mut-td-decay", "cartpole", "drift",
         "pole angular velocity shrinks by 2e-5 per step", CatchLevel::L3},
        {"pong-mut-serve-bias", "pong", "reset",
         "post-goal serve draws vy from [0, VY0) instead of [-VY0, VY0)",
         CatchLevel::L3},
        {"cartpole-mut-reset-order", "cartpole", "reset",
         "reset draws the pole components before the cart components",
         CatchLevel::L3},
    };
    return mutants;
}

json MutantResult::to_json() const {
    json j{{"id", spec.id},
           {"environment", spec.environment},
           {"bug_class", spec.bug_class},
           {"description", spec.description},
           {"expected_catch_level", catch_level_name(spec.expected_catch_level)},
           {"ok", ok}};
    j["caught_at"] = caught_at ? json(catch_level_name(*caught_at)) : json();
    return j;
}

bool MutationMatrixReport::passed() const {
    for (const MutantResult& r : rows) {
        if (!r.ok) return false;
    }
    return !rows.empty();
}

json MutationMatrixReport::to_json() const {
    json rows_json = json::array();
    for (const MutantResult& r : rows) rows_json.push_back(r.to_json());
    return json{{"report_type", "mutation_matrix"},
                {"status", passed() ? "pass" : "fail"},
                {"episodes", episodes},
                {"base_seed", base_seed},
                {"rows", std::move(rows_json)}};
}

std::string MutationMatrixReport::to_text() const {
    std::ostringstream out;
    out << "mutant                      class       L1   L2   L3   expected  result\n";
    for (const MutantResult& r : rows) {
        const int caught = r.caught_at ? static_cast<int>(*r.caught_at) : 0;
        auto cell = [&](int level) {
            if (caught == 0) return "  . ";
            if (level < caught) return " ok ";
            if (level == caught) return "KILL";
            return "  - ";
        };
        char line[160];
        std::snprintf(line, sizeof(line), "%-27s %-11s %s %s %s   %-9s %s\n",
                      r.spec.id.c_str(), r.spec.bug_class.c_str(), cell(1), cell(2),
                      cell(3), catch_level_name(r.spec.expected_catch_level).c_str(),
                      r.ok ? "ok" : (r.caught_at ? "WRONG-LEVEL" : "KILL-GAP"));
        out << line;
    }
    return out.str();
}

MutationMatrixReport run_mutation_matrix(std::span<const MutantSpec> mutants,
                                         int64_t episodes, uint64_t base_seed) {
    if (mutants.empty()) throw ConfigError("mutation matrix: mutant registry is empty");
    MutationMatrixReport report;
    report.episodes = episodes;
    report.base_seed = base_seed;
    for (const MutantSpec& spec : mutants) {
        auto mutant = make_backend(spec.id);
        std::optional<CatchLevel> caught;

        if (!run_property_suite(*mutant, property_cases_for(spec.environment)).passed()) {
            caught = CatchLevel::L1;
        } else if (!run_interaction_suite(*mutant,
                                          interaction_scenarios_for(spec.environment))
                        .passed()) {
            caught = CatchLevel::L2;
        } else {
            auto reference = make_backend(reference_backend_for_env(spec.environment));
            RandomActionSource actions(base_seed, reference->action_count());
            const RolloutComparison cmp =
                compare_rollouts(*reference, *mutant, episodes, base_seed,
                                 default_mode_for_env(spec.environment), actions);
            if (!cmp.passed) caught = CatchLevel::L3;
        }

        report.rows.push_back(
            {spec, caught, caught.has_value() && *caught == spec.expected_catch_level});
    }
    return report;
}

}  // namespace twinenv
