#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinenv/backend.hpp"
#include "twinenv/rng.hpp"
#include "twinenv/types.hpp"

namespace twinenv {

// Resolve a dotted field path ("state.ball_vy", "outcome.observation[3]")
// against a JSON document. Throws ConfigError naming the path when it does
// not resolve.
const nlohmann::json& resolve_field_path(const nlohmann::json& root, const std::string& path);

// Tolerance for hand-derived decimal expectations in the registered suites.
// Well above float32 evaluation noise, well below any real bug's error.
inline constexpr float CASE_EPSILON = 1e-4f;

struct FieldCheck {
    enum class Kind { Equals, InRange };

    std::string path;
    Kind kind = Kind::Equals;
    nlohmann::json expected;    // Equals: number or boolean
    double lo = 0.0, hi = 0.0;  // InRange bounds, inclusive
    ComparisonMode mode = ComparisonMode::within(CASE_EPSILON);

    static FieldCheck eq(std::string path, nlohmann::json expected,
                         ComparisonMode mode = ComparisonMode::within(CASE_EPSILON)) {
        FieldCheck c;
        c.path = std::move(path);
        c.expected = std::move(expected);
        c.mode = mode;
        return c;
    }
    static FieldCheck in_range(std::string path, double lo, double hi) {
        FieldCheck c;
        c.path = std::move(path);
        c.kind = Kind::InRange;
        c.lo = lo;
        c.hi = hi;
        return c;
    }
};

// One isolated transition: construct a state (reset + field patch), apply one
// action, check named fields of the successor state and outcome.
struct PropertyCase {
    std::string name;
    uint64_t setup_seed = 0;
    nlohmann::json state_patch;
    int32_t action = 0;
    std::vector<FieldCheck> expected;
};

struct ScenarioOp {
    enum class Kind { Reset, Patch, Step };

    Kind kind = Kind::Step;
    uint64_t seed = 0;
    nlohmann::json patch;
    int32_t action = 0;
    std::vector<FieldCheck> checks;  // evaluated right after this op

    static ScenarioOp reset_op(uint64_t seed, std::vector<FieldCheck> checks = {});
    static ScenarioOp patch_op(nlohmann::json p, std::vector<FieldCheck> checks = {});
    static ScenarioOp step_op(int32_t action, std::vector<FieldCheck> checks = {});
};

// Multi-step sequence exercising cross-subsystem state propagation and event
// ordering. Must begin with a Reset op; assertions must touch at least two
// distinct state fields.
struct InteractionScenario {
    std::string name;
    std::vector<ScenarioOp> ops;
};

struct FieldDiff {
    std::string field;
    nlohmann::json expected;
    nlohmann::json actual;
};

struct CaseFailure {
    std::string case_name;
    int op_index = -1;  // -1 for property cases
    std::vector<FieldDiff> diffs;
    nlohmann::json state_at_failure;
};

struct SuiteReport {
    std::string suite;  // "L1" or "L2"
    std::string backend_id;
    int total = 0;
    std::vector<CaseFailure> failures;

    bool passed() const { return failures.empty(); }
    nlohmann::json to_json() const;
};

SuiteReport run_property_suite(Backend& backend, std::span<const PropertyCase> cases);
SuiteReport run_interaction_suite(Backend& backend,
                                  std::span<const InteractionScenario> scenarios);

// Registered suites per environment ("pong", "cartpole").
std::span<const PropertyCase> property_cases_for(const std::string& env_name);
std::span<const InteractionScenario> interaction_scenarios_for(const std::string& env_name);

// First divergence of a matched-seed rollout comparison. step_index 0 is the
// reset observation; for step_index >= 1, last_matching_state is backend A's
// serialized state one step earlier and action_taken is the action fed to
// the diverging step. Replaying last_matching_state with action_taken
// reproduces the divergence in one step.
struct DivergenceReport {
    int64_t episode_index = 0;
    int64_t step_index = 0;
    std::string field_path;
    std::string component;  // semantic name of the observation component, if any
    double value_a = 0.0;
    double value_b = 0.0;
    nlohmann::json last_matching_state;  // null when diverging at step 0
    int32_t action_taken = -1;

    nlohmann::json to_json() const;
    std::string repair_text(const std::string& backend_a, const std::string& backend_b,
                            ComparisonMode mode) const;
};

struct RolloutComparison {
    bool passed = false;
    int64_t episodes = 0;
    int64_t steps_compared = 0;
    std::optional<DivergenceReport> divergence;

    nlohmann::json to_json() const;
};

// Supplies the identical action sequence to both backends under comparison.
class ActionSource {
public:
    virtual ~ActionSource() = default;
    virtual void begin_episode(int64_t episode_index) = 0;
    virtual int32_t next_action(std::span<const float> observation) = 0;
};

inline constexpr uint64_t ACTION_SEED_SALT = 0x6A09E667F3BCC909ull;

// Uniform random actions from a per-episode stream, derived from the salted
// base seed so action draws never collide with environment streams.
class RandomActionSource final : public ActionSource {
public:
    RandomActionSource(uint64_t base_seed, int32_t action_count)
        : base_(base_seed ^ ACTION_SEED_SALT), count_(action_count) {}

    void begin_episode(int64_t episode_index) override {
        stream_ = derive_stream(base_, static_cast<uint32_t>(episode_index));
    }
    int32_t next_action(std::span<const float>) override {
        const RngDraw d = rng_next(stream_);
        stream_ = d.next;
        return static_cast<int32_t>(d.value % static_cast<uint64_t>(count_));
    }

private:
    uint64_t base_;
    int32_t count_;
    RngState stream_;
};

// Runs `episodes` matched-seed episodes (env streams derive_stream(base_seed,
// i) for i in [0, episodes)), feeding identical actions to both backends and
// comparing observation, reward and done at every step under `mode`. Halts
// at the first mismatch.
RolloutComparison compare_rollouts(Backend& env_a, Backend& env_b, int64_t episodes,
                                   uint64_t base_seed, ComparisonMode mode,
                                   ActionSource& actions);

}  // namespace twinenv
