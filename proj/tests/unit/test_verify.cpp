#include <doctest.h>

#include <map>
#include <set>

#include "twinenv/mutants.hpp"
#include "twinenv/verify.hpp"

using namespace twinenv;
using nlohmann::json;

TEST_CASE("field path resolution") {
    const json root = {{"state", {{"ball_x", 0.5}, {"rng", 7}}},
                       {"outcome", {{"observation", {1.0, 2.0, 3.0}}, {"done", false}}}};
    CHECK(resolve_field_path(root, "state.ball_x") == json(0.5));
    CHECK(resolve_field_path(root, "outcome.observation[2]") == json(3.0));
    CHECK(resolve_field_path(root, "outcome.done") == json(false));
    CHECK_THROWS_WITH_AS((void)resolve_field_path(root, "state.ball_z"),
                         "field path 'state.ball_z' does not resolve", ConfigError);
    CHECK_THROWS_AS((void)resolve_field_path(root, "outcome.observation[9]"), ConfigError);
    CHECK_THROWS_AS((void)resolve_field_path(root, ""), ConfigError);
}

TEST_CASE("property suite passes on both twins") {
    for (const std::string id : {"pong-ref", "pong-perf"}) {
        auto backend = make_backend(id);
        const SuiteReport r = run_property_suite(*backend, property_cases_for("pong"));
        INFO(id, ": ", r.to_json().dump());
        CHECK(r.passed());
        CHECK(r.total == static_cast<int>(property_cases_for("pong").size()));
    }
    for (const std::string id : {"cartpole-ref", "cartpole-perf", "cartpole-perf-strict"}) {
        auto backend = make_backend(id);
        const SuiteReport r = run_property_suite(*backend, property_cases_for("cartpole"));
        INFO(id, ": ", r.to_json().dump());
        CHECK(r.passed());
    }
}

TEST_CASE("empty case list passes vacuously") {
    auto backend = make_backend("pong-ref");
    const SuiteReport r = run_property_suite(*backend, {});
    CHECK(r.passed());
    CHECK(r.total == 0);
}

TEST_CASE("sign-flipped wall mutant fails the wall case with the vy field named") {
    auto mutant = make_backend("pong-mut-wall-vy");
    const SuiteReport r = run_property_suite(*mutant, property_cases_for("pong"));
    REQUIRE_FALSE(r.passed());
    bool saw_vy = false;
    for (const CaseFailure& f : r.failures) {
        for (const FieldDiff& d : f.diffs) {
            if (d.field == "state.ball_vy") saw_vy = true;
        }
    }
    CHECK(saw_vy);
}

TEST_CASE("interaction suite passes on twins and reports partial state on failure") {
    for (const std::string id : {"pong-ref", "pong-perf"}) {
        auto backend = make_backend(id);
        const SuiteReport r =
            run_interaction_suite(*backend, interaction_scenarios_for("pong"));
        INFO(id, ": ", r.to_json().dump());
        CHECK(r.passed());
    }
    for (const std::string id : {"cartpole-ref", "cartpole-perf"}) {
        auto backend = make_backend(id);
        const SuiteReport r =
            run_interaction_suite(*backend, interaction_scenarios_for("cartpole"));
        CHECK(r.passed());
    }

    auto mutant = make_backend("pong-mut-paddle-stale");
    const SuiteReport r = run_interaction_suite(*mutant, interaction_scenarios_for("pong"));
    REQUIRE_FALSE(r.passed());
    CHECK(r.failures.front().op_index >= 0);
    CHECK(r.failures.front().state_at_failure.is_object());
}

TEST_CASE("suite reports are byte-identical across runs") {
    auto backend = make_backend("pong-mut-wall-vy");
    const std::string a =
        run_property_suite(*backend, property_cases_for("pong")).to_json().dump();
    const std::string b =
        run_property_suite(*backend, property_cases_for("pong")).to_json().dump();
    CHECK(a == b);
}

TEST_CASE("registered scenarios are well-formed") {
    for (const std::string env : {"pong", "cartpole"}) {
        for (const InteractionScenario& sc : interaction_scenarios_for(env)) {
            CHECK(sc.ops.size() >= 2);
            std::set<std::string> fields;
            for (const ScenarioOp& op : sc.ops) {
                for (const FieldCheck& c : op.checks) fields.insert(c.path);
            }
            CHECK(fields.size() >= 2);
        }
    }
}

TEST_CASE("compare_rollouts rejects mismatched schemas and bad episode counts") {
    auto pong = make_backend("pong-ref");
    auto cart = make_backend("cartpole-ref");
    RandomActionSource actions(0, 2);
    CHECK_THROWS_AS(
        (void)compare_rollouts(*pong, *cart, 1, 0, ComparisonMode::exact(), actions),
        ConfigError);
    auto pong2 = make_backend("pong-perf");
    CHECK_THROWS_AS(
        (void)compare_rollouts(*pong, *pong2, 0, 0, ComparisonMode::exact(), actions),
        ConfigError);
}

TEST_CASE("twins pass a short exact comparison; monotone in the tolerance") {
    auto a = make_backend("pong-ref");
    auto b = make_backend("pong-perf");
    RandomActionSource actions(3, 3);
    const RolloutComparison exact =
        compare_rollouts(*a, *b, 20, 3, ComparisonMode::exact(), actions);
    CHECK(exact.passed);
    CHECK(exact.steps_compared > 0);

    // anything passing exact passes epsilon for every epsilon >= 0
    for (const float eps : {0.0f, 1e-6f, 1e-3f}) {
        RandomActionSource again(3, 3);
        CHECK(compare_rollouts(*a, *b, 20, 3, ComparisonMode::within(eps), again).passed);
    }
}

TEST_CASE("drift mutant diverges with a replayable report") {
    auto ref = make_backend("pong-ref");
    auto mutant = make_backend("pong-mut-vx-decay");
    RandomActionSource actions(0, 3);
    const RolloutComparison cmp =
        compare_rollouts(*ref, *mutant, 100, 0, ComparisonMode::exact(), actions);
    REQUIRE_FALSE(cmp.passed);
    REQUIRE(cmp.divergence.has_value());
    const DivergenceReport& d = *cmp.divergence;
    CHECK(d.step_index >= 1);
    CHECK(d.field_path.find("observation") == 0);
    CHECK((d.component == "ball_x" || d.component == "ball_vx_n"));

    // replaying from the last matching state reproduces the divergence in one step
    REQUIRE_FALSE(d.last_matching_state.is_null());
    auto ra = make_backend("pong-ref");
    auto rb = make_backend("pong-mut-vx-decay");
    const RngState stream = derive_stream(0, 0);
    ra->reset({&stream, 1});
    rb->reset({&stream, 1});
    ra->load_state_json(0, d.last_matching_state);
    rb->load_state_json(0, d.last_matching_state);
    REQUIRE(d.action_taken >= 0);
    ra->step({&d.action_taken, 1});
    rb->step({&d.action_taken, 1});
    bool differs = false;
    for (int k = 0; k < ra->obs_len(); ++k) {
        if (!values_match(ra->observations()[k], rb->observations()[k],
                          ComparisonMode::exact())) {
            differs = true;
        }
    }
    CHECK(differs);

    // the report text carries the repair-prompt sections
    const std::string text = d.repair_text("pong-ref", "pong-mut-vx-decay",
                                           ComparisonMode::exact());
    CHECK(text.find("Divergence:") != std::string::npos);
    CHECK(text.find("(last matching)") != std::string::npos);
    CHECK(text.find("Action taken at step") != std::string::npos);
}

TEST_CASE("reset-order mutant diverges at the reset observation") {
    auto ref = make_backend("cartpole-ref");
    auto mutant = make_backend("cartpole-mut-reset-order");
    RandomActionSource actions(0, 2);
    const RolloutComparison cmp =
        compare_rollouts(*ref, *mutant, 10, 0, ComparisonMode::within(1e-5f), actions);
    REQUIRE_FALSE(cmp.passed);
    CHECK(cmp.divergence->step_index == 0);
    CHECK(cmp.divergence->action_taken == -1);
    CHECK(cmp.divergence->last_matching_state.is_null());
}

TEST_CASE("mutation matrix: every mutant dies at exactly its expected level") {
    const auto mutants = mutant_registry();
    REQUIRE(mutants.size() >= 6);

    std::map<std::string, int> per_class;
    for (const MutantSpec& m : mutants) per_class[m.bug_class] += 1;
    CHECK(per_class["arithmetic"] >= 2);
    CHECK(per_class["ordering"] >= 2);
    CHECK(per_class["drift"] + per_class["reset"] >= 2);

    const MutationMatrixReport report = run_mutation_matrix(mutants, 100, 0);
    INFO(report.to_text());
    for (const MutantResult& r : report.rows) {
        INFO(r.spec.id);
        REQUIRE(r.caught_at.has_value());
        CHECK(*r.caught_at == r.spec.expected_catch_level);
        CHECK(r.ok);
    }
    CHECK(report.passed());
    CHECK(report.to_json()["status"] == "pass");
}
