#include "twinenv/verify.hpp"

#include <sstream>

namespace twinenv {

using nlohmann::json;

namespace {

// One path segment: a member name followed by zero or more [index] suffixes.
const json* descend(const json* node, const std::string& path, size_t& pos) {
    size_t name_end = pos;
    while (name_end < path.size() && path[name_end] != '.' && path[name_end] != '[') {
        ++name_end;
    }
    if (name_end > pos) {
        const std::string key = path.substr(pos, name_end - pos);
        if (!node->is_object() || !node->contains(key)) return nullptr;
        node = &(*node)[key];
    }
    pos = name_end;
    while (pos < path.size() && path[pos] == '[') {
        const size_t close = path.find(']', pos);
        if (close == std::string::npos) return nullptr;
        size_t idx = 0;
        try {
            idx = std::stoul(path.substr(pos + 1, close - pos - 1));
        } catch (...) {
            return nullptr;
        }
        if (!node->is_array() || idx >= node->size()) return nullptr;
        node = &(*node)[idx];
        pos = close + 1;
    }
    return node;
}

}  // namespace

const json& resolve_field_path(const json& root, const std::string& path) {
    const json* node = &root;
    size_t pos = 0;
    while (pos < path.size()) {
        node = descend(node, path, pos);
        if (node == nullptr) {
            throw ConfigError("field path '" + path + "' does not resolve");
        }
        if (pos < path.size()) {
            if (path[pos] != '.') {
                throw ConfigError("field path '" + path + "' does not resolve");
            }
            ++pos;
        }
    }
    if (node == &root) {
        throw ConfigError("field path '" + path + "' does not resolve");
    }
    return *node;
}

ScenarioOp ScenarioOp::reset_op(uint64_t seed, std::vector<FieldCheck> checks) {
    ScenarioOp op;
    op.kind = Kind::Reset;
    op.seed = seed;
    op.checks = std::move(checks);
    return op;
}

ScenarioOp ScenarioOp::patch_op(json p, std::vector<FieldCheck> checks) {
    ScenarioOp op;
    op.kind = Kind::Patch;
    op.patch = std::move(p);
    op.checks = std::move(checks);
    return op;
}

ScenarioOp ScenarioOp::step_op(int32_t action, std::vector<FieldCheck> checks) {
    ScenarioOp op;
    op.kind = Kind::Step;
    op.action = action;
    op.checks = std::move(checks);
    return op;
}

namespace {

json outcome_json(const Backend& b) {
    json obs = json::array();
    const auto o = b.observations();
    for (int32_t k = 0; k < b.obs_len(); ++k) obs.push_back(o[k]);
    return json{{"observation", std::move(obs)},
                {"reward", b.rewards()[0]},
                {"done", b.dones()[0] != 0}};
}

json root_json(const Backend& b) {
    return json{{"state", b.state_json(0)}, {"outcome", outcome_json(b)}};
}

bool check_one(const json& root, const FieldCheck& check, std::vector<FieldDiff>& diffs) {
    const json& actual = resolve_field_path(root, check.path);
    bool ok = false;
    if (check.kind == FieldCheck::Kind::InRange) {
        if (actual.is_number()) {
            const double v = actual.get<double>();
            ok = v >= check.lo && v <= check.hi;
        }
        if (!ok) {
            diffs.push_back(
                {check.path, json{{"low", check.lo}, {"high", check.hi}}, actual});
        }
        return ok;
    }
    if (check.expected.is_boolean() || actual.is_boolean()) {
        ok = actual == check.expected;
    } else if (check.expected.is_number() && actual.is_number()) {
        ok = values_match(actual.get<float>(), check.expected.get<float>(), check.mode);
    }
    if (!ok) diffs.push_back({check.path, check.expected, actual});
    return ok;
}

}  // namespace

SuiteReport run_property_suite(Backend& backend, std::span<const PropertyCase> cases) {
    SuiteReport report;
    report.suite = "L1";
    report.backend_id = backend.id();
    report.total = static_cast<int>(cases.size());
    for (const PropertyCase& c : cases) {
        const RngState stream = derive_stream(c.setup_seed, 0);
        backend.reset({&stream, 1});
        if (!c.state_patch.is_null()) {
            json st = backend.state_json(0);
            st.merge_patch(c.state_patch);
            backend.load_state_json(0, st);
        }
        backend.step({&c.action, 1});
        const json root = root_json(backend);
        std::vector<FieldDiff> diffs;
        for (const FieldCheck& check : c.expected) check_one(root, check, diffs);
        if (!diffs.empty()) {
            report.failures.push_back({c.name, -1, std::move(diffs), root["state"]});
        }
    }
    return report;
}

SuiteReport run_interaction_suite(Backend& backend,
                                  std::span<const InteractionScenario> scenarios) {
    SuiteReport report;
    report.suite = "L2";
    report.backend_id = backend.id();
    report.total = static_cast<int>(scenarios.size());
    for (const InteractionScenario& sc : scenarios) {
        if (sc.ops.empty() || sc.ops.front().kind != ScenarioOp::Kind::Reset) {
            throw ConfigError("scenario '" + sc.name + "' must begin with a reset op");
        }
        std::vector<FieldDiff> diffs;
        int failed_at = -1;
        for (size_t k = 0; k < sc.ops.size(); ++k) {
            const ScenarioOp& op = sc.ops[k];
            switch (op.kind) {
                case ScenarioOp::Kind::Reset: {
                    const RngState stream = derive_stream(op.seed, 0);
                    backend.reset({&stream, 1});
                    break;
                }
                case ScenarioOp::Kind::Patch: {
                    json st = backend.state_json(0);
                    st.merge_patch(op.patch);
                    backend.load_state_json(0, st);
                    break;
                }
                case ScenarioOp::Kind::Step:
                    backend.step({&op.action, 1});
                    break;
            }
            if (!op.checks.empty()) {
                const json root = root_json(backend);
                for (const FieldCheck& check : op.checks) check_one(root, check, diffs);
                if (!diffs.empty()) {
                    failed_at = static_cast<int>(k);
                    break;  // partial-sequence state is reported below
                }
            }
        }
        if (failed_at >= 0) {
            report.failures.push_back(
                {sc.name, failed_at, std::move(diffs), backend.state_json(0)});
        }
    }
    return report;
}

json SuiteReport::to_json() const {
    json fails = json::array();
    for (const CaseFailure& f : failures) {
        json diffs = json::array();
        for (const FieldDiff& d : f.diffs) {
            diffs.push_back({{"field", d.field}, {"expected", d.expected}, {"actual", d.actual}});
        }
        fails.push_back({{"name", f.case_name},
                         {"op_index", f.op_index},
                         {"diffs", std::move(diffs)},
                         {"state", f.state_at_failure}});
    }
    return json{{"name", suite},
                {"backend", backend_id},
                {"status", passed() ? "pass" : "fail"},
                {"cases", total},
                {"failures", std::move(fails)}};
}

json DivergenceReport::to_json() const {
    return json{{"episode_index", episode_index},
                {"step_index", step_index},
                {"field_path", field_path},
                {"component", component},
                {"value_a", value_a},
                {"value_b", value_b},
                {"last_matching_state", last_matching_state},
                {"action_taken", action_taken}};
}

std::string DivergenceReport::repair_text(const std::string& backend_a,
                                          const std::string& backend_b,
                                          ComparisonMode mode) const {
    std::ostringstream out;
    const std::string field =
        component.empty() ? field_path : field_path + " (" + component + ")";
    out << "Level 3 rollout comparison failed at step " << step_index << ".\n\n";
    out << "Divergence:\n";
    out << "- episode " << episode_index << ", step " << step_index << ": " << field
        << " = " << json(value_b).dump() << " (" << backend_b << ") vs "
        << json(value_a).dump() << " (" << backend_a << ")\n";
    if (step_index > 0) {
        out << "- steps 0-" << (step_index - 1) << " matched (" << mode_name(mode);
        if (mode.kind == ComparisonMode::Kind::Epsilon) {
            out << " " << json(mode.epsilon).dump();
        }
        out << ")\n";
    } else {
        out << "- divergence at the reset observation; no step was taken\n";
    }
    out << "\nState at step " << (step_index > 0 ? step_index - 1 : 0)
        << " (last matching):\n";
    if (last_matching_state.is_null()) {
        out << "- none: the initial states already differ\n";
    } else {
        for (const auto& [key, value] : last_matching_state.items()) {
            out << "- " << key << " = " << value.dump() << "\n";
        }
    }
    out << "\nAction taken at step " << step_index << ": ";
    if (action_taken < 0) {
        out << "none (reset)\n";
    } else {
        out << action_taken << "\n";
    }
    return out.str();
}

json RolloutComparison::to_json() const {
    json j{{"status", passed ? "pass" : "fail"},
           {"episodes", episodes},
           {"steps_compared", steps_compared}};
    if (divergence) j["divergence"] = divergence->to_json();
    return j;
}

namespace {

// Index of the first component pair that violates the mode, or -1.
int first_obs_mismatch(std::span<const float> a, std::span<const float> b, int32_t len,
                       ComparisonMode mode) {
    for (int32_t k = 0; k < len; ++k) {
        if (!values_match(a[k], b[k], mode)) return k;
    }
    return -1;
}

}  // namespace

RolloutComparison compare_rollouts(Backend& env_a, Backend& env_b, int64_t episodes,
                                   uint64_t base_seed, ComparisonMode mode,
                                   ActionSource& actions) {
    if (env_a.env_name() != env_b.env_name() || env_a.obs_len() != env_b.obs_len() ||
        env_a.action_count() != env_b.action_count()) {
        throw ConfigError("compare_rollouts: backends expose different schemas");
    }
    if (episodes < 1) throw ConfigError("compare_rollouts: episodes must be >= 1");

    RolloutComparison result;
    result.episodes = episodes;
    const int32_t obs_len = env_a.obs_len();
    const auto names = env_a.obs_component_names();

    auto diverged = [&](int64_t episode, int64_t step, const std::string& path,
                        const std::string& comp, double va, double vb, json prev,
                        int32_t action) {
        DivergenceReport d;
        d.episode_index = episode;
        d.step_index = step;
        d.field_path = path;
        d.component = comp;
        d.value_a = va;
        d.value_b = vb;
        d.last_matching_state = std::move(prev);
        d.action_taken = action;
        result.divergence = std::move(d);
        result.passed = false;
    };

    for (int64_t ep = 0; ep < episodes; ++ep) {
        const RngState stream = derive_stream(base_seed, static_cast<uint32_t>(ep));
        env_a.reset({&stream, 1});
        env_b.reset({&stream, 1});
        actions.begin_episode(ep);

        int mism = first_obs_mismatch(env_a.observations(), env_b.observations(), obs_len, mode);
        if (mism >= 0) {
            diverged(ep, 0, "observation[" + std::to_string(mism) + "]", names[mism],
                     env_a.observations()[mism], env_b.observations()[mism], json(), -1);
            return result;
        }

        json prev_state = env_a.state_json(0);
        for (int64_t step = 1;; ++step) {
            const int32_t action = actions.next_action(env_a.observations());
            env_a.step({&action, 1});
            env_b.step({&action, 1});
            result.steps_compared += 1;

            mism = first_obs_mismatch(env_a.observations(), env_b.observations(), obs_len, mode);
            if (mism >= 0) {
                diverged(ep, step, "observation[" + std::to_string(mism) + "]", names[mism],
                         env_a.observations()[mism], env_b.observations()[mism],
                         std::move(prev_state), action);
                return result;
            }
            if (!values_match(env_a.rewards()[0], env_b.rewards()[0], mode)) {
                diverged(ep, step, "reward", "", env_a.rewards()[0], env_b.rewards()[0],
                         std::move(prev_state), action);
                return result;
            }
            if (env_a.dones()[0] != env_b.dones()[0]) {
                diverged(ep, step, "done", "", env_a.dones()[0], env_b.dones()[0],
                         std::move(prev_state), action);
                return result;
            }
            if (env_a.dones()[0] != 0) break;
            prev_state = env_a.state_json(0);
        }
    }
    result.passed = true;
    return result;
}

}  // namespace twinenv
