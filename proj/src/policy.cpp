#include "twinenv/policy.hpp"

#include "twinenv/pong.hpp"

namespace twinenv {

namespace {

inline constexpr float TRACKER_DEAD_ZONE = 0.01f;

}  // namespace

Policy make_random_policy(uint64_t seed, int32_t action_count) {
    Policy p;
    p.kind = PolicyKind::Random;
    p.action_count = action_count;
    p.rng = derive_stream(seed, 0);
    return p;
}

Policy make_tracker_policy() {
    Policy p;
    p.kind = PolicyKind::Tracker;
    p.obs_len = pong::OBS_LEN;
    p.action_count = pong::ACTION_COUNT;
    return p;
}

Policy make_linear_policy(std::vector<float> parameters, int32_t obs_len,
                          int32_t action_count) {
    if (parameters.size() !=
        static_cast<size_t>((obs_len + 1) * action_count)) {
        throw ContractViolation("linear policy: parameter length must be (obs_len+1)*actions");
    }
    Policy p;
    p.kind = PolicyKind::Linear;
    p.parameters = std::move(parameters);
    p.obs_len = obs_len;
    p.action_count = action_count;
    return p;
}

int32_t policy_act(Policy& policy, std::span<const float> observation) {
    switch (policy.kind) {
        case PolicyKind::Random: {
            const RngDraw d = rng_next(policy.rng);
            policy.rng = d.next;
            return static_cast<int32_t>(d.value %
                                        static_cast<uint64_t>(policy.action_count));
        }
        case PolicyKind::Tracker: {
            if (observation.size() != static_cast<size_t>(pong::OBS_LEN)) {
                throw ContractViolation("tracker policy: expected a pong observation");
            }
            const float ball_y = observation[1];
            const float player_y =
                observation[4] * (pong::PADDLE_MAX - pong::PADDLE_MIN) + pong::PADDLE_MIN;
            if (ball_y > player_y + TRACKER_DEAD_ZONE) return 1;
            if (ball_y < player_y - TRACKER_DEAD_ZONE) return 2;
            return 0;
        }
        case PolicyKind::Linear: {
            if (observation.size() != static_cast<size_t>(policy.obs_len)) {
                throw ContractViolation("linear policy: observation length mismatch");
            }
            int32_t best = 0;
            float best_score = 0.0f;
            for (int32_t a = 0; a < policy.action_count; ++a) {
                const float* row = policy.parameters.data() + a * (policy.obs_len + 1);
                float score = row[policy.obs_len];  // bias
                for (int32_t k = 0; k < policy.obs_len; ++k) {
                    score += row[k] * observation[k];
                }
                if (a == 0 || score > best_score) {
                    best = a;
                    best_score = score;
                }
            }
            return best;
        }
    }
    throw ContractViolation("policy_act: unknown policy kind");
}

std::string policy_kind_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Random: return "random";
        case PolicyKind::Tracker: return "tracker";
        case PolicyKind::Linear: return "linear";
    }
    return "?";
}

}  // namespace twinenv
