#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twinenv/rng.hpp"
#include "twinenv/types.hpp"

namespace twinenv {

enum class PolicyKind { Random, Tracker, Linear };

// Tracker and Linear policies are pure functions of (parameters, observation);
// Random carries its own stream. Linear parameters are row-major per action:
// [w_0 .. w_{obs_len-1}, bias] for each action in order.
struct Policy {
    PolicyKind kind = PolicyKind::Random;
    std::vector<float> parameters;
    int32_t obs_len = 0;
    int32_t action_count = 0;
    RngState rng;
};

Policy make_random_policy(uint64_t seed, int32_t action_count);
Policy make_tracker_policy();
Policy make_linear_policy(std::vector<float> parameters, int32_t obs_len,
                          int32_t action_count);

// Linear: argmax of per-action scores, ties broken by the lowest action
// index. Tracker (pong): move toward ball_y with a 0.01 dead zone. Random:
// uniform draw from the policy's stream.
int32_t policy_act(Policy& policy, std::span<const float> observation);

std::string policy_kind_name(PolicyKind kind);

}  // namespace twinenv
