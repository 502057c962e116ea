#include <doctest.h>

#include <vector>

#include "twinenv/policy.hpp"
#include "twinenv/pong.hpp"

using namespace twinenv;

TEST_CASE("linear policy: argmax with lowest-index tie break") {
    // two actions over a 1-component observation
    Policy zero = make_linear_policy({0, 0, 0, 0}, 1, 2);
    const std::vector<float> obs{3.0f};
    CHECK(policy_act(zero, obs) == 0);

    // scores (0.2, 0.9) -> action 1
    Policy p = make_linear_policy({0.0f, 0.2f, 0.0f, 0.9f}, 1, 2);
    CHECK(policy_act(p, obs) == 1);

    Policy tie = make_linear_policy({1.0f, 0.0f, 1.0f, 0.0f}, 1, 2);
    CHECK(policy_act(tie, obs) == 0);
}

TEST_CASE("linear policy validates lengths") {
    CHECK_THROWS_AS((void)make_linear_policy({1.0f, 2.0f}, 2, 2), ContractViolation);
    Policy p = make_linear_policy({0, 0, 0, 0, 0, 0}, 2, 2);
    const std::vector<float> short_obs{1.0f};
    CHECK_THROWS_AS((void)policy_act(p, short_obs), ContractViolation);
}

TEST_CASE("tracker policy follows the ball with a dead zone") {
    auto obs_for = [](float ball_y, float player_y) {
        std::array<float, pong::OBS_LEN> obs{};
        pong::PongState s = pong::pong_reset(derive_stream(0, 0));
        s.ball_y = ball_y;
        s.player_y = player_y;
        pong::pong_observe(s, obs);
        return obs;
    };
    Policy tracker = make_tracker_policy();
    CHECK(policy_act(tracker, obs_for(0.8f, 0.5f)) == 1);   // ball above: up
    CHECK(policy_act(tracker, obs_for(0.2f, 0.5f)) == 2);   // ball below: down
    CHECK(policy_act(tracker, obs_for(0.505f, 0.5f)) == 0); // inside the dead zone

    const std::vector<float> wrong(4, 0.0f);
    CHECK_THROWS_AS((void)policy_act(tracker, wrong), ContractViolation);
}

TEST_CASE("random policy is uniform-ish and deterministic per seed") {
    Policy a = make_random_policy(9, 3);
    Policy b = make_random_policy(9, 3);
    const std::vector<float> obs(8, 0.0f);
    std::array<int, 3> counts{};
    for (int i = 0; i < 3000; ++i) {
        const int32_t act = policy_act(a, obs);
        CHECK(policy_act(b, obs) == act);
        REQUIRE(act >= 0);
        REQUIRE(act < 3);
        counts[act] += 1;
    }
    for (const int c : counts) CHECK(c > 800);
}
