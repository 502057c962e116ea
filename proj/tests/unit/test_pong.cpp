#include <doctest.h>

#include <cmath>
#include <set>

#include "twinenv/pong.hpp"

using namespace twinenv;
using namespace twinenv::pong;

namespace {

PongState make_state(float bx, float by, float vx, float vy, float py, float oy) {
    PongState s = pong_reset(derive_stream(99, 0));
    s.ball_x = bx;
    s.ball_y = by;
    s.ball_vx = vx;
    s.ball_vy = vy;
    s.player_y = py;
    s.opponent_y = oy;
    return s;
}

}  // namespace

TEST_CASE("pong_reset layout") {
    const PongState s = pong_reset(derive_stream(0, 0));
    CHECK(s.ball_x == 0.5f);
    CHECK(s.ball_y == 0.5f);
    CHECK(s.ball_vx == -BALL_VX);
    CHECK(s.ball_vy >= -VY0);
    CHECK(s.ball_vy < VY0);
    CHECK(s.player_y == 0.5f);
    CHECK(s.opponent_y == 0.5f);
    CHECK(s.player_points == 0);
    CHECK(s.opponent_points == 0);
    CHECK(s.step_count == 0);
}

TEST_CASE("pong_reset is pure and streams decorrelate the serve") {
    const RngState stream = derive_stream(4, 2);
    CHECK(pong_reset(stream) == pong_reset(stream));

    std::set<float> vys;
    for (uint32_t i = 0; i < 100; ++i) vys.insert(pong_reset(derive_stream(11, i)).ball_vy);
    CHECK(vys.size() >= 99);
}

TEST_CASE("free flight moves the ball by its velocity") {
    const PongState s = make_state(0.5f, 0.5f, 0.025f, 0.0f, 0.5f, 0.5f);
    const StepResult r = pong_step(s, 0);
    CHECK(r.state.ball_x == doctest::Approx(0.525).epsilon(1e-6));
    CHECK(r.state.ball_y == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.outcome.reward == 0.0f);
    CHECK_FALSE(r.outcome.done);
}

TEST_CASE("wall reflection mirrors position and negates vy") {
    // y + vy = -0.005 -> position 0.005, vy +0.01
    const PongState s = make_state(0.5f, 0.005f, 0.025f, -0.01f, 0.5f, 0.5f);
    const StepResult r = pong_step(s, 0);
    CHECK(r.state.ball_y == doctest::Approx(0.005).epsilon(1e-5));
    CHECK(r.state.ball_vy == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("winning point terminates the episode") {
    PongState s = make_state(0.02f, 0.9f, -0.025f, 0.0f, 0.5f, 0.3f);
    s.player_points = WIN_SCORE - 1;
    const StepResult r = pong_step(s, 0);
    CHECK(r.outcome.reward == 1.0f);
    CHECK(r.state.player_points == WIN_SCORE);
    CHECK(r.outcome.done);
}

TEST_CASE("invalid action is a contract violation") {
    const PongState s = pong_reset(derive_stream(0, 0));
    CHECK_THROWS_AS((void)pong_step(s, 3), ContractViolation);
    CHECK_THROWS_AS((void)pong_step(s, -1), ContractViolation);
}

TEST_CASE("pong_step is pure") {
    const PongState s = make_state(0.97f, 0.52f, 0.025f, 0.013f, 0.5f, 0.5f);
    const StepResult a = pong_step(s, 1);
    const StepResult b = pong_step(s, 1);
    CHECK(a.state == b.state);
    CHECK(a.outcome.observation == b.outcome.observation);
    CHECK(a.outcome.reward == b.outcome.reward);
    CHECK(a.outcome.done == b.outcome.done);
}

TEST_CASE("observation normalization boundaries") {
    std::array<float, OBS_LEN> obs{};
    PongState s = pong_reset(derive_stream(0, 0));

    pong_observe(s, obs);
    CHECK(obs[0] == 0.5f);
    CHECK(obs[2] == -1.0f);
    CHECK(obs[4] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(obs[6] == 0.0f);

    s.player_y = PADDLE_MIN;
    s.opponent_y = PADDLE_MAX;
    pong_observe(s, obs);
    CHECK(obs[4] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(obs[5] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("episode properties: reward conservation, speed, bounds, termination") {
    RngState action_stream = derive_stream(0x5151, 0);
    for (uint32_t ep = 0; ep < 50; ++ep) {
        PongState s = pong_reset(derive_stream(1000, ep));
        int plus = 0, minus = 0;
        int steps = 0;
        while (true) {
            const RngDraw d = rng_next(action_stream);
            action_stream = d.next;
            const StepResult r = pong_step(s, static_cast<int32_t>(d.value % 3));
            s = r.state;
            ++steps;

            if (r.outcome.reward > 0) ++plus;
            if (r.outcome.reward < 0) ++minus;

            CHECK(std::fabs(s.ball_vx) == BALL_VX);
            CHECK(std::fabs(s.ball_vy) <= VY_MAX);
            CHECK(s.ball_x >= 0.0f);
            CHECK(s.ball_x <= 1.0f);
            CHECK(s.ball_y >= 0.0f);
            CHECK(s.ball_y <= 1.0f);
            CHECK(s.player_y >= PADDLE_MIN);
            CHECK(s.player_y <= PADDLE_MAX);
            for (int k = 0; k < OBS_LEN; ++k) {
                CHECK(std::isfinite(r.outcome.observation[k]));
                CHECK(r.outcome.observation[k] >= -1.0f);
                CHECK(r.outcome.observation[k] <= 1.0f);
            }
            if (r.outcome.done) break;
        }
        CHECK(steps <= MAX_STEPS);
        CHECK(plus == s.player_points);
        CHECK(minus == s.opponent_points);
    }
}
