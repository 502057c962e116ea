#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twinenv/rng.hpp"
#include "twinenv/thread_pool.hpp"
#include "twinenv/types.hpp"

namespace twinenv::pong {

// Unit-square field. The player paddle guards the x = 1 plane, the scripted
// opponent guards x = 0. Tuned so a tracking player (speed 0.04) out-tracks
// the opponent (speed 0.03) but random play loses quickly.
inline constexpr float BALL_VX = 0.025f;  // constant horizontal speed
inline constexpr float VY0 = 0.01f;       // serve |vy| bound
inline constexpr float VY_MAX = 0.03f;
inline constexpr float VY_GAIN = 0.03f;
inline constexpr float PADDLE_HALF = 0.1f;
inline constexpr float PADDLE_SPEED = 0.04f;
inline constexpr float OPP_SPEED = 0.03f;
inline constexpr int32_t WIN_SCORE = 5;
inline constexpr int32_t MAX_STEPS = 2000;
inline constexpr int32_t OBS_LEN = 8;
inline constexpr int32_t ACTION_COUNT = 3;  // 0 stay, 1 up, 2 down

inline constexpr float PADDLE_MIN = PADDLE_HALF;
inline constexpr float PADDLE_MAX = 1.0f - PADDLE_HALF;
inline constexpr float INV_PADDLE_RANGE = 1.0f / (PADDLE_MAX - PADDLE_MIN);
inline constexpr float INV_BALL_VX = 1.0f / BALL_VX;
inline constexpr float INV_VY_MAX = 1.0f / VY_MAX;
inline constexpr float INV_WIN_SCORE = 1.0f / static_cast<float>(WIN_SCORE);
inline constexpr float INV_PADDLE_HALF = 1.0f / PADDLE_HALF;

struct PongState {
    float ball_x = 0.5f;
    float ball_y = 0.5f;
    float ball_vx = -BALL_VX;
    float ball_vy = 0.0f;
    float player_y = 0.5f;
    float opponent_y = 0.5f;
    int32_t player_points = 0;
    int32_t opponent_points = 0;
    int32_t step_count = 0;
    RngState rng;

    friend bool operator==(const PongState&, const PongState&) = default;
};

// Compile-time bug knobs for the mutant registry. Every mutant backend is a
// distinct instantiation of the step template; the clean reference is the
// default-constructed configuration, which folds every knob away.
struct Mutation {
    bool wall_keeps_vy = false;     // reflects position, forgets to negate vy
    bool obs_raw_paddle = false;    // paddle observation skips the min/range map
    bool paddle_stale_read = false; // collision tests the pre-move player position
    bool opponent_peeks_ball = false;  // tracker targets the post-move ball
    float vx_decay = 1.0f;          // per-step horizontal speed shrink
    bool serve_vy_nonneg = false;   // post-goal serve draws vy from [0, VY0)

    friend bool operator==(const Mutation&, const Mutation&) = default;
};

struct StepResult {
    PongState state;
    StepOutcome outcome;
};

inline PongState pong_reset(RngState seed_stream) {
    PongState s;
    const UniformDraw u = rng_uniform(seed_stream);
    s.rng = u.next;
    s.ball_vy = (2.0f * u.value - 1.0f) * VY0;
    return s;
}

template <Mutation M = Mutation{}>
void pong_observe_variant(const PongState& s, std::span<float, OBS_LEN> out) {
    out[0] = s.ball_x;
    out[1] = s.ball_y;
    out[2] = s.ball_vx * INV_BALL_VX;
    out[3] = s.ball_vy * INV_VY_MAX;
    if constexpr (M.obs_raw_paddle) {
        out[4] = s.player_y;
        out[5] = s.opponent_y;
    } else {
        out[4] = (s.player_y - PADDLE_MIN) * INV_PADDLE_RANGE;
        out[5] = (s.opponent_y - PADDLE_MIN) * INV_PADDLE_RANGE;
    }
    out[6] = static_cast<float>(s.player_points) * INV_WIN_SCORE;
    out[7] = static_cast<float>(s.opponent_points) * INV_WIN_SCORE;
}

inline void pong_observe(const PongState& s, std::span<float, OBS_LEN> out) {
    pong_observe_variant<>(s, out);
}

inline bool pong_episode_over(const PongState& s) {
    return s.player_points == WIN_SCORE || s.opponent_points == WIN_SCORE ||
           s.step_count >= MAX_STEPS;
}

template <Mutation M>
void pong_serve(PongState& s) {
    // Positions re-center; the ball keeps travelling toward the side that
    // just missed. |vx| is untouched.
    s.ball_x = 0.5f;
    s.ball_y = 0.5f;
    const UniformDraw u = rng_uniform(s.rng);
    s.rng = u.next;
    if constexpr (M.serve_vy_nonneg) {
        s.ball_vy = u.value * VY0;
    } else {
        s.ball_vy = (2.0f * u.value - 1.0f) * VY0;
    }
}

// One transition. Event order within a step is fixed: player paddle,
// opponent paddle, ball advance, wall reflection, paddle collision, scoring,
// terminal check.
template <Mutation M = Mutation{}>
StepResult pong_step_variant(PongState s, int32_t action) {
    if (action < 0 || action >= ACTION_COUNT) {
        throw ContractViolation("pong_step: action must be 0, 1 or 2");
    }

    const float player_pre = s.player_y;

    // 1. player paddle
    float move = 0.0f;
    if (action == 1) move = PADDLE_SPEED;
    if (action == 2) move = -PADDLE_SPEED;
    s.player_y = clampf(s.player_y + move, PADDLE_MIN, PADDLE_MAX);

    // 2. opponent tracker
    float target = s.ball_y;
    if constexpr (M.opponent_peeks_ball) {
        float peek = s.ball_y + s.ball_vy;
        if (peek < 0.0f) peek = -peek;
        if (peek > 1.0f) peek = 2.0f - peek;
        target = peek;
    }
    const float chase = clampf(target - s.opponent_y, -OPP_SPEED, OPP_SPEED);
    s.opponent_y = clampf(s.opponent_y + chase, PADDLE_MIN, PADDLE_MAX);

    // 3. ball advance
    if constexpr (M.vx_decay != 1.0f) s.ball_vx *= M.vx_decay;
    s.ball_x += s.ball_vx;
    s.ball_y += s.ball_vy;

    // 4. wall reflection at y = 0 and y = 1
    if (s.ball_y < 0.0f) {
        s.ball_y = -s.ball_y;
        if constexpr (!M.wall_keeps_vy) s.ball_vy = -s.ball_vy;
    } else if (s.ball_y > 1.0f) {
        s.ball_y = 2.0f - s.ball_y;
        if constexpr (!M.wall_keeps_vy) s.ball_vy = -s.ball_vy;
    }

    // 5/6. paddle planes: bounce on contact, score otherwise
    float reward = 0.0f;
    const float player_hit_y = M.paddle_stale_read ? player_pre : s.player_y;
    if (s.ball_x <= 0.0f) {
        const float off = s.ball_y - s.opponent_y;
        if (off >= -PADDLE_HALF && off <= PADDLE_HALF) {
            s.ball_x = -s.ball_x;
            s.ball_vx = -s.ball_vx;
            s.ball_vy = VY_GAIN * off * INV_PADDLE_HALF;
        } else {
            reward = 1.0f;
            s.player_points += 1;
            pong_serve<M>(s);
        }
    } else if (s.ball_x >= 1.0f) {
        const float off = s.ball_y - player_hit_y;
        if (off >= -PADDLE_HALF && off <= PADDLE_HALF) {
            s.ball_x = 2.0f - s.ball_x;
            s.ball_vx = -s.ball_vx;
            s.ball_vy = VY_GAIN * off * INV_PADDLE_HALF;
        } else {
            reward = -1.0f;
            s.opponent_points += 1;
            pong_serve<M>(s);
        }
    }

    // 7. terminal
    s.step_count += 1;

    StepResult r;
    r.state = s;
    r.outcome.obs_len = OBS_LEN;
    r.outcome.reward = reward;
    r.outcome.done = pong_episode_over(s);
    pong_observe_variant<M>(s, std::span<float, OBS_LEN>(r.outcome.observation.data(), OBS_LEN));
    return r;
}

inline StepResult pong_step(const PongState& s, int32_t action) {
    return pong_step_variant<>(s, action);
}

// ---------------------------------------------------------------------------
// Batched performance backend: structure-of-arrays state, branchless step
// kernel, caller-provided output buffers, no allocation after setup.

struct PongBatch {
    std::vector<float> ball_x, ball_y, ball_vx, ball_vy, player_y, opponent_y;
    std::vector<int32_t> player_points, opponent_points, step_count;
    std::vector<uint64_t> rng;

    size_t size() const { return ball_x.size(); }
    void resize(size_t n);
    void put(size_t i, const PongState& s);
    PongState get(size_t i) const;
};

struct BatchOut {
    std::span<float> observations;  // n * OBS_LEN
    std::span<float> rewards;       // n
    std::span<uint8_t> dones;       // n
};

void pong_reset_batch(PongBatch& b, std::span<const RngState> streams,
                      std::span<float> obs_out, ThreadPool* pool);

// Element-wise bit-exact to mapping pong_step over the batch. An instance
// whose episode already ended is re-served from its own stream instead
// (observation of the fresh state, reward 0, done false).
void pong_step_batch(PongBatch& b, std::span<const int32_t> actions, BatchOut out,
                     ThreadPool* pool);

}  // namespace twinenv::pong
