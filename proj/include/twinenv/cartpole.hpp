#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "twinenv/rng.hpp"
#include "twinenv/thread_pool.hpp"
#include "twinenv/types.hpp"

namespace twinenv::cartpole {

// Classic 2-action cart-pole with explicit Euler integration.
inline constexpr float GRAVITY = 9.8f;
inline constexpr float CART_MASS = 1.0f;
inline constexpr float POLE_MASS = 0.1f;
inline constexpr float TOTAL_MASS = CART_MASS + POLE_MASS;
inline constexpr float HALF_LENGTH = 0.5f;
inline constexpr float POLEMASS_LENGTH = POLE_MASS * HALF_LENGTH;
inline constexpr float FORCE_MAG = 10.0f;
inline constexpr float TAU = 0.02f;
inline constexpr float FOUR_THIRDS = 4.0f / 3.0f;
inline constexpr float X_LIMIT = 2.4f;
inline constexpr float THETA_LIMIT = 0.20943951023931953f;  // 12 degrees
inline constexpr int32_t MAX_EPISODE_STEPS = 500;
inline constexpr int32_t OBS_LEN = 4;
inline constexpr int32_t ACTION_COUNT = 2;  // 0 push-left, 1 push-right
inline constexpr float RESET_BOUND = 0.05f;

struct CartPoleState {
    float x = 0.0f;
    float x_dot = 0.0f;
    float theta = 0.0f;
    float theta_dot = 0.0f;
    int32_t step_count = 0;
    RngState rng;

    friend bool operator==(const CartPoleState&, const CartPoleState&) = default;
};

struct Mutation {
    bool three_quarters_denom = false;  // 3/4 instead of 4/3 in the pole term
    float theta_dot_decay = 1.0f;       // per-step angular velocity shrink
    bool reset_swapped_order = false;   // reset draws theta/theta_dot before x/x_dot

    friend bool operator==(const Mutation&, const Mutation&) = default;
};

struct StepResult {
    CartPoleState state;
    StepOutcome outcome;
};

template <Mutation M = Mutation{}>
CartPoleState cartpole_reset_variant(RngState seed_stream) {
    auto draw = [&seed_stream] {
        const UniformDraw u = rng_uniform(seed_stream);
        seed_stream = u.next;
        return (2.0f * u.value - 1.0f) * RESET_BOUND;
    };
    CartPoleState s;
    if constexpr (M.reset_swapped_order) {
        s.theta = draw();
        s.theta_dot = draw();
        s.x = draw();
        s.x_dot = draw();
    } else {
        s.x = draw();
        s.x_dot = draw();
        s.theta = draw();
        s.theta_dot = draw();
    }
    s.rng = seed_stream;
    return s;
}

inline CartPoleState cartpole_reset(RngState seed_stream) {
    return cartpole_reset_variant<>(seed_stream);
}

inline void cartpole_observe(const CartPoleState& s, std::span<float, OBS_LEN> out) {
    out[0] = s.x;
    out[1] = s.x_dot;
    out[2] = s.theta;
    out[3] = s.theta_dot;
}

inline bool cartpole_episode_over(const CartPoleState& s) {
    return s.x < -X_LIMIT || s.x > X_LIMIT || s.theta < -THETA_LIMIT ||
           s.theta > THETA_LIMIT || s.step_count >= MAX_EPISODE_STEPS;
}

// Explicit Euler, positions updated with the pre-update velocities. Reward is
// 1.0 on every step taken, including the terminal one.
template <Mutation M = Mutation{}>
StepResult cartpole_step_variant(CartPoleState s, int32_t action) {
    if (action < 0 || action >= ACTION_COUNT) {
        throw ContractViolation("cartpole_step: action must be 0 or 1");
    }

    const float force = action == 1 ? FORCE_MAG : -FORCE_MAG;
    const float cos_t = std::cos(s.theta);
    const float sin_t = std::sin(s.theta);

    const float temp =
        (force + POLEMASS_LENGTH * s.theta_dot * s.theta_dot * sin_t) / TOTAL_MASS;
    float ratio = FOUR_THIRDS;
    if constexpr (M.three_quarters_denom) ratio = 0.75f;
    const float theta_acc = (GRAVITY * sin_t - cos_t * temp) /
                            (HALF_LENGTH * (ratio - POLE_MASS * cos_t * cos_t / TOTAL_MASS));
    const float x_acc = temp - POLEMASS_LENGTH * theta_acc * cos_t / TOTAL_MASS;

    s.x += TAU * s.x_dot;
    s.x_dot += TAU * x_acc;
    s.theta += TAU * s.theta_dot;
    s.theta_dot += TAU * theta_acc;
    if constexpr (M.theta_dot_decay != 1.0f) s.theta_dot *= M.theta_dot_decay;
    s.step_count += 1;

    StepResult r;
    r.state = s;
    r.outcome.obs_len = OBS_LEN;
    r.outcome.reward = 1.0f;
    r.outcome.done = cartpole_episode_over(s);
    cartpole_observe(s, std::span<float, OBS_LEN>(r.outcome.observation.data(), OBS_LEN));
    return r;
}

inline StepResult cartpole_step(const CartPoleState& s, int32_t action) {
    return cartpole_step_variant<>(s, action);
}

// ---------------------------------------------------------------------------
// Batched performance backend. The default kernel multiplies by precomputed
// reciprocals instead of dividing, so it matches the scalar path only within
// a small epsilon; the exact_order kernel keeps the scalar's arithmetic and
// is bit-identical to it.

struct CartPoleBatch {
    std::vector<float> x, x_dot, theta, theta_dot;
    std::vector<int32_t> step_count;
    std::vector<uint64_t> rng;

    size_t size() const { return x.size(); }
    void resize(size_t n);
    void put(size_t i, const CartPoleState& s);
    CartPoleState get(size_t i) const;
};

struct BatchOut {
    std::span<float> observations;  // n * OBS_LEN
    std::span<float> rewards;       // n
    std::span<uint8_t> dones;       // n
};

void cartpole_reset_batch(CartPoleBatch& b, std::span<const RngState> streams,
                          std::span<float> obs_out, ThreadPool* pool);

void cartpole_step_batch(CartPoleBatch& b, std::span<const int32_t> actions, BatchOut out,
                         ThreadPool* pool, bool exact_order = false);

}  // namespace twinenv::cartpole
