#include <cmath>
#include <cstddef>

#include "twinenv/cartpole.hpp"

namespace twinenv::cartpole {

void CartPoleBatch::resize(size_t n) {
    x.resize(n);
    x_dot.resize(n);
    theta.resize(n);
    theta_dot.resize(n);
    step_count.resize(n);
    rng.resize(n);
}

void CartPoleBatch::put(size_t i, const CartPoleState& s) {
    x[i] = s.x;
    x_dot[i] = s.x_dot;
    theta[i] = s.theta;
    theta_dot[i] = s.theta_dot;
    step_count[i] = s.step_count;
    rng[i] = s.rng.counter;
}

CartPoleState CartPoleBatch::get(size_t i) const {
    CartPoleState s;
    s.x = x[i];
    s.x_dot = x_dot[i];
    s.theta = theta[i];
    s.theta_dot = theta_dot[i];
    s.step_count = step_count[i];
    s.rng = RngState{rng[i]};
    return s;
}

namespace {

inline constexpr float INV_TOTAL_MASS = 1.0f / TOTAL_MASS;
inline constexpr float DENOM_BASE = HALF_LENGTH * FOUR_THIRDS;
inline constexpr float DENOM_COS = HALF_LENGTH * POLE_MASS / TOTAL_MASS;
inline constexpr float PML_OVER_TOTAL = POLEMASS_LENGTH / TOTAL_MASS;

inline void write_obs(const CartPoleBatch& b, size_t i, float* out) {
    out[0] = b.x[i];
    out[1] = b.x_dot[i];
    out[2] = b.theta[i];
    out[3] = b.theta_dot[i];
}

template <bool ExactOrder>
inline void step_element(CartPoleBatch& b, size_t i, int32_t action, BatchOut& out) {
    if (b.x[i] < -X_LIMIT || b.x[i] > X_LIMIT || b.theta[i] < -THETA_LIMIT ||
        b.theta[i] > THETA_LIMIT || b.step_count[i] >= MAX_EPISODE_STEPS) {
        b.put(i, cartpole_reset(RngState{b.rng[i]}));
        write_obs(b, i, out.observations.data() + i * OBS_LEN);
        out.rewards[i] = 0.0f;
        out.dones[i] = 0;
        return;
    }

    const float force = action == 1 ? FORCE_MAG : -FORCE_MAG;
    const float td = b.theta_dot[i];
    const float cos_t = std::cos(b.theta[i]);
    const float sin_t = std::sin(b.theta[i]);

    float temp, theta_acc, x_acc;
    if constexpr (ExactOrder) {
        temp = (force + POLEMASS_LENGTH * td * td * sin_t) / TOTAL_MASS;
        theta_acc = (GRAVITY * sin_t - cos_t * temp) /
                    (HALF_LENGTH * (FOUR_THIRDS - POLE_MASS * cos_t * cos_t / TOTAL_MASS));
        x_acc = temp - POLEMASS_LENGTH * theta_acc * cos_t / TOTAL_MASS;
    } else {
        temp = (force + POLEMASS_LENGTH * td * td * sin_t) * INV_TOTAL_MASS;
        theta_acc = (GRAVITY * sin_t - cos_t * temp) /
                    (DENOM_BASE - DENOM_COS * cos_t * cos_t);
        x_acc = temp - theta_acc * (PML_OVER_TOTAL * cos_t);
    }

    const float nx = b.x[i] + TAU * b.x_dot[i];
    const float nxd = b.x_dot[i] + TAU * x_acc;
    const float nth = b.theta[i] + TAU * td;
    const float ntd = td + TAU * theta_acc;
    const int32_t sc = b.step_count[i] + 1;

    b.x[i] = nx;
    b.x_dot[i] = nxd;
    b.theta[i] = nth;
    b.theta_dot[i] = ntd;
    b.step_count[i] = sc;

    write_obs(b, i, out.observations.data() + i * OBS_LEN);
    out.rewards[i] = 1.0f;
    out.dones[i] = (nx < -X_LIMIT || nx > X_LIMIT || nth < -THETA_LIMIT ||
                    nth > THETA_LIMIT || sc >= MAX_EPISODE_STEPS)
                       ? 1
                       : 0;
}

}  // namespace

void cartpole_reset_batch(CartPoleBatch& b, std::span<const RngState> streams,
                          std::span<float> obs_out, ThreadPool* pool) {
    b.resize(streams.size());
    if (obs_out.size() != streams.size() * OBS_LEN) {
        throw ContractViolation("cartpole_reset_batch: observation buffer size mismatch");
    }
    auto body = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            b.put(i, cartpole_reset(streams[i]));
            write_obs(b, i, obs_out.data() + i * OBS_LEN);
        }
    };
    if (pool) {
        pool->parallel_for(streams.size(), body);
    } else {
        body(0, streams.size());
    }
}

void cartpole_step_batch(CartPoleBatch& b, std::span<const int32_t> actions, BatchOut out,
                         ThreadPool* pool, bool exact_order) {
    const size_t n = b.size();
    if (actions.size() != n) {
        throw ContractViolation("cartpole_step_batch: actions length does not match batch");
    }
    if (out.observations.size() != n * OBS_LEN || out.rewards.size() != n ||
        out.dones.size() != n) {
        throw ContractViolation("cartpole_step_batch: output buffer size mismatch");
    }
    if (n == 0) return;
    auto body = [&](size_t begin, size_t end) {
        if (exact_order) {
            for (size_t i = begin; i < end; ++i) step_element<true>(b, i, actions[i], out);
        } else {
            for (size_t i = begin; i < end; ++i) step_element<false>(b, i, actions[i], out);
        }
    };
    if (pool) {
        pool->parallel_for(n, body);
    } else {
        body(0, n);
    }
}

}  // namespace twinenv::cartpole
