#include <cstddef>

#include "twinenv/pong.hpp"

namespace twinenv::pong {

void PongBatch::resize(size_t n) {
    ball_x.resize(n);
    ball_y.resize(n);
    ball_vx.resize(n);
    ball_vy.resize(n);
    player_y.resize(n);
    opponent_y.resize(n);
    player_points.resize(n);
    opponent_points.resize(n);
    step_count.resize(n);
    rng.resize(n);
}

void PongBatch::put(size_t i, const PongState& s) {
    ball_x[i] = s.ball_x;
    ball_y[i] = s.ball_y;
    ball_vx[i] = s.ball_vx;
    ball_vy[i] = s.ball_vy;
    player_y[i] = s.player_y;
    opponent_y[i] = s.opponent_y;
    player_points[i] = s.player_points;
    opponent_points[i] = s.opponent_points;
    step_count[i] = s.step_count;
    rng[i] = s.rng.counter;
}

PongState PongBatch::get(size_t i) const {
    PongState s;
    s.ball_x = ball_x[i];
    s.ball_y = ball_y[i];
    s.ball_vx = ball_vx[i];
    s.ball_vy = ball_vy[i];
    s.player_y = player_y[i];
    s.opponent_y = opponent_y[i];
    s.player_points = player_points[i];
    s.opponent_points = opponent_points[i];
    s.step_count = step_count[i];
    s.rng = RngState{rng[i]};
    return s;
}

namespace {

inline float sel(bool c, float a, float b) { return c ? a : b; }

inline void write_obs(const PongBatch& b, size_t i, float* out) {
    out[0] = b.ball_x[i];
    out[1] = b.ball_y[i];
    out[2] = b.ball_vx[i] * INV_BALL_VX;
    out[3] = b.ball_vy[i] * INV_VY_MAX;
    out[4] = (b.player_y[i] - PADDLE_MIN) * INV_PADDLE_RANGE;
    out[5] = (b.opponent_y[i] - PADDLE_MIN) * INV_PADDLE_RANGE;
    out[6] = static_cast<float>(b.player_points[i]) * INV_WIN_SCORE;
    out[7] = static_cast<float>(b.opponent_points[i]) * INV_WIN_SCORE;
}

inline void step_element(PongBatch& b, size_t i, int32_t action, BatchOut& out) {
    // Finished episode: serve a fresh one from the instance's own stream.
    if (b.player_points[i] == WIN_SCORE || b.opponent_points[i] == WIN_SCORE ||
        b.step_count[i] >= MAX_STEPS) {
        b.put(i, pong_reset(RngState{b.rng[i]}));
        write_obs(b, i, out.observations.data() + i * OBS_LEN);
        out.rewards[i] = 0.0f;
        out.dones[i] = 0;
        return;
    }

    const float move = sel(action == 1, PADDLE_SPEED, sel(action == 2, -PADDLE_SPEED, 0.0f));
    const float py = clampf(b.player_y[i] + move, PADDLE_MIN, PADDLE_MAX);

    const float chase = clampf(b.ball_y[i] - b.opponent_y[i], -OPP_SPEED, OPP_SPEED);
    const float oy = clampf(b.opponent_y[i] + chase, PADDLE_MIN, PADDLE_MAX);

    const float vx0 = b.ball_vx[i];
    const float bx0 = b.ball_x[i] + vx0;
    const float by0 = b.ball_y[i] + b.ball_vy[i];

    const bool wall_lo = by0 < 0.0f;
    const bool wall_hi = by0 > 1.0f;
    const float by1 = sel(wall_lo, -by0, sel(wall_hi, 2.0f - by0, by0));
    const float vy1 = sel(wall_lo || wall_hi, -b.ball_vy[i], b.ball_vy[i]);

    const bool cross_l = bx0 <= 0.0f;
    const bool cross_r = bx0 >= 1.0f;
    const float off_l = by1 - oy;
    const float off_r = by1 - py;
    const bool hit_l = cross_l && off_l >= -PADDLE_HALF && off_l <= PADDLE_HALF;
    const bool hit_r = cross_r && off_r >= -PADDLE_HALF && off_r <= PADDLE_HALF;
    const bool hit = hit_l || hit_r;
    const bool goal_l = cross_l && !hit_l;  // player scored
    const bool goal_r = cross_r && !hit_r;  // opponent scored
    const bool goal = goal_l || goal_r;

    const float off = sel(hit_l, off_l, off_r);
    float bx = sel(hit_l, -bx0, sel(hit_r, 2.0f - bx0, bx0));
    float vy = sel(hit, VY_GAIN * off * INV_PADDLE_HALF, vy1);
    const float vx = sel(hit, -vx0, vx0);

    // Serve draw is computed unconditionally; the stream only advances when a
    // goal actually happened, matching the scalar path.
    const UniformDraw u = rng_uniform(RngState{b.rng[i]});
    const float serve_vy = (2.0f * u.value - 1.0f) * VY0;
    bx = sel(goal, 0.5f, bx);
    const float by = sel(goal, 0.5f, by1);
    vy = sel(goal, serve_vy, vy);

    const int32_t pp = b.player_points[i] + (goal_l ? 1 : 0);
    const int32_t op = b.opponent_points[i] + (goal_r ? 1 : 0);
    const int32_t sc = b.step_count[i] + 1;

    b.ball_x[i] = bx;
    b.ball_y[i] = by;
    b.ball_vx[i] = vx;
    b.ball_vy[i] = vy;
    b.player_y[i] = py;
    b.opponent_y[i] = oy;
    b.player_points[i] = pp;
    b.opponent_points[i] = op;
    b.step_count[i] = sc;
    b.rng[i] = goal ? u.next.counter : b.rng[i];

    write_obs(b, i, out.observations.data() + i * OBS_LEN);
    out.rewards[i] = sel(goal_l, 1.0f, sel(goal_r, -1.0f, 0.0f));
    out.dones[i] = (pp == WIN_SCORE || op == WIN_SCORE || sc >= MAX_STEPS) ? 1 : 0;
}

}  // namespace

void pong_reset_batch(PongBatch& b, std::span<const RngState> streams,
                      std::span<float> obs_out, ThreadPool* pool) {
    b.resize(streams.size());
    if (obs_out.size() != streams.size() * OBS_LEN) {
        throw ContractViolation("pong_reset_batch: observation buffer size mismatch");
    }
    auto body = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            b.put(i, pong_reset(streams[i]));
            write_obs(b, i, obs_out.data() + i * OBS_LEN);
        }
    };
    if (pool) {
        pool->parallel_for(streams.size(), body);
    } else {
        body(0, streams.size());
    }
}

void pong_step_batch(PongBatch& b, std::span<const int32_t> actions, BatchOut out,
                     ThreadPool* pool) {
    const size_t n = b.size();
    if (actions.size() != n) {
        throw ContractViolation("pong_step_batch: actions length does not match batch");
    }
    if (out.observations.size() != n * OBS_LEN || out.rewards.size() != n ||
        out.dones.size() != n) {
        throw ContractViolation("pong_step_batch: output buffer size mismatch");
    }
    if (n == 0) return;
    auto body = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) step_element(b, i, actions[i], out);
    };
    if (pool) {
        pool->parallel_for(n, body);
    } else {
        body(0, n);
    }
}

}  // namespace twinenv::pong
