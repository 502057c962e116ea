#include <doctest.h>

#include <bit>
#include <cmath>

#include "twinenv/cartpole.hpp"

using namespace twinenv;
using namespace twinenv::cartpole;

namespace {

CartPoleState zero_state() {
    CartPoleState s = cartpole_reset(derive_stream(5, 0));
    s.x = s.x_dot = s.theta = s.theta_dot = 0.0f;
    return s;
}

// Independent double-precision evaluation of the stated dynamics.
void oracle_step(double st[4], int action) {
    const double force = action == 1 ? 10.0 : -10.0;
    const double ct = std::cos(st[2]);
    const double sn = std::sin(st[2]);
    const double temp = (force + 0.05 * st[3] * st[3] * sn) / 1.1;
    const double theta_acc =
        (9.8 * sn - ct * temp) / (0.5 * (4.0 / 3.0 - 0.1 * ct * ct / 1.1));
    const double x_acc = temp - 0.05 * theta_acc * ct / 1.1;
    st[0] += 0.02 * st[1];
    st[1] += 0.02 * x_acc;
    st[2] += 0.02 * st[3];
    st[3] += 0.02 * theta_acc;
}

bool bit_equal(float a, float b) {
    return std::bit_cast<uint32_t>(a) == std::bit_cast<uint32_t>(b);
}

}  // namespace

TEST_CASE("upright push-right matches the hand-evaluated dynamics") {
    const StepResult r = cartpole_step(zero_state(), 1);
    // temp = 10/1.1, theta_acc = -600/41 = -14.6341, x_acc = 400/41 = 9.7561
    CHECK(r.state.x == 0.0f);
    CHECK(r.state.x_dot == doctest::Approx(0.19512195).epsilon(1e-6));
    CHECK(r.state.theta == 0.0f);
    CHECK(r.state.theta_dot == doctest::Approx(-0.29268293).epsilon(1e-6));
    CHECK(r.outcome.reward == 1.0f);
    CHECK_FALSE(r.outcome.done);

    double st[4] = {0, 0, 0, 0};
    oracle_step(st, 1);
    CHECK(r.state.x_dot == doctest::Approx(st[1]).epsilon(1e-6));
    CHECK(r.state.theta_dot == doctest::Approx(st[3]).epsilon(1e-6));
}

TEST_CASE("multi-step trajectory tracks the double-precision oracle") {
    CartPoleState s = zero_state();
    double st[4] = {0, 0, 0, 0};
    for (int t = 0; t < 30; ++t) {
        const int action = (t % 3) == 0 ? 0 : 1;
        const StepResult r = cartpole_step(s, action);
        s = r.state;
        oracle_step(st, action);
        CHECK(s.x == doctest::Approx(st[0]).epsilon(1e-4));
        CHECK(s.x_dot == doctest::Approx(st[1]).epsilon(1e-4));
        CHECK(s.theta == doctest::Approx(st[2]).epsilon(1e-4));
        CHECK(s.theta_dot == doctest::Approx(st[3]).epsilon(1e-4));
        if (r.outcome.done) break;
    }
}

TEST_CASE("mirrored state and action give the exactly mirrored successor") {
    RngState noise = derive_stream(77, 0);
    for (int i = 0; i < 2000; ++i) {
        CartPoleState s = zero_state();
        auto draw = [&noise](float scale) {
            const UniformDraw u = rng_uniform(noise);
            noise = u.next;
            return (2.0f * u.value - 1.0f) * scale;
        };
        s.x = draw(2.0f);
        s.x_dot = draw(2.0f);
        s.theta = draw(0.2f);
        s.theta_dot = draw(2.0f);
        const int action = (i & 1);

        CartPoleState m = s;
        m.x = -m.x;
        m.x_dot = -m.x_dot;
        m.theta = -m.theta;
        m.theta_dot = -m.theta_dot;

        const StepResult a = cartpole_step(s, action);
        const StepResult b = cartpole_step(m, 1 - action);
        CHECK(bit_equal(b.state.x, -a.state.x));
        CHECK(bit_equal(b.state.x_dot, -a.state.x_dot));
        CHECK(bit_equal(b.state.theta, -a.state.theta));
        CHECK(bit_equal(b.state.theta_dot, -a.state.theta_dot));
        CHECK(a.outcome.done == b.outcome.done);
    }
}

TEST_CASE("termination thresholds") {
    CartPoleState s = zero_state();
    s.theta = 0.2f;
    s.theta_dot = 2.0f;
    StepResult r = cartpole_step(s, 1);
    CHECK(r.outcome.done);
    CHECK(r.outcome.reward == 1.0f);  // terminal step still pays

    s = zero_state();
    s.x = 2.39f;
    s.x_dot = 5.0f;
    r = cartpole_step(s, 1);
    CHECK(r.outcome.done);

    s = zero_state();
    s.step_count = MAX_EPISODE_STEPS - 1;
    r = cartpole_step(s, 0);
    CHECK(r.outcome.done);
    CHECK(r.state.step_count == MAX_EPISODE_STEPS);
}

TEST_CASE("reset distribution: range, purity, centering") {
    const RngState stream = derive_stream(3, 1);
    CHECK(cartpole_reset(stream) == cartpole_reset(stream));

    double mean[4] = {0, 0, 0, 0};
    const int n = 1000;
    for (uint32_t i = 0; i < n; ++i) {
        const CartPoleState s = cartpole_reset(derive_stream(2024, i));
        CHECK(std::fabs(s.x) <= RESET_BOUND);
        CHECK(std::fabs(s.x_dot) <= RESET_BOUND);
        CHECK(std::fabs(s.theta) <= RESET_BOUND);
        CHECK(std::fabs(s.theta_dot) <= RESET_BOUND);
        CHECK(s.step_count == 0);
        mean[0] += s.x;
        mean[1] += s.x_dot;
        mean[2] += s.theta;
        mean[3] += s.theta_dot;
    }
    for (double& m : mean) {
        m /= n;
        CHECK(std::fabs(m) <= 0.01);
    }
}

TEST_CASE("constant-action policies fall quickly; returns bounded by the horizon") {
    for (int action = 0; action <= 1; ++action) {
        CartPoleState s = cartpole_reset(derive_stream(88, action));
        int steps = 0;
        while (true) {
            const StepResult r = cartpole_step(s, action);
            s = r.state;
            ++steps;
            if (r.outcome.done) break;
        }
        CHECK(steps < 100);
        CHECK(steps <= MAX_EPISODE_STEPS);
    }
}

TEST_CASE("invalid action is a contract violation") {
    CHECK_THROWS_AS((void)cartpole_step(zero_state(), 2), ContractViolation);
}
