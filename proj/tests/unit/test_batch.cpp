#include <doctest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "twinenv/backend.hpp"
#include "twinenv/cartpole.hpp"
#include "twinenv/pong.hpp"
#include "twinenv/thread_pool.hpp"

using namespace twinenv;

namespace {

std::vector<RngState> streams_for(uint64_t seed, size_t n) {
    std::vector<RngState> streams(n);
    for (size_t i = 0; i < n; ++i) streams[i] = derive_stream(seed, static_cast<uint32_t>(i));
    return streams;
}

std::vector<int32_t> random_actions(RngState& stream, size_t n, int32_t count) {
    std::vector<int32_t> actions(n);
    for (auto& a : actions) {
        const RngDraw d = rng_next(stream);
        stream = d.next;
        a = static_cast<int32_t>(d.value % static_cast<uint64_t>(count));
    }
    return actions;
}

bool bit_equal(float a, float b) {
    return std::bit_cast<uint32_t>(a) == std::bit_cast<uint32_t>(b);
}

void drive_twins_bitexact(const std::string& ref_id, const std::string& perf_id, size_t batch,
                          int steps) {
    auto ref = make_backend(ref_id);
    auto perf = make_backend(perf_id);
    const auto streams = streams_for(7, batch);
    ref->reset(streams);
    perf->reset(streams);

    RngState action_stream = derive_stream(0xACC, 0);
    for (int t = 0; t < steps; ++t) {
        const auto actions = random_actions(action_stream, batch, ref->action_count());
        ref->step(actions);
        perf->step(actions);
        const auto oa = ref->observations();
        const auto ob = perf->observations();
        REQUIRE(oa.size() == ob.size());
        for (size_t k = 0; k < oa.size(); ++k) REQUIRE(bit_equal(oa[k], ob[k]));
        for (size_t i = 0; i < batch; ++i) {
            REQUIRE(bit_equal(ref->rewards()[i], perf->rewards()[i]));
            REQUIRE(ref->dones()[i] == perf->dones()[i]);
        }
    }
    for (size_t i = 0; i < batch; ++i) REQUIRE(ref->state_json(i) == perf->state_json(i));
}

}  // namespace

TEST_CASE("pong batched backend is bit-exact with the scalar reference") {
    drive_twins_bitexact("pong-ref", "pong-perf", 256, 400);
}

TEST_CASE("pong batch of one equals the scalar step") {
    drive_twins_bitexact("pong-ref", "pong-perf", 1, 50);
}

TEST_CASE("cartpole strict-order batch is bit-exact with the scalar reference") {
    drive_twins_bitexact("cartpole-ref", "cartpole-perf-strict", 128, 200);
}

TEST_CASE("empty batch is accepted") {
    auto perf = make_backend("pong-perf");
    perf->reset({});
    perf->step({});
    CHECK(perf->size() == 0);
    CHECK(perf->observations().empty());
}

TEST_CASE("mismatched action length is a contract violation") {
    auto perf = make_backend("pong-perf");
    perf->reset(streams_for(1, 8));
    const std::vector<int32_t> actions(7, 0);
    CHECK_THROWS_AS(perf->step(actions), ContractViolation);

    auto ref = make_backend("cartpole-ref");
    ref->reset(streams_for(1, 4));
    CHECK_THROWS_AS(ref->step(actions), ContractViolation);
}

TEST_CASE("cartpole reordered batch stays within 1e-5 of the scalar per step") {
    const size_t batch = 1024;
    auto ref = make_backend("cartpole-ref");
    auto perf = make_backend("cartpole-perf");

    // random alive states loaded into both twins
    RngState noise = derive_stream(31337, 0);
    auto uniform = [&noise](double lo, double hi) {
        const UniformDraw u = rng_uniform(noise);
        noise = u.next;
        return lo + (hi - lo) * static_cast<double>(u.value);
    };
    const auto streams = streams_for(2, batch);
    ref->reset(streams);
    perf->reset(streams);
    for (size_t i = 0; i < batch; ++i) {
        nlohmann::json st = ref->state_json(i);
        st["x"] = uniform(-2.3, 2.3);
        st["x_dot"] = uniform(-2.0, 2.0);
        st["theta"] = uniform(-0.2, 0.2);
        st["theta_dot"] = uniform(-2.5, 2.5);
        ref->load_state_json(i, st);
        perf->load_state_json(i, st);
    }

    RngState action_stream = derive_stream(0xACE, 0);
    const auto actions = random_actions(action_stream, batch, 2);
    ref->step(actions);
    perf->step(actions);

    double max_diff = 0.0;
    const auto oa = ref->observations();
    const auto ob = perf->observations();
    for (size_t k = 0; k < oa.size(); ++k) {
        max_diff = std::max(max_diff, std::fabs(double(oa[k]) - double(ob[k])));
    }
    CHECK(max_diff <= 1e-5);
    CHECK(max_diff > 0.0);  // the reordered kernel is genuinely different
}

TEST_CASE("batched kernels are deterministic across thread counts") {
    ThreadPool pool1(1);
    ThreadPool pool3(3);

    const auto streams = streams_for(11, 512);
    pong::PongBatch a, b;
    std::vector<float> obs_a(512 * pong::OBS_LEN), obs_b(512 * pong::OBS_LEN);
    std::vector<float> rew_a(512), rew_b(512);
    std::vector<uint8_t> done_a(512), done_b(512);
    pong::pong_reset_batch(a, streams, obs_a, &pool1);
    pong::pong_reset_batch(b, streams, obs_b, &pool3);

    RngState action_stream = derive_stream(0xBEE, 0);
    for (int t = 0; t < 100; ++t) {
        const auto actions = random_actions(action_stream, 512, 3);
        pong::pong_step_batch(a, actions, {obs_a, rew_a, done_a}, &pool1);
        pong::pong_step_batch(b, actions, {obs_b, rew_b, done_b}, &pool3);
    }
    for (size_t k = 0; k < obs_a.size(); ++k) REQUIRE(bit_equal(obs_a[k], obs_b[k]));
    for (size_t i = 0; i < 512; ++i) {
        REQUIRE(a.rng[i] == b.rng[i]);
        REQUIRE(bit_equal(a.ball_vy[i], b.ball_vy[i]));
    }
}

TEST_CASE("twin backends expose identical interfaces") {
    for (const std::string env : {"pong", "cartpole"}) {
        auto ref = make_backend(reference_backend_for_env(env));
        auto perf = make_backend(performance_backend_for_env(env));
        CHECK(ref->env_name() == perf->env_name());
        CHECK(ref->obs_len() == perf->obs_len());
        CHECK(ref->action_count() == perf->action_count());
        const auto na = ref->obs_component_names();
        const auto nb = perf->obs_component_names();
        REQUIRE(na.size() == nb.size());
        for (size_t i = 0; i < na.size(); ++i) CHECK(std::string(na[i]) == nb[i]);
    }
}

TEST_CASE("state json round-trips through load") {
    auto ref = make_backend("pong-ref");
    ref->reset(streams_for(21, 2));
    const std::vector<int32_t> actions{1, 2};
    for (int t = 0; t < 17; ++t) ref->step(actions);
    const nlohmann::json snap = ref->state_json(1);

    auto other = make_backend("pong-perf");
    other->reset(streams_for(0, 2));
    other->load_state_json(0, snap);
    CHECK(other->state_json(0) == snap);
}

TEST_CASE("unknown backend id is a config error") {
    CHECK_THROWS_AS((void)make_backend("pong-quantum"), ConfigError);
    CHECK(is_backend_id("pong-ref"));
    CHECK_FALSE(is_backend_id("nope"));
    CHECK(backend_ids().size() >= 14);
}
