#include "twinenv/bench.hpp"

#include <chrono>
#include <cmath>

#include "twinenv/thread_pool.hpp"

namespace twinenv {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Pre-generated random actions, cycled row by row; 257 rows is prime so the
// cycle never locks onto episode lengths.
struct ActionTable {
    static constexpr int64_t ROWS = 257;
    std::vector<int32_t> data;
    int64_t batch = 0;

    ActionTable(uint64_t base_seed, int64_t batch_size, int32_t action_count)
        : data(static_cast<size_t>(ROWS * batch_size)), batch(batch_size) {
        RngState stream = derive_stream(base_seed ^ 0xB7E151628AED2A6Bull, 0);
        for (auto& a : data) {
            const RngDraw d = rng_next(stream);
            stream = d.next;
            a = static_cast<int32_t>(d.value % static_cast<uint64_t>(action_count));
        }
    }

    std::span<const int32_t> row(int64_t step) const {
        return {data.data() + (step % ROWS) * batch, static_cast<size_t>(batch)};
    }
};

void reset_for_bench(Backend& backend, int64_t batch_size, uint64_t base_seed) {
    std::vector<RngState> streams(batch_size);
    for (int64_t i = 0; i < batch_size; ++i) {
        streams[i] = derive_stream(base_seed, static_cast<uint32_t>(i));
    }
    backend.reset(streams);
}

struct MeanStd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanStd mean_std(std::span<const double> xs) {
    MeanStd m;
    for (const double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (const double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return m;
}

}  // namespace

ThroughputReport measure_sps(Backend& backend, int64_t batch_size, int64_t steps_per_run,
                             int32_t n_runs, uint64_t base_seed) {
    if (batch_size < 1) throw ConfigError("measure_sps: batch_size must be >= 1");
    if (n_runs < 2) throw ConfigError("measure_sps: n_runs must be >= 2");
    if (steps_per_run < 1) throw ConfigError("measure_sps: steps_per_run must be >= 1");

    const ActionTable actions(base_seed, batch_size, backend.action_count());
    reset_for_bench(backend, batch_size, base_seed);

    ThroughputReport report;
    report.backend_id = backend.id();
    report.batch_size = batch_size;
    report.steps_per_run = steps_per_run;
    report.warmup_steps = steps_per_run;
    report.n_runs = n_runs;

    int64_t global_step = 0;

    // warm-up run, untimed
    for (int64_t t = 0; t < steps_per_run; ++t) backend.step(actions.row(global_step++));

    for (int32_t r = 0; r < n_runs; ++r) {
        const auto t0 = Clock::now();
        for (int64_t t = 0; t < steps_per_run; ++t) backend.step(actions.row(global_step++));
        const double elapsed = seconds_since(t0);
        if (elapsed < MIN_RUN_SECONDS) {
            throw ConfigError(
                "measure_sps: run finished in " + std::to_string(elapsed) +
                " s, under the " + std::to_string(MIN_RUN_SECONDS) +
                " s timing guard; increase steps_per_run");
        }
        report.run_samples.push_back(static_cast<double>(batch_size) *
                                     static_cast<double>(steps_per_run) / elapsed);
    }

    const MeanStd m = mean_std(report.run_samples);
    report.mean_sps = m.mean;
    report.std_sps = m.sd;
    report.cv = m.sd / m.mean;
    report.stable = report.cv <= SPS_STABLE_CV;
    return report;
}

std::vector<ThroughputReport> sweep_batches(Backend& backend,
                                            std::span<const int64_t> batch_sizes,
                                            int64_t steps_per_run, int32_t n_runs,
                                            uint64_t base_seed) {
    if (batch_sizes.empty()) throw ConfigError("sweep_batches: batch list is empty");
    for (size_t i = 1; i < batch_sizes.size(); ++i) {
        if (batch_sizes[i] <= batch_sizes[i - 1]) {
            throw ConfigError("sweep_batches: batch list must be ascending");
        }
    }
    std::vector<ThroughputReport> reports;
    reports.reserve(batch_sizes.size());
    for (const int64_t b : batch_sizes) {
        const int64_t steps =
            steps_per_run > 0 ? steps_per_run
                              : calibrate_steps_per_run(backend, b, 0.25, base_seed);
        reports.push_back(measure_sps(backend, b, steps, n_runs, base_seed));
    }
    return reports;
}

int64_t calibrate_steps_per_run(Backend& backend, int64_t batch_size, double target_seconds,
                                uint64_t base_seed) {
    if (batch_size < 1) throw ConfigError("calibrate: batch_size must be >= 1");
    const ActionTable actions(base_seed, batch_size, backend.action_count());
    reset_for_bench(backend, batch_size, base_seed);

    int64_t probe = 16;
    double elapsed = 0.0;
    int64_t step = 0;
    while (true) {
        const auto t0 = Clock::now();
        for (int64_t t = 0; t < probe; ++t) backend.step(actions.row(step++));
        elapsed = seconds_since(t0);
        if (elapsed >= 0.02 || probe >= (int64_t{1} << 40)) break;
        probe *= 4;
    }
    const double per_step = elapsed / static_cast<double>(probe);
    const double wanted = std::max(target_seconds, MIN_RUN_SECONDS * 2.0);
    return std::max<int64_t>(1, static_cast<int64_t>(wanted / per_step) + 1);
}

BreakdownReport measure_breakdown(Backend& backend, int64_t batch_size,
                                  int64_t synthetic_param_count, int64_t steps,
                                  uint64_t base_seed) {
    if (synthetic_param_count < 1) {
        throw ConfigError("measure_breakdown: synthetic_param_count must be >= 1");
    }
    if (batch_size < 1 || steps < 1) {
        throw ConfigError("measure_breakdown: batch_size and steps must be >= 1");
    }

    const ActionTable actions(base_seed, batch_size, backend.action_count());
    reset_for_bench(backend, batch_size, base_seed);

    // Weight buffer reused cyclically so the multiply-add count tracks
    // synthetic_param_count without storing that many weights.
    const size_t weights_len =
        static_cast<size_t>(std::min<int64_t>(synthetic_param_count, int64_t{1} << 22));
    std::vector<float> weights(weights_len);
    {
        RngState stream = derive_stream(base_seed ^ 0x3C6EF372FE94F82Aull, 0);
        for (auto& w : weights) {
            const UniformDraw u = rng_uniform(stream);
            stream = u.next;
            w = u.value - 0.5f;
        }
    }
    std::vector<float> sink(batch_size, 0.0f);
    const int32_t obs_len = backend.obs_len();
    const uint32_t obs_mask = obs_len == 8 ? 7u : 3u;  // obs lengths are powers of two

    ThreadPool& pool = ThreadPool::global();
    double env_seconds = 0.0;
    double policy_seconds = 0.0;

    for (int64_t t = 0; t < steps; ++t) {
        auto t0 = Clock::now();
        backend.step(actions.row(t));
        env_seconds += seconds_since(t0);

        const auto obs = backend.observations();
        t0 = Clock::now();
        pool.parallel_for(static_cast<size_t>(batch_size), [&](size_t begin, size_t end) {
            for (size_t i = begin; i < end; ++i) {
                const float* x = obs.data() + i * obs_len;
                float acc = sink[i];
                int64_t remaining = synthetic_param_count;
                while (remaining > 0) {
                    const size_t chunk = static_cast<size_t>(
                        std::min<int64_t>(remaining, static_cast<int64_t>(weights_len)));
                    for (size_t k = 0; k < chunk; ++k) {
                        acc += weights[k] * x[k & obs_mask];
                    }
                    remaining -= static_cast<int64_t>(chunk);
                }
                sink[i] = acc;
            }
        });
        policy_seconds += seconds_since(t0);
    }

    // keep the synthetic work observable
    volatile float guard = 0.0f;
    for (const float s : sink) guard = guard + s;
    (void)guard;

    BreakdownReport report;
    report.synthetic_param_count = synthetic_param_count;
    report.batch_size = batch_size;
    report.steps = steps;
    const double total = env_seconds + policy_seconds;
    report.env_time_fraction = env_seconds / total;
    report.policy_time_fraction = policy_seconds / total;
    return report;
}

void replay_sps_workload(Backend& backend, int64_t batch_size, int64_t steps_per_run,
                         int32_t n_runs, uint64_t base_seed) {
    const ActionTable actions(base_seed, batch_size, backend.action_count());
    reset_for_bench(backend, batch_size, base_seed);
    const int64_t total = steps_per_run * (int64_t{1} + n_runs);
    for (int64_t t = 0; t < total; ++t) backend.step(actions.row(t));
}

bool sps_stability_check(Backend& backend, int64_t batch_size, int64_t steps_per_run,
                         int32_t n_runs, uint64_t base_seed) {
    const ThroughputReport a = measure_sps(backend, batch_size, steps_per_run, n_runs, base_seed);
    const ThroughputReport b =
        measure_sps(backend, batch_size, 2 * steps_per_run, n_runs, base_seed);
    const double rel = std::fabs(b.mean_sps - a.mean_sps) / a.mean_sps;
    return rel < 3.0 * std::max(a.cv, 1e-3);
}

json ThroughputReport::to_json() const {
    return json{{"backend_id", backend_id},
                {"batch_size", batch_size},
                {"steps_per_run", steps_per_run},
                {"warmup_steps", warmup_steps},
                {"n_runs", n_runs},
                {"run_samples", run_samples},
                {"mean_sps", mean_sps},
                {"std_sps", std_sps},
                {"cv", cv},
                {"stable", stable}};
}

json BreakdownReport::to_json() const {
    return json{{"env_time_fraction", env_time_fraction},
                {"policy_time_fraction", policy_time_fraction},
                {"synthetic_param_count", synthetic_param_count},
                {"batch_size", batch_size},
                {"steps", steps}};
}

}  // namespace twinenv
