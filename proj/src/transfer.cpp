#include "twinenv/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace twinenv {

using nlohmann::json;

namespace {

// Steps all instances in lockstep until each has finished `episodes` episodes
// (finished instances keep ticking through auto-reset; their extra episodes
// are ignored). Returns the per-instance mean episode return.
std::vector<double> mean_returns(Backend& env, std::span<Policy> policies,
                                 std::span<const RngState> streams, int32_t episodes) {
    const size_t n = streams.size();
    env.reset(streams);

    std::vector<int32_t> actions(n);
    std::vector<double> ep_return(n, 0.0);
    std::vector<double> total(n, 0.0);
    std::vector<int32_t> episodes_done(n, 0);
    size_t finished = 0;
    const int32_t obs_len = env.obs_len();

    while (finished < n) {
        const auto obs = env.observations();
        for (size_t i = 0; i < n; ++i) {
            actions[i] = policy_act(policies[i], obs.subspan(i * obs_len, obs_len));
        }
        env.step(actions);
        const auto rewards = env.rewards();
        const auto dones = env.dones();
        for (size_t i = 0; i < n; ++i) {
            if (episodes_done[i] >= episodes) continue;
            ep_return[i] += rewards[i];
            if (dones[i]) {
                total[i] += ep_return[i];
                ep_return[i] = 0.0;
                if (++episodes_done[i] == episodes) ++finished;
            }
        }
    }

    std::vector<double> means(n);
    for (size_t i = 0; i < n; ++i) means[i] = total[i] / static_cast<double>(episodes);
    return means;
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

std::vector<double> evaluate_policy(Backend& env, const Policy& policy, int32_t n_seeds,
                                    uint64_t base_seed) {
    if (n_seeds < 2) throw ConfigError("evaluate_policy: n_seeds must be >= 2");
    std::vector<RngState> streams(n_seeds);
    std::vector<Policy> policies(n_seeds, policy);
    for (int32_t i = 0; i < n_seeds; ++i) {
        streams[i] = derive_stream(base_seed, static_cast<uint32_t>(i));
        if (policy.kind == PolicyKind::Random) {
            policies[i].rng = derive_stream(policy.rng.counter, static_cast<uint32_t>(i));
        }
    }
    return mean_returns(env, policies, streams, EVAL_EPISODES);
}

Policy train_cem(Backend& env, int32_t generations, int32_t population, float elite_frac,
                 uint64_t seed) {
    if (population < 4) throw ConfigError("train_cem: population must be >= 4");
    if (!(elite_frac > 0.0f && elite_frac <= 0.5f)) {
        throw ConfigError("train_cem: elite_frac must lie in (0, 0.5]");
    }
    if (generations < 0) throw ConfigError("train_cem: generations must be >= 0");

    const int32_t dim = (env.obs_len() + 1) * env.action_count();
    std::vector<double> mean(dim, 0.0);
    std::vector<double> sdev(dim, 1.0);

    RngState noise = derive_stream(seed, 0);
    auto gauss = [&noise] {
        const UniformDraw u1 = rng_uniform(noise);
        const UniformDraw u2 = rng_uniform(u1.next);
        noise = u2.next;
        const double r = std::sqrt(-2.0 * std::log(1.0 - static_cast<double>(u1.value)));
        return r * std::cos(2.0 * 3.14159265358979323846 * static_cast<double>(u2.value));
    };

    const int32_t elite_n =
        std::max<int32_t>(1, static_cast<int32_t>(static_cast<float>(population) * elite_frac));
    std::vector<Policy> policies(population);
    std::vector<RngState> streams(population);
    std::vector<int32_t> order(population);

    for (int32_t g = 0; g < generations; ++g) {
        for (int32_t c = 0; c < population; ++c) {
            Policy& p = policies[c];
            p.kind = PolicyKind::Linear;
            p.obs_len = env.obs_len();
            p.action_count = env.action_count();
            p.parameters.resize(dim);
            for (int32_t k = 0; k < dim; ++k) {
                p.parameters[k] = static_cast<float>(mean[k] + sdev[k] * gauss());
            }
        }
        // Common episode streams across candidates within a generation.
        const RngState gen_stream = derive_stream(seed, static_cast<uint32_t>(1 + g));
        std::fill(streams.begin(), streams.end(), gen_stream);

        const std::vector<double> scores = mean_returns(env, policies, streams, EVAL_EPISODES);
        for (const double s : scores) {
            if (!std::isfinite(s)) throw ContractViolation("train_cem: non-finite return");
        }

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&scores](int32_t a, int32_t b) {
            return scores[a] > scores[b];
        });

        for (int32_t k = 0; k < dim; ++k) {
            double m = 0.0;
            for (int32_t e = 0; e < elite_n; ++e) {
                m += policies[order[e]].parameters[k];
            }
            m /= elite_n;
            double var = 0.0;
            for (int32_t e = 0; e < elite_n; ++e) {
                const double d = policies[order[e]].parameters[k] - m;
                var += d * d;
            }
            mean[k] = m;
            // small floor keeps later generations exploring
            sdev[k] = std::sqrt(var / elite_n) + 1e-3;
        }
    }

    std::vector<float> final_params(dim);
    for (int32_t k = 0; k < dim; ++k) final_params[k] = static_cast<float>(mean[k]);
    return make_linear_policy(std::move(final_params), env.obs_len(), env.action_count());
}

TransferRow cross_backend_transfer(Backend& env_ref, Backend& env_perf, bool train_on_perf,
                                   const TransferPolicySpec& policy_spec, TostConfig tost,
                                   int32_t n_seeds, uint64_t base_seed) {
    if (env_ref.env_name() != env_perf.env_name() ||
        env_ref.obs_len() != env_perf.obs_len() ||
        env_ref.action_count() != env_perf.action_count()) {
        throw ConfigError("cross_backend_transfer: twins expose different schemas");
    }

    Backend& train_env = train_on_perf ? env_perf : env_ref;
    Policy policy;
    switch (policy_spec.kind) {
        case PolicyKind::Tracker:
            policy = make_tracker_policy();
            break;
        case PolicyKind::Linear:
            policy = train_cem(train_env, policy_spec.cem_generations,
                               policy_spec.cem_population, policy_spec.cem_elite_frac,
                               policy_spec.train_seed);
            break;
        case PolicyKind::Random:
            policy = make_random_policy(policy_spec.train_seed, train_env.action_count());
            break;
    }

    TransferRow row;
    row.train_backend = train_env.id();
    row.perf_returns = evaluate_policy(env_perf, policy, n_seeds, base_seed);
    row.ref_returns = evaluate_policy(env_ref, policy, n_seeds, base_seed);

    const MeanStd p = mean_std(row.perf_returns);
    const MeanStd r = mean_std(row.ref_returns);
    row.eval_perf_mean = p.mean;
    row.eval_perf_std = p.sd;
    row.eval_ref_mean = r.mean;
    row.eval_ref_std = r.sd;
    row.tost = tost_equivalence(row.perf_returns, row.ref_returns, tost);
    row.equivalent = row.tost.equivalent;
    row.vectors_bit_identical = row.perf_returns == row.ref_returns;
    return row;
}

json TransferRow::to_json() const {
    return json{{"train_backend", train_backend},
                {"eval_perf_mean", eval_perf_mean},
                {"eval_perf_std", eval_perf_std},
                {"eval_ref_mean", eval_ref_mean},
                {"eval_ref_std", eval_ref_std},
                {"equivalent", equivalent},
                {"vectors_bit_identical", vectors_bit_identical},
                {"tost", tost.to_json()},
                {"perf_returns", perf_returns},
                {"ref_returns", ref_returns}};
}

}  // namespace twinenv
