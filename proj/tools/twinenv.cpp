// Command-line front end: verify (L1 -> L2 -> L3 phase gates), transfer (L4
// cross-backend policy transfer with TOST), bench (throughput protocol and
// breakdown), report (merge emitted JSON into one summary).
//
// Exit codes: 0 success, 1 verification/transfer failure, 2 usage or config
// error, 3 bench instability. All wall-clock-derived values live in "timing"
// sub-objects; everything else in the emitted JSON is byte-reproducible.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "twinenv/backend.hpp"
#include "twinenv/bench.hpp"
#include "twinenv/mutants.hpp"
#include "twinenv/transfer.hpp"
#include "twinenv/verify.hpp"

namespace {

using nlohmann::json;
using namespace twinenv;

constexpr int EXIT_VERIFY_FAIL = 1;
constexpr int EXIT_USAGE = 2;
constexpr int EXIT_BENCH_UNSTABLE = 3;

using KV = std::map<std::string, std::string>;

KV load_config_file(const std::string& path) {
    KV kv;
    if (path.empty()) return kv;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

// Flags win over config file entries; config entries win over defaults.
struct Options {
    KV file;

    std::string pick(const std::string& flag_value, bool flag_set, const std::string& key,
                     const std::string& fallback) const {
        if (flag_set) return flag_value;
        const auto it = file.find(key);
        return it != file.end() ? it->second : fallback;
    }
};

int64_t to_i64(const std::string& s, const std::string& what) {
    try {
        return std::stoll(s);
    } catch (...) {
        throw ConfigError("invalid integer for " + what + ": " + s);
    }
}

uint64_t to_u64(const std::string& s, const std::string& what) {
    try {
        return std::stoull(s);
    } catch (...) {
        throw ConfigError("invalid integer for " + what + ": " + s);
    }
}

double to_dbl(const std::string& s, const std::string& what) {
    try {
        return std::stod(s);
    } catch (...) {
        throw ConfigError("invalid number for " + what + ": " + s);
    }
}

std::vector<int64_t> parse_batches(const std::string& s) {
    std::vector<int64_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(to_i64(tok, "--batches"));
    }
    if (out.empty()) throw ConfigError("empty batch list");
    return out;
}

void write_json_file(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write JSON report to " + path);
    out << j.dump(2) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string gate_path_for(const Options& opts, const std::string& env) {
    const auto it = opts.file.find("gate_dir");
    const std::string dir = it != opts.file.end() ? it->second : ".";
    return dir + "/twinenv-gate-" + env + ".json";
}

struct CommonArgs {
    std::string env;
    std::string backend_a, backend_b;
    int64_t episodes = 100;
    uint64_t seed = 0;
    ComparisonMode mode;
    std::string json_path;
};

// ---------------------------------------------------------------------------

int cmd_verify(const Options& opts, const CommonArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    auto a = make_backend(args.backend_a);
    auto b = make_backend(args.backend_b);
    if (a->env_name() != args.env || b->env_name() != args.env) {
        throw ConfigError("backend does not implement environment '" + args.env + "'");
    }

    json phases = json::array();
    bool all_pass = true;
    std::string repair_text;

    std::printf("twinenv verify: %s (%s vs %s), mode %s, episodes %lld\n", args.env.c_str(),
                args.backend_a.c_str(), args.backend_b.c_str(),
                mode_name(args.mode).c_str(), static_cast<long long>(args.episodes));

    // Phase gates: a later level never runs after an earlier failure.
    const auto cases = property_cases_for(args.env);
    const SuiteReport l1a = run_property_suite(*a, cases);
    const SuiteReport l1b = run_property_suite(*b, cases);
    const bool l1_pass = l1a.passed() && l1b.passed();
    phases.push_back(json{{"level", "L1"},
                          {"status", l1_pass ? "pass" : "fail"},
                          {"cases", static_cast<int>(cases.size())},
                          {"reports", json::array({l1a.to_json(), l1b.to_json()})}});
    std::printf("  L1 property tests      %2zu cases      %s\n", cases.size(),
                l1_pass ? "pass" : "FAIL");
    all_pass = l1_pass;

    if (all_pass) {
        const auto scenarios = interaction_scenarios_for(args.env);
        const SuiteReport l2a = run_interaction_suite(*a, scenarios);
        const SuiteReport l2b = run_interaction_suite(*b, scenarios);
        const bool l2_pass = l2a.passed() && l2b.passed();
        phases.push_back(json{{"level", "L2"},
                              {"status", l2_pass ? "pass" : "fail"},
                              {"cases", static_cast<int>(scenarios.size())},
                              {"reports", json::array({l2a.to_json(), l2b.to_json()})}});
        std::printf("  L2 interaction tests   %2zu scenarios  %s\n", scenarios.size(),
                    l2_pass ? "pass" : "FAIL");
        all_pass = l2_pass;
    }

    if (all_pass) {
        RandomActionSource actions(args.seed, a->action_count());
        const RolloutComparison cmp =
            compare_rollouts(*a, *b, args.episodes, args.seed, args.mode, actions);
        json phase{{"level", "L3"},
                   {"status", cmp.passed ? "pass" : "fail"},
                   {"episodes", cmp.episodes},
                   {"steps_compared", cmp.steps_compared}};
        if (cmp.divergence) {
            phase["divergence"] = cmp.divergence->to_json();
            repair_text =
                cmp.divergence->repair_text(args.backend_a, args.backend_b, args.mode);
        }
        phases.push_back(std::move(phase));
        std::printf("  L3 rollout comparison  %lld episodes, %lld steps  %s\n",
                    static_cast<long long>(cmp.episodes),
                    static_cast<long long>(cmp.steps_compared),
                    cmp.passed ? "pass" : "FAIL");
        all_pass = cmp.passed;
    }

    json report{{"report_type", "verify"},
                {"environment", args.env},
                {"backend_a", args.backend_a},
                {"backend_b", args.backend_b},
                {"mode", {{"kind", mode_name(args.mode)}, {"epsilon", args.mode.epsilon}}},
                {"episodes", args.episodes},
                {"base_seed", args.seed},
                {"phases", std::move(phases)},
                {"status", all_pass ? "pass" : "fail"},
                {"timing", {{"elapsed_seconds", seconds_since(t0)}}}};
    write_json_file(args.json_path, report);

    if (!repair_text.empty()) {
        std::printf("\n%s", repair_text.c_str());
    }

    if (all_pass) {
        const std::string gate = gate_path_for(opts, args.env);
        write_json_file(gate, json{{"environment", args.env},
                                   {"backend_a", args.backend_a},
                                   {"backend_b", args.backend_b},
                                   {"episodes", args.episodes},
                                   {"mode", mode_name(args.mode)},
                                   {"status", "pass"}});
        std::printf("result: PASS (gate written to %s)\n", gate.c_str());
        return 0;
    }
    std::printf("result: FAIL\n");
    return EXIT_VERIFY_FAIL;
}

// ---------------------------------------------------------------------------

int cmd_transfer(const Options& opts, const CommonArgs& args, double delta, double alpha,
                 bool force) {
    const auto t0 = std::chrono::steady_clock::now();
    auto ref = make_backend(args.backend_a);
    auto perf = make_backend(args.backend_b);
    if (ref->env_name() != args.env || perf->env_name() != args.env) {
        throw ConfigError("backend does not implement environment '" + args.env + "'");
    }

    if (!force) {
        const std::string gate = gate_path_for(opts, args.env);
        std::ifstream in(gate);
        json g;
        bool ok = false;
        if (in) {
            try {
                in >> g;
                ok = g.value("status", "") == "pass" &&
                     g.value("environment", "") == args.env &&
                     g.value("backend_a", "") == args.backend_a &&
                     g.value("backend_b", "") == args.backend_b;
            } catch (...) {
                ok = false;
            }
        }
        if (!ok) {
            std::fprintf(stderr,
                         "refusing to run transfer: no passing L3 gate for %s vs %s "
                         "(expected %s; run `twinenv verify` first or pass --force)\n",
                         args.backend_a.c_str(), args.backend_b.c_str(), gate.c_str());
            return EXIT_USAGE;
        }
    }

    TransferPolicySpec spec;
    const auto pol_it = opts.file.find("policy");
    std::string policy_name =
        pol_it != opts.file.end() ? pol_it->second : (args.env == "pong" ? "tracker" : "cem");
    if (policy_name == "tracker") {
        spec.kind = PolicyKind::Tracker;
    } else if (policy_name == "cem") {
        spec.kind = PolicyKind::Linear;
    } else if (policy_name == "random") {
        spec.kind = PolicyKind::Random;
    } else {
        throw ConfigError("unknown policy: " + policy_name);
    }
    auto file_or = [&](const char* key, int64_t fallback) {
        const auto it = opts.file.find(key);
        return it != opts.file.end() ? to_i64(it->second, key) : fallback;
    };
    spec.cem_generations = static_cast<int32_t>(file_or("cem_generations", 30));
    spec.cem_population = static_cast<int32_t>(file_or("cem_population", 64));
    const auto ef = opts.file.find("cem_elite_frac");
    if (ef != opts.file.end()) {
        spec.cem_elite_frac = static_cast<float>(to_dbl(ef->second, "cem_elite_frac"));
    }
    spec.train_seed = static_cast<uint64_t>(file_or("train_seed", 0));
    const int32_t n_seeds = static_cast<int32_t>(file_or("n_seeds", 10));

    const TostConfig tost{delta, alpha};
    std::printf("twinenv transfer: %s (%s vs %s), policy %s, delta %g, alpha %g, %d seeds\n",
                args.env.c_str(), args.backend_a.c_str(), args.backend_b.c_str(),
                policy_name.c_str(), delta, alpha, n_seeds);

    const TransferRow on_ref =
        cross_backend_transfer(*ref, *perf, false, spec, tost, n_seeds, args.seed);
    const TransferRow on_perf =
        cross_backend_transfer(*ref, *perf, true, spec, tost, n_seeds, args.seed);

    auto print_row = [](const TransferRow& row) {
        std::printf("  train %-22s eval perf %9.3f +- %-8.3f eval ref %9.3f +- %-8.3f %s%s\n",
                    row.train_backend.c_str(), row.eval_perf_mean, row.eval_perf_std,
                    row.eval_ref_mean, row.eval_ref_std,
                    row.equivalent ? "equivalent" : "NOT equivalent",
                    row.vectors_bit_identical ? " (bit-identical)" : "");
    };
    print_row(on_ref);
    print_row(on_perf);

    const bool pass = on_ref.equivalent && on_perf.equivalent;
    json report{{"report_type", "transfer"},
                {"environment", args.env},
                {"backend_ref", args.backend_a},
                {"backend_perf", args.backend_b},
                {"policy", policy_name},
                {"delta", delta},
                {"alpha", alpha},
                {"n_seeds", n_seeds},
                {"base_seed", args.seed},
                {"rows", json::array({on_ref.to_json(), on_perf.to_json()})},
                {"status", pass ? "pass" : "fail"},
                {"timing", {{"elapsed_seconds", seconds_since(t0)}}}};
    write_json_file(args.json_path, report);

    std::printf("result: %s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : EXIT_VERIFY_FAIL;
}

// ---------------------------------------------------------------------------

int cmd_bench(const CommonArgs& args, const std::vector<int64_t>& batches, int32_t runs,
              int64_t steps) {
    auto baseline = make_backend(args.backend_a);
    auto measured = make_backend(args.backend_b);
    if (baseline->env_name() != args.env || measured->env_name() != args.env) {
        throw ConfigError("backend does not implement environment '" + args.env + "'");
    }

    std::printf("twinenv bench: %s, baseline %s, measured %s, runs %d, steps %s\n",
                args.env.c_str(), args.backend_a.c_str(), args.backend_b.c_str(), runs,
                steps > 0 ? std::to_string(steps).c_str() : "auto");
    std::printf("%-24s %8s %14s %12s %8s %9s %8s\n", "backend", "batch", "mean SPS", "std",
                "cv", "speedup", "stable");

    json rows = json::array();
    bool all_stable = true;

    for (const int64_t batch : batches) {
        ThroughputReport base_rep, perf_rep;
        {
            const int64_t spr =
                steps > 0 ? steps : calibrate_steps_per_run(*baseline, batch, 0.25, args.seed);
            base_rep = measure_sps(*baseline, batch, spr, runs, args.seed);
        }
        {
            const int64_t spr =
                steps > 0 ? steps : calibrate_steps_per_run(*measured, batch, 0.25, args.seed);
            perf_rep = measure_sps(*measured, batch, spr, runs, args.seed);
        }
        const double speedup = perf_rep.mean_sps / base_rep.mean_sps;
        all_stable = all_stable && base_rep.stable && perf_rep.stable;

        auto emit = [&](const ThroughputReport& r, std::optional<double> spd) {
            json timing = r.to_json();
            timing.erase("backend_id");
            timing.erase("batch_size");
            timing.erase("n_runs");
            if (spd) timing["speedup"] = *spd;
            rows.push_back(json{{"backend_id", r.backend_id},
                                {"batch_size", r.batch_size},
                                {"requested_steps", steps > 0 ? json(steps) : json("auto")},
                                {"n_runs", r.n_runs},
                                {"timing", std::move(timing)}});
            char spd_text[32] = "-";
            if (spd) std::snprintf(spd_text, sizeof(spd_text), "%.2fx", *spd);
            std::printf("%-24s %8lld %14.3g %12.3g %7.2f%% %9s %8s\n", r.backend_id.c_str(),
                        static_cast<long long>(r.batch_size), r.mean_sps, r.std_sps,
                        100.0 * r.cv, spd_text, r.stable ? "yes" : "NO");
        };
        emit(base_rep, std::nullopt);
        emit(perf_rep, speedup);
    }

    json report{{"report_type", "bench"},
                {"environment", args.env},
                {"baseline", args.backend_a},
                {"measured", args.backend_b},
                {"n_runs", runs},
                {"base_seed", args.seed},
                {"rows", std::move(rows)},
                {"timing", {{"stable", all_stable}}}};
    write_json_file(args.json_path, report);

    if (!all_stable) {
        std::printf("result: UNSTABLE (a run exceeded cv %.0f%%)\n", 100.0 * SPS_STABLE_CV);
        return EXIT_BENCH_UNSTABLE;
    }
    std::printf("result: PASS\n");
    return 0;
}

// ---------------------------------------------------------------------------

struct EnvSummary {
    json verify;
    json transfer;
    json bench;
};

int cmd_report(const std::vector<std::string>& paths, const std::string& json_path) {
    if (paths.empty()) throw ConfigError("report: no input files given");

    std::map<std::string, EnvSummary> envs;
    for (const std::string& path : paths) {
        std::ifstream in(path);
        if (!in) throw ConfigError("report: cannot open " + path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError("report: malformed JSON in " + path + ": " + e.what());
        }
        const std::string type = j.value("report_type", "");
        const std::string env = j.value("environment", "");
        if (env.empty() || type.empty()) {
            throw ConfigError("report: " + path + " is not a twinenv report");
        }
        EnvSummary& s = envs[env];
        json* slot = nullptr;
        if (type == "verify") slot = &s.verify;
        else if (type == "transfer") slot = &s.transfer;
        else if (type == "bench") slot = &s.bench;
        else throw ConfigError("report: unknown report_type '" + type + "' in " + path);
        if (!slot->is_null()) {
            std::fprintf(stderr, "warning: duplicate %s report for %s; %s wins\n",
                         type.c_str(), env.c_str(), path.c_str());
        }
        *slot = std::move(j);
    }

    std::ostringstream md;
    md << "# Verification summary\n\n";
    md << "| Env | L1 | L2 | L3 ep. | Mode | Xfer | Status |\n";
    md << "|-----|----|----|--------|------|------|--------|\n";

    json merged{{"report_type", "summary"}, {"environments", json::object()}};
    for (const auto& [env, s] : envs) {
        std::string l1 = "-", l2 = "-", l3 = "-", mode = "-", xfer = "-";
        bool ok = true;
        json menv;
        if (!s.verify.is_null()) {
            mode = s.verify["mode"].value("kind", "-");
            if (mode == "epsilon") {
                mode += " (" + json(s.verify["mode"].value("epsilon", 0.0)).dump() + ")";
            }
            for (const json& phase : s.verify["phases"]) {
                const bool pass = phase.value("status", "") == "pass";
                const std::string mark = pass ? "\xE2\x9C\x93" : "\xE2\x9C\x97";
                const std::string level = phase.value("level", "");
                if (level == "L1") l1 = std::to_string(phase.value("cases", 0)) + " " + mark;
                if (level == "L2") l2 = std::to_string(phase.value("cases", 0)) + " " + mark;
                if (level == "L3") {
                    l3 = std::to_string(phase.value("episodes", int64_t{0})) + " " + mark;
                }
                ok = ok && pass;
            }
            menv["verify"] = {{"status", s.verify.value("status", "")},
                              {"mode", mode},
                              {"episodes", s.verify.value("episodes", int64_t{0})}};
        } else {
            ok = false;
        }
        if (!s.transfer.is_null()) {
            const bool pass = s.transfer.value("status", "") == "pass";
            xfer = pass ? "\xE2\x9C\x93" : "\xE2\x9C\x97";
            ok = ok && pass;
            menv["transfer"] = {{"status", s.transfer.value("status", "")},
                                {"policy", s.transfer.value("policy", "")}};
        }
        if (!s.bench.is_null()) {
            menv["bench"] = {{"timing", s.bench.value("rows", json::array())}};
        }
        menv["status"] = ok ? "pass" : "fail";
        merged["environments"][env] = std::move(menv);
        md << "| " << env << " | " << l1 << " | " << l2 << " | " << l3 << " | " << mode
           << " | " << xfer << " | " << (ok ? "\xE2\x9C\x93" : "\xE2\x9C\x97") << " |\n";
    }

    for (const auto& [env, s] : envs) {
        if (s.bench.is_null()) continue;
        md << "\n## Throughput (" << env << ")\n\n";
        md << "| Backend | Batch | Mean SPS | CV | Speedup |\n";
        md << "|---------|-------|----------|----|---------|\n";
        for (const json& row : s.bench["rows"]) {
            const json& t = row["timing"];
            char sps[32], cv[16];
            std::snprintf(sps, sizeof(sps), "%.4g", t.value("mean_sps", 0.0));
            std::snprintf(cv, sizeof(cv), "%.2f%%", 100.0 * t.value("cv", 0.0));
            md << "| " << row.value("backend_id", "") << " | " << row.value("batch_size", 0)
               << " | " << sps << " | " << cv << " | "
               << (t.contains("speedup")
                       ? json(t["speedup"]).dump().substr(0, 5) + "x"
                       : std::string("-"))
               << " |\n";
        }
    }

    std::fputs(md.str().c_str(), stdout);
    write_json_file(json_path, merged);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twin RL environments with hierarchical equivalence verification"};
    app.require_subcommand(1);

    std::string config_path, env, backend_a, backend_b, mode_str, json_path;
    int64_t episodes = -1;
    std::string seed_str, epsilon_str, delta_str, alpha_str, batches_str, runs_str, steps_str;
    bool force = false;
    std::vector<std::string> report_paths;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value config file");
        cmd->add_option("--env", env, "environment: pong or cartpole");
        cmd->add_option("--backend-a", backend_a, "first backend id (reference)");
        cmd->add_option("--backend-b", backend_b, "second backend id (performance)");
        cmd->add_option("--seed", seed_str, "base seed (default 0)");
        cmd->add_option("--json", json_path, "write the JSON report to this path");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the L1 -> L2 -> L3 phase gates");
    add_common(verify);
    verify->add_option("--episodes", episodes, "L3 episode count (default 100)");
    verify->add_option("--mode", mode_str, "exact or epsilon (default per env)");
    verify->add_option("--epsilon", epsilon_str, "epsilon for epsilon mode");

    CLI::App* transfer = app.add_subcommand("transfer", "L4 cross-backend policy transfer");
    add_common(transfer);
    transfer->add_option("--delta", delta_str, "TOST equivalence margin (default per env)");
    transfer->add_option("--alpha", alpha_str, "TOST significance level (default 0.05)");
    transfer->add_flag("--force", force, "run without a passing L3 gate");

    CLI::App* bench = app.add_subcommand("bench", "steps-per-second measurement");
    add_common(bench);
    bench->add_option("--batches", batches_str, "comma-separated batch sizes");
    bench->add_option("--runs", runs_str, "timed runs per measurement (default 5)");
    bench->add_option("--steps", steps_str, "steps per run (default: auto-calibrated)");

    CLI::App* report = app.add_subcommand("report", "merge JSON reports into a summary");
    report->add_option("files", report_paths, "twinenv JSON reports");
    report->add_option("--json", json_path, "write the merged summary to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return EXIT_USAGE;
    }

    try {
        if (report->parsed()) {
            return cmd_report(report_paths, json_path);
        }

        Options opts;
        opts.file = load_config_file(config_path);

        CommonArgs args;
        args.env = opts.pick(env, !env.empty(), "env", "");
        if (args.env.empty()) throw ConfigError("--env (or env= in the config) is required");
        if (args.env != "pong" && args.env != "cartpole") {
            throw ConfigError("unknown environment: " + args.env);
        }
        args.backend_a = opts.pick(backend_a, !backend_a.empty(), "backend_a",
                                   reference_backend_for_env(args.env));
        args.backend_b = opts.pick(backend_b, !backend_b.empty(), "backend_b",
                                   performance_backend_for_env(args.env));
        args.seed = to_u64(opts.pick(seed_str, !seed_str.empty(), "seed", "0"), "--seed");
        args.json_path = opts.pick(json_path, !json_path.empty(), "json", "");

        if (verify->parsed()) {
            args.episodes =
                episodes >= 0
                    ? episodes
                    : to_i64(opts.pick("", false, "episodes", "100"), "episodes");
            const std::string mode_choice =
                opts.pick(mode_str, !mode_str.empty(), "mode", "");
            args.mode = default_mode_for_env(args.env);
            if (mode_choice == "exact") {
                args.mode = ComparisonMode::exact();
            } else if (mode_choice == "epsilon") {
                args.mode = ComparisonMode::within(args.mode.kind == ComparisonMode::Kind::Epsilon
                                                       ? args.mode.epsilon
                                                       : 1e-5f);
            } else if (!mode_choice.empty()) {
                throw ConfigError("unknown mode: " + mode_choice);
            }
            const std::string eps =
                opts.pick(epsilon_str, !epsilon_str.empty(), "epsilon", "");
            if (!eps.empty()) {
                args.mode = ComparisonMode::within(
                    static_cast<float>(to_dbl(eps, "--epsilon")));
            }
            if (args.mode.kind == ComparisonMode::Kind::Epsilon && args.mode.epsilon < 0.0f) {
                throw ConfigError("epsilon must be non-negative");
            }
            return cmd_verify(opts, args);
        }

        if (transfer->parsed()) {
            const double delta =
                to_dbl(opts.pick(delta_str, !delta_str.empty(), "delta",
                                 args.env == "pong" ? "1.0" : "25.0"),
                       "--delta");
            const double alpha =
                to_dbl(opts.pick(alpha_str, !alpha_str.empty(), "alpha", "0.05"), "--alpha");
            const bool force_eff = force || opts.pick("", false, "force", "0") == "1";
            return cmd_transfer(opts, args, delta, alpha, force_eff);
        }

        if (bench->parsed()) {
            const std::vector<int64_t> batches = parse_batches(
                opts.pick(batches_str, !batches_str.empty(), "batches", "32,128,512,2048,8192"));
            for (size_t i = 1; i < batches.size(); ++i) {
                if (batches[i] <= batches[i - 1]) {
                    throw ConfigError("--batches must be ascending");
                }
            }
            const int32_t runs = static_cast<int32_t>(
                to_i64(opts.pick(runs_str, !runs_str.empty(), "runs", "5"), "--runs"));
            const int64_t steps =
                to_i64(opts.pick(steps_str, !steps_str.empty(), "steps", "0"), "--steps");
            return cmd_bench(args, batches, runs, steps);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return EXIT_USAGE;
    } catch (const ContractViolation& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return EXIT_USAGE;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return EXIT_USAGE;
    }
    return EXIT_USAGE;
}
