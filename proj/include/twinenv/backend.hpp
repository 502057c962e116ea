#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinenv/rng.hpp"
#include "twinenv/types.hpp"

namespace twinenv {

// A batch of environment instances behind one interface, implemented by the
// scalar reference, the batched performance backend, and every registered
// mutant. reset() sizes the batch to one instance per stream; step() advances
// all instances and refreshes the output buffers. Stepping an instance whose
// episode already ended restarts it from the instance's own RNG stream (the
// step reports the fresh observation with reward 0 and done false), so
// driving loops can run forever and episode chains stay deterministic.
class Backend {
public:
    virtual ~Backend() = default;

    virtual const std::string& id() const = 0;
    virtual const std::string& env_name() const = 0;
    virtual int32_t obs_len() const = 0;
    virtual int32_t action_count() const = 0;
    virtual std::span<const char* const> obs_component_names() const = 0;

    virtual size_t size() const = 0;
    virtual void reset(std::span<const RngState> streams) = 0;
    virtual void step(std::span<const int32_t> actions) = 0;

    virtual std::span<const float> observations() const = 0;
    virtual std::span<const float> rewards() const = 0;
    virtual std::span<const uint8_t> dones() const = 0;

    // Full instance state as a flat JSON object (dotted field paths resolve
    // against it). load_state_json expects every field present.
    virtual nlohmann::json state_json(size_t i) const = 0;
    virtual void load_state_json(size_t i, const nlohmann::json& state) = 0;
};

// Compiled-in registry: twins plus mutants, addressed by id string.
// Throws ConfigError for an unknown id.
std::unique_ptr<Backend> make_backend(const std::string& id);
std::vector<std::string> backend_ids();
bool is_backend_id(const std::string& id);

// "pong" -> exact, "cartpole" -> epsilon 1e-5.
ComparisonMode default_mode_for_env(const std::string& env_name);
std::string reference_backend_for_env(const std::string& env_name);
std::string performance_backend_for_env(const std::string& env_name);

}  // namespace twinenv
