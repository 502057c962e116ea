#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace twinenv {

// A caller broke an operation's precondition (bad action, mismatched batch
// lengths, wrong observation length).
struct ContractViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration: unknown backend id, unresolvable field path, invalid
// tolerance/margin, timing guard violations.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int MAX_OBS_LEN = 8;

// Outputs of one environment transition. `observation` holds `obs_len`
// valid components; the length is a per-environment constant shared by the
// reference and performance backends.
struct StepOutcome {
    std::array<float, MAX_OBS_LEN> observation{};
    int32_t obs_len = 0;
    float reward = 0.0f;
    bool done = false;
};

struct ComparisonMode {
    enum class Kind { Exact, Epsilon };

    Kind kind = Kind::Exact;
    float epsilon = 0.0f;  // used only when kind == Epsilon; must be >= 0

    static constexpr ComparisonMode exact() { return {Kind::Exact, 0.0f}; }
    static constexpr ComparisonMode within(float eps) { return {Kind::Epsilon, eps}; }
};

// Exact mode demands bit-identical float32 representations; Epsilon mode is a
// per-component absolute (L-infinity) bound.
inline bool values_match(float a, float b, ComparisonMode mode) {
    if (mode.kind == ComparisonMode::Kind::Exact) {
        return std::bit_cast<uint32_t>(a) == std::bit_cast<uint32_t>(b);
    }
    return std::fabs(static_cast<double>(a) - static_cast<double>(b)) <=
           static_cast<double>(mode.epsilon);
}

inline float clampf(float v, float lo, float hi) {
    return std::min(std::max(v, lo), hi);
}

inline std::string mode_name(ComparisonMode mode) {
    return mode.kind == ComparisonMode::Kind::Exact ? "exact" : "epsilon";
}

}  // namespace twinenv
