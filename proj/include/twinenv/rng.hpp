#pragma once

#include <cstdint>

namespace twinenv {

// Counter-based splitmix64 stream state. Plain data: copyable, movable
// between threads, and advanced only through the pure functions below, so a
// transition that carries an RngState stays a pure function of its inputs.
struct RngState {
    uint64_t counter = 0;

    friend bool operator==(const RngState&, const RngState&) = default;
};

inline constexpr uint64_t SPLITMIX_INCREMENT = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (bijective 64-bit mix).
constexpr uint64_t splitmix_mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

struct RngDraw {
    RngState next;
    uint64_t value;
};

constexpr RngDraw rng_next(RngState state) {
    state.counter += SPLITMIX_INCREMENT;
    return {state, splitmix_mix(state.counter)};
}

// Top 24 bits of a 64-bit draw, scaled into [0, 1). Every representable
// output is an exact multiple of 2^-24, so the conversion is identical on
// any IEEE-754 float32 platform.
constexpr float uniform_from_bits(uint64_t bits) {
    return static_cast<float>(bits >> 40) * 0x1.0p-24f;
}

struct UniformDraw {
    RngState next;
    float value;
};

constexpr UniformDraw rng_uniform(RngState state) {
    const RngDraw d = rng_next(state);
    return {d.next, uniform_from_bits(d.value)};
}

// Distinct stream per (base_seed, env_index) pair.
constexpr RngState derive_stream(uint64_t base_seed, uint32_t env_index) {
    return {splitmix_mix(base_seed ^ (SPLITMIX_INCREMENT * (uint64_t{env_index} + 1)))};
}

}  // namespace twinenv
