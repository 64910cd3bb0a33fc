#pragma once

#include <cstdint>
#include <random>

namespace orgrad {

// Stream seed for worker `stream` under `master`: one SplitMix64 output at
// counter position `stream`. Disjoint counters give decorrelated streams, so
// grids and trials can each own an independent generator.
[[nodiscard]] std::uint64_t seed_stream(std::uint64_t master, std::uint64_t stream);

// Deterministic generator. The engine is std::mt19937_64 (its word stream is
// pinned by the standard); the uniform and normal transforms are explicit
// because the stdlib distribution algorithms are implementation-defined and
// reproducibility across toolchains is part of the output contract.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    [[nodiscard]] double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on {0, ..., n-1} by rejection, bias-free.
    [[nodiscard]] std::int64_t uniform_int(std::int64_t n);

    // Standard normal via the polar method (pairs cached).
    [[nodiscard]] double normal();

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace orgrad
