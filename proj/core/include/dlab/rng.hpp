#pragma once

#include <array>
#include <cstdint>

namespace dlab {

/// Philox4x32-10 block cipher used as a counter-based generator. Every draw is a pure
/// function of (seed, path index, step, stream), so batches can be generated in any order
/// or on any number of threads with identical output.
class CounterRng {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    static Block philox(Block counter, std::array<std::uint32_t, 2> key) noexcept;

    Block block(std::uint64_t path, std::uint32_t step, std::uint32_t stream) const noexcept;

    /// Uniform on (0, 1) with 53 random bits.
    double uniform(std::uint64_t path, std::uint32_t step, std::uint32_t stream) const noexcept;

    /// Two independent standard normals from one block (Box-Muller on its 64-bit halves).
    std::array<double, 2> normal_pair(std::uint64_t path, std::uint32_t pair,
                                      std::uint32_t stream) const noexcept;

    /// Standard normal number `step` of a stream: branch step % 2 of pair step / 2.
    double normal(std::uint64_t path, std::uint32_t step, std::uint32_t stream) const noexcept;

private:
    std::uint64_t seed_;
};

}  // namespace dlab
