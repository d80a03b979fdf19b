#include "dlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace dlab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint64_t bits) {
    // 53 high bits, shifted by half an ulp so 0 and 1 are never returned.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

CounterRng::Block CounterRng::philox(Block ctr, std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

CounterRng::Block CounterRng::block(std::uint64_t path, std::uint32_t step,
                                    std::uint32_t stream) const noexcept {
    const Block ctr{step, stream, static_cast<std::uint32_t>(path),
                    static_cast<std::uint32_t>(path >> 32)};
    return philox(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
}

double CounterRng::uniform(std::uint64_t path, std::uint32_t step,
                           std::uint32_t stream) const noexcept {
    const Block b = block(path, step, stream);
    return to_open_unit((static_cast<std::uint64_t>(b[0]) << 32) | b[1]);
}

std::array<double, 2> CounterRng::normal_pair(std::uint64_t path, std::uint32_t pair,
                                              std::uint32_t stream) const noexcept {
    const Block b = block(path, pair, stream);
    const double u1 = to_open_unit((static_cast<std::uint64_t>(b[0]) << 32) | b[1]);
    const double u2 = to_open_unit((static_cast<std::uint64_t>(b[2]) << 32) | b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phase), r * std::sin(phase)};
}

double CounterRng::normal(std::uint64_t path, std::uint32_t step,
                          std::uint32_t stream) const noexcept {
    return normal_pair(path, step >> 1, stream)[step & 1u];
}

}  // namespace dlab
