#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "ktfloor/quantities.hpp"

namespace ktfloor {

// Philox4x32-10 block cipher (Salmon et al., SC'11). Output is a pure
// function of (counter, key), so any draw of any stream can be computed
// without touching shared state.
namespace philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kMul0 = 0xD2511F53;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

constexpr Counter round(const Counter& c, const Key& k)
{
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

constexpr Counter block(Counter c, Key k)
{
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        c = round(c, k);
    }
    return c;
}

}  // namespace philox

/// 64-bit mixer used to derive child seeds (e.g. one per sweep point).
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Random stream keyed by (seed, stream index). Draw n of stream s is
/// block((n, s), seed), independent of how many other streams exist or
/// the order in which they are consumed.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream)
    {
    }

    /// Two 64-bit words per block.
    std::uint64_t next_u64()
    {
        if (lane_ == 2) {
            const philox::Counter ctr{static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32),
                                      static_cast<std::uint32_t>(stream_),
                                      static_cast<std::uint32_t>(stream_ >> 32)};
            out_ = philox::block(ctr, key_);
            ++block_;
            lane_ = 0;
        }
        const std::uint64_t w = (static_cast<std::uint64_t>(out_[2 * lane_ + 1]) << 32) |
                                out_[2 * lane_];
        ++lane_;
        return w;
    }

    /// Uniform on (0, 1], 53-bit resolution.
    double uniform_open0()
    {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open0();
        const double u2 = uniform_open0();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * constants::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    std::uint64_t stream() const { return stream_; }

private:
    philox::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    philox::Counter out_{};
    int lane_ = 2;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ktfloor
