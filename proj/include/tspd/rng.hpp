#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace tspd
{
    /*
     * Random number generation.
     *
     * Every random quantity in the library comes from Xoshiro256** streams whose
     * 256-bit state is filled by SplitMix64.  A stream is identified by a
     * (seed, key...) tuple; the key path is folded into a single 64-bit stream
     * seed with the SplitMix64 finalizer, so substreams for chunk c or table
     * cell (i, j) are reproducible without any shared generator state.
     *
     * Uniform doubles take the top 53 bits: (x >> 11) * 2^-53, in [0, 1).
     * Exponential(1) variates use inverse transform: -log1p(-u).
     */
    inline constexpr std::string_view kGeneratorId = "xoshiro256**/splitmix64-v1";

    constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    class SplitMix64
    {
    public:
        explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

        constexpr std::uint64_t next() noexcept
        {
            state_ += 0x9e3779b97f4a7c15ULL;
            return splitmix64_mix(state_);
        }

    private:
        std::uint64_t state_;
    };

    // Folds a key path into a stream seed.  derive_seed(s, {}) == s.
    constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept
    {
        std::uint64_t h = seed;
        for (auto k : keys)
        {
            h = splitmix64_mix(h + 0x9e3779b97f4a7c15ULL) ^ splitmix64_mix(k + 0xd1b54a32d192ed03ULL);
        }
        return h;
    }

    class Xoshiro256
    {
    public:
        using result_type = std::uint64_t;

        explicit Xoshiro256(std::uint64_t seed) noexcept
        {
            SplitMix64 sm(seed);
            for (auto &word : s_)
            {
                word = sm.next();
            }
        }

        static constexpr result_type min() noexcept { return 0; }
        static constexpr result_type max() noexcept { return ~result_type{0}; }

        result_type operator()() noexcept
        {
            const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
            const std::uint64_t t = s_[1] << 17;
            s_[2] ^= s_[0];
            s_[3] ^= s_[1];
            s_[1] ^= s_[2];
            s_[0] ^= s_[3];
            s_[2] ^= t;
            s_[3] = rotl(s_[3], 45);
            return result;
        }

        double uniform() noexcept
        {
            return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
        }

        double exponential() noexcept
        {
            return -std::log1p(-uniform());
        }

        // Uniform integer in [0, bound).  Lemire's multiply-shift with rejection.
        std::uint64_t below(std::uint64_t bound) noexcept
        {
            if (bound <= 1)
            {
                return 0;
            }
            std::uint64_t x = (*this)();
            __uint128_t m = static_cast<__uint128_t>(x) * bound;
            auto low = static_cast<std::uint64_t>(m);
            if (low < bound)
            {
                const std::uint64_t threshold = -bound % bound;
                while (low < threshold)
                {
                    x = (*this)();
                    m = static_cast<__uint128_t>(x) * bound;
                    low = static_cast<std::uint64_t>(m);
                }
            }
            return static_cast<std::uint64_t>(m >> 64);
        }

    private:
        static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
        {
            return (x << k) | (x >> (64 - k));
        }

        std::array<std::uint64_t, 4> s_{};
    };

    inline Xoshiro256 make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
    {
        return Xoshiro256(derive_seed(seed, keys));
    }
}
