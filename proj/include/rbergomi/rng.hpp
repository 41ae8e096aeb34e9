#pragma once

#include <cstdint>

namespace rbergomi::rng {

/// splitmix64 finalizer; also used to derive substream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic substream key: independent-looking seed for (seed, stream).
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream);

/// xoshiro256++ with splitmix64 state expansion. One instance per substream;
/// never shared across threads.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t s_[4];
};

/// Standard normal draws via the Marsaglia polar transform of a substream.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}
    NormalSampler(std::uint64_t seed, std::uint64_t stream)
        : gen_(derive_stream(seed, stream)) {}

    double next();

    /// Fill a buffer, matching repeated next() calls exactly.
    void fill(double* out, std::size_t count);

private:
    Xoshiro256pp gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace rbergomi::rng
