#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tapered {

/// Philox4x32-10 counter-based generator producing 64-bit words.
/// The 64-bit key is the user seed; the upper half of the counter selects an
/// independent stream, the lower half counts blocks within it.
class Philox4x32 {
public:
    using result_type = std::uint64_t;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    /// Raw block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key);

private:
    std::array<std::uint32_t, 4> ctr_{};
    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

/// Mix several integers into a stream identifier (splitmix64 finaliser chain).
std::uint64_t stream_id(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Stream purposes, so that different consumers of one seed never overlap.
enum class Purpose : std::uint64_t {
    Innovations = 1,
    Bootstrap = 2,
    Limit = 3,
    Coupling = 4,
    Auxiliary = 5,
};

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) : eng_(seed, stream) {}
    Rng(std::uint64_t seed, Purpose purpose, std::uint64_t index)
        : eng_(seed, stream_id(static_cast<std::uint64_t>(purpose), index)) {}

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    double exponential() { return -std::log(uniform()); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    Philox4x32& engine() { return eng_; }

private:
    Philox4x32 eng_;
};

} // namespace tapered
