#pragma once

#include <cstdint>
#include <limits>

namespace tailcv {

/// Which random quantity a stream feeds. Keeps the draws for different parts
/// of one replication independent of each other and of evaluation order.
enum class StreamRole : std::uint64_t {
    CoupledPairs = 1,
    ExtraSource = 2,
    Bootstrap = 3,
};

/// Counter-based generator: the i-th output is a fixed bijective mix of
/// (key, i), with the key derived from (seed, replication, role). Any
/// replication can be regenerated without replaying earlier ones.
///
/// Satisfies UniformRandomBitGenerator.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t replication, StreamRole role);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Uniform draw on the open interval (0, 1) with 53 bits of resolution.
double uniform_open(StreamRng& rng);

/// Standard exponential draw.
double standard_exponential(StreamRng& rng);

}  // namespace tailcv
