#include "tailcv/rng.hpp"

#include <cmath>

namespace tailcv {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t replication, StreamRole role) {
    std::uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ (replication + 0x632BE59BD9B4E019ULL));
    k = mix64(k ^ (static_cast<std::uint64_t>(role) * 0x8CB92BA72F3D8DD7ULL));
    key_ = k;
}

StreamRng::result_type StreamRng::operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double uniform_open(StreamRng& rng) {
    // (j + 0.5) / 2^53 for j in [0, 2^53) never hits 0 or 1.
    const std::uint64_t j = rng() >> 11;
    return (static_cast<double>(j) + 0.5) * 0x1.0p-53;
}

double standard_exponential(StreamRng& rng) { return -std::log(uniform_open(rng)); }

}  // namespace tailcv
