#pragma once
// Deterministic random streams.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard. Seeding goes through std::seed_seq over the 32-bit halves of
// (seed, stream id), also fully specified by the standard. Variates come from
// Boost.Random distributions, whose algorithms do not vary between standard
// library vendors (std::normal_distribution does). Together this makes a
// trajectory a function of (seed, stream id, draw order) on every platform.

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace qpsim {

class RngStream {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/seed_seq+boost.random";

    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Independent stream for sub-task k (MC trial, walk, seed-grid cell).
    RngStream substream(std::uint64_t k) const {
        return RngStream(seed_ ^ (0x9E3779B97F4A7C15ULL * (k + 1)), stream_ + 1);
    }

    /// Uniform on {0, ..., n-1}; n must be positive.
    std::size_t index(std::size_t n) {
        boost::random::uniform_int_distribution<std::size_t> dist(0, n - 1);
        return dist(engine_);
    }

    /// +1 or -1 with equal probability.
    int sign() {
        boost::random::uniform_int_distribution<int> dist(0, 1);
        return dist(engine_) == 0 ? -1 : 1;
    }

    double normal() { return normal_(engine_); }

    double uniform01() { return boost::random::uniform_01<double>{}(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        return std::mt19937_64(seq);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qpsim
