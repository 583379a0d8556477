#pragma once

#include <cstdint>

namespace hymlab {

// Counter-based generator (splitmix64 of a keyed counter). Every draw is a pure
// function of (seed, stream, counter), so parallel strata can consume
// independent streams and still reproduce bit-identically in any order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(seed ^ (stream * 0x9e3779b97f4a7c15ULL)) {}

    double uniform() { return to_unit(next()); }

    /// uniform in [a, b)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    std::uint64_t next() {
        std::uint64_t v = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
        v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
        v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
        return v ^ (v >> 31);
    }

private:
    static double to_unit(std::uint64_t v) {
        return static_cast<double>(v >> 11) * 0x1.0p-53;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace hymlab
