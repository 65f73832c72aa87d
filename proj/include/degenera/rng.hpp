#pragma once

#include <cstdint>

namespace degenera {

/// Counter-based generator: the k-th draw is a pure function of (seed, k),
/// so reruns with the same config produce identical streams bit for bit.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    double uniform() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace degenera
