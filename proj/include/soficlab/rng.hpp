#pragma once

#include <cstdint>
#include <span>

namespace soficlab {

// SplitMix64 stream. Every stochastic operation takes an explicit Rng (or a
// seed from which it builds one); there is no global generator state.
// Independent streams are derived with fork(tag), which leaves the parent
// stream untouched.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Child stream determined by (current state, tag); parent unchanged.
    Rng fork(std::uint64_t tag) const {
        Rng child(state_ ^ (0xD1B54A32D192ED03ull + tag * 0x9E3779B97F4A7C15ull));
        child.next_u64();
        child.next_u64();
        return child;
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Unbiased uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~0ull - ~0ull % n;
        for (;;) {
            std::uint64_t x = next_u64();
            if (x < limit) return x % n;
        }
    }

    // Index sampled proportionally to the (nonnegative) weights.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

private:
    std::uint64_t state_;
};

} // namespace soficlab
