#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ccmtl {

/// Seedable random source used by every generator and shuffle in the
/// project. The raw stream is std::mt19937_64, whose output sequence is
/// fixed by the C++ standard; the normal and bounded-integer transforms
/// are implemented here rather than with std::normal_distribution /
/// std::uniform_int_distribution because those are implementation-defined
/// and would break golden files across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    /// Standard normal via the Marsaglia polar method.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Unbiased uniform integer in [0, bound); bound must be >= 1.
    std::uint64_t next_below(std::uint64_t bound);

    /// Fisher-Yates shuffle driven by next_below.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        if (values.size() < 2) return;
        for (std::size_t i = values.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i + 1));
            std::swap(values[i], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ccmtl
