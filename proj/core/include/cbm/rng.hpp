#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cbm {

/// Portable random stream: mt19937_64 keyed by (root seed, stream index).
///
/// Uniform doubles are built from the top 53 bits directly instead of going
/// through std::uniform_real_distribution, whose output is not pinned down
/// by the standard.
class RandomStream {
public:
    RandomStream(std::uint64_t root_seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          0x9e3779b9u};
        engine_.seed(seq);
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard exponential.
    double exponential() { return -std::log1p(-uniform()); }

private:
    std::mt19937_64 engine_;
};

/// Inverse-CDF draw from a discrete distribution given as a row of weights.
/// Ties at a cumulative boundary go to the lower index.
template <class Row>
int sample_categorical(const Row& row, RandomStream& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    const int n = static_cast<int>(row.size());
    int last_positive = 0;
    for (int i = 0; i < n; ++i) {
        if (row[i] <= 0.0) continue;
        cum += row[i];
        last_positive = i;
        if (u <= cum) return i;
    }
    return last_positive; // rounding left u above the final cumulative sum
}

} // namespace cbm
