#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tcm {

/// Deterministic random stream with a platform-independent output
/// sequence. The raw generator is std::mt19937_64, whose output is
/// pinned by the standard; the derived draws below are implemented
/// explicitly because the standard library's distributions and
/// std::shuffle are free to differ between implementations.
///
/// Layout, frozen for reproducibility:
///  - next_unit: (x >> 11) * 2^-53, one raw draw, values in [0, 1)
///  - next_normal: Box-Muller on two unit draws, returns
///    sqrt(-2 ln(1-u1)) cos(2 pi u2) first and the matching sin term
///    on the following call (the spare survives across calls)
///  - next_index(bound): next_u64() % bound
///  - shuffle: Fisher-Yates from the top, j = next_index(i+1)
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double next_unit();
    double next_normal();
    std::size_t next_index(std::size_t bound);

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tcm
