#include "tcm/random.hpp"

#include <cmath>
#include <numbers>

#include "tcm/errors.hpp"

namespace tcm {

double RandomStream::next_unit() {
    // 53-bit mantissa draw, uniform on [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::size_t RandomStream::next_index(std::size_t bound) {
    if (bound == 0) {
        throw InternalError("next_index: bound must be positive");
    }
    return static_cast<std::size_t>(engine_() % bound);
}

}  // namespace tcm
