#include "tcm/kernel.hpp"

#include <cmath>

#include "tcm/errors.hpp"

namespace tcm {

void KernelConfig::validate() const {
    switch (kind) {
        case KernelKind::linear:
            return;
        case KernelKind::polynomial:
            if (degree < 1) throw InvalidConfig("polynomial degree must be >= 1");
            if (!(coef0 >= 0.0)) throw InvalidConfig("coef0 must be nonnegative");
            return;
        case KernelKind::rbf:
            if (!(gamma > 0.0)) throw InvalidConfig("gamma must be positive");
            return;
    }
    throw InvalidConfig("unknown kernel kind");
}

double kernel_value(const KernelConfig& config, std::span<const double> a,
                    std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("kernel_value: feature lengths differ");
    }
    switch (config.kind) {
        case KernelKind::linear: {
            double dot = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
            return dot;
        }
        case KernelKind::polynomial: {
            double dot = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
            return std::pow(dot + config.coef0, config.degree);
        }
        case KernelKind::rbf: {
            double dist2 = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                double d = a[i] - b[i];
                dist2 += d * d;
            }
            return std::exp(-config.gamma * dist2);
        }
    }
    throw InvalidConfig("unknown kernel kind");
}

}  // namespace tcm
