#pragma once

#include <span>

namespace tcm {

enum class KernelKind { linear, polynomial, rbf };

/// Kernel selection and parameters. Only the parameters of the chosen
/// kind are read: degree and coef0 for polynomial, gamma for rbf.
struct KernelConfig {
    KernelKind kind = KernelKind::linear;
    int degree = 2;
    double coef0 = 1.0;
    double gamma = 1.0;

    void validate() const;
};

/// k(a, b) for the configured kernel:
///   linear      a . b
///   polynomial  (a . b + coef0)^degree
///   rbf         exp(-gamma |a - b|^2)
double kernel_value(const KernelConfig& config, std::span<const double> a,
                    std::span<const double> b);

}  // namespace tcm
