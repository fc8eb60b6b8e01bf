#include "tcm/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tcm/errors.hpp"

namespace tcm {

ExtendedNonNegReal::ExtendedNonNegReal(double v) : v_(v) {
    if (std::isnan(v) || v < 0.0) {
        throw InternalError("ExtendedNonNegReal requires a nonnegative value");
    }
}

ExtendedNonNegReal ExtendedNonNegReal::infinity() {
    return ExtendedNonNegReal(std::numeric_limits<double>::infinity());
}

bool ExtendedNonNegReal::is_finite() const { return std::isfinite(v_); }

ExtendedNonNegReal ExtendedNonNegReal::reciprocal() const {
    if (v_ == 0.0) return infinity();
    if (!is_finite()) return ExtendedNonNegReal(0.0);
    return ExtendedNonNegReal(1.0 / v_);
}

void WeightFunction::validate() const {
    switch (kind) {
        case Kind::sign:
        case Kind::identity:
            return;
        case Kind::power:
            if (!(exponent > 0.0)) throw InvalidConfig("power exponent must be positive");
            return;
    }
    throw InvalidConfig("unknown weight kind");
}

double WeightFunction::apply(double alpha, double sv_tolerance) const {
    switch (kind) {
        case Kind::sign:
            return alpha > sv_tolerance ? 1.0 : 0.0;
        case Kind::identity:
            return alpha;
        case Kind::power:
            return std::pow(alpha, exponent);
    }
    throw InvalidConfig("unknown weight kind");
}

void MeasureConfig::validate() const {
    weight.validate();
    kernel.validate();
    solver.validate();
    if (kind == Kind::multi_example && k < 1) {
        throw InvalidConfig("multi_example measure needs k >= 1");
    }
}

MeasuredPicture measure_picture(std::span<const LabeledExample> sequence,
                                const MeasureConfig& config) {
    config.validate();
    const std::size_t m = sequence.size();

    // Two equal examples make the whole sequence maximally impossible,
    // by definition and before any optimization runs.
    if (has_duplicate(sequence)) {
        return MeasuredPicture{ExtendedNonNegReal::infinity(), 0, false};
    }
    if (config.kind == MeasureConfig::Kind::multi_example && config.k >= m) {
        throw InvalidConfig("multi_example measure needs k < sequence length");
    }

    SvmSolution sol = solve_soft_margin(sequence, config.kernel, config.solver);
    const double tol = config.solver.sv_tolerance;

    MeasuredPicture out;
    out.sv_count = alpha_support_set(sol).size();
    out.new_is_sv = sol.alphas[m - 1] > tol;

    switch (config.kind) {
        case MeasureConfig::Kind::sv_count: {
            if (out.sv_count == 0) {
                throw InternalError("solved picture has an empty support set");
            }
            double p = out.new_is_sv ? static_cast<double>(m) /
                                           static_cast<double>(out.sv_count)
                                     : 0.0;
            out.p = ExtendedNonNegReal(p);
            return out;
        }
        case MeasureConfig::Kind::weighted_alpha: {
            double sum = 0.0;
            for (double a : sol.alphas) sum += config.weight.apply(a, tol);
            double last = config.weight.apply(sol.alphas[m - 1], tol);
            if (sum == 0.0) {
                if (last != 0.0) {
                    throw InternalError("weighted measure: zero total, nonzero term");
                }
                out.p = ExtendedNonNegReal(0.0);
                return out;
            }
            out.p = ExtendedNonNegReal((last * static_cast<double>(m)) / sum);
            return out;
        }
        case MeasureConfig::Kind::multi_example: {
            double sum = 0.0;
            for (double a : sol.alphas) sum += config.weight.apply(a, tol);
            double trailing = 0.0;
            for (std::size_t i = m - config.k; i < m; ++i) {
                trailing += config.weight.apply(sol.alphas[i], tol);
            }
            if (sum == 0.0) {
                if (trailing != 0.0) {
                    throw InternalError("multi-example measure: zero total, nonzero term");
                }
                out.p = ExtendedNonNegReal(0.0);
                return out;
            }
            out.p = ExtendedNonNegReal((trailing * static_cast<double>(m)) /
                                       (sum * static_cast<double>(config.k)));
            return out;
        }
    }
    throw InvalidConfig("unknown measure kind");
}

ExtendedNonNegReal sv_count_measure(std::span<const LabeledExample> sequence,
                                    const MeasureConfig& config) {
    MeasureConfig c = config;
    c.kind = MeasureConfig::Kind::sv_count;
    return measure_picture(sequence, c).p;
}

ExtendedNonNegReal weighted_alpha_measure(std::span<const LabeledExample> sequence,
                                          const MeasureConfig& config) {
    MeasureConfig c = config;
    c.kind = MeasureConfig::Kind::weighted_alpha;
    return measure_picture(sequence, c).p;
}

ExtendedNonNegReal multi_example_measure(std::span<const LabeledExample> sequence,
                                         const MeasureConfig& config) {
    MeasureConfig c = config;
    c.kind = MeasureConfig::Kind::multi_example;
    return measure_picture(sequence, c).p;
}

ExtendedNonNegReal evaluate_measure(std::span<const LabeledExample> sequence,
                                    const MeasureConfig& config) {
    return measure_picture(sequence, config).p;
}

ImpossibilityMeasure make_measure(const MeasureConfig& config) {
    config.validate();
    return [config](std::span<const LabeledExample> sequence) {
        return evaluate_measure(sequence, config);
    };
}

ImpossibilityMeasure critical_region_measure(
    std::function<bool(std::span<const LabeledExample>)> region, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidDelta("significance level must lie strictly between 0 and 1");
    }
    if (!region) {
        throw InvalidConfig("critical_region_measure needs a region predicate");
    }
    return [region = std::move(region), delta](std::span<const LabeledExample> sequence) {
        return region(sequence) ? ExtendedNonNegReal(1.0 / delta)
                                : ExtendedNonNegReal(0.0);
    };
}

namespace {

constexpr std::size_t kEnumerationCap = 7;

std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

double permutation_validity_oracle(const ImpossibilityMeasure& measure,
                                   std::span<const LabeledExample> sample) {
    if (!measure) throw InvalidConfig("permutation oracle needs a measure");
    const std::size_t m = sample.size();
    if (m == 0) throw InvalidConfig("permutation oracle needs a nonempty sample");
    if (m > kEnumerationCap) {
        throw TooLarge("permutation oracle enumerates m! orderings; m capped at 7");
    }
    if (has_duplicate(sample)) {
        throw DuplicateExamples("permutation oracle requires pairwise distinct examples");
    }

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::vector<LabeledExample> seq(m);
    double sum = 0.0;
    std::uint64_t count = 0;
    do {
        for (std::size_t i = 0; i < m; ++i) seq[i] = sample[order[i]];
        sum += measure(seq).value();
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    if (count != factorial(m)) {
        throw InternalError("permutation enumeration miscounted");
    }
    return sum / static_cast<double>(count);
}

Hyperset Hyperset::signature_of(std::span<const LabeledExample> sequence) {
    Hyperset h;
    for (const LabeledExample& ex : sequence) {
        bool found = false;
        for (std::size_t e = 0; e < h.elements.size(); ++e) {
            if (h.elements[e] == ex) {
                ++h.arities[e];
                found = true;
                break;
            }
        }
        if (!found) {
            h.elements.push_back(ex);
            h.arities.push_back(1);
        }
    }
    return h;
}

std::size_t Hyperset::cardinality() const {
    std::size_t total = 0;
    for (std::size_t b : arities) total += b;
    return total;
}

std::uint64_t Hyperset::distinct_orderings_count() const {
    std::uint64_t n = factorial(cardinality());
    for (std::size_t b : arities) n /= factorial(b);
    return n;
}

void Hyperset::validate() const {
    if (elements.empty()) throw InvalidConfig("multiset must be nonempty");
    if (elements.size() != arities.size()) {
        throw InvalidConfig("multiset elements and arities differ in length");
    }
    for (std::size_t b : arities) {
        if (b == 0) throw InvalidConfig("multiset arities must be positive");
    }
    for (std::size_t i = 0; i < elements.size(); ++i) {
        for (std::size_t j = i + 1; j < elements.size(); ++j) {
            if (elements[i] == elements[j]) {
                throw DuplicateExamples("multiset elements must be pairwise distinct");
            }
        }
    }
}

double exchangeable_validity_oracle(const ImpossibilityMeasure& measure,
                                    const Hyperset& multiset) {
    if (!measure) throw InvalidConfig("exchangeable oracle needs a measure");
    multiset.validate();
    const std::size_t m = multiset.cardinality();
    if (m > kEnumerationCap) {
        throw TooLarge("exchangeable oracle enumerates orderings; cardinality capped at 7");
    }

    // One index per slot, ascending; next_permutation then walks every
    // distinct ordering of the multiset exactly once.
    std::vector<std::size_t> slots;
    slots.reserve(m);
    for (std::size_t e = 0; e < multiset.elements.size(); ++e) {
        slots.insert(slots.end(), multiset.arities[e], e);
    }
    std::vector<LabeledExample> seq(m);
    double sum = 0.0;
    std::uint64_t count = 0;
    do {
        for (std::size_t i = 0; i < m; ++i) seq[i] = multiset.elements[slots[i]];
        sum += measure(seq).value();
        ++count;
    } while (std::next_permutation(slots.begin(), slots.end()));
    if (count != multiset.distinct_orderings_count()) {
        throw InternalError("multiset ordering enumeration miscounted");
    }
    return sum / static_cast<double>(count);
}

}  // namespace tcm
