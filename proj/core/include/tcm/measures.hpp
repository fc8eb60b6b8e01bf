#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tcm/dataset.hpp"
#include "tcm/kernel.hpp"
#include "tcm/svm.hpp"

namespace tcm {

/// A nonnegative real extended with +infinity. Measures of
/// impossibility take values in this set; reciprocal maps 0 and
/// infinity onto each other.
class ExtendedNonNegReal {
public:
    ExtendedNonNegReal() = default;
    explicit ExtendedNonNegReal(double v);
    static ExtendedNonNegReal infinity();

    bool is_finite() const;
    bool is_zero() const { return v_ == 0.0; }
    /// The numeric value; +infinity when not finite.
    double value() const { return v_; }
    ExtendedNonNegReal reciprocal() const;

    friend auto operator<=>(const ExtendedNonNegReal&, const ExtendedNonNegReal&) = default;

private:
    double v_ = 0.0;
};

/// Weighting applied to the dual coefficients inside the weighted
/// measures. `sign` maps weight above sv_tolerance to 1 and the rest to
/// 0; `identity` keeps the coefficient; `power` raises it to `exponent`.
struct WeightFunction {
    enum class Kind { sign, identity, power };
    Kind kind = Kind::sign;
    double exponent = 2.0;

    void validate() const;
    double apply(double alpha, double sv_tolerance) const;
};

/// Selects and parameterizes a measure of impossibility.
struct MeasureConfig {
    enum class Kind { sv_count, weighted_alpha, multi_example };
    Kind kind = Kind::sv_count;
    WeightFunction weight;
    KernelConfig kernel;
    SolverConfig solver;
    std::size_t k = 1;  // multi_example: how many trailing examples are new

    void validate() const;
};

/// Support-vector count measure on a finished sequence of m examples:
/// m / #SV when the final example is a support vector, 0 otherwise.
/// A sequence containing two equal examples scores infinity outright.
ExtendedNonNegReal sv_count_measure(std::span<const LabeledExample> sequence,
                                    const MeasureConfig& config);

/// Weighted variant: f(alpha_m) * m / sum_i f(alpha_i). With the sign
/// weighting this coincides with sv_count_measure exactly.
ExtendedNonNegReal weighted_alpha_measure(std::span<const LabeledExample> sequence,
                                          const MeasureConfig& config);

/// Joint measure for the k trailing examples of the sequence:
/// [sum of trailing-k weights / sum of all weights] * m / k.
ExtendedNonNegReal multi_example_measure(std::span<const LabeledExample> sequence,
                                         const MeasureConfig& config);

/// Dispatch on config.kind.
ExtendedNonNegReal evaluate_measure(std::span<const LabeledExample> sequence,
                                    const MeasureConfig& config);

/// A measure of impossibility as a standalone callable, for the
/// validity oracles and custom constructions.
using ImpossibilityMeasure =
    std::function<ExtendedNonNegReal(std::span<const LabeledExample>)>;

ImpossibilityMeasure make_measure(const MeasureConfig& config);

/// Classical-test measure: 1/delta on sequences inside the critical
/// region, 0 elsewhere. The region predicate must be invariant under
/// permutations of the sequence for the result to be a valid measure.
ImpossibilityMeasure critical_region_measure(
    std::function<bool(std::span<const LabeledExample>)> region, double delta);

/// Average of the measure over all m! orderings of the sample, which
/// must contain pairwise distinct examples. A valid measure averages
/// exactly 1 on every sample. Exhaustive; capped at m <= 7.
double permutation_validity_oracle(const ImpossibilityMeasure& measure,
                                   std::span<const LabeledExample> sample);

/// A multiset of examples: distinct values with their multiplicities.
struct Hyperset {
    std::vector<LabeledExample> elements;
    std::vector<std::size_t> arities;

    static Hyperset signature_of(std::span<const LabeledExample> sequence);
    std::size_t cardinality() const;
    /// Number of distinct orderings, cardinality! / prod(arities!).
    std::uint64_t distinct_orderings_count() const;
    void validate() const;
};

/// Average of the measure over the distinct orderings of the multiset,
/// each taken once. Exhaustive; capped at cardinality <= 7.
double exchangeable_validity_oracle(const ImpossibilityMeasure& measure,
                                    const Hyperset& multiset);

/// One completed picture evaluated in a single solve: the measure value
/// together with the support facts transduction reports. On the
/// duplicate shortcut (p infinite, no solve runs) the support fields
/// are zeroed.
struct MeasuredPicture {
    ExtendedNonNegReal p;
    std::size_t sv_count = 0;
    bool new_is_sv = false;
};

MeasuredPicture measure_picture(std::span<const LabeledExample> sequence,
                                const MeasureConfig& config);

}  // namespace tcm
