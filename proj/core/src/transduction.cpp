#include "tcm/transduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tcm/errors.hpp"

namespace tcm {

int to_label(Prediction p) { return static_cast<int>(p); }

namespace {

void validate_transduction_input(std::span<const LabeledExample> training,
                                 std::span<const double> x_new) {
    if (training.size() < 2 || !has_both_labels(training)) {
        throw SingleClassInput("transduction needs training examples of both labels");
    }
    if (x_new.size() != training.front().features.size()) {
        throw DimensionMismatch("new point length differs from training features");
    }
}

std::vector<LabeledExample> completed_picture(std::span<const LabeledExample> training,
                                              std::span<const double> x_new, int label) {
    std::vector<LabeledExample> picture(training.begin(), training.end());
    picture.push_back(LabeledExample{{x_new.begin(), x_new.end()}, label});
    return picture;
}

MeasureConfig single_point_config(const MeasureConfig& config) {
    MeasureConfig c = config;
    if (c.kind == MeasureConfig::Kind::multi_example && c.k != 1) {
        throw InvalidConfig("transduce scores one new point; multi_example needs k = 1");
    }
    return c;
}

}  // namespace

TransductiveResult decide_from_pictures(const MeasuredPicture& neg,
                                        const MeasuredPicture& pos,
                                        std::size_t picture_size) {
    if (picture_size == 0) throw InternalError("picture_size must be positive");
    if (neg.p.is_zero() && pos.p.is_zero()) {
        throw NoSupportingPicture(
            "new point is a support vector in neither picture; "
            "check solver convergence and sv_tolerance");
    }

    TransductiveResult r;
    r.mu_neg = neg.p.reciprocal();
    r.mu_pos = pos.p.reciprocal();
    if (r.mu_pos > r.mu_neg) {
        r.prediction = Prediction::positive;
    } else if (r.mu_neg > r.mu_pos) {
        r.prediction = Prediction::negative;
    } else {
        r.prediction = Prediction::undecided;
    }
    r.incertitude = std::min(r.mu_neg, r.mu_pos).value();
    r.confidence = 1.0 - r.incertitude;
    r.possibility = std::min(1.0, std::max(r.mu_neg, r.mu_pos).value());

    const double denom = static_cast<double>(picture_size);
    r.picture_neg = PictureDiagnostics{-1, neg.sv_count, neg.new_is_sv,
                                       static_cast<double>(neg.sv_count) / denom};
    r.picture_pos = PictureDiagnostics{+1, pos.sv_count, pos.new_is_sv,
                                       static_cast<double>(pos.sv_count) / denom};
    return r;
}

TransductiveResult transduce(std::span<const LabeledExample> training,
                             std::span<const double> x_new,
                             const MeasureConfig& config) {
    validate_transduction_input(training, x_new);
    MeasureConfig c = single_point_config(config);

    std::vector<LabeledExample> picture_neg = completed_picture(training, x_new, -1);
    std::vector<LabeledExample> picture_pos = completed_picture(training, x_new, +1);
    MeasuredPicture neg = measure_picture(picture_neg, c);
    MeasuredPicture pos = measure_picture(picture_pos, c);
    return decide_from_pictures(neg, pos, training.size() + 1);
}

ExtendedNonNegReal confidence_for(std::span<const LabeledExample> training,
                                  std::span<const double> x_new, int predicted_label,
                                  const MeasureConfig& config) {
    validate_transduction_input(training, x_new);
    if (predicted_label != 1 && predicted_label != -1) {
        throw InvalidConfig("predicted_label must be -1 or +1");
    }
    MeasureConfig c = single_point_config(config);
    std::vector<LabeledExample> opposite =
        completed_picture(training, x_new, -predicted_label);
    return measure_picture(opposite, c).p.reciprocal();
}

double possibility_of(std::span<const LabeledExample> training,
                      std::span<const double> x_new, const MeasureConfig& config) {
    return transduce(training, x_new, config).possibility;
}

JointResult transduce_joint(std::span<const LabeledExample> training,
                            std::span<const std::vector<double>> new_points,
                            const MeasureConfig& config) {
    if (training.size() < 2 || !has_both_labels(training)) {
        throw SingleClassInput("transduction needs training examples of both labels");
    }
    const std::size_t k = new_points.size();
    if (k == 0) throw InvalidConfig("transduce_joint needs at least one new point");
    if (k > 8) {
        throw TooManyNewPoints("transduce_joint enumerates 2^k completions; k capped at 8");
    }
    const std::size_t dim = training.front().features.size();
    for (const std::vector<double>& x : new_points) {
        if (x.size() != dim) {
            throw DimensionMismatch("new point length differs from training features");
        }
    }

    MeasureConfig c = config;
    if (c.kind == MeasureConfig::Kind::sv_count) {
        c.weight = WeightFunction{WeightFunction::Kind::sign, 2.0};
    }
    c.kind = MeasureConfig::Kind::multi_example;
    c.k = k;

    // Completion index read as a binary word, first new point in the
    // highest bit with -1 < +1, so ascending index is ascending
    // lexicographic order over label vectors.
    const std::size_t n_completions = std::size_t{1} << k;
    std::vector<LabeledExample> sequence(training.begin(), training.end());
    for (const std::vector<double>& x : new_points) {
        sequence.push_back(LabeledExample{x, -1});
    }
    std::vector<double> scores(n_completions);
    for (std::size_t completion = 0; completion < n_completions; ++completion) {
        for (std::size_t i = 0; i < k; ++i) {
            bool positive = (completion >> (k - 1 - i)) & 1u;
            sequence[training.size() + i].label = positive ? 1 : -1;
        }
        scores[completion] = multi_example_measure(sequence, c).value();
    }

    std::size_t best = 0;
    for (std::size_t completion = 1; completion < n_completions; ++completion) {
        if (scores[completion] < scores[best]) best = completion;
    }
    double competitor = std::numeric_limits<double>::infinity();
    for (std::size_t completion = 0; completion < n_completions; ++completion) {
        if (completion != best) competitor = std::min(competitor, scores[completion]);
    }
    if (scores[best] == 0.0 && competitor == 0.0) {
        throw NoSupportingPicture(
            "every completion scored zero; check solver convergence and sv_tolerance");
    }

    JointResult result;
    result.labels.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        result.labels[i] = ((best >> (k - 1 - i)) & 1u) ? 1 : -1;
    }
    result.incertitude = ExtendedNonNegReal(competitor).reciprocal();
    return result;
}

RegionLabel classify_region(const SvmSolution& training_solution,
                            std::span<const double> x) {
    double f = decision_value(training_solution, x);
    double margin = 1.0 + training_solution.solver.sv_tolerance;
    if (f > margin) return RegionLabel::y_point_pos;
    if (f < -margin) return RegionLabel::y_point_neg;
    return RegionLabel::borderland;
}

}  // namespace tcm
