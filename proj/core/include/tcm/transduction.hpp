#pragma once

#include <span>
#include <vector>

#include "tcm/dataset.hpp"
#include "tcm/measures.hpp"
#include "tcm/svm.hpp"

namespace tcm {

enum class Prediction { negative = -1, undecided = 0, positive = 1 };

/// -1, 0 or +1.
int to_label(Prediction p);

/// Support facts of one completed picture: the training set plus the
/// new point under one hypothesized label.
struct PictureDiagnostics {
    int completion_label = 0;
    std::size_t sv_count = 0;
    bool new_point_is_sv = false;
    double sv_fraction = 0.0;  // sv_count over the picture size
};

/// Outcome of transducing one new point. mu_neg and mu_pos are the
/// reciprocal measure values of the two pictures; the prediction is the
/// label whose picture is more possible, undecided on an exact tie.
/// incertitude = min(mu_neg, mu_pos), confidence = 1 - incertitude,
/// possibility = min(1, max(mu_neg, mu_pos)).
struct TransductiveResult {
    Prediction prediction = Prediction::undecided;
    double incertitude = 0.0;
    double confidence = 0.0;
    double possibility = 0.0;
    ExtendedNonNegReal mu_neg;
    ExtendedNonNegReal mu_pos;
    PictureDiagnostics picture_neg;
    PictureDiagnostics picture_pos;
};

/// Completes the training sequence with (x_new, -1) and (x_new, +1),
/// scores both pictures under the configured measure and decides.
/// Requires both labels in training. Throws NoSupportingPicture when
/// both pictures score zero, which a converged solver never produces.
TransductiveResult transduce(std::span<const LabeledExample> training,
                             std::span<const double> x_new,
                             const MeasureConfig& config);

/// The decision rule alone, exposed for feeding synthetic picture
/// scores. picture_size is the completed length l + 1.
TransductiveResult decide_from_pictures(const MeasuredPicture& neg,
                                        const MeasuredPicture& pos,
                                        std::size_t picture_size);

/// Incertitude attached to predicting `predicted_label`: the reciprocal
/// score of the opposite picture. Infinite when the new point is not a
/// support vector there; finite whenever the label came from an
/// inductive decision on the training set.
ExtendedNonNegReal confidence_for(std::span<const LabeledExample> training,
                                  std::span<const double> x_new, int predicted_label,
                                  const MeasureConfig& config);

/// min(1, max(mu_neg, mu_pos)); identical to the field of transduce.
double possibility_of(std::span<const LabeledExample> training,
                      std::span<const double> x_new, const MeasureConfig& config);

/// Joint transduction of k new points: every completion over
/// {-1, +1}^k is scored with the multi-example measure, the completion
/// of least impossibility wins (ties to the lexicographically smallest
/// with -1 < +1), and its incertitude is the reciprocal of the best
/// competitor's score. k is capped at 8 (2^k solves).
struct JointResult {
    std::vector<int> labels;
    ExtendedNonNegReal incertitude;
};

JointResult transduce_joint(std::span<const LabeledExample> training,
                            std::span<const std::vector<double>> new_points,
                            const MeasureConfig& config);

/// Wide-margin classification of a query against a trained solution:
/// y_point_pos when f(x) > 1 + sv_tolerance, y_point_neg when
/// f(x) < -(1 + sv_tolerance), borderland between. A y-point's label is
/// what transduce predicts, with the opposite picture alone setting the
/// incertitude.
enum class RegionLabel { y_point_neg, borderland, y_point_pos };

RegionLabel classify_region(const SvmSolution& training_solution,
                            std::span<const double> x);

}  // namespace tcm
