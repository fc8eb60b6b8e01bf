#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcm/dataset.hpp"
#include "tcm/measures.hpp"
#include "tcm/transduction.hpp"

namespace tcm {

/// One transduced test point, kept per point so reports and scatter
/// exports come from the same pass.
struct TestOutcome {
    std::size_t id = 0;
    std::optional<int> true_label;
    TransductiveResult result;
};

/// Summary over one possibility cluster. The confidence and possibility
/// statistics are meaningful only when count > 0.
struct ClusterStats {
    std::size_t count = 0;
    std::size_t n_correct = 0;
    std::size_t n_errors = 0;
    std::size_t n_undecided = 0;
    double min_confidence = 0.0;
    double max_confidence = 0.0;
    double mean_confidence = 0.0;
    double mean_possibility = 0.0;
};

/// Test-set report, split into the cluster with full possibility
/// (exactly 1: the rejected label's picture was not supported) and the
/// cluster with reduced possibility (< 1). An error is a decided
/// prediction different from the true label; undecided points are
/// counted separately.
struct EvaluationReport {
    std::size_t n_test = 0;
    std::size_t n_errors = 0;
    std::size_t n_undecided = 0;
    ClusterStats full_possibility;
    ClusterStats reduced_possibility;
};

/// Transduces every test point against the training set.
std::vector<TestOutcome> run_testset(const Dataset& train, const Dataset& test,
                                     const MeasureConfig& config);

/// Aggregates outcomes into the two-cluster report. Every outcome must
/// carry a true label.
EvaluationReport summarize(std::span<const TestOutcome> outcomes);

EvaluationReport evaluate_testset(const Dataset& train, const Dataset& test,
                                  const MeasureConfig& config);

/// One significance level of the calibration experiment: how often the
/// predictor was simultaneously wrong and confident at level epsilon
/// (incertitude <= epsilon). Validity keeps empirical_rate near or
/// below epsilon.
struct CalibrationRow {
    double epsilon = 0.0;
    std::size_t n_trials = 0;
    std::size_t n_confident_errors = 0;
    double empirical_rate = 0.0;
};

/// Repeats: draw a fresh synthetic dataset, shuffle it, hold out the
/// last point, transduce it, and record (wrong and incertitude <= eps)
/// for every epsilon. The shuffle keeps the held-out slot exchangeable
/// with the rest. An undecided prediction is never counted wrong.
std::vector<CalibrationRow> calibration_experiment(const SynthConfig& synth,
                                                   std::span<const double> epsilons,
                                                   std::size_t n_trials,
                                                   std::uint64_t seed,
                                                   const MeasureConfig& config);

/// Writes one row per outcome: confidence, possibility, and a tag
/// O (correct), X (error) or U (undecided). Requires true labels.
void export_scatter(std::span<const TestOutcome> outcomes, const std::string& path);

/// Per-point table of the transduction columns; true_label is left
/// empty when unknown.
void write_outcomes_csv(std::span<const TestOutcome> outcomes, std::ostream& out);

/// Deterministic text form of the report.
void write_report(const EvaluationReport& report, std::ostream& out);

/// Rows of calibration_experiment as deterministic text.
void write_calibration_csv(std::span<const CalibrationRow> rows, std::ostream& out);

/// Fixed six-significant-digit rendering used by every text output.
std::string format_real(double v);

}  // namespace tcm
