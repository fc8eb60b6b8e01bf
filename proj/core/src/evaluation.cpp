#include "tcm/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "tcm/errors.hpp"
#include "tcm/random.hpp"

namespace tcm {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<TestOutcome> run_testset(const Dataset& train, const Dataset& test,
                                     const MeasureConfig& config) {
    if (test.size() > 0 && train.size() > 0 && test.dimension() != train.dimension()) {
        throw DimensionMismatch("test feature length differs from training");
    }
    std::vector<TestOutcome> outcomes;
    outcomes.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        TestOutcome o;
        o.id = i;
        o.true_label = test.examples[i].label;
        o.result = transduce(train.examples, test.examples[i].features, config);
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

namespace {

void accumulate(ClusterStats& s, const TestOutcome& o, bool correct, bool undecided) {
    const TransductiveResult& r = o.result;
    if (s.count == 0) {
        s.min_confidence = r.confidence;
        s.max_confidence = r.confidence;
    } else {
        s.min_confidence = std::min(s.min_confidence, r.confidence);
        s.max_confidence = std::max(s.max_confidence, r.confidence);
    }
    ++s.count;
    if (undecided) {
        ++s.n_undecided;
    } else if (correct) {
        ++s.n_correct;
    } else {
        ++s.n_errors;
    }
    // Means are finalized by the caller; accumulate sums here.
    s.mean_confidence += r.confidence;
    s.mean_possibility += r.possibility;
}

void finalize(ClusterStats& s) {
    if (s.count > 0) {
        s.mean_confidence /= static_cast<double>(s.count);
        s.mean_possibility /= static_cast<double>(s.count);
    }
}

}  // namespace

EvaluationReport summarize(std::span<const TestOutcome> outcomes) {
    EvaluationReport report;
    report.n_test = outcomes.size();
    for (const TestOutcome& o : outcomes) {
        if (!o.true_label) {
            throw InvalidConfig("summarize requires a true label on every outcome");
        }
        bool undecided = o.result.prediction == Prediction::undecided;
        bool correct = !undecided && to_label(o.result.prediction) == *o.true_label;
        if (undecided) {
            ++report.n_undecided;
        } else if (!correct) {
            ++report.n_errors;
        }
        ClusterStats& cluster = (o.result.possibility == 1.0)
                                    ? report.full_possibility
                                    : report.reduced_possibility;
        accumulate(cluster, o, correct, undecided);
    }
    finalize(report.full_possibility);
    finalize(report.reduced_possibility);
    return report;
}

EvaluationReport evaluate_testset(const Dataset& train, const Dataset& test,
                                  const MeasureConfig& config) {
    std::vector<TestOutcome> outcomes = run_testset(train, test, config);
    return summarize(outcomes);
}

std::vector<CalibrationRow> calibration_experiment(const SynthConfig& synth,
                                                   std::span<const double> epsilons,
                                                   std::size_t n_trials,
                                                   std::uint64_t seed,
                                                   const MeasureConfig& config) {
    synth.validate();
    if (synth.n_per_class < 2) {
        throw InvalidConfig("calibration needs n_per_class >= 2 so the training part "
                            "keeps both labels");
    }
    if (n_trials == 0) throw InvalidConfig("calibration needs at least one trial");
    if (epsilons.empty()) throw InvalidConfig("calibration needs at least one epsilon");
    for (double eps : epsilons) {
        if (!(eps > 0.0 && eps < 1.0)) {
            throw InvalidDelta("calibration epsilons must lie strictly between 0 and 1");
        }
    }
    config.validate();

    std::vector<CalibrationRow> rows(epsilons.size());
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        rows[e].epsilon = epsilons[e];
        rows[e].n_trials = n_trials;
    }

    RandomStream rng(seed);
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        SynthConfig sc = synth;
        sc.seed = rng.next_u64();
        Dataset data = generate_synthetic(sc);
        // The generator emits one class then the other; shuffling makes
        // the held-out slot exchangeable with every other slot.
        rng.shuffle(data.examples);
        LabeledExample holdout = std::move(data.examples.back());
        data.examples.pop_back();

        TransductiveResult r = transduce(data.examples, holdout.features, config);
        bool wrong = r.prediction != Prediction::undecided &&
                     to_label(r.prediction) != holdout.label;
        if (!wrong) continue;
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            if (r.incertitude <= epsilons[e]) ++rows[e].n_confident_errors;
        }
    }
    for (CalibrationRow& row : rows) {
        row.empirical_rate = static_cast<double>(row.n_confident_errors) /
                             static_cast<double>(row.n_trials);
    }
    return rows;
}

void export_scatter(std::span<const TestOutcome> outcomes, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "confidence,possibility,outcome\n";
    for (const TestOutcome& o : outcomes) {
        if (!o.true_label) {
            throw InvalidConfig("scatter export requires a true label on every outcome");
        }
        char tag = 'U';
        if (o.result.prediction != Prediction::undecided) {
            tag = to_label(o.result.prediction) == *o.true_label ? 'O' : 'X';
        }
        out << format_real(o.result.confidence) << ','
            << format_real(o.result.possibility) << ',' << tag << '\n';
    }
    if (!out) throw IoError("write failure on '" + path + "'");
}

void write_outcomes_csv(std::span<const TestOutcome> outcomes, std::ostream& out) {
    out << "id,true_label,prediction,incertitude,confidence,possibility,"
           "sv_count_neg_picture,sv_count_pos_picture,new_is_sv_neg,new_is_sv_pos\n";
    for (const TestOutcome& o : outcomes) {
        const TransductiveResult& r = o.result;
        out << o.id << ',';
        if (o.true_label) out << *o.true_label;
        out << ',' << to_label(r.prediction) << ',' << format_real(r.incertitude) << ','
            << format_real(r.confidence) << ',' << format_real(r.possibility) << ','
            << r.picture_neg.sv_count << ',' << r.picture_pos.sv_count << ','
            << (r.picture_neg.new_point_is_sv ? 1 : 0) << ','
            << (r.picture_pos.new_point_is_sv ? 1 : 0) << '\n';
    }
}

namespace {

void write_cluster_row(std::ostream& out, const char* name, const ClusterStats& s) {
    out << name << ',' << s.count << ',' << s.n_correct << ',' << s.n_errors << ','
        << s.n_undecided << ',';
    if (s.count > 0) {
        out << format_real(s.min_confidence) << ',' << format_real(s.max_confidence)
            << ',' << format_real(s.mean_confidence) << ','
            << format_real(s.mean_possibility);
    } else {
        out << ",,,";
    }
    out << '\n';
}

}  // namespace

void write_report(const EvaluationReport& report, std::ostream& out) {
    out << "n_test," << report.n_test << '\n';
    out << "n_errors," << report.n_errors << '\n';
    out << "n_undecided," << report.n_undecided << '\n';
    out << "cluster,count,n_correct,n_errors,n_undecided,min_confidence,"
           "max_confidence,mean_confidence,mean_possibility\n";
    write_cluster_row(out, "possibility_full", report.full_possibility);
    write_cluster_row(out, "possibility_reduced", report.reduced_possibility);
}

void write_calibration_csv(std::span<const CalibrationRow> rows, std::ostream& out) {
    out << "epsilon,n_trials,n_confident_errors,empirical_rate\n";
    for (const CalibrationRow& row : rows) {
        out << format_real(row.epsilon) << ',' << row.n_trials << ','
            << row.n_confident_errors << ',' << format_real(row.empirical_rate) << '\n';
    }
}

}  // namespace tcm
