// Command-line front end: batch transduction, test-set evaluation,
// calibration experiments, measure-validity checks and scatter export.
//
// Exit codes: 0 success, 1 usage error, 2 data or configuration error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcm/dataset.hpp"
#include "tcm/errors.hpp"
#include "tcm/evaluation.hpp"
#include "tcm/kernel.hpp"
#include "tcm/measures.hpp"
#include "tcm/random.hpp"
#include "tcm/svm.hpp"
#include "tcm/transduction.hpp"

namespace {

struct ModelOptions {
    std::string kernel = "linear";
    int degree = 2;
    double coef0 = 1.0;
    double gamma = 1.0;
    double C = 1.0;
    double sv_tol = 1e-6;
    double kkt_tol = 1e-8;
    long max_iter = 1000000;
};

struct DataOptions {
    std::string train_path;
    std::string test_path;
    int label_col = -1;  // -1: last column
    std::string pos_token = "1";
    std::string neg_token = "-1";
};

void add_model_flags(CLI::App& cmd, ModelOptions& m) {
    cmd.add_option("--kernel", m.kernel, "Kernel family")
        ->check(CLI::IsMember({"linear", "poly", "rbf"}))
        ->capture_default_str();
    cmd.add_option("--degree", m.degree, "Polynomial degree")->capture_default_str();
    cmd.add_option("--coef0", m.coef0, "Polynomial additive constant")
        ->capture_default_str();
    cmd.add_option("--gamma", m.gamma, "Width of the rbf kernel")
        ->capture_default_str();
    cmd.add_option("--C", m.C, "Quadratic slack penalty")->capture_default_str();
    cmd.add_option("--sv-tol", m.sv_tol, "Support-vector threshold")
        ->capture_default_str();
    cmd.add_option("--kkt-tol", m.kkt_tol, "Solver convergence tolerance")
        ->capture_default_str();
    cmd.add_option("--max-iter", m.max_iter, "Solver iteration cap")
        ->capture_default_str();
}

void add_data_flags(CLI::App& cmd, DataOptions& d) {
    cmd.add_option("--train", d.train_path, "Training CSV")->required();
    cmd.add_option("--test", d.test_path, "Test CSV")->required();
    cmd.add_option("--label-col", d.label_col,
                   "Zero-based label column (default: last)")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--pos-token", d.pos_token, "Label token mapped to +1")
        ->capture_default_str();
    cmd.add_option("--neg-token", d.neg_token, "Label token mapped to -1")
        ->capture_default_str();
}

tcm::CsvSchema schema_of(const DataOptions& d) {
    tcm::CsvSchema schema;
    if (d.label_col >= 0) schema.label_column = static_cast<std::size_t>(d.label_col);
    schema.positive_token = d.pos_token;
    schema.negative_token = d.neg_token;
    return schema;
}

// Grammar accepted by --measure. transduce/evaluate take the single-point
// forms; validate additionally takes multi:<k>[:f] and const:<v>.
struct MeasureSpec {
    bool is_const = false;
    double const_value = 0.0;
    tcm::MeasureConfig::Kind kind = tcm::MeasureConfig::Kind::sv_count;
    tcm::WeightFunction weight;
    std::size_t k = 1;
};

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    parts.push_back(current);
    return parts;
}

double parse_real_or_fail(const std::string& token, const std::string& what) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (token.empty() || end != begin + token.size() || errno == ERANGE ||
        !std::isfinite(v)) {
        throw CLI::ValidationError("--measure", what + " '" + token +
                                                    "' is not a finite real");
    }
    return v;
}

// parts are the colon fields after the weighting keyword, e.g.
// {"power", "1.5"}; an empty list means the sign weighting.
tcm::WeightFunction parse_weighting(const std::vector<std::string>& parts,
                                    const std::string& text) {
    tcm::WeightFunction w;
    if (parts.empty() || parts[0] == "sign") {
        w.kind = tcm::WeightFunction::Kind::sign;
        if (parts.size() > 1) throw CLI::ValidationError("--measure", text);
    } else if (parts[0] == "identity") {
        w.kind = tcm::WeightFunction::Kind::identity;
        if (parts.size() > 1) throw CLI::ValidationError("--measure", text);
    } else if (parts[0] == "power") {
        w.kind = tcm::WeightFunction::Kind::power;
        if (parts.size() != 2) {
            throw CLI::ValidationError("--measure",
                                       "power weighting needs one exponent");
        }
        w.exponent = parse_real_or_fail(parts[1], "exponent");
    } else {
        throw CLI::ValidationError("--measure", "unknown weighting '" + parts[0] +
                                                    "' in '" + text + "'");
    }
    return w;
}

MeasureSpec parse_measure_text(const std::string& text, bool extended) {
    std::vector<std::string> parts = split_on(text, ':');
    MeasureSpec spec;
    const std::string& head = parts[0];
    std::vector<std::string> rest(parts.begin() + 1, parts.end());
    if (head == "sv-count") {
        if (!rest.empty()) throw CLI::ValidationError("--measure", text);
        spec.kind = tcm::MeasureConfig::Kind::sv_count;
        return spec;
    }
    if (head == "weighted") {
        if (rest.empty()) {
            throw CLI::ValidationError("--measure",
                                       "weighted needs a weighting, e.g. "
                                       "weighted:sign");
        }
        spec.kind = tcm::MeasureConfig::Kind::weighted_alpha;
        spec.weight = parse_weighting(rest, text);
        return spec;
    }
    if (extended && head == "multi") {
        if (rest.empty()) {
            throw CLI::ValidationError("--measure", "multi needs a count, e.g. multi:2");
        }
        double k = parse_real_or_fail(rest[0], "count");
        if (k < 1.0 || k != std::floor(k)) {
            throw CLI::ValidationError("--measure",
                                       "multi count must be a positive integer");
        }
        spec.kind = tcm::MeasureConfig::Kind::multi_example;
        spec.k = static_cast<std::size_t>(k);
        spec.weight = parse_weighting({rest.begin() + 1, rest.end()}, text);
        return spec;
    }
    if (extended && head == "const") {
        if (rest.size() != 1) {
            throw CLI::ValidationError("--measure", "const needs one value");
        }
        spec.is_const = true;
        spec.const_value = parse_real_or_fail(rest[0], "value");
        return spec;
    }
    throw CLI::ValidationError("--measure", "unrecognized measure '" + text + "'");
}

tcm::MeasureConfig build_config(const ModelOptions& m, const MeasureSpec& spec) {
    tcm::MeasureConfig config;
    config.kind = spec.kind;
    config.weight = spec.weight;
    config.k = spec.k;
    if (m.kernel == "linear") {
        config.kernel.kind = tcm::KernelKind::linear;
    } else if (m.kernel == "poly") {
        config.kernel.kind = tcm::KernelKind::polynomial;
    } else {
        config.kernel.kind = tcm::KernelKind::rbf;
    }
    config.kernel.degree = m.degree;
    config.kernel.coef0 = m.coef0;
    config.kernel.gamma = m.gamma;
    config.solver.C = m.C;
    config.solver.sv_tolerance = m.sv_tol;
    config.solver.kkt_tolerance = m.kkt_tol;
    config.solver.max_iterations = m.max_iter;
    return config;
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw tcm::IoError("cannot open '" + path + "' for writing");
    fn(out);
    out.flush();
    if (!out) throw tcm::IoError("write failure on '" + path + "'");
}

std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool try_parse_real(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (token.empty() || end != begin + token.size() || errno == ERANGE ||
        !std::isfinite(v)) {
        return false;
    }
    out = v;
    return true;
}

// Feature-only CSV for unlabeled queries: every column numeric, optional
// header row.
tcm::Dataset load_unlabeled(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tcm::IoError("cannot open '" + path + "' for reading");
    std::vector<std::pair<std::size_t, std::string>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        rows.emplace_back(line_no, line);
    }
    if (in.bad()) throw tcm::IoError("read failure on '" + path + "'");
    if (rows.empty()) throw tcm::ParseError("'" + path + "' contains no rows");

    auto decode = [&](const std::pair<std::size_t, std::string>& row, bool lenient,
                      std::vector<double>& out) -> bool {
        std::vector<std::string> fields = split_on(row.second, ',');
        out.clear();
        for (const std::string& raw : fields) {
            double v = 0.0;
            if (!try_parse_real(trimmed(raw), v)) {
                if (lenient) return false;
                throw tcm::ParseError("line " + std::to_string(row.first) +
                                      ": '" + trimmed(raw) +
                                      "' is not a finite real");
            }
            out.push_back(v);
        }
        return true;
    };

    tcm::Dataset data;
    data.source = path;
    std::vector<double> features;
    std::size_t start = 0;
    if (decode(rows.front(), true, features)) {
        data.examples.push_back({features, 1});
    } else {
        for (const std::string& name : split_on(rows.front().second, ','))
            data.feature_names.push_back(trimmed(name));
        start = 1;
    }
    std::size_t n_columns = split_on(rows.front().second, ',').size();
    for (std::size_t r = start; r < rows.size(); ++r) {
        decode(rows[r], false, features);
        if (features.size() != n_columns) {
            throw tcm::ParseError("line " + std::to_string(rows[r].first) +
                                  ": expected " + std::to_string(n_columns) +
                                  " fields, found " +
                                  std::to_string(features.size()));
        }
        data.examples.push_back({features, 1});
    }
    return data;
}

// Reads a per-point table written by `transduce` back into outcomes;
// only the columns the scatter export consumes are required.
std::vector<tcm::TestOutcome> load_outcomes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tcm::IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) {
        throw tcm::ParseError("'" + path + "' contains no rows");
    }
    std::vector<std::string> header = split_on(trimmed(line), ',');
    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < header.size(); ++c) column[header[c]] = c;
    for (const char* name :
         {"id", "true_label", "prediction", "incertitude", "confidence",
          "possibility"}) {
        if (!column.count(name)) {
            throw tcm::ParseError("'" + path + "' lacks column '" +
                                  std::string(name) + "'");
        }
    }

    std::vector<tcm::TestOutcome> outcomes;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        std::vector<std::string> fields = split_on(trimmed(line), ',');
        if (fields.size() != header.size()) {
            throw tcm::ParseError("line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(header.size()) +
                                  " fields, found " + std::to_string(fields.size()));
        }
        auto real_at = [&](const char* name) {
            double v = 0.0;
            if (!try_parse_real(fields[column[name]], v)) {
                throw tcm::ParseError("line " + std::to_string(line_no) +
                                      ": bad value for '" + std::string(name) + "'");
            }
            return v;
        };
        tcm::TestOutcome o;
        o.id = static_cast<std::size_t>(real_at("id"));
        const std::string& truth = fields[column["true_label"]];
        if (!truth.empty()) {
            if (truth != "1" && truth != "-1") {
                throw tcm::ParseError("line " + std::to_string(line_no) +
                                      ": true_label must be 1 or -1");
            }
            o.true_label = truth == "1" ? 1 : -1;
        }
        double pred = real_at("prediction");
        if (pred != -1.0 && pred != 0.0 && pred != 1.0) {
            throw tcm::ParseError("line " + std::to_string(line_no) +
                                  ": prediction must be -1, 0 or 1");
        }
        o.result.prediction = static_cast<tcm::Prediction>(static_cast<int>(pred));
        o.result.incertitude = real_at("incertitude");
        o.result.confidence = real_at("confidence");
        o.result.possibility = real_at("possibility");
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

// Draws one sequence of length m from the two-cloud model, coin-flip
// labels, redrawn until both classes appear so the QP measures apply.
std::vector<tcm::LabeledExample> draw_sample(tcm::RandomStream& rng, std::size_t m,
                                             std::size_t dim, double separation,
                                             double noise) {
    std::vector<tcm::LabeledExample> sample;
    for (;;) {
        sample.clear();
        for (std::size_t i = 0; i < m; ++i) {
            tcm::LabeledExample ex;
            ex.label = rng.next_unit() < 0.5 ? -1 : 1;
            ex.features.resize(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                double mean = (d == 0) ? 0.5 * separation * ex.label : 0.0;
                ex.features[d] = mean + noise * rng.next_normal();
            }
            sample.push_back(std::move(ex));
        }
        if (tcm::has_both_labels(sample)) return sample;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transductive confidence machine"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tcm 1.0.0");

    ModelOptions model;
    DataOptions data;
    std::string measure_text = "sv-count";
    std::string out_path;
    std::string in_path;
    bool unlabeled = false;

    std::vector<double> epsilons = {0.05, 0.1, 0.2};
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    double separation = 2.0;
    double noise = 1.0;
    std::size_t n_per_class = 10;
    std::size_t dim = 2;
    std::size_t sample_size = 5;
    std::size_t n_samples = 20;
    std::string oracle_name = "permutation";

    CLI::App* transduce_cmd = app.add_subcommand(
        "transduce", "Per-point transduction table for a test set");
    add_data_flags(*transduce_cmd, data);
    add_model_flags(*transduce_cmd, model);
    transduce_cmd->add_option("--measure", measure_text,
                              "sv-count | weighted:sign | weighted:identity | "
                              "weighted:power:<q>")
        ->capture_default_str();
    transduce_cmd->add_flag("--unlabeled", unlabeled,
                            "Test CSV holds features only, no label column");
    transduce_cmd->add_option("--out", out_path, "Output file (default: stdout)");

    CLI::App* evaluate_cmd =
        app.add_subcommand("evaluate", "Aggregate test-set report");
    add_data_flags(*evaluate_cmd, data);
    add_model_flags(*evaluate_cmd, model);
    evaluate_cmd->add_option("--measure", measure_text,
                             "sv-count | weighted:sign | weighted:identity | "
                             "weighted:power:<q>")
        ->capture_default_str();
    evaluate_cmd->add_option("--out", out_path, "Output file (default: stdout)");

    CLI::App* calibrate_cmd = app.add_subcommand(
        "calibrate", "Wrong-and-confident rates on synthetic draws");
    add_model_flags(*calibrate_cmd, model);
    calibrate_cmd->add_option("--measure", measure_text,
                              "sv-count | weighted:sign | weighted:identity | "
                              "weighted:power:<q>")
        ->capture_default_str();
    calibrate_cmd->add_option("--epsilons", epsilons, "Significance levels")
        ->delimiter(',')
        ->capture_default_str();
    calibrate_cmd->add_option("--trials", trials, "Number of trials")
        ->capture_default_str();
    calibrate_cmd->add_option("--seed", seed, "Experiment seed")->capture_default_str();
    calibrate_cmd->add_option("--separation", separation, "Distance between class means")
        ->capture_default_str();
    calibrate_cmd->add_option("--noise", noise, "Isotropic spread")
        ->capture_default_str();
    calibrate_cmd->add_option("--n-per-class", n_per_class, "Examples per class")
        ->capture_default_str();
    calibrate_cmd->add_option("--dim", dim, "Feature dimension")->capture_default_str();
    calibrate_cmd->add_option("--out", out_path, "Output file (default: stdout)");

    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "Average a measure over all orderings of random samples");
    add_model_flags(*validate_cmd, model);
    validate_cmd->add_option("--measure", measure_text,
                             "sv-count | weighted:f | multi:<k>[:f] | const:<v>")
        ->capture_default_str();
    validate_cmd->add_option("--size", sample_size, "Sample length (max 7)")
        ->capture_default_str();
    validate_cmd->add_option("--samples", n_samples, "Number of samples")
        ->capture_default_str();
    validate_cmd->add_option("--seed", seed, "Sample seed")->capture_default_str();
    validate_cmd->add_option("--separation", separation, "Distance between class means")
        ->capture_default_str();
    validate_cmd->add_option("--noise", noise, "Isotropic spread")
        ->capture_default_str();
    validate_cmd->add_option("--dim", dim, "Feature dimension")->capture_default_str();
    validate_cmd->add_option("--oracle", oracle_name, "Averaging oracle")
        ->check(CLI::IsMember({"permutation", "exchangeable"}))
        ->capture_default_str();
    validate_cmd->add_option("--out", out_path, "Output file (default: stdout)");

    CLI::App* scatter_cmd = app.add_subcommand(
        "scatter", "Confidence/possibility scatter rows from a transduce table");
    scatter_cmd->add_option("--in", in_path, "Per-point table written by transduce")
        ->required();
    scatter_cmd->add_option("--out", out_path, "Scatter output file")->required();

    transduce_cmd->callback([&] {
        tcm::MeasureConfig config =
            build_config(model, parse_measure_text(measure_text, false));
        tcm::Dataset train = tcm::load_examples(data.train_path, schema_of(data));
        std::vector<tcm::TestOutcome> outcomes;
        if (unlabeled) {
            tcm::Dataset queries = load_unlabeled(data.test_path);
            outcomes.reserve(queries.size());
            for (std::size_t i = 0; i < queries.size(); ++i) {
                tcm::TestOutcome o;
                o.id = i;
                o.result = tcm::transduce(train.examples,
                                          queries.examples[i].features, config);
                outcomes.push_back(std::move(o));
            }
        } else {
            tcm::Dataset test = tcm::load_examples(data.test_path, schema_of(data));
            outcomes = tcm::run_testset(train, test, config);
        }
        with_output(out_path,
                    [&](std::ostream& out) { tcm::write_outcomes_csv(outcomes, out); });
    });

    evaluate_cmd->callback([&] {
        tcm::MeasureConfig config =
            build_config(model, parse_measure_text(measure_text, false));
        tcm::Dataset train = tcm::load_examples(data.train_path, schema_of(data));
        tcm::Dataset test = tcm::load_examples(data.test_path, schema_of(data));
        tcm::EvaluationReport report = tcm::evaluate_testset(train, test, config);
        with_output(out_path,
                    [&](std::ostream& out) { tcm::write_report(report, out); });
    });

    calibrate_cmd->callback([&] {
        tcm::MeasureConfig config =
            build_config(model, parse_measure_text(measure_text, false));
        tcm::SynthConfig synth;
        synth.n_per_class = n_per_class;
        synth.dimension = dim;
        synth.separation = separation;
        synth.noise = noise;
        std::vector<tcm::CalibrationRow> rows =
            tcm::calibration_experiment(synth, epsilons, trials, seed, config);
        with_output(out_path,
                    [&](std::ostream& out) { tcm::write_calibration_csv(rows, out); });
    });

    validate_cmd->callback([&] {
        MeasureSpec spec = parse_measure_text(measure_text, true);
        tcm::ImpossibilityMeasure measure;
        if (spec.is_const) {
            double v = spec.const_value;
            measure = [v](std::span<const tcm::LabeledExample>) {
                return tcm::ExtendedNonNegReal(v);
            };
        } else {
            measure = tcm::make_measure(build_config(model, spec));
        }
        tcm::RandomStream rng(seed);
        with_output(out_path, [&](std::ostream& out) {
            out << "sample,average,abs_deviation\n";
            double worst = 0.0;
            for (std::size_t s = 0; s < n_samples; ++s) {
                std::vector<tcm::LabeledExample> sample =
                    draw_sample(rng, sample_size, dim, separation, noise);
                double average =
                    oracle_name == "permutation"
                        ? tcm::permutation_validity_oracle(measure, sample)
                        : tcm::exchangeable_validity_oracle(
                              measure, tcm::Hyperset::signature_of(sample));
                double deviation = std::fabs(average - 1.0);
                worst = std::max(worst, deviation);
                out << s << ',' << tcm::format_real(average) << ','
                    << tcm::format_real(deviation) << '\n';
            }
            out << "max_deviation," << tcm::format_real(worst) << '\n';
        });
    });

    scatter_cmd->callback([&] {
        std::vector<tcm::TestOutcome> outcomes = load_outcomes(in_path);
        tcm::export_scatter(outcomes, out_path);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const tcm::ConvergenceFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const tcm::NoSupportingPicture& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const tcm::InternalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const tcm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
