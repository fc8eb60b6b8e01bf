#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tcm {

/// One training or test example: a real feature vector and a label
/// from {-1, +1}.
struct LabeledExample {
    std::vector<double> features;
    int label = -1;

    friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// An ordered collection of examples with a uniform feature length.
struct Dataset {
    std::vector<LabeledExample> examples;
    std::vector<std::string> feature_names;  // empty when the source had no header
    std::string source;                      // file path or generator tag

    std::size_t size() const { return examples.size(); }
    std::size_t dimension() const {
        return examples.empty() ? 0 : examples.front().features.size();
    }
};

/// Column layout of a delimited text file. The label column defaults to
/// the last column; every other column is a feature.
struct CsvSchema {
    std::optional<std::size_t> label_column;
    std::string positive_token = "1";
    std::string negative_token = "-1";
};

/// Parses a comma separated file of examples. A first row that does not
/// parse as a data row is taken as a header of column names. Rows must
/// be rectangular and labels must match one of the schema tokens.
Dataset load_examples(const std::string& path, const CsvSchema& schema = {});

/// Writes a dataset in the format load_examples reads back, with a
/// header row and full round-trip precision for the features.
void save_examples(const Dataset& data, const std::string& path);

/// Two Gaussian clouds in `dimension` dimensions: class -1 centered at
/// -separation/2 and class +1 at +separation/2 along the first axis,
/// isotropic standard deviation `noise`. Negative examples come first.
struct SynthConfig {
    std::size_t n_per_class = 50;
    std::size_t dimension = 2;
    double separation = 2.0;
    double noise = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

Dataset generate_synthetic(const SynthConfig& config);

/// Seeded shuffle split. The fraction must lie in (0, 1) and both parts
/// must come out nonempty; the train part receives
/// round(train_fraction * size) examples.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data,
                                          double train_fraction,
                                          std::uint64_t seed);

/// True when both labels occur.
bool has_both_labels(std::span<const LabeledExample> examples);

/// True when some pair (i, j), i < j, has equal features and equal label.
bool has_duplicate(std::span<const LabeledExample> examples);

}  // namespace tcm
