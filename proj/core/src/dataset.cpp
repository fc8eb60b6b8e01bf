#include "tcm/dataset.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tcm/errors.hpp"
#include "tcm/random.hpp"

namespace tcm {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(trim(current));
    return fields;
}

bool parse_real(const std::string& token, double& out) {
    if (token.empty()) return false;
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end != begin + token.size() || errno == ERANGE || !std::isfinite(v)) {
        return false;
    }
    out = v;
    return true;
}

// Attempts to decode one CSV row. Returns false without throwing when
// `lenient` is set (header detection); otherwise throws ParseError.
bool decode_row(const std::vector<std::string>& fields, std::size_t label_col,
                const CsvSchema& schema, std::size_t line_no, bool lenient,
                LabeledExample& out) {
    auto fail = [&](const std::string& msg) -> bool {
        if (lenient) return false;
        throw ParseError("line " + std::to_string(line_no) + ": " + msg);
    };
    const std::string& token = fields[label_col];
    if (token == schema.positive_token) {
        out.label = 1;
    } else if (token == schema.negative_token) {
        out.label = -1;
    } else {
        return fail("unrecognized label token '" + token + "'");
    }
    out.features.clear();
    out.features.reserve(fields.size() - 1);
    for (std::size_t c = 0; c < fields.size(); ++c) {
        if (c == label_col) continue;
        double v = 0.0;
        if (!parse_real(fields[c], v)) {
            return fail("field " + std::to_string(c + 1) + " is not a finite real: '" +
                        fields[c] + "'");
        }
        out.features.push_back(v);
    }
    return true;
}

std::string shortest_repr(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

Dataset load_examples(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::vector<std::pair<std::size_t, std::string>> rows;  // (line number, text)
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        rows.emplace_back(line_no, line);
    }
    if (in.bad()) {
        throw IoError("read failure on '" + path + "'");
    }
    if (rows.empty()) {
        throw ParseError("'" + path + "' contains no rows");
    }

    std::vector<std::string> first = split_fields(rows.front().second);
    if (first.size() < 2) {
        throw ParseError("line " + std::to_string(rows.front().first) +
                         ": need at least one feature column and one label column");
    }
    std::size_t n_columns = first.size();
    std::size_t label_col = schema.label_column.value_or(n_columns - 1);
    if (label_col >= n_columns) {
        throw ParseError("label column " + std::to_string(label_col) +
                         " out of range for " + std::to_string(n_columns) + " columns");
    }

    Dataset data;
    data.source = path;

    LabeledExample probe;
    const std::size_t start = 1;
    if (decode_row(first, label_col, schema, rows.front().first, true, probe)) {
        data.examples.push_back(std::move(probe));
    } else {
        for (std::size_t c = 0; c < n_columns; ++c) {
            if (c != label_col) data.feature_names.push_back(first[c]);
        }
    }

    for (std::size_t r = start; r < rows.size(); ++r) {
        std::vector<std::string> fields = split_fields(rows[r].second);
        if (fields.size() != n_columns) {
            throw ParseError("line " + std::to_string(rows[r].first) + ": expected " +
                             std::to_string(n_columns) + " fields, found " +
                             std::to_string(fields.size()));
        }
        LabeledExample ex;
        decode_row(fields, label_col, schema, rows[r].first, false, ex);
        data.examples.push_back(std::move(ex));
    }
    return data;
}

void save_examples(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    std::size_t n = data.dimension();
    for (std::size_t d = 0; d < n; ++d) {
        if (d < data.feature_names.size() && !data.feature_names[d].empty()) {
            out << data.feature_names[d];
        } else {
            out << "x" << d;
        }
        out << ',';
    }
    out << "label\n";
    for (const LabeledExample& ex : data.examples) {
        if (ex.features.size() != n) {
            throw DimensionMismatch("save_examples: ragged feature lengths");
        }
        for (double v : ex.features) {
            out << shortest_repr(v) << ',';
        }
        out << ex.label << '\n';
    }
    if (!out) {
        throw IoError("write failure on '" + path + "'");
    }
}

void SynthConfig::validate() const {
    if (n_per_class == 0) throw InvalidConfig("n_per_class must be positive");
    if (dimension == 0) throw InvalidConfig("dimension must be positive");
    if (!(separation >= 0.0)) throw InvalidConfig("separation must be nonnegative");
    if (!(noise > 0.0)) throw InvalidConfig("noise must be positive");
}

Dataset generate_synthetic(const SynthConfig& config) {
    config.validate();
    RandomStream rng(config.seed);
    Dataset data;
    std::ostringstream tag;
    tag << "synthetic(n_per_class=" << config.n_per_class << ",dim=" << config.dimension
        << ",separation=" << config.separation << ",noise=" << config.noise
        << ",seed=" << config.seed << ")";
    data.source = tag.str();
    data.examples.reserve(2 * config.n_per_class);
    for (int label : {-1, 1}) {
        double center = 0.5 * config.separation * label;
        for (std::size_t i = 0; i < config.n_per_class; ++i) {
            LabeledExample ex;
            ex.label = label;
            ex.features.resize(config.dimension);
            for (std::size_t d = 0; d < config.dimension; ++d) {
                double mean = (d == 0) ? center : 0.0;
                ex.features[d] = mean + config.noise * rng.next_normal();
            }
            data.examples.push_back(std::move(ex));
        }
    }
    return data;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw SplitError("train_fraction must lie strictly between 0 and 1");
    }
    std::size_t n = data.size();
    if (n < 2) {
        throw SplitError("need at least two examples to split");
    }
    auto train_count = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(n)));
    if (train_count == 0 || train_count >= n) {
        throw SplitError("split leaves one side empty");
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    RandomStream rng(seed);
    rng.shuffle(order);

    Dataset train;
    Dataset test;
    train.feature_names = data.feature_names;
    test.feature_names = data.feature_names;
    train.source = data.source + "[train]";
    test.source = data.source + "[test]";
    for (std::size_t i = 0; i < n; ++i) {
        (i < train_count ? train : test).examples.push_back(data.examples[order[i]]);
    }
    if (!has_both_labels(train.examples)) {
        throw SplitError("training side came out single-class; adjust fraction or seed");
    }
    return {std::move(train), std::move(test)};
}

bool has_both_labels(std::span<const LabeledExample> examples) {
    bool neg = false;
    bool pos = false;
    for (const LabeledExample& ex : examples) {
        (ex.label > 0 ? pos : neg) = true;
        if (neg && pos) return true;
    }
    return false;
}

bool has_duplicate(std::span<const LabeledExample> examples) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
        for (std::size_t j = i + 1; j < examples.size(); ++j) {
            if (examples[i] == examples[j]) return true;
        }
    }
    return false;
}

}  // namespace tcm
