#pragma once

#include <unistd.h>

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tcm/dataset.hpp"
#include "tcm/measures.hpp"
#include "tcm/random.hpp"

namespace helpers {

/// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("tcm_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

/// Generic random instance: two displaced Gaussian clouds, labels drawn
/// per example, regenerated until both labels appear. Continuous draws,
/// so examples are pairwise distinct with probability one.
inline std::vector<tcm::LabeledExample> random_instance(tcm::RandomStream& rng,
                                                        std::size_t l, std::size_t n,
                                                        double separation) {
    std::vector<tcm::LabeledExample> out;
    while (true) {
        out.clear();
        for (std::size_t i = 0; i < l; ++i) {
            tcm::LabeledExample ex;
            ex.label = rng.next_unit() < 0.5 ? -1 : 1;
            ex.features.resize(n);
            for (std::size_t d = 0; d < n; ++d) {
                double mean = (d == 0) ? 0.5 * separation * ex.label : 0.0;
                ex.features[d] = mean + rng.next_normal();
            }
            out.push_back(std::move(ex));
        }
        if (tcm::has_both_labels(out)) return out;
    }
}

inline std::vector<double> random_point(tcm::RandomStream& rng, std::size_t n,
                                        double scale = 1.0) {
    std::vector<double> x(n);
    for (std::size_t d = 0; d < n; ++d) x[d] = scale * rng.next_normal();
    return x;
}

/// Fifty negative examples at (i, -1) and fifty positives at (i, +1),
/// i = 1..n_pairs. Every point sits the same distance from the optimal
/// plane, so all of them end up support vectors with equal weight, and
/// deleting any one of them moves the objective.
inline std::vector<tcm::LabeledExample> paired_rows(std::size_t n_pairs = 50) {
    std::vector<tcm::LabeledExample> out;
    out.reserve(2 * n_pairs);
    for (std::size_t i = 1; i <= n_pairs; ++i) {
        out.push_back({{static_cast<double>(i), -1.0}, -1});
    }
    for (std::size_t i = 1; i <= n_pairs; ++i) {
        out.push_back({{static_cast<double>(i), +1.0}, +1});
    }
    return out;
}

inline tcm::MeasureConfig sv_count_config(double C = 1.0) {
    tcm::MeasureConfig config;
    config.kind = tcm::MeasureConfig::Kind::sv_count;
    config.solver.C = C;
    return config;
}

inline tcm::MeasureConfig weighted_config(tcm::WeightFunction::Kind kind,
                                          double exponent = 2.0, double C = 1.0) {
    tcm::MeasureConfig config;
    config.kind = tcm::MeasureConfig::Kind::weighted_alpha;
    config.weight = tcm::WeightFunction{kind, exponent};
    config.solver.C = C;
    return config;
}

}  // namespace helpers
