#include "tcm/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tcm/errors.hpp"

namespace tcm {

void SolverConfig::validate() const {
    if (!(C > 0.0)) throw InvalidConfig("C must be positive");
    if (!(kkt_tolerance > 0.0)) throw InvalidConfig("kkt_tolerance must be positive");
    if (!(sv_tolerance > 0.0)) throw InvalidConfig("sv_tolerance must be positive");
    if (max_iterations < 1) throw InvalidConfig("max_iterations must be positive");
}

namespace {

void validate_training_input(std::span<const LabeledExample> examples) {
    if (!has_both_labels(examples)) {
        throw SingleClassInput("training input must contain both labels");
    }
    std::size_t n = examples.front().features.size();
    for (const LabeledExample& ex : examples) {
        if (ex.features.size() != n) {
            throw DimensionMismatch("training examples have differing feature lengths");
        }
        if (ex.label != 1 && ex.label != -1) {
            throw InternalError("labels must be -1 or +1");
        }
    }
}

}  // namespace

SvmSolution solve_soft_margin(std::span<const LabeledExample> examples,
                              const KernelConfig& kernel, const SolverConfig& solver) {
    kernel.validate();
    solver.validate();
    validate_training_input(examples);

    const std::size_t m = examples.size();
    const double diag_add = 1.0 / (2.0 * solver.C);

    // The quadratic slack term folds into a hard margin dual over the
    // shifted kernel kt(i, j) = k(i, j) + [i == j]/(2C):
    //   minimize (1/2) sum_ij a_i a_j y_i y_j kt(i, j) - sum_i a_i
    //   subject to sum_i a_i y_i = 0, a_i >= 0.
    // kt is strictly positive definite, so the minimizer is unique and
    // every pairwise curvature below is at least 1/C.
    std::vector<double> kt(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double v = kernel_value(kernel, examples[i].features, examples[j].features);
            if (i == j) v += diag_add;
            kt[i * m + j] = v;
            kt[j * m + i] = v;
        }
    }

    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = examples[i].label;

    // Maximal violating pair descent. grad_i = d(dual)/d(a_i); the pair
    // chosen is the steepest feasible ascent/descent pair, ties broken
    // to the lowest index so runs are reproducible.
    std::vector<double> alpha(m, 0.0);
    std::vector<double> grad(m, -1.0);
    bool converged = false;
    for (long iter = 0; iter < solver.max_iterations; ++iter) {
        double best_up = -std::numeric_limits<double>::infinity();
        double best_low = std::numeric_limits<double>::infinity();
        std::size_t i_up = m;
        std::size_t i_low = m;
        for (std::size_t t = 0; t < m; ++t) {
            double v = -y[t] * grad[t];
            if ((y[t] > 0.0 || alpha[t] > 0.0) && v > best_up) {
                best_up = v;
                i_up = t;
            }
            if ((y[t] < 0.0 || alpha[t] > 0.0) && v < best_low) {
                best_low = v;
                i_low = t;
            }
        }
        if (best_up - best_low <= solver.kkt_tolerance) {
            converged = true;
            break;
        }

        const std::size_t i = i_up;
        const std::size_t j = i_low;
        // Step along a_i += y_i d, a_j -= y_j d, which keeps the
        // equality constraint. Curvature eta >= 1/C, never degenerate.
        double eta = kt[i * m + i] + kt[j * m + j] - 2.0 * kt[i * m + j];
        double d = (best_up - best_low) / eta;
        if (y[i] < 0.0) d = std::min(d, alpha[i]);
        if (y[j] > 0.0) d = std::min(d, alpha[j]);

        alpha[i] = std::max(0.0, alpha[i] + y[i] * d);
        alpha[j] = std::max(0.0, alpha[j] - y[j] * d);
        for (std::size_t t = 0; t < m; ++t) {
            grad[t] += d * y[t] * (kt[t * m + i] - kt[t * m + j]);
        }
    }
    if (!converged) {
        throw ConvergenceFailure("solver exhausted max_iterations at kkt_tolerance " +
                                 std::to_string(solver.kkt_tolerance));
    }

    SvmSolution sol;
    sol.alphas = alpha;
    sol.examples.assign(examples.begin(), examples.end());
    sol.kernel = kernel;
    sol.solver = solver;
    sol.slacks.resize(m);
    for (std::size_t i = 0; i < m; ++i) sol.slacks[i] = alpha[i] / (2.0 * solver.C);

    // u_i = sum_j a_j y_j kt(j, i); the plain-kernel expansion at x_i is
    // u_i - a_i y_i/(2C).
    std::vector<double> u(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += alpha[j] * y[j] * kt[j * m + i];
        u[i] = acc;
    }

    // Bias averaged over the points with positive dual weight, each of
    // which pins it through the tight constraint y_i f(x_i) = 1 - xi_i.
    double bias_sum = 0.0;
    std::size_t bias_count = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (alpha[i] > solver.sv_tolerance) {
            double expansion = u[i] - alpha[i] * y[i] * diag_add;
            bias_sum += y[i] * (1.0 - sol.slacks[i]) - expansion;
            ++bias_count;
        }
    }
    if (bias_count == 0) {
        throw InternalError("no positive dual weights to pin the bias");
    }
    sol.bias = bias_sum / static_cast<double>(bias_count);

    // Primal value; algebraically (1/2)|w|^2 + C sum xi^2 equals half
    // the quadratic form of the shifted kernel.
    double quad = 0.0;
    for (std::size_t i = 0; i < m; ++i) quad += alpha[i] * y[i] * u[i];
    sol.objective = 0.5 * quad;

    for (std::size_t i = 0; i < m; ++i) {
        double expansion = u[i] - alpha[i] * y[i] * diag_add;
        double residual = y[i] * (expansion + sol.bias) - (1.0 - sol.slacks[i]);
        if (std::abs(residual) <= solver.sv_tolerance) {
            sol.sv_indices.push_back(i);
        }
    }
    return sol;
}

std::vector<std::size_t> support_vector_set(const SvmSolution& solution) {
    std::vector<std::size_t> set;
    for (std::size_t i = 0; i < solution.size(); ++i) {
        const LabeledExample& ex = solution.examples[i];
        double residual = ex.label * decision_value(solution, ex.features) -
                          (1.0 - solution.slacks[i]);
        if (std::abs(residual) <= solution.solver.sv_tolerance) {
            set.push_back(i);
        }
    }
    return set;
}

std::vector<std::size_t> alpha_support_set(const SvmSolution& solution) {
    std::vector<std::size_t> set;
    for (std::size_t i = 0; i < solution.size(); ++i) {
        if (solution.alphas[i] > solution.solver.sv_tolerance) set.push_back(i);
    }
    return set;
}

double decision_value(const SvmSolution& solution, std::span<const double> x) {
    if (x.size() != solution.dimension()) {
        throw DimensionMismatch("decision_value: query length differs from training");
    }
    double acc = solution.bias;
    for (std::size_t i = 0; i < solution.size(); ++i) {
        if (solution.alphas[i] == 0.0) continue;
        acc += solution.alphas[i] * solution.examples[i].label *
               kernel_value(solution.kernel, solution.examples[i].features, x);
    }
    return acc;
}

bool is_essential_support_vector(std::span<const LabeledExample> examples,
                                 const KernelConfig& kernel, const SolverConfig& solver,
                                 std::size_t j) {
    solver.validate();
    if (j >= examples.size()) {
        throw InternalError("is_essential_support_vector: index out of range");
    }
    std::vector<LabeledExample> reduced;
    reduced.reserve(examples.size() - 1);
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (i != j) reduced.push_back(examples[i]);
    }
    if (!has_both_labels(reduced)) {
        throw SingleClassInput("deleting the example leaves a single class");
    }

    // Solve both problems well below the comparison tolerance so the
    // objective difference reflects the problems, not the solver.
    SolverConfig inner = solver;
    inner.kkt_tolerance = std::max(solver.kkt_tolerance * 1e-3, 1e-12);

    double full = solve_soft_margin(examples, kernel, inner).objective;
    double without = solve_soft_margin(reduced, kernel, inner).objective;
    return std::abs(full - without) <= solver.kkt_tolerance * (1.0 + std::abs(full));
}

}  // namespace tcm
