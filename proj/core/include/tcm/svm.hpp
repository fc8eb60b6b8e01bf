#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tcm/dataset.hpp"
#include "tcm/kernel.hpp"

namespace tcm {

/// Solver knobs. sv_tolerance decides support-vector membership and the
/// wide-margin thresholds; kkt_tolerance is the optimality gap the
/// solver drives the dual to, and also scales objective comparisons.
struct SolverConfig {
    double C = 1.0;
    double kkt_tolerance = 1e-8;
    double sv_tolerance = 1e-6;
    long max_iterations = 1000000;

    void validate() const;
};

/// Solution of the quadratic-slack maximal margin problem
///
///   minimize   (w . w)/2 + C sum_i xi_i^2
///   subject to y_i ((w . x_i) + b) >= 1 - xi_i,  xi_i >= 0
///
/// in its kernel form. The weight vector is implicit in the alphas:
/// decision values are sum_i alpha_i y_i k(x_i, x) + bias.
struct SvmSolution {
    std::vector<double> alphas;        // dual coefficients, nonnegative
    double bias = 0.0;
    std::vector<double> slacks;        // xi_i = alpha_i / (2C)
    double objective = 0.0;            // primal value at the optimum
    std::vector<std::size_t> sv_indices;  // support vectors, ascending
    std::vector<LabeledExample> examples;
    KernelConfig kernel;
    SolverConfig solver;

    std::size_t size() const { return examples.size(); }
    std::size_t dimension() const {
        return examples.empty() ? 0 : examples.front().features.size();
    }
};

/// Solves the problem above. Requires both labels present (the solution
/// is then unique). Deterministic: equal inputs give bit-equal outputs.
SvmSolution solve_soft_margin(std::span<const LabeledExample> examples,
                              const KernelConfig& kernel,
                              const SolverConfig& solver);

/// Support vectors by the defining equality: indices whose constraint
/// holds tight, |y_i f(x_i) - (1 - xi_i)| <= sv_tolerance.
std::vector<std::size_t> support_vector_set(const SvmSolution& solution);

/// Support vectors by dual weight: indices with alpha_i > sv_tolerance.
/// At the exact optimum this is the same set as support_vector_set; it
/// is the form the impossibility measures consume.
std::vector<std::size_t> alpha_support_set(const SvmSolution& solution);

/// f(x) = sum_i alpha_i y_i k(x_i, x) + bias.
double decision_value(const SvmSolution& solution, std::span<const double> x);

/// True when deleting example j leaves the optimal objective value
/// unchanged, i.e. example j carries no weight in the solution. Tested
/// as |obj_full - obj_without_j| <= kkt_tolerance * (1 + |obj_full|);
/// both objectives are computed at a tightened internal tolerance so
/// solver error cannot swamp the comparison.
bool is_essential_support_vector(std::span<const LabeledExample> examples,
                                 const KernelConfig& kernel,
                                 const SolverConfig& solver, std::size_t j);

}  // namespace tcm
