#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "oracle.hpp"
#include "tcm/errors.hpp"
#include "tcm/svm.hpp"

using namespace tcm;

namespace {

SolverConfig solver_with_C(double C) {
    SolverConfig s;
    s.C = C;
    return s;
}

// Largest KKT residual of the stationarity conditions, max over
//   alpha_i = 0:  y_i f(x_i) - (1 - xi_i) >= -tol
//   alpha_i > 0:  |y_i f(x_i) - (1 - xi_i)| <= tol
double worst_kkt_residual(const SvmSolution& sol) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const LabeledExample& ex = sol.examples[i];
        double r = ex.label * decision_value(sol, ex.features) - (1.0 - sol.slacks[i]);
        if (sol.alphas[i] > 0.0) {
            worst = std::max(worst, std::abs(r));
        } else {
            worst = std::max(worst, std::max(0.0, -r));
        }
    }
    return worst;
}

}  // namespace

// Two points {(0, -1), (2, +1)} admit a closed form: the plane sits at
// x = 1, w = 4C/(1+4C), b = -w, both slacks 1/(1+4C), both dual weights
// 2C/(1+4C), objective 2C/(1+4C).
TEST_CASE("two point problem matches its closed form") {
    std::vector<LabeledExample> examples = {{{0.0}, -1}, {{2.0}, 1}};
    for (double C : {0.5, 1.0, 10.0, 1e4}) {
        CAPTURE(C);
        SvmSolution sol = solve_soft_margin(examples, {}, solver_with_C(C));
        const double w = 4.0 * C / (1.0 + 4.0 * C);
        CHECK(sol.bias == doctest::Approx(-w).epsilon(1e-9));
        CHECK(sol.objective == doctest::Approx(2.0 * C / (1.0 + 4.0 * C)).epsilon(1e-9));
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(sol.slacks[i] == doctest::Approx(1.0 / (1.0 + 4.0 * C)).epsilon(1e-8));
            CHECK(sol.alphas[i] == doctest::Approx(2.0 * C / (1.0 + 4.0 * C)).epsilon(1e-8));
        }
        // The separating value sits midway regardless of C.
        double mid[] = {1.0};
        CHECK(std::abs(decision_value(sol, mid)) < 1e-8);
        CHECK(sol.sv_indices == std::vector<std::size_t>{0, 1});
    }
}

TEST_CASE("hard margin limit keeps the objective under one half") {
    std::vector<LabeledExample> examples = {{{0.0}, -1}, {{2.0}, 1}};
    SvmSolution sol = solve_soft_margin(examples, {}, solver_with_C(1e4));
    CHECK(sol.objective < 0.5);
    CHECK(sol.objective == doctest::Approx(0.5).epsilon(1e-3));
}

// {(-1,-1), (+1,+1), (+3,+1)}: the far positive point is slack-free and
// carries no dual weight, so only the inner pair supports the solution.
TEST_CASE("an interior point gets zero dual weight") {
    std::vector<LabeledExample> examples = {{{-1.0}, -1}, {{1.0}, 1}, {{3.0}, 1}};
    SvmSolution sol = solve_soft_margin(examples, {}, solver_with_C(100.0));
    const double w = 400.0 / 401.0;
    CHECK(sol.bias == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sol.alphas[2] == 0.0);
    CHECK(sol.slacks[2] == 0.0);
    CHECK(sol.alphas[0] == doctest::Approx(2.0 * 100.0 / 401.0).epsilon(1e-8));
    double probe[] = {3.0};
    CHECK(decision_value(sol, probe) == doctest::Approx(3.0 * w).epsilon(1e-8));
    CHECK(sol.sv_indices == std::vector<std::size_t>{0, 1});
    CHECK(alpha_support_set(sol) == std::vector<std::size_t>{0, 1});
}

// One hundred points in two horizontal rows, every one the same
// distance from the separating plane: all of them are support vectors
// with equal weight, and the closed form pins the whole solution.
TEST_CASE("paired rows: every point is a tight support vector") {
    std::vector<LabeledExample> examples = helpers::paired_rows(50);
    const double C = 1.0;
    SolverConfig tight = solver_with_C(C);
    tight.kkt_tolerance = 1e-12;  // closed-form comparisons at 1e-10
    SvmSolution sol = solve_soft_margin(examples, {}, tight);

    const double w2 = 200.0 * C / (1.0 + 200.0 * C);
    const double xi = 1.0 / (1.0 + 200.0 * C);
    CHECK(sol.objective ==
          doctest::Approx(100.0 * C / (1.0 + 200.0 * C)).epsilon(1e-10));
    CHECK(sol.bias == doctest::Approx(0.0).epsilon(1e-9));
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(sol.slacks[i] == doctest::Approx(xi).epsilon(1e-7));
        CHECK(sol.alphas[i] == doctest::Approx(2.0 * C * xi).epsilon(1e-7));
    }
    CHECK(sol.sv_indices.size() == 100);
    CHECK(support_vector_set(sol).size() == 100);
    CHECK(alpha_support_set(sol).size() == 100);

    // The plane is horizontal: f depends on the second coordinate only.
    double on_plane[] = {25.0, 0.0};
    double above[] = {25.0, 1.0};
    CHECK(std::abs(decision_value(sol, on_plane)) < 1e-8);
    CHECK(decision_value(sol, above) == doctest::Approx(w2).epsilon(1e-8));

    // Independent confirmation by the primal reference minimizer.
    oracle::Solution ref = oracle::minimize(examples, C, {});
    CHECK(ref.objective == doctest::Approx(sol.objective).epsilon(1e-10));
}

TEST_CASE("paired rows: no deletion leaves the objective unchanged") {
    // Deleting any example releases its slack cost, so no point is
    // essential. Spot-check a few indices; the acceptance suite sweeps
    // all one hundred.
    std::vector<LabeledExample> examples = helpers::paired_rows(50);
    SolverConfig solver;
    for (std::size_t j : {0u, 49u, 50u, 99u}) {
        CAPTURE(j);
        CHECK_FALSE(is_essential_support_vector(examples, {}, solver, j));
    }
}

// {(-1,-1), (-2,-1), (+1,+1), (+2,+1)}: the outer points sit strictly
// outside the margin, so deleting one changes nothing (essential),
// while deleting an inner point moves the optimum.
TEST_CASE("essential support vector flags deletable points") {
    std::vector<LabeledExample> examples = {
        {{-1.0}, -1}, {{-2.0}, -1}, {{1.0}, 1}, {{2.0}, 1}};
    SolverConfig solver;

    CHECK(is_essential_support_vector(examples, {}, solver, 1));
    CHECK(is_essential_support_vector(examples, {}, solver, 3));
    CHECK_FALSE(is_essential_support_vector(examples, {}, solver, 0));
    CHECK_FALSE(is_essential_support_vector(examples, {}, solver, 2));

    // The reference minimizer confirms both objective relations.
    oracle::Solution full = oracle::minimize(examples, solver.C, {});
    std::vector<LabeledExample> without_outer = {examples[0], examples[2], examples[3]};
    std::vector<LabeledExample> without_inner = {examples[1], examples[2], examples[3]};
    oracle::Solution outer = oracle::minimize(without_outer, solver.C, {});
    oracle::Solution inner = oracle::minimize(without_inner, solver.C, {});
    CHECK(std::abs(full.objective - outer.objective) < 1e-10);
    CHECK(std::abs(full.objective - inner.objective) > 1e-3);
}

TEST_CASE("deleting the only representative of a class is refused") {
    std::vector<LabeledExample> examples = {{{0.0}, -1}, {{1.0}, 1}, {{2.0}, 1}};
    CHECK_THROWS_AS(is_essential_support_vector(examples, {}, {}, 0), SingleClassInput);
}

TEST_CASE("solver agrees with the primal reference on random instances") {
    RandomStream rng(2024);
    int checked_linear = 0;
    int checked_quadratic = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t l = 3 + rng.next_index(4);   // 3..6
        std::size_t n = 1 + rng.next_index(2);   // 1..2
        double C = 0.5 + 2.0 * rng.next_unit();
        std::vector<LabeledExample> examples =
            helpers::random_instance(rng, l, n, 1.5);

        KernelConfig kernel;
        oracle::FeatureMap map;
        if (trial % 2 == 0) {
            kernel.kind = KernelKind::linear;
            map.kind = oracle::FeatureMap::Kind::identity;
            ++checked_linear;
        } else {
            kernel.kind = KernelKind::polynomial;
            kernel.degree = 2;
            kernel.coef0 = 1.0;
            map.kind = oracle::FeatureMap::Kind::quadratic;
            map.coef0 = 1.0;
            ++checked_quadratic;
        }

        SvmSolution sol = solve_soft_margin(examples, kernel, solver_with_C(C));
        oracle::Solution ref = oracle::minimize(examples, C, map);
        CAPTURE(trial);
        CHECK(std::abs(sol.objective - ref.objective) <=
              1e-6 * (1.0 + std::abs(ref.objective)));
        for (std::size_t i = 0; i < l; ++i) {
            CHECK(sol.alphas[i] == doctest::Approx(ref.alphas[i]).epsilon(5e-5));
        }
        CHECK(sol.sv_indices ==
              oracle::support_set(ref, examples, sol.solver.sv_tolerance));
    }
    CHECK(checked_linear == 20);
    CHECK(checked_quadratic == 20);
}

TEST_CASE("solutions satisfy the stationarity conditions") {
    RandomStream rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t l = 4 + rng.next_index(20);
        std::size_t n = 1 + rng.next_index(4);
        std::vector<LabeledExample> examples = helpers::random_instance(rng, l, n, 2.0);

        KernelConfig kernel;
        switch (trial % 3) {
            case 0: kernel.kind = KernelKind::linear; break;
            case 1: kernel.kind = KernelKind::polynomial; break;
            default: kernel.kind = KernelKind::rbf; kernel.gamma = 0.7; break;
        }
        SvmSolution sol = solve_soft_margin(examples, kernel, solver_with_C(2.0));
        CAPTURE(trial);

        // Dual feasibility and the slack identity.
        double balance = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            CHECK(sol.alphas[i] >= 0.0);
            CHECK(sol.slacks[i] == sol.alphas[i] / (2.0 * sol.solver.C));
            balance += sol.alphas[i] * examples[i].label;
        }
        CHECK(std::abs(balance) < 1e-12);
        CHECK(worst_kkt_residual(sol) < 1e-6);
        CHECK_FALSE(support_vector_set(sol).empty());
        CHECK(support_vector_set(sol) == sol.sv_indices);
    }
}

TEST_CASE("the solution attaches to examples, not positions") {
    RandomStream rng(31);
    std::vector<LabeledExample> examples = helpers::random_instance(rng, 12, 3, 1.0);
    KernelConfig kernel;
    kernel.kind = KernelKind::rbf;
    SolverConfig tight;
    tight.kkt_tolerance = 1e-11;  // permutation invariance holds at the optimum
    SvmSolution base = solve_soft_margin(examples, kernel, tight);

    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int round = 0; round < 3; ++round) {
        rng.shuffle(order);
        std::vector<LabeledExample> permuted;
        for (std::size_t idx : order) permuted.push_back(examples[idx]);
        SvmSolution sol = solve_soft_margin(permuted, kernel, tight);

        CHECK(sol.objective == doctest::Approx(base.objective).epsilon(1e-9));
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            CHECK(sol.alphas[pos] == doctest::Approx(base.alphas[order[pos]])
                                         .epsilon(1e-6)
                                         .scale(1.0));
        }
        // Membership of the weighted support set transfers pointwise.
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            bool was = base.alphas[order[pos]] > base.solver.sv_tolerance;
            bool now = sol.alphas[pos] > sol.solver.sv_tolerance;
            CHECK(was == now);
        }
    }
}

TEST_CASE("duplicating every example is exactly a doubled slack penalty") {
    // With quadratic slacks the two copies of a constraint share its
    // violation, so the duplicated problem and the original at 2C have
    // the same weight vector, bias and objective; each copy carries
    // half the original dual coefficient.
    RandomStream rng(57);
    std::vector<LabeledExample> examples = helpers::random_instance(rng, 10, 2, 3.0);
    std::vector<LabeledExample> doubled = examples;
    doubled.insert(doubled.end(), examples.begin(), examples.end());

    SolverConfig at_C;
    at_C.C = 1.0;
    at_C.kkt_tolerance = 1e-11;
    SolverConfig at_2C = at_C;
    at_2C.C = 2.0;
    SvmSolution dup = solve_soft_margin(doubled, {}, at_C);
    SvmSolution two_c = solve_soft_margin(examples, {}, at_2C);

    CHECK(dup.objective == doctest::Approx(two_c.objective).epsilon(1e-9));
    CHECK(dup.bias == doctest::Approx(two_c.bias).epsilon(1e-7));
    for (std::size_t i = 0; i < examples.size(); ++i) {
        double half = 0.5 * two_c.alphas[i];
        CHECK(dup.alphas[i] == doctest::Approx(half).epsilon(1e-6).scale(1.0));
        CHECK(dup.alphas[i + examples.size()] ==
              doctest::Approx(half).epsilon(1e-6).scale(1.0));
    }
    for (int probe = 0; probe < 20; ++probe) {
        std::vector<double> x = helpers::random_point(rng, 2, 2.0);
        CHECK(decision_value(dup, x) ==
              doctest::Approx(decision_value(two_c, x)).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("input validation") {
    SUBCASE("empty and single class inputs") {
        CHECK_THROWS_AS(solve_soft_margin({}, {}, {}), SingleClassInput);
        std::vector<LabeledExample> single = {{{0.0}, 1}, {{1.0}, 1}};
        CHECK_THROWS_AS(solve_soft_margin(single, {}, {}), SingleClassInput);
    }
    SUBCASE("ragged features") {
        std::vector<LabeledExample> ragged = {{{0.0}, -1}, {{1.0, 2.0}, 1}};
        CHECK_THROWS_AS(solve_soft_margin(ragged, {}, {}), DimensionMismatch);
    }
    SUBCASE("query dimension") {
        std::vector<LabeledExample> examples = {{{0.0, 0.0}, -1}, {{1.0, 1.0}, 1}};
        SvmSolution sol = solve_soft_margin(examples, {}, {});
        std::vector<double> short_query = {1.0};
        CHECK_THROWS_AS(decision_value(sol, short_query), DimensionMismatch);
    }
    SUBCASE("config ranges") {
        std::vector<LabeledExample> examples = {{{0.0}, -1}, {{1.0}, 1}};
        SolverConfig bad;
        bad.C = 0.0;
        CHECK_THROWS_AS(solve_soft_margin(examples, {}, bad), InvalidConfig);
        KernelConfig kernel;
        kernel.kind = KernelKind::rbf;
        kernel.gamma = -1.0;
        CHECK_THROWS_AS(solve_soft_margin(examples, kernel, {}), InvalidConfig);
        kernel = {};
        kernel.kind = KernelKind::polynomial;
        kernel.degree = 0;
        CHECK_THROWS_AS(solve_soft_margin(examples, kernel, {}), InvalidConfig);
    }
    SUBCASE("iteration budget") {
        RandomStream rng(5);
        std::vector<LabeledExample> examples = helpers::random_instance(rng, 20, 2, 0.5);
        SolverConfig strangled;
        strangled.max_iterations = 1;
        CHECK_THROWS_AS(solve_soft_margin(examples, {}, strangled), ConvergenceFailure);
    }
}

TEST_CASE("duplicate examples are legal for the solver itself") {
    std::vector<LabeledExample> examples = {{{0.0}, -1}, {{0.0}, -1}, {{2.0}, 1}};
    SvmSolution sol = solve_soft_margin(examples, {}, {});
    CHECK(worst_kkt_residual(sol) < 1e-6);
    // The duplicated pair shares one role; their weights sum to the
    // single point's weight in the deduplicated problem by symmetry.
    CHECK(sol.alphas[0] == doctest::Approx(sol.alphas[1]).epsilon(1e-6));
}
